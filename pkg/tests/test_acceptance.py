"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the terminal summary (see ``conftest.py``); every test
also asserts its criterion, so a failing criterion fails its test.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate

from mmwsec import SystemConfig, an, mrt
from mmwsec._common import STATUS_SUSPENDED, moment_sum
from mmwsec.experiments import preset, run_many
from mmwsec.geometry import AngularGrid, common_path_pmf, omega_width
from mmwsec.montecarlo import McParams, mc_common_path_pmf, mc_metric, truncation_check

pytestmark = pytest.mark.acceptance


# --- shared generators ------------------------------------------------------

def random_triples(n=20, seed=11):
    """Valid (n_t, l_d, l_e): max(l_d, l_e) <= n_t/2 and n_t - l_d even."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        n_t = int(rng.integers(8, 129))
        l_d = int(rng.integers(1, n_t // 2 + 1))
        l_e = int(rng.integers(1, n_t // 2 + 1))
        if (n_t - l_d) % 2 == 0:
            out.append((n_t, l_d, l_e))
    return out


def mc_grid(n=40, seed=2024):
    """Points (cfg, mu, s) around the SOP, Laplace and throughput figure neighbourhoods.

    r_s is chosen so the non-colluding MRT SOP lands in [0.05, 0.8] and s so
    the Laplace exponent lands in [0.1, 2], which keeps every estimate away
    from the degenerate values 0 and 1.
    """
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        l_d = int(rng.choice(np.arange(10, 31, 2)))
        l_e = int(rng.integers(4, 31))
        cfg = SystemConfig(
            p_dbm=float(rng.uniform(10, 30)), r_d=float(rng.choice([40.0, 50.0, 60.0])), l_d=l_d, l_e=l_e,
            lambda_e=float(10 ** rng.uniform(-6, math.log10(5e-5))), eta=float(rng.uniform(0.5, 0.95)),
        )
        pmf = cfg.pmf()
        mu = float(l_d * rng.uniform(0.75, 1.5))
        p = float(rng.uniform(0.05, 0.8))
        log_cdf1 = -math.log(mrt.cdf_xe_mrt(1.0, mu, cfg, pmf))
        x = (log_cdf1 / -math.log1p(-p)) ** (1 / cfg.beta)
        if not x < cfg.eta * cfg.c_hat * mu:
            continue
        r_s = math.log2((cfg.c_hat * mu + 1) / (x + 1))
        r_t = math.log2(1 + cfg.c_hat * l_d) * float(rng.uniform(0.7, 1.2))
        cfg = cfg.replace(r_s=r_s, r_t=max(r_t, r_s))
        if cfg.eta * cfg.c_hat * mu <= cfg.T - 1:
            continue
        target = float(rng.uniform(0.1, 2.0))
        m = moment_sum(pmf, cfg.beta)
        s = (target / (math.pi * cfg.lambda_e * math.gamma(1 - cfg.beta) * math.gamma(1 + cfg.beta) * m)) ** (
            1 / cfg.beta)
        pts.append((cfg, mu, s))
    return pts


def levy_tail(mu, cfg, pmf):
    """Exact colluding MRT SOP for alpha = 4 (the aggregate leakage is Levy-stable)."""
    beta = cfg.beta
    const = math.pi * cfg.lambda_e * math.gamma(1 - beta) * math.gamma(1 + beta) * moment_sum(pmf, beta)
    y = mu * mrt._redundancy_point(mu, cfg, 1.0) / cfg.a
    return math.erf(const / (2.0 * math.sqrt(y)))


def random_feasible(rng, mu_scale=(0.5, 2.0)):
    while True:
        cfg = SystemConfig(
            p_dbm=float(rng.uniform(10, 45)), lambda_e=float(10 ** rng.uniform(-6, -4)),
            epsilon=float(rng.uniform(1e-3, 0.2)), r_d=float(rng.uniform(30, 70)),
            l_e=int(rng.choice([6, 10, 20, 30])),
        )
        pmf = cfg.pmf()
        mu = float(cfg.l_d * rng.uniform(*mu_scale))
        yield cfg, pmf, mu


# --- criteria ---------------------------------------------------------------

def test_criterion_01_common_path_pmf(acceptance):
    t0 = time.perf_counter()
    sums, ranges, sym, tvs = [], [], [], []
    for k, (n_t, l_d, l_e) in enumerate(random_triples()):
        g = AngularGrid(n_t)
        pmf = common_path_pmf(g, l_d, l_e)
        sums.append(abs(math.fsum(pmf.probs) - 1.0))
        ranges.append(bool(np.all((pmf.probs >= 0) & (pmf.probs <= 1))))
        sym.append(max((abs(omega_width(g, l_d, i) - omega_width(g, l_d, l_d - i)) for i in range(1, l_d)),
                       default=0.0))
        hist = mc_common_path_pmf(g, l_d, l_e, 10**6, seed=k)
        tvs.append(0.5 * float(np.abs(hist - pmf.probs).sum()))
    elapsed = time.perf_counter() - t0
    triples = random_triples()
    worst = int(np.argmax(tvs))
    # an eavesdropper window can miss the destination window only if l_d + 2 l_e <= n_t
    roomy = [tv for (n_t, l_d, l_e), tv in zip(triples, tvs) if l_d + 2 * l_e <= n_t]
    acceptance(1, [
        ("sum", max(sums) <= 1e-12, f"max |sum-1| = {max(sums):.1e}"),
        ("range", all(ranges), "entries in [0,1]"),
        ("symmetry", max(sym) <= 1e-12, f"max omega asymmetry = {max(sym):.1e}"),
        ("mc_tv", max(tvs) <= 0.01,
         f"TV <= 0.01 on {sum(t <= 0.01 for t in tvs)}/20, worst {tvs[worst]:.4f} at {triples[worst]}"),
        ("runtime", elapsed < 60, f"{elapsed:.0f} s"),
    ], info=f"triples with l_d + 2 l_e <= n_t: TV <= 0.01 on {sum(t <= 0.01 for t in roomy)}/{len(roomy)}, "
            f"max {max(roomy):.4f}")


def test_criterion_02_closed_form_vs_mc(acceptance):
    t0 = time.perf_counter()
    names = ["pc_mrt", "pc_an", "sop_mrt", "sop_an", "lap_mrt", "lap_an", "col_mrt", "col_an"]
    passes = dict.fromkeys(names, 0)
    bound_pass = levy_pass = 0
    grid = mc_grid()
    for cfg, mu, s in grid:
        pmf = cfg.pmf()
        s_an = s * mu / (cfg.eta * cfg.a)
        cases = [
            ("pc_mrt", "connection", "mrt", {}, mrt.connection_probability_mrt(cfg.replace(eta=1.0))),
            ("pc_an", "connection", "an", {}, an.connection_probability_an(cfg)),
            ("sop_mrt", "sop_noncolluding", "mrt", {}, mrt.sop_noncolluding_mrt(mu, cfg, pmf)),
            ("sop_an", "sop_noncolluding", "an", {}, an.sop_noncolluding_an(mu, cfg, pmf, cdf="exact")),
            ("lap_mrt", "laplace_point", "mrt", {"s": s}, mrt.laplace_ie_mrt(s, cfg, pmf)),
            ("lap_an", "laplace_point", "an", {"s": s_an}, an.laplace_ie_an(s_an, mu, cfg, pmf)),
            ("col_mrt", "sop_colluding", "mrt", {}, mrt.sop_colluding_mrt(mu, cfg, pmf)),
            ("col_an", "sop_colluding", "an", {}, an.sop_colluding_an(mu, cfg, pmf)),
        ]
        for name, metric, scheme, kw, value in cases:
            est = mc_metric(metric, McParams(cfg=cfg, scheme=scheme, mu=mu, **kw), 10**5, seed=1)
            indicator = metric != "laplace_point"
            passes[name] += est.within(value, bernoulli=indicator)
            if name == "sop_an":
                bound_pass += est.within(an.sop_noncolluding_an(mu, cfg, pmf), bernoulli=True)
            if name == "col_mrt":
                levy_pass += est.within(levy_tail(mu, cfg, pmf), bernoulli=True)
    elapsed = time.perf_counter() - t0
    n = len(grid)
    checks = [(name, passes[name] >= 0.95 * n, f"{name} {passes[name]}/{n}") for name in names]
    checks.append(("runtime", elapsed < 600, f"{elapsed:.0f} s"))
    acceptance(2, checks, info=f"Jensen-bound AN SOP {bound_pass}/{n}; exact colluding MRT tail {levy_pass}/{n}")


def test_criterion_03_gamma_approximation_convergence(acceptance):
    spec = preset("fig11", mc=None)[0]
    cfg = spec.base.replace(r_s=0.2)
    pmf = cfg.pmf()
    mu = float(cfg.l_d)
    est = mc_metric("sop_colluding", McParams(cfg=cfg, scheme="mrt", mu=mu), 10**6, seed=7)
    approx = [mrt.sop_colluding_mrt(mu, cfg.replace(n_approx=n), pmf) for n in range(1, 6)]
    gaps = [abs(a - est.mean) for a in approx]
    ok = all(g2 <= g1 for g1, g2 in zip(gaps, gaps[1:]))
    acceptance(3, [("monotone", ok, "|a_N - MC| = " + ", ".join(f"{g:.2e}" for g in gaps))],
               info=f"MC {est.mean:.5f} +- {est.std_error:.1e}")


def test_criterion_04_jensen_bound(acceptance):
    ordered, worst = True, {}
    for spec in preset("fig3", mc=None):
        for _, cfg, cond in spec.point_configs():
            pmf = cfg.pmf()
            x, mu = cond["x"], cond["mu"]
            bound = an.cdf_xe_an_bound(x, mu, cfg, pmf)
            exact = an.cdf_xe_an_exact(x, mu, cfg, pmf)
            ordered &= bound >= exact
            if exact > 0:
                worst[cfg.eta] = max(worst.get(cfg.eta, 0.0), (bound - exact) / exact)
    gap = max(worst.values())
    acceptance(4, [
        ("ordering", ordered, "bound >= exact everywhere" if ordered else "ordering violated"),
        ("gap", gap <= 0.05, "max rel gap " + ", ".join(f"eta={e}: {g:.1%}" for e, g in sorted(worst.items()))),
    ])


def test_criterion_05_optimizer(acceptance):
    rng = np.random.default_rng(5)
    etas = np.linspace(0.0, 1.0, 1001)
    bad = {"eta": 0, "rate": 0, "slope": 0, "rho": 0, "concave": 0}
    count = 0
    for cfg, pmf, mu in random_feasible(rng):
        opt = an.optimal_eta(mu, cfg, pmf)
        if opt.status == STATUS_SUSPENDED:
            continue
        count += 1
        rho = np.array([an.solve_rho(e, mu, cfg, pmf).rho for e in etas])
        rates = np.log2((1 + etas * cfg.c_hat * mu) / (1 + etas * rho))
        k = int(np.argmax(rates))
        bad["eta"] += abs(opt.eta_star - etas[k]) > 2e-3
        bad["rate"] += not (rates[k] - 1e-12 <= opt.rate_at_opt <= rates[k] + 1e-6)
        if not opt.boundary_case:
            bad["slope"] += abs(an.an_rate_derivative(opt.eta_star, mu, cfg, pmf)) > 1e-6
        bad["rho"] += not (np.all(np.diff(rho) > 0) and np.all(np.diff(rho, 2) >= -1e-9 * rho.max()))
        bad["concave"] += not np.all(np.diff(rates, 2) <= 1e-12)
        if count == 50:
            break
    acceptance(5, [(k, v == 0, f"{k} failures {v}/50") for k, v in bad.items()])


def test_criterion_06_corollaries(acceptance):
    checks = []
    base = SystemConfig(p_dbm=10.0, lambda_e=5e-6)
    for field, values, sign in [("lambda_e", (1e-6, 5e-6, 2e-5), -1), ("r_d", (40.0, 50.0, 60.0), -1),
                                ("epsilon", (0.001, 0.01, 0.1), 1)]:
        taus = [mrt.secrecy_throughput_mrt(c, c.pmf()) for c in (base.replace(**{field: v}) for v in values)]
        checks.append((f"tau_{field}", all(sign * (b - a) > 0 for a, b in zip(taus, taus[1:])),
                       f"tau vs {field} " + ", ".join(f"{t:.4g}" for t in taus)))
    cfg = SystemConfig(p_dbm=20.0, lambda_e=1e-5)
    pmf = cfg.pmf()
    lim = mrt.secrecy_throughput_mrt_high_power(cfg, pmf)
    at60 = mrt.secrecy_throughput_mrt(cfg.replace(p_dbm=60.0), pmf)
    checks.append(("limit", abs(at60 - lim) <= 0.01 * lim, f"60 dBm {at60:.6g} vs limit {lim:.6g}"))
    lims = [mrt.secrecy_throughput_mrt_high_power(cfg.replace(p_dbm=p), pmf) for p in (0.0, 30.0, 60.0, 90.0)]
    checks.append(("invariant", len(set(lims)) == 1, "limit identical for P in {0, 30, 60, 90} dBm"))
    base = SystemConfig(p_dbm=40.0, lambda_e=1e-5)
    for field, values, sign in [("lambda_e", (1e-5, 3e-5, 1e-4), -1), ("r_d", (40.0, 50.0, 60.0), -1),
                                ("epsilon", (0.001, 0.01, 0.1), 1)]:
        e = [an.optimal_eta(20.0, c, c.pmf()).eta_star for c in (base.replace(**{field: v}) for v in values)]
        checks.append((f"eta_{field}", all(sign * (b - a) >= 0 for a, b in zip(e, e[1:])),
                       f"eta* vs {field} " + ", ".join(f"{v:.4f}" for v in e)))
    acceptance(6, checks)


def test_criterion_07_reductions(acceptance):
    cfg = SystemConfig(p_dbm=20.0, lambda_e=1e-5, eta=1.0)
    pmf = cfg.pmf()
    mu = 20.0

    def close(a, b):
        return abs(a - b) <= 1e-9

    pairs = [("connection", an.connection_probability_an(cfg), mrt.connection_probability_mrt(cfg))]
    for x in (1e-2, 1.0, 50.0):
        pairs.append((f"cdf_exact(x={x})", an.cdf_xe_an_exact(x, mu, cfg, pmf), mrt.cdf_xe_mrt(x, mu, cfg, pmf)))
        pairs.append((f"cdf_bound(x={x})", an.cdf_xe_an_bound(x, mu, cfg, pmf), mrt.cdf_xe_mrt(x, mu, cfg, pmf)))
    sop_cfg = cfg.replace(r_s=2.0, r_t=6.0)
    pairs += [
        ("sop_exact", an.sop_noncolluding_an(mu, sop_cfg, pmf, cdf="exact"), mrt.sop_noncolluding_mrt(mu, sop_cfg, pmf)),
        ("sop_bound", an.sop_noncolluding_an(mu, sop_cfg, pmf), mrt.sop_noncolluding_mrt(mu, sop_cfg, pmf)),
        ("sop_colluding", an.sop_colluding_an(mu, sop_cfg, pmf), mrt.sop_colluding_mrt(mu, sop_cfg, pmf)),
    ]
    for s in (1e-3, 0.1, 10.0):
        pairs.append((f"laplace(s={s})", an.laplace_ie_an(s, mu, cfg, pmf),
                      mrt.laplace_ie_mrt(s * cfg.a / mu, cfg, pmf)))
    failing = [name for name, a, b in pairs if not close(a, b)]
    worst = max(abs(a - b) for _, a, b in pairs)

    free = sop_cfg.replace(lambda_e=0.0, eta=0.5)
    zeros = [mrt.sop_noncolluding_mrt(mu, free, pmf), mrt.sop_colluding_mrt(mu, free, pmf),
             an.sop_noncolluding_an(mu, free, pmf), an.sop_noncolluding_an(mu, free, pmf, cdf="exact"),
             an.sop_colluding_an(mu, free, pmf)]
    ones = [mrt.laplace_ie_mrt(1.0, free, pmf), an.laplace_ie_an(1.0, mu, free, pmf)]
    acceptance(7, [
        ("eta1", not failing, f"eta=1 mismatches {failing or 'none'} (max abs diff {worst:.2e})"),
        ("lambda0", all(z == 0.0 for z in zeros) and all(o == 1.0 for o in ones),
         "lambda=0 gives SOP 0 and Laplace 1"),
    ])


def test_criterion_08_optimal_rate_self_consistency(acceptance):
    rng = np.random.default_rng(8)
    errs = []
    for cfg, pmf, _ in random_feasible(rng):
        delta = mrt.mrt_threshold(cfg, pmf)
        mu = float(delta * rng.uniform(1.05, 5.0))
        res = mrt.max_secrecy_rate_mrt(mu, cfg, pmf)
        if res.rate <= 0:
            continue
        c_d = math.log2(1 + cfg.c_hat * mu)
        sop = mrt.sop_noncolluding_mrt(mu, cfg.replace(r_s=res.rate, r_t=c_d), pmf)
        errs.append(abs(sop - cfg.epsilon))
        if len(errs) == 20:
            break
    acceptance(8, [("epsilon", max(errs) <= 1e-9, f"max |SOP - eps| = {max(errs):.1e} over 20 gains")])


def test_criterion_09_determinism(acceptance):
    first = run_many(preset("fig4")).to_csv()
    second = run_many(preset("fig4")).to_csv()
    rels = []
    for spec in preset("fig4", mc=None)[:2]:
        for _, cfg, cond in spec.point_configs()[::5]:
            for scheme in ("mrt", "an"):
                rels.append(truncation_check(f"sop_{spec.eavesdropper_model}",
                                             McParams(cfg=cfg, scheme=scheme, mu=cond["mu"]), 20000, seed=9)[2])
    # feasible neighbourhood of the same figure: higher power, lower secrecy rate, denser eavesdroppers
    near = preset("fig4", mc=None)[0].base.replace(p_dbm=25.0, r_s=1.0, lambda_e=1e-4)
    for model in ("noncolluding", "colluding"):
        for scheme in ("mrt", "an"):
            for l_d in (10, 20, 30):
                params = McParams(cfg=near.replace(l_d=l_d), scheme=scheme, mu=float(l_d))
                rels.append(truncation_check(f"sop_{model}", params, 20000, seed=9)[2])
    acceptance(9, [
        ("bytes", first == second, "fig4 CSV byte-identical across two runs"),
        ("r_max", max(rels) < 5e-3, f"max relative change on doubling R_max {max(rels):.1e} ({len(rels)} points)"),
    ])


def test_criterion_10_throughput_quadrature(acceptance):
    rng = np.random.default_rng(10)
    errs = []
    for _ in range(10):
        cfg = SystemConfig(
            p_dbm=float(rng.uniform(0, 40)), lambda_e=float(10 ** rng.uniform(-6, -4)),
            epsilon=float(rng.uniform(1e-3, 0.2)), r_d=float(rng.uniform(30, 70)),
            l_d=int(rng.choice([10, 20, 30])), l_e=int(rng.choice([6, 10, 20, 30])),
        )
        pmf = cfg.pmf()
        delta = mrt.mrt_threshold(cfg, pmf)
        dens = lambda x, l_d=cfg.l_d: math.exp((l_d - 1) * math.log(x) - x - math.lgamma(l_d))
        f = lambda x: mrt.max_secrecy_rate_mrt(x, cfg, pmf).rate * dens(x)
        peak = max(delta, cfg.l_d - 1.0)
        val = (integrate.quad(f, delta, peak, epsabs=0, epsrel=1e-11, limit=200)[0]
               + integrate.quad(f, peak, math.inf, epsabs=0, epsrel=1e-11, limit=200)[0])
        got = mrt.secrecy_throughput_mrt(cfg, pmf)
        errs.append(abs(got - val) / val)
    acceptance(10, [("quad", max(errs) <= 1e-6, f"max rel err {max(errs):.1e} over 10 configs")])
