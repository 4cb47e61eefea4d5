"""Recompute the reference values frozen into the test suite.

Every number here comes from mpmath (30 digits) or scipy quadrature and does
not call into the package's evaluators, except to read config-derived
constants (a, c, pmf probabilities) that are themselves tested separately.

    python scripts/derive_oracles.py
"""

from __future__ import annotations

import math

import mpmath as mp
from scipy import integrate

from mmwsec import SystemConfig

mp.mp.dps = 30


def upper_gamma():
    out = {}
    for n, x in [(5, 3.7), (1, 0.25), (12, 30.0), (40, 2.0)]:
        out[(n, x)] = mp.quad(lambda t: t ** (n - 1) * mp.e ** (-t), [x, mp.inf])
    return out


def e1():
    # shifted to s = t - x so the integrand is O(1) even for large x
    return {x: mp.e ** (-x) * mp.quad(lambda s: mp.e ** (-s) / (x + s), [0, 1, 10, mp.inf]) for x in (1.0, 0.01, 7.5, 60.0)}


def scaled_expn():
    return {(n, x): mp.e**x * mp.expint(n, x) for n, x in [(1, 0.5), (3, 2.0), (10, 50.0), (20, 50.0), (7, 1e-3)]}


def v_aux():
    def v(x, m):
        f = lambda y: mp.log(1 + x * y) / mp.log(2) * y ** (m - 1) * mp.e ** (-y) / mp.factorial(m - 1)
        return mp.quad(f, [0, 1, 10, mp.inf])
    return {(x, m): v(x, m) for x, m in [(2.0, 3), (0.01, 20), (5.0, 1), (100.0, 10), (1e-4, 5)]}


def hyp2f1():
    def euler(a, b, c, z):
        # integral representation; valid for c > b > 0
        pre = mp.gamma(c) / (mp.gamma(b) * mp.gamma(c - b))
        return pre * mp.quad(lambda t: t ** (b - 1) * (1 - t) ** (c - b - 1) * (1 - z * t) ** (-a), [0, 0.5, 1])
    cases = [(3, 1.5, 9.5, -40), (0.5, 21.0, 41.0, -0.999), (0.5, 2.0, 41.0, -1e5), (2.0, 4.0, 4.5, -1e3),
             (0.5, 19.0, 21.0, -3.0), (0.5, 6.0, 21.0, -1.01), (0.5, 6.0, 21.0, -1.2758)]
    return {case: euler(*case) for case in cases}


def an_kernel():
    # (1/Gamma(Lc)) int_0^inf t^{Le+beta-1} (t+b)^{-(Le-Lc)} e^{-t} dt via Tricomi U
    out = {}
    for l_c, l_e, beta, b in [(2, 4, 0.5, 0.5), (5, 20, 0.5, 3.0), (1, 20, 0.5, 40.0), (10, 20, 2 / 3, 1e-3)]:
        a = l_e + beta
        n = l_e - l_c
        val = mp.gamma(a) * mp.mpf(b) ** (a - n) * mp.hyperu(a, a - n + 1, b) / mp.gamma(l_c)
        out[(l_c, l_e, beta, b)] = val
    return out


def pmf_values():
    # spec formula evaluated directly with mpmath arcsines
    out = {}
    for n_t, l_d, l_e in [(16, 4, 4), (99, 5, 3), (100, 20, 20), (100, 20, 5)]:
        m = mp.mpf(n_t) / 2
        psi = lambda i: (i - 1 - mp.mpf(n_t - 1) / 2) / m
        off = (n_t - l_d) // 2
        omega = lambda i: mp.asin(psi(off + i + 1)) - mp.asin(psi(off + i))
        l_l, l_u = min(l_d, l_e), max(l_d, l_e)
        p = [0] * (l_l + 1)
        for k in range(1, l_l):
            p[k] = 2 * omega(k) / mp.pi
        p[l_l] = sum(omega(i) for i in range(l_l, l_u + 1)) / mp.pi
        p[0] = 1 - sum(p[1:])
        out[(n_t, l_d, l_e)] = p
    return out


def laplace_an(cfg: SystemConfig, mu: float, s: float):
    """PGFL with u integrated out and the radial integral in closed form; 2-D quadrature over (mu_c, v)."""
    beta = cfg.beta
    z2 = cfg.eta * cfg.a / mu
    z3 = (1 - cfg.eta) * cfg.a / (cfg.n_t - cfg.l_d)
    pmf = cfg.pmf()
    radial = math.gamma(beta) * math.gamma(1 - beta) / cfg.alpha * 2 * math.pi
    total = 0.0
    for l_c in range(1, pmf.l_l + 1):
        n = cfg.l_e - l_c
        fc = lambda x: x ** (l_c - 1) * math.exp(-x) / math.gamma(l_c)
        if n == 0:
            g = lambda x: s * z2 * x * (s * z2 * x) ** (beta - 1) * fc(x)
            val = integrate.quad(g, 0, math.inf, epsabs=0, epsrel=1e-12, limit=500)[0]
        else:
            fv = lambda v: v ** (n - 1) * math.exp(-v) / math.gamma(n)
            g = lambda v, x: s * z2 * x * (s * z2 * x + z3 * v) ** (beta - 1) * fc(x) * fv(v)
            val = integrate.dblquad(g, 0, math.inf, 0, math.inf, epsabs=0, epsrel=1e-11)[0]
        total += pmf.probs[l_c] * val
    return math.exp(-cfg.lambda_e * radial * total)


def throughput_mrt_quad(cfg: SystemConfig):
    """E_mu[R*(mu)] by direct quadrature, with R* written out from its definition."""
    pmf = cfg.pmf()
    beta = cfg.beta
    moment = sum(pmf.probs[k] * math.exp(math.lgamma(k + beta) - math.lgamma(k)) for k in range(1, pmf.l_l + 1))
    varpi = (-math.pi * cfg.lambda_e * math.gamma(1 + beta) * moment / math.log1p(-cfg.epsilon)) ** (cfg.alpha / 2)
    z1 = varpi * cfg.a
    c_hat = cfg.c_hat
    delta = math.sqrt(z1 / c_hat)
    rate = lambda x: math.log2((1 + c_hat * x) / (1 + z1 / x))
    dens = lambda x: math.exp((cfg.l_d - 1) * math.log(x) - x - math.lgamma(cfg.l_d))
    return integrate.quad(lambda x: rate(x) * dens(x), delta, math.inf, epsabs=0, epsrel=1e-12, limit=500)[0]


def main():
    for name, fn in [("upper_gamma", upper_gamma), ("e1", e1), ("scaled_expn", scaled_expn), ("v_aux", v_aux),
                     ("hyp2f1", hyp2f1), ("an_kernel", an_kernel)]:
        print(f"# {name}")
        for k, v in fn().items():
            print(f"    ({k}, {mp.nstr(v, 17)}),")
    print("# pmf")
    for k, v in pmf_values().items():
        print(f"    {k}: [{', '.join(mp.nstr(x, 17) for x in v)}],")
    cfg = SystemConfig(p_dbm=20.0, l_d=20, l_e=20, lambda_e=1e-5, eta=0.5)
    print("# laplace_an (p_dbm=20, eta=0.5, mu=20)")
    for s in (1e-3, 1e-2, 1.0):
        print(f"    ({s}, {laplace_an(cfg, 20.0, s)!r}),")
    print("# throughput_mrt")
    for kw in [dict(p_dbm=10.0, lambda_e=5e-6), dict(p_dbm=30.0, lambda_e=1e-5, l_e=10), dict(p_dbm=0.0, l_d=10)]:
        print(f"    ({kw}, {throughput_mrt_quad(SystemConfig(**kw))!r}),")


if __name__ == "__main__":
    main()
