"""Monte Carlo simulator for the secrecy metrics, built from the SINR definitions.

Two sampling modes are available:

``analysis``
    Each eavesdropper's common-path count ``L_c`` is drawn from the closed-form
    pmf and ``mu_c ~ Gamma(L_c)``, ``u ~ Exp(1)``, ``v ~ Gamma(L_e - L_c)`` are
    independent of each other and of ``mu``. These are the assumptions behind
    the closed forms, so this mode is the validation reference.
``physical``
    The destination gain vector ``g_d`` is drawn with ``||g_d||^2 = mu``, every
    eavesdropper's path window follows from its position angle, and ``mu_c``,
    ``u``, ``v`` are computed from explicit complex gains. The gap to the
    analysis mode measures how tight the independence assumptions are.

Eavesdroppers form a PPP on the full plane, truncated to a disc. A ULA
cannot tell front from back, so the position angle is folded into
``[-pi/2, pi/2]``. Randomness is drawn per block of trials from
``SeedSequence(seed, spawn_key=(block, stream))``, so results do not depend
on the thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .config import SystemConfig
from .geometry import AngularGrid, CommonPathPmf, destination_path_set

METRICS = ("connection", "sop_noncolluding", "sop_colluding", "cdf_point", "laplace_point")
MODES = ("analysis", "physical")
BLOCK_SIZE = 1024
THREADS_ENV = "MMWSEC_THREADS"

# probability mass tolerated from eavesdroppers beyond the automatic truncation
# radius (max-type metrics). Sum-type metrics replace the far field by its mean
# and bound what is left: the second-order term of the Laplace exponent, and the
# far-field standard deviation relative to the colluding threshold.
TRUNCATION_TOL = 1e-6
LAPLACE_TRUNCATION_TOL = 1e-5
COLLUDING_TRUNCATION_TOL = 1e-3

_STREAM_MU = 0
_STREAM_GD = 1
_SHELL_OFFSET = 2


@dataclass(frozen=True)
class PppRealization:
    radii: np.ndarray
    angles: np.ndarray
    density: float
    r_max: float

    def __len__(self) -> int:
        return len(self.radii)


@dataclass(frozen=True)
class ChannelRealization:
    """One trial: the destination gain and per-eavesdropper channel statistics."""

    mu: float
    g_d: np.ndarray | None
    radii: np.ndarray
    l_c: np.ndarray
    mu_c: np.ndarray
    mu_p: np.ndarray
    u: np.ndarray
    v: np.ndarray
    windows: tuple = ()


@dataclass(frozen=True)
class McParams:
    """What to estimate: scheme, sampling mode and the conditioning point."""

    cfg: SystemConfig
    scheme: str = "mrt"
    mode: str = "analysis"
    mu: float | None = None
    x: float | None = None
    s: float | None = None
    r_max: float | None = None
    pmf: CommonPathPmf | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.scheme not in ("mrt", "an"):
            raise ValueError(f"scheme must be 'mrt' or 'an', got {self.scheme!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.r_max is not None and not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")

    @property
    def eta(self) -> float:
        return 1.0 if self.scheme == "mrt" else self.cfg.eta

    def get_pmf(self) -> CommonPathPmf:
        return self.pmf if self.pmf is not None else self.cfg.pmf()


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int
    r_max: float = math.nan
    mode: str = "analysis"

    def within(self, value: float, n_se: float = 3.0, bernoulli: bool = False) -> bool:
        """Whether ``value`` lies within ``n_se`` standard errors (exact match when SE is 0).

        With ``bernoulli=True`` the estimate is a proportion and the standard
        error is the binomial one under ``value``, ``sqrt(value (1 - value) / n)``.
        Unlike the sample SE it stays positive when no event was observed.
        """
        se = math.sqrt(value * (1.0 - value) / self.trials) if bernoulli else self.std_error
        return abs(value - self.mean) <= n_se * se + 1e-12


# ---------------------------------------------------------------------------
# Sampling primitives
# ---------------------------------------------------------------------------

def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _sample_shell(rng: np.random.Generator, lambda_e: float, r_in: float, r_out: float,
                  size: int | None = None):
    """Poisson points in the annulus ``r_in < r <= r_out``; returns counts, radii, folded angles."""
    mean = lambda_e * math.pi * (r_out**2 - r_in**2)
    counts = rng.poisson(mean, size=size)
    total = int(np.sum(counts))
    # area-uniform radius inside the annulus
    radii = np.sqrt(r_in**2 + (r_out**2 - r_in**2) * (1.0 - rng.random(total)))
    phi = rng.uniform(-math.pi, math.pi, total)
    angles = np.arcsin(np.sin(phi))
    return counts, radii, angles


def sample_ppp(lambda_e: float, r_max: float, rng_seed: int) -> PppRealization:
    """Eavesdropper positions within ``r_max``: full-plane PPP, angles folded to [-pi/2, pi/2]."""
    if not lambda_e >= 0:
        raise ValueError(f"lambda_e must be nonnegative, got {lambda_e}")
    if not r_max > 0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    rng = _rng(rng_seed, 0)
    _, radii, angles = _sample_shell(rng, lambda_e, 0.0, r_max)
    return PppRealization(radii=radii, angles=angles, density=lambda_e, r_max=r_max)


def _draw_l_c(rng: np.random.Generator, pmf: CommonPathPmf, size: int) -> np.ndarray:
    cdf = np.cumsum(pmf.probs)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(size), side="right").astype(np.int64)


def _overlaps(grid: AngularGrid, l_d: int, l_e: int, theta: np.ndarray):
    """Vectorized window placement: (window start, overlap start, overlap length)."""
    d = destination_path_set(grid, l_d)
    top = np.searchsorted(grid.angles(), theta, side="right")
    top = np.clip(top, l_e, grid.n_t)
    k_lo = top - l_e + 1
    lo = np.maximum(k_lo, d.start)
    hi = np.minimum(top, d.stop - 1)
    l_c = np.maximum(hi - lo + 1, 0)
    return k_lo, lo, l_c


def mc_common_path_pmf(grid: AngularGrid, l_d: int, l_e: int, samples: int, seed: int) -> np.ndarray:
    """Empirical distribution of ``L_c`` for a window anchored at a uniform ``theta_max``."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = _rng(seed, 0)
    theta = rng.uniform(-math.pi / 2, math.pi / 2, samples)
    _, _, l_c = _overlaps(grid, l_d, l_e, theta)
    counts = np.bincount(l_c, minlength=min(l_d, l_e) + 1)
    return counts / samples


def geometric_pmf_exact(grid: AngularGrid, l_d: int, l_e: int) -> np.ndarray:
    """Distribution the geometric sampler converges to, integrated cell by cell."""
    edges = np.concatenate([[-math.pi / 2], grid.angles(), [math.pi / 2]])
    widths = np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    _, _, l_c = _overlaps(grid, l_d, l_e, mids)
    return np.bincount(l_c, weights=widths / math.pi, minlength=min(l_d, l_e) + 1)


def _marks_analysis(rng, pmf: CommonPathPmf, l_e: int, n: int):
    l_c = _draw_l_c(rng, pmf, n)
    mu_c = rng.standard_gamma(l_c.astype(float))
    u = rng.standard_exponential(n)
    v = rng.standard_gamma((l_e - l_c).astype(float))
    return l_c, mu_c, u, v


def _unit_complex_normal(rng, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _draw_g_d(rng, mu: np.ndarray, l_d: int) -> np.ndarray:
    """Destination gains over its window, rescaled so that ``||g_d||^2 = mu``."""
    g = _unit_complex_normal(rng, (len(mu), l_d))
    norm2 = np.sum(np.abs(g) ** 2, axis=1)
    return g * np.sqrt(mu / norm2)[:, None]


def _marks_physical(rng, cfg: SystemConfig, grid: AngularGrid, g_d: np.ndarray,
                    owner: np.ndarray, angles: np.ndarray):
    """Common-path statistics from explicit gains for eavesdroppers at ``angles``."""
    n = len(angles)
    d_start = (cfg.n_t - cfg.l_d) // 2 + 1
    k_lo, lo, l_c = _overlaps(grid, cfg.l_d, cfg.l_e, angles)
    col = np.arange(cfg.l_d)[None, :] + d_start
    mask = (col >= lo[:, None]) & (col < (lo + l_c)[:, None])
    gd_rows = g_d[owner]
    gd_c = np.where(mask, gd_rows, 0.0)
    mu_c = np.sum(np.abs(gd_c) ** 2, axis=1)
    # eavesdropper gains on the shared paths, aligned with the destination window
    g_kc = np.where(mask, _unit_complex_normal(rng, (n, cfg.l_d)), 0.0)
    inner = np.sum(g_kc * np.conj(gd_c), axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(mu_c > 0, np.abs(inner) ** 2 / mu_c, 0.0)
    n_extra = cfg.l_e - l_c
    g_kn = _unit_complex_normal(rng, (n, cfg.l_e))
    mask_n = np.arange(cfg.l_e)[None, :] < n_extra[:, None]
    v = np.sum(np.where(mask_n, np.abs(g_kn) ** 2, 0.0), axis=1)
    return l_c, mu_c, u, v, k_lo


# ---------------------------------------------------------------------------
# SINRs
# ---------------------------------------------------------------------------

def _xi(cfg: SystemConfig, eta: float, mu, mu_c, u, v, radii):
    """Eavesdropper SINR; ``eta = 1`` gives the MRT SNR (AN term vanishes)."""
    path = radii ** (-cfg.alpha)
    signal = eta * cfg.a * mu_c * u * path / mu
    noise = (1.0 - eta) * cfg.a * path * v / (cfg.n_t - cfg.l_d) + 1.0
    return signal / noise


def _leakage(cfg: SystemConfig, scheme: str, eta: float, mu, mu_c, u, v, radii):
    """Per-eavesdropper Laplace summand: ``mu_c u r^-alpha`` (MRT) or ``z2 mu_c u / (z3 v + r^alpha)`` (AN)."""
    if scheme == "mrt":
        return mu_c * u * radii ** (-cfg.alpha)
    z2 = eta * cfg.a / mu
    z3 = (1.0 - eta) * cfg.a / (cfg.n_t - cfg.l_d)
    return z2 * mu_c * u / (z3 * v + radii**cfg.alpha)


def sample_channel(cfg: SystemConfig, mu: float, ppp: PppRealization, seed: int,
                   mode: str = "analysis", pmf: CommonPathPmf | None = None) -> ChannelRealization:
    """Draw the channel statistics of one trial for the eavesdroppers in ``ppp``."""
    rng = _rng(seed, 1)
    n = len(ppp)
    if mode == "analysis":
        pmf = pmf if pmf is not None else cfg.pmf()
        l_c, mu_c, u, v = _marks_analysis(rng, pmf, cfg.l_e, n)
        g_d, windows = None, ()
    elif mode == "physical":
        g_d = _draw_g_d(rng, np.array([mu]), cfg.l_d)
        l_c, mu_c, u, v, k_lo = _marks_physical(
            rng, cfg, cfg.grid(), g_d, np.zeros(n, dtype=np.int64), ppp.angles
        )
        g_d = g_d[0]
        windows = tuple(range(int(k), int(k) + cfg.l_e) for k in k_lo)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ChannelRealization(mu=mu, g_d=g_d, radii=ppp.radii, l_c=l_c, mu_c=mu_c,
                              mu_p=mu - mu_c, u=u, v=v, windows=windows)


def sinr_mrt(real: ChannelRealization, cfg: SystemConfig) -> tuple[float, np.ndarray]:
    """Destination SNR and per-eavesdropper SNRs under MRT."""
    xi_d = cfg.c_hat * real.mu
    return xi_d, _xi(cfg, 1.0, real.mu, real.mu_c, real.u, real.v, real.radii)


def sinr_an(real: ChannelRealization, cfg: SystemConfig) -> tuple[float, np.ndarray]:
    """Destination SINR (AN is nulled there) and per-eavesdropper SINRs under AN."""
    xi_d = cfg.eta * cfg.c_hat * real.mu
    return xi_d, _xi(cfg, cfg.eta, real.mu, real.mu_c, real.u, real.v, real.radii)


# ---------------------------------------------------------------------------
# Truncation radius
# ---------------------------------------------------------------------------

def _log_moment_bound(l_l: int, k: int) -> float:
    """``log E[(mu_c u)^k]`` maximized over ``L_c <= L_l``."""
    return special.gammaln(l_l + k) - special.gammaln(l_l) + special.gammaln(k + 1)


def _gain_moments(params: McParams, pmf: CommonPathPmf) -> tuple[float, float]:
    """``E[mu_c u]`` and ``E[(mu_c u)^2]`` for one eavesdropper in the sampling mode used."""
    cfg = params.cfg
    if params.mode == "analysis":
        k = np.arange(len(pmf.probs), dtype=float)
        probs = np.asarray(pmf.probs)
        return float(np.dot(probs, k)), float(2.0 * np.dot(probs, k * (k + 1.0)))
    # physical: L_c from the cell-wise law, mu_c | L_c ~ mu Beta(L_c, L_d - L_c)
    probs = geometric_pmf_exact(cfg.grid(), cfg.l_d, cfg.l_e)
    k = np.arange(len(probs), dtype=float)
    mu = params.mu
    m1 = mu * k / cfg.l_d
    m2 = mu**2 * k * (k + 1.0) / (cfg.l_d * (cfg.l_d + 1.0))
    return float(np.dot(probs, m1)), float(2.0 * np.dot(probs, m2))


def _sum_scale(metric: str, params: McParams) -> float:
    """Factor ``K`` with per-eavesdropper contribution ``<= K mu_c u r^-alpha``."""
    cfg = params.cfg
    if metric == "laplace_point":
        return params.s if params.scheme == "mrt" else params.s * params.eta * cfg.a / params.mu
    return params.eta * cfg.a / params.mu


def far_field_mean(metric: str, params: McParams, pmf: CommonPathPmf, r_out: float) -> float:
    """Mean contribution of eavesdroppers beyond ``r_out`` to a sum-type metric."""
    cfg = params.cfg
    if metric not in ("laplace_point", "sop_colluding") or cfg.lambda_e == 0:
        return 0.0
    m1, _ = _gain_moments(params, pmf)
    k = _sum_scale(metric, params)
    if metric == "laplace_point":
        # the simulated leakage is summed before multiplying by s
        k /= params.s
    return 2.0 * math.pi * cfg.lambda_e * k * m1 * r_out ** (2.0 - cfg.alpha) / (cfg.alpha - 2.0)


def auto_r_max(metric: str, params: McParams) -> float:
    """Truncation radius for the simulated disc.

    Max-type metrics: Markov bounds on ``xi <= K mu_c u r^-alpha`` with
    ``K = eta a / mu`` keep the chance that any eavesdropper beyond the radius
    matters below ``TRUNCATION_TOL``. Sum-type metrics add the far-field mean
    (:func:`far_field_mean`), so the radius only has to make the far-field
    fluctuation negligible: its variance term in the Laplace exponent stays
    below ``LAPLACE_TRUNCATION_TOL`` and its standard deviation stays below
    ``COLLUDING_TRUNCATION_TOL`` times the colluding threshold.
    """
    cfg = params.cfg
    alpha = cfg.alpha
    lam = cfg.lambda_e
    if lam == 0:
        return 1.0
    eta = params.eta
    mu = params.mu
    l_l = min(cfg.l_d, cfg.l_e)
    if metric in ("sop_noncolluding", "cdf_point"):
        x = _threshold(metric, params)
        if not x > 0:
            return 1.0
        log_k = math.log(eta * cfg.a / mu)
        best = math.inf
        for k in range(1, 64):
            if alpha * k <= 2:
                continue
            log_rhs = (math.log(2 * math.pi * lam) + _log_moment_bound(l_l, k) + k * (log_k - math.log(x))
                       - math.log(alpha * k - 2) - math.log(TRUNCATION_TOL))
            best = min(best, math.exp(log_rhs / (alpha * k - 2)))
        return max(1.0, best)
    if metric in ("laplace_point", "sop_colluding"):
        if metric == "laplace_point" and not params.s > 0:
            return 1.0
        if metric == "sop_colluding":
            x = _threshold(metric, params)
            if not x > 0:
                return 1.0
        _, m2 = _gain_moments(params, params.get_pmf())
        if m2 == 0:
            return 1.0
        k = _sum_scale(metric, params)
        # far-field variance: 2 pi lam K^2 E[g^2] R^(2-2 alpha) / (2 alpha - 2)
        log_var = math.log(2 * math.pi * lam) + 2 * math.log(k) + math.log(m2) - math.log(2 * alpha - 2)
        if metric == "laplace_point":
            # second-order term of the exponent: variance / 2
            log_rhs = log_var - math.log(2.0) - math.log(LAPLACE_TRUNCATION_TOL)
        else:
            log_rhs = log_var - 2.0 * math.log(COLLUDING_TRUNCATION_TOL * x)
        return max(1.0, math.exp(log_rhs / (2 * alpha - 2)))
    return 1.0


def _threshold(metric: str, params: McParams) -> float:
    cfg = params.cfg
    if metric == "cdf_point":
        return params.x
    return (params.eta * cfg.c_hat * params.mu - (cfg.T - 1.0)) / cfg.T


# ---------------------------------------------------------------------------
# Estimation engine
# ---------------------------------------------------------------------------

def _check_params(metric: str, params: McParams) -> None:
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if metric != "connection" and not (params.mu is not None and params.mu > 0):
        raise ValueError(f"metric {metric!r} needs a positive conditioning gain mu")
    if metric == "cdf_point" and not (params.x is not None and params.x > 0):
        raise ValueError("cdf_point needs a positive x")
    if metric == "laplace_point" and not (params.s is not None and params.s >= 0):
        raise ValueError("laplace_point needs a nonnegative s")


def _block_values(metric: str, params: McParams, pmf: CommonPathPmf, grid: AngularGrid,
                  seed: int, block: int, n: int, shells: list[tuple[float, float]]) -> np.ndarray:
    cfg = params.cfg
    eta = params.eta
    if metric == "connection":
        mu = _rng(seed, block, _STREAM_MU).standard_gamma(cfg.l_d, n)
        return (np.log2(1.0 + eta * cfg.c_hat * mu) > cfg.r_t).astype(float)

    mu = params.mu
    if metric in ("sop_noncolluding", "sop_colluding") and _threshold(metric, params) <= 0:
        return np.ones(n)

    g_d = None
    if params.mode == "physical":
        g_d = _draw_g_d(_rng(seed, block, _STREAM_GD), np.full(n, mu), cfg.l_d)

    owners, values = [], []
    for j, (r_in, r_out) in enumerate(shells):
        rng = _rng(seed, block, _SHELL_OFFSET + j)
        counts, radii, angles = _sample_shell(rng, cfg.lambda_e, r_in, r_out, size=n)
        owner = np.repeat(np.arange(n), counts)
        if params.mode == "analysis":
            _, mu_c, u, v = _marks_analysis(rng, pmf, cfg.l_e, len(radii))
        else:
            _, mu_c, u, v, _ = _marks_physical(rng, cfg, grid, g_d, owner, angles)
        if metric == "laplace_point":
            val = _leakage(cfg, params.scheme, eta, mu, mu_c, u, v, radii)
        else:
            val = _xi(cfg, eta, mu, mu_c, u, v, radii)
        owners.append(owner)
        values.append(val)
    owner = np.concatenate(owners)
    val = np.concatenate(values)

    if metric == "sop_noncolluding":
        worst = np.zeros(n)
        np.maximum.at(worst, owner, val)
        return (worst > _threshold(metric, params)).astype(float)
    if metric == "cdf_point":
        worst = np.zeros(n)
        np.maximum.at(worst, owner, val)
        return (worst < params.x).astype(float)
    total = np.bincount(owner, weights=val, minlength=n).astype(float)
    total += far_field_mean(metric, params, pmf, shells[-1][1])
    if metric == "sop_colluding":
        return (total > _threshold(metric, params)).astype(float)
    return np.exp(-params.s * total)


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


def mc_values(metric: str, params: McParams, trials: int, seed: int,
              threads: int | None = None, doublings: int = 0) -> tuple[np.ndarray, float]:
    """Per-trial values of the estimator and the base truncation radius used.

    ``doublings`` extends the disc by annuli up to ``r_max * 2**doublings``; the
    inner disc reuses the same random streams, so comparing estimates isolates
    the truncation effect.
    """
    _check_params(metric, params)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    # connection depends on mu alone; skip the path geometry (and its parity rule)
    pmf = None if metric == "connection" else params.get_pmf()
    grid = None if metric == "connection" else params.cfg.grid()
    r_max = params.r_max if params.r_max is not None else auto_r_max(metric, params)
    radii = [0.0] + [r_max * 2.0**j for j in range(doublings + 1)]
    shells = list(zip(radii[:-1], radii[1:]))
    n_blocks = -(-trials // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, trials - b * BLOCK_SIZE) for b in range(n_blocks)]
    threads = threads or default_threads()

    def run(b: int) -> np.ndarray:
        return _block_values(metric, params, pmf, grid, seed, b, sizes[b], shells)

    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, range(n_blocks)))
    else:
        blocks = [run(b) for b in range(n_blocks)]
    return np.concatenate(blocks), r_max


def mc_metric(metric: str, params: McParams, trials: int, seed: int,
              threads: int | None = None) -> McEstimate:
    """Monte Carlo estimate of ``metric`` with its standard error."""
    values, r_max = mc_values(metric, params, trials, seed, threads)
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
    return McEstimate(mean=mean, std_error=se, trials=trials, seed=seed, r_max=r_max,
                      mode=params.mode)


def truncation_check(metric: str, params: McParams, trials: int, seed: int,
                     threads: int | None = None) -> tuple[McEstimate, McEstimate, float]:
    """Estimates at ``r_max`` and ``2 r_max`` on common random numbers, and their relative change."""
    base = mc_metric(metric, params, trials, seed, threads)
    vals, r_max = mc_values(metric, params, trials, seed, threads, doublings=1)
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
    doubled = McEstimate(mean=mean, std_error=se, trials=trials, seed=seed,
                         r_max=2.0 * r_max, mode=params.mode)
    rel = abs(doubled.mean - base.mean) / abs(base.mean) if base.mean != 0 else abs(doubled.mean)
    return base, doubled, rel
