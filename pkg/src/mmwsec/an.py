"""Closed-form secrecy metrics of artificial-noise (AN) beamforming.

A fraction ``eta`` of the power carries the message along the destination's
paths; the rest is spread as noise over the ``N_t - L_d`` grid directions the
destination does not use. Optimization follows the Jensen upper bound of the
eavesdropper CDF, with the exact CDF available for validation.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.laguerre import laggauss
from scipy import optimize

from ._common import (
    STATUS_OK,
    STATUS_SUSPENDED,
    check_epsilon,
    check_pmf,
    clamp_probability,
)
from .config import SystemConfig
from .geometry import CommonPathPmf
from .mrt import RateResult, _check_mu, _redundancy_point, gamma_approx_sum, sop_status
from .specfun import (
    DEFAULT_QUAD,
    ConvergenceError,
    QuadratureSettings,
    adaptive_quad,
    gauss_2f1_neg,
    regularized_upper_gamma_int,
)


class AnBoundDegenerateError(ValueError):
    """The Jensen bound has no surviving terms (``min(L_d, L_e) = 1``)."""


@dataclass(frozen=True)
class RhoSolverState:
    rho: float
    rho_max: float
    q_const: float
    z4_terms: np.ndarray
    z5_terms: np.ndarray
    n_terms: np.ndarray
    eta: float
    mu: float
    residual: float


@dataclass(frozen=True)
class EtaOptimum:
    eta_star: float
    rate_at_opt: float
    boundary_case: bool
    status: str = STATUS_OK


def _check_eta(eta: float) -> None:
    if not 0 <= eta <= 1:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


def connection_probability_an(cfg: SystemConfig) -> float:
    """Connection probability with only ``eta P`` carrying the message."""
    if cfg.r_t < 0:
        raise ValueError(f"r_t must be nonnegative, got {cfg.r_t}")
    if cfg.r_t == 0:
        return 1.0
    if cfg.eta == 0:
        return 0.0
    thr = (2.0 ** cfg.r_t - 1.0) / (cfg.eta * cfg.c_hat)
    return clamp_probability(regularized_upper_gamma_int(cfg.l_d, thr), "P_c")


# ---------------------------------------------------------------------------
# Eavesdropper CDF: exact and Jensen bound
# ---------------------------------------------------------------------------

def _an_b(x: float, mu: float, cfg: SystemConfig) -> float:
    """AN leakage scale ``b = (1-eta) mu x / (eta (N_t - L_d))``."""
    return (1.0 - cfg.eta) * mu * x / (cfg.eta * (cfg.n_t - cfg.l_d))


def an_kernel_exact(l_c: int, l_e: int, beta: float, b: float,
                    settings: QuadratureSettings = DEFAULT_QUAD) -> float:
    """``E[mu_c^beta (1 + b/mu_c)^{-(L_e-L_c)}]`` for ``mu_c ~ Gamma(L_c, 1)``.

    Written as ``(1/Gamma(L_c)) int_0^inf t^{L_e+beta-1} (t+b)^{-(L_e-L_c)} e^{-t} dt``
    and integrated numerically; the degenerate cases reduce to a gamma ratio.
    """
    n = l_e - l_c
    if n < 0:
        raise ValueError(f"need l_c <= l_e, got l_c={l_c}, l_e={l_e}")
    if b == 0 or n == 0:
        return math.exp(math.lgamma(l_c + beta) - math.lgamma(l_c))
    log_norm = math.lgamma(l_c)
    p = l_e + beta - 1.0

    def integrand(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return np.exp(p * np.log(t) - t - n * np.log(t + b) - log_norm)

    # kernels can be far below any absolute tolerance, so resolve them relatively
    rel_only = dataclasses.replace(settings, abs_tol=0.0)
    return adaptive_quad(integrand, 0.0, math.inf, rel_only)


def _cdf_prefactor(x: float, mu: float, cfg: SystemConfig) -> float:
    beta = cfg.beta
    return math.pi * cfg.lambda_e * math.gamma(1.0 + beta) * (mu * x / (cfg.eta * cfg.a)) ** (-beta)


def _check_cdf_args(x: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> None:
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    _check_mu(mu)
    check_pmf(cfg, pmf)


def cdf_xe_an_exact(x: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf,
                    settings: QuadratureSettings = DEFAULT_QUAD) -> float:
    """Exact CDF of the strongest non-colluding eavesdropper SINR under AN."""
    _check_cdf_args(x, mu, cfg, pmf)
    if cfg.lambda_e == 0 or cfg.eta == 0:
        return 1.0
    b = _an_b(x, mu, cfg)
    beta = cfg.beta
    total = math.fsum(
        pmf.probs[l_c] * an_kernel_exact(l_c, cfg.l_e, beta, b, settings)
        for l_c in range(1, pmf.l_l + 1)
        if pmf.probs[l_c] > 0
    )
    return clamp_probability(math.exp(-_cdf_prefactor(x, mu, cfg) * total), "F_xi_e")


def _jensen_sum(b: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """``sum_{L_c >= 2} p(L_c)(L_c-1)^beta [1 + b/(L_c-1)]^{-(L_e-L_c)}``."""
    beta = cfg.beta
    terms = [
        pmf.probs[l_c] * (l_c - 1.0) ** beta * (1.0 + b / (l_c - 1.0)) ** (-(cfg.l_e - l_c))
        for l_c in range(2, pmf.l_l + 1)
    ]
    return math.fsum(terms)


def cdf_xe_an_bound(x: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Jensen upper bound on :func:`cdf_xe_an_exact` (``L_c = 1`` terms vanish)."""
    _check_cdf_args(x, mu, cfg, pmf)
    if cfg.lambda_e == 0 or cfg.eta == 0:
        return 1.0
    total = _jensen_sum(_an_b(x, mu, cfg), cfg, pmf)
    return clamp_probability(math.exp(-_cdf_prefactor(x, mu, cfg) * total), "F_xi_e bound")


def sop_noncolluding_an(mu: float, cfg: SystemConfig, pmf: CommonPathPmf,
                        cdf: str = "bound") -> float:
    """SOP against non-colluding eavesdroppers under AN.

    ``cdf="bound"`` (default) uses the Jensen bound, as the optimizer does;
    ``cdf="exact"`` uses the exact CDF. Returns 1.0 when infeasible.
    """
    if cdf not in ("bound", "exact"):
        raise ValueError(f"cdf must be 'bound' or 'exact', got {cdf!r}")
    if sop_status(mu, cfg, cfg.eta) != STATUS_OK:
        return 1.0
    if cfg.lambda_e == 0:
        return 0.0
    x = _redundancy_point(mu, cfg, cfg.eta)
    f = cdf_xe_an_bound if cdf == "bound" else cdf_xe_an_exact
    return clamp_probability(1.0 - f(x, mu, cfg, pmf), "SOP")


# ---------------------------------------------------------------------------
# Laplace transform of the aggregate leakage and the colluding SOP
# ---------------------------------------------------------------------------

def _laplace_term(l_c: int, l_e: int, beta: float, A: float, B: float) -> float:
    """``E[A mu_c (A mu_c + B v)^{beta-1}]`` with ``mu_c ~ Gamma(L_c)``, ``v ~ Gamma(L_e-L_c)``.

    Splits ``mu_c + v ~ Gamma(L_e)`` from the Beta(L_c, L_e-L_c) fraction, whose
    moment is a Gauss 2F1; the argument is kept nonpositive by choosing the
    Pfaff-transformed side when ``A < B``.
    """
    n = l_e - l_c
    if B == 0 or n == 0:
        return A**beta * math.exp(math.lgamma(l_c + beta) - math.lgamma(l_c))
    scale = A * (l_c / l_e) * math.exp(math.lgamma(l_e + beta) - math.lgamma(l_e))
    if A >= B:
        return scale * B ** (beta - 1.0) * gauss_2f1_neg(1.0 - beta, l_c + 1.0, l_e + 1.0, 1.0 - A / B)
    return scale * A ** (beta - 1.0) * gauss_2f1_neg(1.0 - beta, float(n), l_e + 1.0, 1.0 - B / A)


def laplace_ie_an(s: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Laplace transform of ``I_e = sum_k z2 mu_c u / (z3 v + r_k^alpha)``.

    ``z2 = eta a / mu`` and ``z3 = (1-eta) a / (N_t - L_d)``. At ``eta = 1``
    this equals ``laplace_ie_mrt(s a / mu)``.
    """
    if not s >= 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    _check_mu(mu)
    check_pmf(cfg, pmf)
    if s == 0 or cfg.lambda_e == 0 or cfg.eta == 0:
        return 1.0
    beta = cfg.beta
    A = s * cfg.eta * cfg.a / mu
    B = (1.0 - cfg.eta) * cfg.a / (cfg.n_t - cfg.l_d)
    total = math.fsum(
        pmf.probs[l_c] * _laplace_term(l_c, cfg.l_e, beta, A, B)
        for l_c in range(1, pmf.l_l + 1)
        if pmf.probs[l_c] > 0
    )
    expo = math.pi * cfg.lambda_e * math.gamma(1.0 + beta) * math.gamma(1.0 - beta) * total
    return math.exp(-expo)


def sop_colluding_an(mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Approximate SOP against colluding eavesdroppers under AN."""
    if sop_status(mu, cfg, cfg.eta) != STATUS_OK:
        return 1.0
    if cfg.lambda_e == 0:
        return 0.0
    scale = _redundancy_point(mu, cfg, cfg.eta)
    val = gamma_approx_sum(lambda s: laplace_ie_an(s, mu, cfg, pmf), scale, cfg.n_approx)
    return clamp_probability(val, "colluding SOP")


# ---------------------------------------------------------------------------
# rho(eta): normalized eavesdropper SINR quantile under the Jensen bound
# ---------------------------------------------------------------------------

def _rho_coefficients(mu: float, cfg: SystemConfig, pmf: CommonPathPmf):
    l_c = np.arange(2, pmf.l_l + 1, dtype=float)
    z4 = pmf.probs[2:] * (l_c - 1.0) ** cfg.beta
    keep = z4 > 0
    if not np.any(keep):
        raise AnBoundDegenerateError(
            "AN bound degenerate: no L_c >= 2 terms (min(L_d, L_e) = 1 or zero mass)"
        )
    z5 = mu / ((cfg.n_t - cfg.l_d) * (l_c - 1.0))
    n = cfg.l_e - l_c
    return z4[keep], z5[keep], n[keep]


def _q_const(mu: float, cfg: SystemConfig) -> float:
    return (-math.log1p(-cfg.epsilon) * (mu / cfg.a) ** cfg.beta
            / (math.pi * cfg.lambda_e * math.gamma(1.0 + cfg.beta)))


def _j_sum(rho: float, eta: float, z4, z5, n) -> float:
    return math.fsum(z4 * (1.0 + z5 * (1.0 - eta) * rho) ** (-n))


def solve_rho(eta: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> RhoSolverState:
    """Root of ``J(rho) = Q``: ``eta rho`` is the (1-epsilon)-quantile of the bounded CDF."""
    _check_eta(eta)
    _check_mu(mu)
    check_epsilon(cfg)
    check_pmf(cfg, pmf)
    z4, z5, n = _rho_coefficients(mu, cfg, pmf)
    if cfg.lambda_e == 0:
        return RhoSolverState(0.0, 0.0, math.inf, z4, z5, n, eta, mu, 0.0)
    q = _q_const(mu, cfg)
    beta = cfg.beta
    rho_max = (z4.sum() / q) ** (cfg.alpha / 2.0)

    def xi(rho: float) -> float:
        # Xi(rho) * Q, scaled to O(1) around the root
        return q * rho**beta / _j_sum(rho, eta, z4, z5, n) - 1.0

    hi = xi(rho_max)
    if hi < 0:
        if hi > -1e-12:
            root = rho_max
        else:
            raise ConvergenceError(f"rho bracket failed: Xi(rho_max)*Q = {hi}")
    else:
        root = optimize.brentq(xi, 0.0, rho_max, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                               maxiter=500)
    return RhoSolverState(root, rho_max, q, z4, z5, n, eta, mu, xi(root) / q)


def _c1_c2(state: RhoSolverState, eta: float) -> tuple[float, float]:
    z4, z5, n = state.z4_terms, state.z5_terms, state.n_terms
    d = 1.0 + z5 * (1.0 - eta) * state.rho
    c1 = math.fsum(z4 * z5 * n * d ** (-n - 1.0))
    c2 = math.fsum(z4 * d ** (-n))
    return c1, c2


def drho_deta(state: RhoSolverState, eta: float, mu: float, cfg: SystemConfig,
              pmf: CommonPathPmf) -> float:
    """Implicit derivative ``d rho / d eta`` of the solved state."""
    if state.rho == 0:
        return 0.0
    c1, c2 = _c1_c2(state, eta)
    if c1 == 0:
        return 0.0
    return state.rho**2 * c1 / (cfg.beta * c2 + state.rho * (1.0 - eta) * c1)


def an_rate(eta: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """``R_s(eta) = log2((1 + eta c_hat mu) / (1 + eta rho(eta)))``; may be negative."""
    rho = solve_rho(eta, mu, cfg, pmf).rho
    return math.log2((1.0 + eta * cfg.c_hat * mu) / (1.0 + eta * rho))


def an_rate_derivative(eta: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """``dR_s / d eta``."""
    state = solve_rho(eta, mu, cfg, pmf)
    rho = state.rho
    drho = drho_deta(state, eta, mu, cfg, pmf)
    cm = cfg.c_hat * mu
    return (cm / (1.0 + eta * cm) - (rho + eta * drho) / (1.0 + eta * rho)) / math.log(2.0)


def optimal_eta(mu: float, cfg: SystemConfig, pmf: CommonPathPmf,
                eta_tol: float = 1e-12) -> EtaOptimum:
    """Power split maximizing the secrecy rate under the SOP target (non-colluding).

    The rate is concave in ``eta``, so ``eta = 1`` is optimal when the derivative
    there is positive; otherwise the derivative's root is bracketed on [0, 1].
    """
    _check_mu(mu)
    cm = cfg.c_hat * mu
    rho0 = solve_rho(0.0, mu, cfg, pmf).rho
    if not rho0 < cm:
        return EtaOptimum(0.0, 0.0, False, STATUS_SUSPENDED)
    if an_rate_derivative(1.0, mu, cfg, pmf) > 0:
        return EtaOptimum(1.0, an_rate(1.0, mu, cfg, pmf), True)
    root = optimize.brentq(an_rate_derivative, 0.0, 1.0, args=(mu, cfg, pmf),
                           xtol=eta_tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return EtaOptimum(root, an_rate(root, mu, cfg, pmf), False)


def max_secrecy_rate_an(mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> RateResult:
    """Optimal secrecy rate at gain ``mu`` (zero when suspended) and the AN threshold."""
    opt = optimal_eta(mu, cfg, pmf)
    return RateResult(max(opt.rate_at_opt, 0.0), an_threshold(cfg, pmf))


def an_threshold(cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """On-off threshold ``delta`` of the AN scheme.

    ``rho(0; mu)`` scales exactly as ``kappa / mu``, so transmission is possible
    iff ``c_hat mu^2 > kappa``.
    """
    if cfg.lambda_e == 0:
        return 0.0
    kappa = solve_rho(0.0, 1.0, cfg, pmf).rho
    return math.sqrt(kappa / cfg.c_hat)


def secrecy_throughput_an(cfg: SystemConfig, pmf: CommonPathPmf,
                          rel_tol: float = 1e-6, max_nodes: int = 256) -> float:
    """Expected optimal secrecy rate of AN beamforming under on-off transmission.

    Gauss-Laguerre quadrature in ``y = mu - delta``; the node count doubles
    from 16 until successive estimates agree to ``rel_tol``.
    """
    check_epsilon(cfg)
    delta = an_threshold(cfg, pmf)
    l_d = cfg.l_d
    log_norm = -delta - math.lgamma(l_d)

    def estimate(n_nodes: int) -> float:
        y, w = laggauss(n_nodes)
        vals = []
        for yi, wi in zip(y, w):
            mu = delta + yi
            log_weight = log_norm + (l_d - 1) * math.log(mu)
            if log_weight < -745.0:
                continue
            rate = optimal_eta(mu, cfg, pmf).rate_at_opt
            vals.append(wi * max(rate, 0.0) * math.exp(log_weight))
        return math.fsum(vals)

    n_nodes = 16
    prev = estimate(n_nodes)
    while n_nodes < max_nodes:
        n_nodes *= 2
        cur = estimate(n_nodes)
        if abs(cur - prev) <= rel_tol * abs(cur):
            return cur
        prev = cur
    raise ConvergenceError(
        f"AN throughput quadrature not converged at {max_nodes} nodes "
        f"(last two estimates {prev!r}, {cur!r})"
    )


__all__ = [
    "AnBoundDegenerateError",
    "EtaOptimum",
    "RhoSolverState",
    "an_kernel_exact",
    "an_rate",
    "an_rate_derivative",
    "an_threshold",
    "cdf_xe_an_bound",
    "cdf_xe_an_exact",
    "connection_probability_an",
    "drho_deta",
    "laplace_ie_an",
    "max_secrecy_rate_an",
    "optimal_eta",
    "secrecy_throughput_an",
    "solve_rho",
    "sop_colluding_an",
    "sop_noncolluding_an",
]
