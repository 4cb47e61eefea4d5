"""Closed-form secrecy metrics of MRT beamforming.

``mu`` is the destination's overall channel gain ``||g_d||^2``, which is
Gamma(L_d, 1) distributed. Every SOP is conditioned on it, and the codeword
rate is set to the destination capacity so that only the secrecy rate
``r_s`` (through ``T = 2^{r_s}``) enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from ._common import (
    STATUS_INFEASIBLE,
    STATUS_OK,
    check_epsilon,
    check_pmf,
    clamp_probability,
    moment_sum,
)
from .config import SystemConfig
from .geometry import CommonPathPmf
from .specfun import regularized_upper_gamma_int, v_aux


@dataclass(frozen=True)
class RateResult:
    rate: float
    delta: float


def _check_mu(mu: float) -> None:
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")


def connection_probability_mrt(cfg: SystemConfig) -> float:
    """P{log2(1 + c mu r_d^-alpha) > r_t} with ``mu ~ Gamma(L_d, 1)``."""
    if cfg.r_t < 0:
        raise ValueError(f"r_t must be nonnegative, got {cfg.r_t}")
    thr = (2.0 ** cfg.r_t - 1.0) / cfg.c_hat
    return clamp_probability(regularized_upper_gamma_int(cfg.l_d, thr), "P_c")


def sop_status(mu: float, cfg: SystemConfig, eta: float = 1.0) -> str:
    """Whether a positive rate redundancy exists at gain ``mu`` and power split ``eta``."""
    _check_mu(mu)
    return STATUS_OK if eta * cfg.c_hat * mu > cfg.T - 1.0 else STATUS_INFEASIBLE


def cdf_xe_mrt(x: float, mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """CDF of the strongest non-colluding eavesdropper SNR, conditioned on ``mu``."""
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    _check_mu(mu)
    check_pmf(cfg, pmf)
    if cfg.lambda_e == 0:
        return 1.0
    beta = cfg.beta
    expo = (
        math.pi * cfg.lambda_e * math.gamma(1.0 + beta)
        * (mu * x / cfg.a) ** (-beta) * moment_sum(pmf, beta)
    )
    return clamp_probability(math.exp(-expo), "F_xi_e")


def _redundancy_point(mu: float, cfg: SystemConfig, eta: float) -> float:
    """Largest eavesdropper SINR that keeps secrecy: ``(eta c_hat mu - (T-1)) / T``."""
    return (eta * cfg.c_hat * mu - (cfg.T - 1.0)) / cfg.T


def sop_noncolluding_mrt(mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """SOP against non-colluding eavesdroppers; 1.0 when infeasible (see :func:`sop_status`)."""
    if sop_status(mu, cfg) != STATUS_OK:
        return 1.0
    if cfg.lambda_e == 0:
        return 0.0
    x = _redundancy_point(mu, cfg, 1.0)
    return clamp_probability(1.0 - cdf_xe_mrt(x, mu, cfg, pmf), "SOP")


def laplace_ie_mrt(s: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Laplace transform of the normalized leakage ``I_e = sum_k mu_c u r_k^-alpha``."""
    if not s >= 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    check_pmf(cfg, pmf)
    if s == 0 or cfg.lambda_e == 0:
        return 1.0
    beta = cfg.beta
    expo = (
        math.pi * cfg.lambda_e * s**beta
        * math.gamma(1.0 - beta) * math.gamma(1.0 + beta) * moment_sum(pmf, beta)
    )
    return math.exp(-expo)


def _q_const(n: int) -> float:
    return n * math.exp(-special.gammaln(n + 1) / n)


def gamma_approx_sum(laplace, scale: float, n_approx: int) -> float:
    """``sum_n C(N,n)(-1)^n L(n q / scale)``: the gamma-approximation tail of ``I > scale``."""
    q = _q_const(n_approx)
    terms = [
        math.comb(n_approx, n) * (-1) ** n * laplace(n * q / scale)
        for n in range(n_approx + 1)
    ]
    return math.fsum(terms)


def sop_colluding_mrt(mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Approximate SOP against colluding (MRC-combining) eavesdroppers."""
    if sop_status(mu, cfg) != STATUS_OK:
        return 1.0
    if cfg.lambda_e == 0:
        return 0.0
    # leakage threshold on I_e: sum xi_k = a I_e / mu exceeds the redundancy point
    scale = mu * _redundancy_point(mu, cfg, 1.0) / cfg.a
    val = gamma_approx_sum(lambda s: laplace_ie_mrt(s, cfg, pmf), scale, cfg.n_approx)
    return clamp_probability(val, "colluding SOP")


def varpi(cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Normalized leakage level at which the non-colluding SOP equals ``epsilon``."""
    check_epsilon(cfg)
    check_pmf(cfg, pmf)
    beta = cfg.beta
    base = -math.pi * cfg.lambda_e * math.gamma(1.0 + beta) * moment_sum(pmf, beta)
    return (base / math.log1p(-cfg.epsilon)) ** (cfg.alpha / 2.0)


def mrt_threshold(cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """On-off threshold ``delta``: transmit only when ``mu > delta``."""
    z1 = varpi(cfg, pmf) * cfg.a
    return math.sqrt(z1 / cfg.c_hat)


def max_secrecy_rate_mrt(mu: float, cfg: SystemConfig, pmf: CommonPathPmf) -> RateResult:
    """Largest secrecy rate meeting the SOP target at gain ``mu``; zero below threshold."""
    _check_mu(mu)
    z1 = varpi(cfg, pmf) * cfg.a
    delta = math.sqrt(z1 / cfg.c_hat)
    if mu <= delta:
        return RateResult(0.0, delta)
    rate = math.log2((1.0 + cfg.c_hat * mu) / (1.0 + z1 / mu))
    return RateResult(max(rate, 0.0), delta)


def _gamma_shift_weights(l_d: int, delta: float) -> list[float]:
    """``e^{-delta} delta^{L_d-1-m} / Gamma(L_d - m)`` for ``m = 0..L_d-1``."""
    out = []
    for m in range(l_d):
        k = l_d - 1 - m
        if delta == 0:
            out.append(1.0 if k == 0 else 0.0)
        else:
            out.append(math.exp(-delta + k * math.log(delta) - math.lgamma(k + 1)))
    return out


def secrecy_throughput_mrt(cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Expected optimal secrecy rate under on-off transmission, in closed form."""
    z1 = varpi(cfg, pmf) * cfg.a
    c_hat = cfg.c_hat
    delta = math.sqrt(z1 / c_hat)
    if delta == 0:
        return v_aux(c_hat, cfg.l_d)
    const = math.log2(delta * (1.0 + c_hat * delta) / (delta + z1))
    terms = []
    for m, w in enumerate(_gamma_shift_weights(cfg.l_d, delta)):
        if w == 0.0:
            continue
        bracket = (
            v_aux(1.0 / delta, m + 1)
            + v_aux(c_hat / (1.0 + c_hat * delta), m + 1)
            - v_aux(1.0 / (delta + z1), m + 1)
            + const
        )
        terms.append(w * bracket)
    return math.fsum(terms)


def mrt_threshold_high_power(cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Threshold in the high-power limit; depends only on the geometry, not on ``P``."""
    return math.sqrt(varpi(cfg, pmf) * cfg.l_d * cfg.r_d**cfg.alpha / cfg.l_e)


def secrecy_throughput_mrt_high_power(cfg: SystemConfig, pmf: CommonPathPmf) -> float:
    """Limit of :func:`secrecy_throughput_mrt` as the transmit power grows without bound.

    In that limit the optimal rate becomes ``2 log2(mu / delta)``, so the
    throughput is twice the shifted auxiliary sum at ``1/delta``.
    """
    delta = mrt_threshold_high_power(cfg, pmf)
    if delta == 0:
        return math.inf
    terms = [
        w * v_aux(1.0 / delta, m + 1)
        for m, w in enumerate(_gamma_shift_weights(cfg.l_d, delta))
        if w != 0.0
    ]
    return 2.0 * math.fsum(terms)
