"""Small helpers shared by the analysis modules."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import special

from .geometry import CommonPathPmf

CLAMP_WARN = 1e-9

STATUS_OK = "ok"
STATUS_INFEASIBLE = "infeasible"
STATUS_SUSPENDED = "suspended"
STATUS_DEGENERATE = "degenerate"
STATUS_ERROR = "error"


class ProbabilityClampWarning(RuntimeWarning):
    pass


def clamp_probability(value: float, what: str = "probability") -> float:
    """Clip a floating-point probability into [0, 1], warning on real overshoot."""
    if math.isnan(value):
        raise ArithmeticError(f"{what} evaluated to NaN")
    if value < -CLAMP_WARN or value > 1 + CLAMP_WARN:
        warnings.warn(f"{what}={value!r} clamped into [0, 1]", ProbabilityClampWarning, stacklevel=3)
    return min(1.0, max(0.0, value))


def gamma_ratio_terms(pmf: CommonPathPmf, beta: float) -> np.ndarray:
    """``Gamma(L_c + beta) / Gamma(L_c)`` for ``L_c = 1..L_l``."""
    l_c = np.arange(1, pmf.l_l + 1, dtype=float)
    return np.exp(special.gammaln(l_c + beta) - special.gammaln(l_c))


def moment_sum(pmf: CommonPathPmf, beta: float) -> float:
    """``sum_{L_c >= 1} p(L_c) Gamma(L_c + beta) / Gamma(L_c)``, i.e. ``E[mu_c^beta]``."""
    return math.fsum(pmf.probs[1:] * gamma_ratio_terms(pmf, beta))


def check_pmf(cfg, pmf: CommonPathPmf) -> None:
    if pmf.l_l != min(cfg.l_d, cfg.l_e) or pmf.l_u != max(cfg.l_d, cfg.l_e):
        raise ValueError(
            f"pmf (l_l={pmf.l_l}, l_u={pmf.l_u}) does not match config "
            f"(l_d={cfg.l_d}, l_e={cfg.l_e})"
        )


def check_epsilon(cfg) -> None:
    if not 0 < cfg.epsilon < 1:
        raise ValueError(f"epsilon must lie strictly inside (0, 1), got {cfg.epsilon}")
