"""Scenario configuration shared by the analysis, simulation and CLI layers."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .geometry import AngularGrid, CommonPathPmf, common_path_pmf


def dbm_to_mw(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """All scenario parameters.

    Powers are in dBm and converted to milliwatts; only the ratios ``a`` and
    ``c`` enter the formulas, so the unit choice is conventional.
    """

    n_t: int = 100
    l_d: int = 20
    l_e: int = 20
    alpha: float = 4.0
    lambda_e: float = 1e-5
    p_dbm: float = 0.0
    noise_dbm: float = -60.0
    r_d: float = 50.0
    eta: float = 1.0
    r_s: float = 1.0
    r_t: float = 6.0
    epsilon: float = 0.01
    n_approx: int = 5

    def __post_init__(self):
        for name in ("n_t", "l_d", "l_e", "n_approx"):
            v = getattr(self, name)
            if isinstance(v, float) and v.is_integer():
                object.__setattr__(self, name, int(v))
            elif not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"{name} must be an integer, got {v!r}")
        problems = []
        if self.n_t < 2:
            problems.append(f"n_t must be >= 2 (got {self.n_t})")
        if not 0 < self.l_d < self.n_t:
            problems.append(f"need 0 < l_d < n_t (got l_d={self.l_d})")
        if not 0 < self.l_e < self.n_t:
            problems.append(f"need 0 < l_e < n_t (got l_e={self.l_e})")
        if not self.alpha > 2:
            problems.append(f"alpha must exceed 2 (got {self.alpha})")
        if not self.lambda_e >= 0:
            problems.append(f"lambda_e must be >= 0 (got {self.lambda_e})")
        if not 0 <= self.eta <= 1:
            problems.append(f"eta must lie in [0, 1] (got {self.eta})")
        if not 0 <= self.r_s <= self.r_t:
            problems.append(f"need 0 <= r_s <= r_t (got r_s={self.r_s}, r_t={self.r_t})")
        if not 0 <= self.epsilon <= 1:
            problems.append(f"epsilon must lie in [0, 1] (got {self.epsilon})")
        if not self.r_d > 0:
            problems.append(f"r_d must be positive (got {self.r_d})")
        if self.n_approx < 1:
            problems.append(f"n_approx must be >= 1 (got {self.n_approx})")
        for name in ("p_dbm", "noise_dbm"):
            if not math.isfinite(getattr(self, name)):
                problems.append(f"{name} must be finite")
        if problems:
            raise ValueError("invalid SystemConfig: " + "; ".join(problems))

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    @property
    def p_lin(self) -> float:
        return dbm_to_mw(self.p_dbm)

    @property
    def noise_lin(self) -> float:
        return dbm_to_mw(self.noise_dbm)

    @property
    def a(self) -> float:
        """Per-path transmit SNR seen by an eavesdropper, ``P / (L_e sigma^2)``."""
        return self.p_lin / (self.l_e * self.noise_lin)

    @property
    def c(self) -> float:
        """Per-path transmit SNR seen by the destination, ``P / (L_d sigma^2)``."""
        return self.p_lin / (self.l_d * self.noise_lin)

    @property
    def c_hat(self) -> float:
        """``c r_d^{-alpha}``: destination SNR per unit of channel gain."""
        return self.c * self.r_d ** (-self.alpha)

    @property
    def T(self) -> float:
        return 2.0 ** self.r_s

    @property
    def beta(self) -> float:
        """The recurring exponent ``2/alpha``."""
        return 2.0 / self.alpha

    def grid(self) -> AngularGrid:
        return AngularGrid(self.n_t)

    def pmf(self) -> CommonPathPmf:
        return common_path_pmf(self.grid(), self.l_d, self.l_e)


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(SystemConfig))
