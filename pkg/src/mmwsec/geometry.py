"""Angular grid of a half-wavelength ULA, resolvable-path index sets and the
distribution of the number of paths an eavesdropper shares with the destination.

Indices are 1-based throughout to match the usual angular-domain notation;
index sets are returned as ``range`` objects (ordered, consecutive runs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AngularGrid:
    """Orthogonal angular basis of an ``n_t``-element ULA with normalized aperture ``m``."""

    n_t: int
    m: float | None = None

    def __post_init__(self):
        if int(self.n_t) != self.n_t or self.n_t < 2:
            raise ValueError(f"n_t must be an integer >= 2, got {self.n_t}")
        if self.m is None:
            object.__setattr__(self, "m", self.n_t / 2.0)
        if not self.m > 0:
            raise ValueError(f"aperture m must be positive, got {self.m}")
        if (self.n_t - 1) / 2.0 > self.m * (1 + 1e-12):
            raise ValueError(
                f"aperture m={self.m} too small for n_t={self.n_t}: grid leaves [-1, 1]"
            )

    def psi_all(self) -> np.ndarray:
        """All grid directions ``Psi_1 .. Psi_{n_t}`` as an array."""
        i = np.arange(1, self.n_t + 1)
        return (i - 1 - (self.n_t - 1) / 2.0) / self.m

    def angles(self) -> np.ndarray:
        """Physical angles ``arcsin(Psi_i)`` in radians, increasing."""
        return np.arcsin(np.clip(self.psi_all(), -1.0, 1.0))


@dataclass(frozen=True)
class PathSets:
    omega_d: range
    omega_k: range
    omega_c: range
    omega_p: tuple[int, ...]
    omega_n: tuple[int, ...]
    omega_a: tuple[int, ...]

    @property
    def l_c(self) -> int:
        return len(self.omega_c)


@dataclass(frozen=True)
class CommonPathPmf:
    probs: np.ndarray
    l_l: int
    l_u: int
    l_d: int = field(default=0)
    l_e: int = field(default=0)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if p.shape != (self.l_l + 1,):
            raise ValueError(f"probs must have length l_l+1={self.l_l + 1}, got {p.shape}")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError(f"pmf entries outside [0, 1]: {p}")
        if abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValueError(f"pmf does not sum to 1 (sum={math.fsum(p)!r})")

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.l_l + 1)

    def __getitem__(self, l_c: int) -> float:
        return float(self.probs[l_c])


def _check_index(grid: AngularGrid, i: int) -> None:
    if int(i) != i or not 1 <= i <= grid.n_t:
        raise IndexError(f"grid index {i} outside [1, {grid.n_t}]")


def _check_parity(grid: AngularGrid, l_d: int) -> None:
    if not 1 <= l_d < grid.n_t:
        raise ValueError(f"l_d must satisfy 1 <= l_d < n_t={grid.n_t}, got {l_d}")
    if (grid.n_t - l_d) % 2:
        raise ValueError(
            f"n_t - l_d must be even for a centered destination window "
            f"(n_t={grid.n_t}, l_d={l_d})"
        )


def psi(grid: AngularGrid, i: int) -> float:
    """Grid direction ``Psi_i = (i - 1 - (n_t - 1)/2) / M``."""
    _check_index(grid, i)
    return (i - 1 - (grid.n_t - 1) / 2.0) / grid.m


def omega_width(grid: AngularGrid, l_d: int, i: int) -> float:
    """Angular width (radians) of the ``i``-th cell counted from the lower edge of
    the destination window."""
    _check_parity(grid, l_d)
    if int(i) != i or i < 1:
        raise IndexError(f"omega index must be a positive integer, got {i}")
    base = (grid.n_t - l_d) // 2 + i
    _check_index(grid, base + 1)
    return math.asin(psi(grid, base + 1)) - math.asin(psi(grid, base))


def destination_path_set(grid: AngularGrid, l_d: int) -> range:
    """Centered run of ``l_d`` indices ``{(n_t-l_d)/2+1, ..., (n_t+l_d)/2}``."""
    _check_parity(grid, l_d)
    lo = (grid.n_t - l_d) // 2 + 1
    return range(lo, lo + l_d)


def eavesdropper_path_set(grid: AngularGrid, l_e: int, theta_max: float) -> range:
    """Run of ``l_e`` indices whose top index is the largest ``j`` with
    ``arcsin(Psi_j) <= theta_max``, clamped into ``[1, n_t]``."""
    if not 1 <= l_e <= grid.n_t:
        raise ValueError(f"l_e must be in [1, n_t], got {l_e}")
    if not -math.pi / 2 - 1e-12 <= theta_max <= math.pi / 2 + 1e-12:
        raise ValueError(f"theta_max must lie in [-pi/2, pi/2], got {theta_max}")
    top = int(np.searchsorted(grid.angles(), theta_max, side="right"))
    top = min(max(top, l_e), grid.n_t)
    return range(top - l_e + 1, top + 1)


def path_sets(grid: AngularGrid, l_d: int, omega_k: range) -> PathSets:
    """All derived index sets for one eavesdropper window."""
    omega_d = destination_path_set(grid, l_d)
    lo = max(omega_d.start, omega_k.start)
    hi = min(omega_d.stop, omega_k.stop)
    omega_c = range(lo, max(lo, hi))
    common = set(omega_c)
    return PathSets(
        omega_d=omega_d,
        omega_k=omega_k,
        omega_c=omega_c,
        omega_p=tuple(i for i in omega_d if i not in common),
        omega_n=tuple(i for i in omega_k if i not in common),
        omega_a=tuple(i for i in range(1, grid.n_t + 1) if i not in omega_d),
    )


def common_path_pmf(grid: AngularGrid, l_d: int, l_e: int) -> CommonPathPmf:
    """Distribution of the number of common paths ``L_c`` for an eavesdropper at
    a uniformly random angle."""
    _check_parity(grid, l_d)
    if not 1 <= l_e < grid.n_t:
        raise ValueError(f"l_e must satisfy 1 <= l_e < n_t={grid.n_t}, got {l_e}")
    l_l, l_u = min(l_d, l_e), max(l_d, l_e)
    probs = np.zeros(l_l + 1)
    for l_c in range(1, l_l):
        probs[l_c] = 2.0 * omega_width(grid, l_d, l_c) / math.pi
    probs[l_l] = math.fsum(omega_width(grid, l_d, i) for i in range(l_l, l_u + 1)) / math.pi
    probs[0] = 1.0 - math.fsum(probs[1:])
    if probs[0] < 0:
        if probs[0] > -1e-14:
            probs[0] = 0.0
        else:
            raise ValueError(
                f"invalid common-path pmf for (n_t={grid.n_t}, l_d={l_d}, l_e={l_e}): "
                f"p(0)={probs[0]:.3g}"
            )
    return CommonPathPmf(probs=probs, l_l=l_l, l_u=l_u, l_d=l_d, l_e=l_e)
