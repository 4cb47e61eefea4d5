"""Special functions and quadrature used by the closed-form secrecy metrics.

Everything here is a pure function of its arguments. Only real arguments are
supported; the functions cover exactly the parameter ranges the analysis
modules need (integer-order incomplete gamma, exponential integrals of
positive argument, Gauss 2F1 on the nonpositive real axis).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

EULER_GAMMA = 0.57721566490153286061
_EPS = np.finfo(float).eps


class ConvergenceError(ArithmeticError):
    """Raised when a series or an adaptive rule fails to reach its tolerance."""


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise ValueError(f"abs_tol must be nonnegative, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_QUAD = QuadratureSettings()


# ---------------------------------------------------------------------------
# Incomplete gamma (integer order) and exponential integrals
# ---------------------------------------------------------------------------

def upper_incomplete_gamma_int(n: int, x: float) -> float:
    """Upper incomplete gamma function for a positive integer order.

    Uses the finite sum ``(n-1)! e^{-x} sum_{m<n} x^m / m!``, with every term
    formed in log space so that large ``n`` and ``x`` neither overflow nor
    underflow prematurely.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"order must be a positive integer, got {n}")
    if not x >= 0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    n = int(n)
    if x == 0:
        return math.factorial(n - 1) if n < 171 else math.inf
    log_x = math.log(x)
    lg = math.lgamma(n)
    terms = [math.exp(lg - x + m * log_x - math.lgamma(m + 1)) for m in range(n)]
    return math.fsum(terms)


def regularized_upper_gamma_int(n: int, x: float) -> float:
    """``Gamma(n, x) / Gamma(n)``: the complementary CDF of a Gamma(n, 1) variable."""
    if int(n) != n or n < 1:
        raise ValueError(f"order must be a positive integer, got {n}")
    if not x >= 0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    if x == 0:
        return 1.0
    log_x = math.log(x)
    terms = [math.exp(-x + m * log_x - math.lgamma(m + 1)) for m in range(int(n))]
    return min(1.0, math.fsum(terms))


def scaled_expn(n: int, x: float) -> float:
    """``e^x E_n(x)`` for integer ``n >= 1`` and ``x > 0``.

    ``E_n`` is the generalized exponential integral ``int_1^inf e^{-xt} t^{-n} dt``.
    The scaled form stays finite for large ``x`` (it behaves like ``1/x``),
    which is what the throughput series needs.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"order must be a positive integer, got {n}")
    if not x > 0:
        raise ValueError(f"argument must be positive, got {x}")
    n = int(n)
    if x > 1.0:
        # modified Lentz evaluation of the continued fraction for e^x E_n(x)
        tiny = 1e-300
        b = x + n
        c = 1.0 / tiny
        d = 1.0 / b
        h = d
        for i in range(1, 10_000):
            an = -i * (n - 1 + i)
            b += 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            delta = c * d
            h *= delta
            if abs(delta - 1.0) < 1e-16:
                return h
        raise ConvergenceError(f"continued fraction for E_{n}({x}) did not converge")
    # power series around the origin, 0 < x <= 1
    nm1 = n - 1
    ans = (1.0 / nm1) if nm1 != 0 else (-math.log(x) - EULER_GAMMA)
    fact = 1.0
    for i in range(1, 10_000):
        fact *= -x / i
        if i != nm1:
            delta = -fact / (i - nm1)
        else:
            psi = -EULER_GAMMA + sum(1.0 / k for k in range(1, nm1 + 1))
            delta = fact * (-math.log(x) + psi)
        ans += delta
        if abs(delta) < abs(ans) * 1e-17:
            return math.exp(x) * ans
    raise ConvergenceError(f"series for E_{n}({x}) did not converge")


def exp_integral_neg(x: float) -> float:
    """``int_x^inf e^{-t}/t dt`` for ``x > 0``.

    This is ``E_1(x)`` (the quantity written ``E_i(-x)`` in some
    communication-theory texts); it is positive and decreasing.
    """
    if not x > 0:
        raise ValueError(f"argument must be positive, got {x}")
    if math.isinf(x):
        return 0.0
    if x > 700.0:
        return scaled_expn(1, x) * math.exp(-x)
    return scaled_expn(1, x) * math.exp(-x) if x > 1.0 else _e1_series(x)


def _e1_series(x: float) -> float:
    total = -EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, 200):
        term *= -x / k
        contrib = -term / k
        total += contrib
        if abs(contrib) < 1e-17 * abs(total):
            break
    return total


def v_aux(x: float, m: int) -> float:
    """Auxiliary sum of the MRT throughput series.

    Returns ``(1/ln 2) * sum_{j=0}^{m-1} e^{1/x} E_{j+1}(1/x)``, which equals
    ``int_0^inf log2(1 + x y) y^{m-1} e^{-y} / (m-1)! dy``. The empty sum
    (``m = 0``) is zero.

    The textbook finite-sum form mixes ``e^{1/x} Ei(-1/x)`` with a truncated
    asymptotic series and cancels catastrophically when ``1/x`` is large;
    each of its summands is the scaled generalized exponential integral used
    here, so no cancellation occurs.
    """
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    if m == 0:
        return 0.0
    t = 1.0 / x
    return math.fsum(scaled_expn(j + 1, t) for j in range(int(m))) / math.log(2.0)


def v_aux_textbook(x: float, m: int) -> float:
    """Literal finite-sum form of :func:`v_aux` (for cross-checks only).

    Uses the standard convention ``Ei(-t) = -E_1(t)``. Accurate only while
    ``(1/x)^m / m!`` is modest.
    """
    if m == 0:
        return 0.0
    t = 1.0 / x
    ei_neg = -scaled_expn(1, t)  # e^{t} Ei(-t)
    total = 0.0
    for n in range(1, m + 1):
        j = m - n
        inner = (-1) ** (j - 1) * t**j * ei_neg
        inner += sum(math.factorial(k - 1) * (-t) ** (j - k) for k in range(1, j + 1))
        total += inner / math.factorial(j)
    return total / math.log(2.0)


# ---------------------------------------------------------------------------
# Gauss hypergeometric function on the nonpositive real axis
# ---------------------------------------------------------------------------

def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


def _hyp2f1_series(a: float, b: float, c: float, w: float, max_terms: int) -> float:
    """Plain Gauss series, ``0 <= w < 1``."""
    term = 1.0
    total = 1.0
    comp = 0.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * w
        # Kahan summation keeps the slowly-converging tail honest
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term == 0.0 or (abs(term) < _EPS * abs(total) and k > 2):
            return total
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; w={w}) series did not converge in {max_terms} terms"
    )


def _gamma_ratio(num: tuple[float, ...], den: tuple[float, ...]) -> float:
    """prod Gamma(num) / prod Gamma(den) with poles in the denominator giving 0."""
    if any(_is_nonpositive_int(d) for d in den):
        return 0.0
    log_mag = 0.0
    sign = 1.0
    for v in num:
        log_mag += special.gammaln(v)
        sign *= special.gammasgn(v)
    for v in den:
        log_mag -= special.gammaln(v)
        sign *= special.gammasgn(v)
    return sign * math.exp(log_mag)


def _hyp2f1_euler(a: float, b: float, c: float, z: float) -> float:
    """Euler integral representation, valid for ``c > b > 0`` (or with a, b swapped)."""
    if not c > b > 0:
        a, b = b, a
    if not c > b > 0:
        raise ConvergenceError(
            f"2F1({a}, {b}; {c}; {z}): degenerate connection case outside the Euler-integral range"
        )
    coef = _gamma_ratio((c,), (b, c - b))
    settings = QuadratureSettings(rel_tol=1e-12, abs_tol=0.0, max_subdivisions=4000)
    # split at 1/2 and reflect the upper half so 1 - t never rounds to zero
    lower = adaptive_quad(
        lambda t: t ** (b - 1.0) * (1.0 - t) ** (c - b - 1.0) * (1.0 - z * t) ** (-a),
        0.0, 0.5, settings,
    )
    upper = adaptive_quad(
        lambda u: (1.0 - u) ** (b - 1.0) * u ** (c - b - 1.0) * (1.0 - z * (1.0 - u)) ** (-a),
        0.0, 0.5, settings,
    )
    return coef * (lower + upper)


PFAFF_MIN_Z = -10.0


def gauss_2f1_neg(a: float, b: float, c: float, z: float, max_terms: int = 200_000) -> float:
    """Gauss hypergeometric ``2F1(a, b; c; z)`` for real ``z <= 0``.

    For ``PFAFF_MIN_Z <= z < 0`` the Pfaff transformation maps the argument to
    ``z/(z-1)`` in ``(0, 10/11]``. Below that the connection formula to
    ``1/(1-z)`` is used, which needs ``b - a`` non-integer; in the degenerate
    integer case the Euler integral is evaluated numerically instead. The
    connection formula is kept away from ``z`` near -1, where its two series
    have a negative third parameter and cancel catastrophically.
    """
    if _is_nonpositive_int(c):
        raise ValueError(f"c must not be a nonpositive integer, got {c}")
    if z > 0:
        raise ValueError(f"z must be nonpositive, got {z}")
    if z == 0 or a == 0 or b == 0:
        return 1.0
    if z >= PFAFF_MIN_Z:
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _hyp2f1_series(a, c - b, c, w, max_terms)
    if float(b - a).is_integer():
        return _hyp2f1_euler(a, b, c, z)
    w = 1.0 / (1.0 - z)
    first = _gamma_ratio((c, b - a), (b, c - a))
    second = _gamma_ratio((c, a - b), (a, c - b))
    out = 0.0
    if first != 0.0:
        out += first * w**a * _hyp2f1_series(a, c - b, a - b + 1.0, w, max_terms)
    if second != 0.0:
        out += second * w**b * _hyp2f1_series(b, c - a, b - a + 1.0, w, max_terms)
    return out


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod quadrature
# ---------------------------------------------------------------------------

# 21-point Kronrod rule extending the 10-point Gauss rule (QUADPACK qk21 nodes)
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525738728,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes sit at the odd positions of the Kronrod node list
_GAUSS_W = np.zeros(21)
_GAUSS_W[1:10:2] = _WG
_GAUSS_W[11:20:2] = _WG[::-1]


def _gk21(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    vals = np.asarray(f(mid + half * _NODES), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError(f"integrand not finite on [{lo}, {hi}]")
    kron = half * float(np.dot(_KRONROD_W, vals))
    gauss = half * float(np.dot(_GAUSS_W, vals))
    # QUADPACK error heuristic: pessimistic on rough intervals, sharp on smooth ones
    err = abs(kron - gauss)
    resasc = abs(half) * float(np.dot(_KRONROD_W, np.abs(vals - kron / (2.0 * half))))
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    resabs = abs(half) * float(np.dot(_KRONROD_W, np.abs(vals)))
    if resabs > np.finfo(float).tiny / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    return kron, err


def _vectorize(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(x: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(f(x), dtype=float)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([f(float(t)) for t in x], dtype=float)

    return g


def adaptive_quad(
    f: Callable,
    lower: float,
    upper: float,
    settings: QuadratureSettings = DEFAULT_QUAD,
) -> float:
    """Globally adaptive 21-point Gauss-Kronrod integration.

    ``upper`` may be ``math.inf``; the half-line is mapped onto ``[0, 1)`` by
    ``t = lower + s / (1 - s)``. Endpoint singularities are fine as long as
    they are integrable (Kronrod nodes never touch the endpoints). ``f`` may
    be scalar or vectorized.
    """
    if math.isinf(lower):
        raise ValueError("lower limit must be finite")
    if upper == lower:
        return 0.0
    if upper < lower:
        return -adaptive_quad(f, upper, lower, settings)
    fv = _vectorize(f)
    if math.isinf(upper):
        def g(s: np.ndarray) -> np.ndarray:
            one_minus = 1.0 - s
            return fv(lower + s / one_minus) / (one_minus * one_minus)

        a, b = 0.0, 1.0
    else:
        g, a, b = fv, lower, upper

    val, err = _gk21(g, a, b)
    heap = [(-err, a, b, val)]
    total_val, total_err = val, err
    n_sub = 1
    while total_err > max(settings.abs_tol, settings.rel_tol * abs(total_val)):
        if n_sub >= settings.max_subdivisions:
            raise ConvergenceError(
                f"adaptive_quad: {n_sub} subdivisions exhausted "
                f"(estimate {total_val:.6g}, error {total_err:.3g})"
            )
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            # interval collapsed to machine resolution; accept what we have
            break
        v1, e1 = _gk21(g, lo, mid)
        v2, e2 = _gk21(g, mid, hi)
        total_val += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n_sub += 1
        if n_sub % 64 == 0:
            # refresh the running sums to stop rounding drift
            total_val = math.fsum(item[3] for item in heap)
            total_err = math.fsum(-item[0] for item in heap)
    return math.fsum(item[3] for item in heap)
