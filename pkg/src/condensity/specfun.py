"""Special functions: log-gamma, digamma, generalized Laguerre polynomials.

Self-contained double-precision implementations.  log_gamma and digamma use
the asymptotic (de Moivre) series after a fixed upward recurrence shift; the
Laguerre polynomials use the standard three-term recurrence, with monomial
coefficients available separately for closed-form expectation formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "log_gamma",
    "digamma",
    "laguerre_eval",
    "laguerre_polynomial",
    "LaguerrePolynomial",
]

# Asymptotic series valid for x >= ~10; shifting by a fixed 16 keeps the
# argument above that for every positive x and stays branch-free on arrays.
_SHIFT = 16

# B_{2j} / (2j (2j-1)), j = 1..7  (log-gamma tail, in 1/x^(2j-1))
_LGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)

# -B_{2j} / (2j), j = 1..7  (digamma tail, in 1/x^(2j))
_PSI_TAIL = (
    -1.0 / 12.0,
    1.0 / 120.0,
    -1.0 / 252.0,
    1.0 / 240.0,
    -1.0 / 132.0,
    691.0 / 32760.0,
    -1.0 / 12.0,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _positive_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} requires finite x > 0")
    return arr


def log_gamma(x):
    """Natural log of the Gamma function for x > 0 (scalar or array)."""
    arr = _positive_array(x, "log_gamma")
    shift = np.zeros_like(arr)
    for i in range(_SHIFT):
        shift += np.log(arr + i)
    xs = arr + _SHIFT
    u = 1.0 / (xs * xs)
    tail = np.zeros_like(arr)
    for c in reversed(_LGAMMA_TAIL):
        tail = tail * u + c
    tail /= xs
    out = (xs - 0.5) * np.log(xs) - xs + _HALF_LOG_TWO_PI + tail - shift
    return float(out) if out.ndim == 0 else out


def digamma(x):
    """Logarithmic derivative of the Gamma function for x > 0 (scalar or array)."""
    arr = _positive_array(x, "digamma")
    acc = np.zeros_like(arr)
    for i in range(_SHIFT):
        acc += 1.0 / (arr + i)
    xs = arr + _SHIFT
    u = 1.0 / (xs * xs)
    tail = np.zeros_like(arr)
    for c in reversed(_PSI_TAIL):
        tail = tail * u + c
    out = np.log(xs) - 0.5 / xs + tail * u - acc
    return float(out) if out.ndim == 0 else out


_MAX_DEGREE = 200


def _check_laguerre_args(m, a):
    if not isinstance(m, (int, np.integer)) or m < 0 or m > _MAX_DEGREE:
        raise ValueError(f"Laguerre degree must be an integer in 0..{_MAX_DEGREE}, got {m}")
    if not a > -1.0:
        raise ValueError(f"Laguerre parameter must exceed -1, got {a}")


def laguerre_eval(m, a, y):
    """Generalized Laguerre polynomial L_m^(a)(y) by three-term recurrence.

    Orthogonal on [0, inf) under the weight y^a exp(-y).  Accepts scalar or
    array y; degrees up to 200 are supported (the recurrence is stable there).
    """
    _check_laguerre_args(m, a)
    arr = np.asarray(y, dtype=float)
    prev = np.ones_like(arr)
    if m == 0:
        return float(prev) if prev.ndim == 0 else prev
    cur = 1.0 + a - arr
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 + a - arr) * cur - (k + a) * prev) / (k + 1)
    return float(cur) if cur.ndim == 0 else cur


@dataclass(frozen=True)
class LaguerrePolynomial:
    """A generalized Laguerre polynomial in the monomial basis.

    ``coefficients[h]`` multiplies y^h; the leading coefficient is
    (-1)^degree / degree!.
    """

    degree: int
    parameter: float
    coefficients: np.ndarray

    def __post_init__(self):
        if len(self.coefficients) != self.degree + 1:
            raise ValueError("coefficient count must equal degree + 1")

    def __call__(self, y):
        arr = np.asarray(y, dtype=float)
        out = np.zeros_like(arr)
        for c in self.coefficients[::-1]:
            out = out * arr + c
        return float(out) if out.ndim == 0 else out


def laguerre_polynomial(m, a):
    """Monomial coefficients of L_m^(a) via the stable term-ratio product.

    c_0 = binom(m+a, m) and c_{h+1}/c_h = -(m-h) / ((h+1)(a+h+1)), which
    avoids Gamma-ratio cancellation for moderate degrees.
    """
    _check_laguerre_args(m, a)
    coeffs = np.empty(m + 1)
    c = 1.0
    for i in range(1, m + 1):
        c *= (a + i) / i
    coeffs[0] = c
    for h in range(m):
        c *= -(m - h) / ((h + 1) * (a + h + 1))
        coeffs[h + 1] = c
    return LaguerrePolynomial(degree=m, parameter=float(a), coefficients=coeffs)
