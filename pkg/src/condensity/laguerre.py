"""Laguerre-series density approximation for the squared QR diagonals.

The distribution of a squared diagonal entry is approximated by a Gamma
density (matched to the first two empirical moments) times a series of
generalized Laguerre polynomials whose coefficients come from the higher
empirical moments.  The convention is L_m(y, alpha) := L_m^(alpha-1)(y),
the family orthogonal under the weight y^(alpha-1) e^-y, which is the
unique normalization for which moment matching forces b_0 = 1 and b_1 = 0.
The expected logarithm of the variable has a closed form in the fitted
parameters and the digamma function.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .specfun import digamma, laguerre_eval, laguerre_polynomial, log_gamma

__all__ = [
    "UnderdispersedMomentsError",
    "EmpiricalMoments",
    "GammaFit",
    "LaguerreExpansion",
    "fit_gamma",
    "expansion_coefficients",
    "density_eval",
    "expected_log",
    "histogram_l2",
    "write_expansion_csv",
    "read_expansion_csv",
]


class UnderdispersedMomentsError(ValueError):
    """The sample variance is nonpositive, so no Gamma density fits."""


@dataclass
class EmpiricalMoments:
    """Raw moments gamma_0 .. gamma_J of a nonnegative sample (gamma_0 = 1)."""

    values: np.ndarray
    count: int

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or len(self.values) < 1:
            raise ValueError("moments must be a nonempty 1-D float array")
        if self.values[0] != 1.0:
            raise ValueError("gamma_0 must equal 1")
        if self.count < 1:
            raise ValueError("sample count must be >= 1")

    @property
    def order(self) -> int:
        return len(self.values) - 1

    @classmethod
    def from_samples(cls, samples, order: int) -> "EmpiricalMoments":
        x = np.asarray(samples, dtype=float)
        if x.ndim != 1 or len(x) == 0:
            raise ValueError("samples must be a nonempty 1-D array")
        vals = np.empty(order + 1)
        vals[0] = 1.0
        power = np.ones_like(x)
        for j in range(1, order + 1):
            power = power * x
            vals[j] = power.mean()
        return cls(values=vals, count=len(x))


@dataclass
class GammaFit:
    """Shape/scale parameters of the leading Gamma density."""

    shape: float
    scale: float

    def __post_init__(self):
        for name, v in (("shape", self.shape), ("scale", self.scale)):
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0")


@dataclass
class LaguerreExpansion:
    """Truncated Laguerre correction of a Gamma density.

    ``coefficients[m]`` multiplies L_m(y / expansion_scale, shape); the
    leading coefficient is exactly 1 by construction.
    """

    fit: GammaFit
    expansion_scale: float
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if not (np.isfinite(self.expansion_scale) and self.expansion_scale > 0):
            raise ValueError("expansion_scale must be finite and > 0")
        if len(self.coefficients) < 1:
            raise ValueError("at least the leading coefficient is required")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def truncated(self, order: int) -> "LaguerreExpansion":
        """The same expansion cut to ``order + 1`` leading coefficients."""
        if not 0 <= order <= self.order:
            raise ValueError(f"order must be in 0..{self.order}")
        return replace(self, coefficients=self.coefficients[: order + 1].copy())


def fit_gamma(moments: EmpiricalMoments) -> GammaFit:
    """Moment-matched Gamma parameters.

    shape = gamma_1^2 / (gamma_2 - gamma_1^2) and
    scale = (gamma_2 - gamma_1^2) / gamma_1.
    """
    if moments.order < 2:
        raise ValueError("need moments up to order 2")
    g1, g2 = moments.values[1], moments.values[2]
    spread = g2 - g1 * g1
    if g1 <= 0 or spread <= 0:
        raise UnderdispersedMomentsError(
            f"moment fit needs gamma_1 > 0 and gamma_2 > gamma_1^2 "
            f"(gamma_1 = {g1:.6g}, gamma_2 - gamma_1^2 = {spread:.6g})"
        )
    return GammaFit(shape=g1 * g1 / spread, scale=spread / g1)


def expansion_coefficients(
    moments: EmpiricalMoments, fit: GammaFit, order: int
) -> LaguerreExpansion:
    """Series coefficients from the empirical moments.

    b_h = (-1)^h Gamma(shape) sum_j (-1)^j C(h, j) g_{h-j} / Gamma(shape + h - j)
    where g_j = gamma_j / scale^j are the scale-normalized moments, so the
    coefficients describe the law of y / scale.  The expansion scale is set
    to the fitted Gamma scale, which makes b_1 vanish identically.
    """
    if order > moments.order:
        raise ValueError(
            f"order {order} exceeds the {moments.order} available moments"
        )
    scaled = moments.values / fit.scale ** np.arange(moments.order + 1)
    lg_shape = log_gamma(fit.shape)
    coeffs = np.empty(order + 1)
    coeffs[0] = 1.0
    for h in range(1, order + 1):
        acc = 0.0
        for j in range(h + 1):
            ratio = math.exp(lg_shape - log_gamma(fit.shape + h - j))
            acc += (-1) ** j * math.comb(h, j) * scaled[h - j] * ratio
        coeffs[h] = (-1) ** h * acc
    return LaguerreExpansion(fit=fit, expansion_scale=fit.scale, coefficients=coeffs)


def density_eval(expansion: LaguerreExpansion, y):
    """Evaluate the truncated series density at y >= 0 (scalar or array).

    Truncation can make the value negative; it is returned as computed.
    The Gamma factor is evaluated in the log domain, so large shapes and
    tiny scales do not overflow.
    """
    alpha, beta = expansion.fit.shape, expansion.fit.scale
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0):
        raise ValueError("y must be >= 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    pos = arr > 0
    with np.errstate(divide="ignore"):
        log_gamma_factor = (
            (alpha - 1.0) * np.log(arr[pos])
            - arr[pos] / beta
            - alpha * np.log(beta)
            - log_gamma(alpha)
        )
    series = np.zeros(pos.sum())
    x = arr[pos] / expansion.expansion_scale
    for m, b in enumerate(expansion.coefficients):
        if b != 0.0:
            series += b * laguerre_eval(m, alpha - 1.0, x)
    out[pos] = np.exp(log_gamma_factor) * series
    if np.any(~pos):
        out[~pos] = _density_at_origin(expansion)
    return float(out[0]) if scalar else out


def _density_at_origin(expansion: LaguerreExpansion) -> float:
    alpha, beta = expansion.fit.shape, expansion.fit.scale
    if alpha > 1.0:
        return 0.0
    if alpha < 1.0:
        return math.inf
    series = sum(
        b * laguerre_eval(m, 0.0, 0.0) for m, b in enumerate(expansion.coefficients)
    )
    return series / beta


def expected_log(expansion: LaguerreExpansion) -> float:
    """Closed form for E[log Y] under the truncated series density.

    Term m contributes b_m sum_h c_{hm} [Gamma(shape+h)/Gamma(shape)]
    (scale/expansion_scale)^h [log scale + digamma(shape+h)], with c_{hm}
    the monomial coefficients of L_m^(shape-1).  With zero correction terms
    this is exactly log scale + digamma(shape).
    """
    alpha, beta = expansion.fit.shape, expansion.fit.scale
    tau = expansion.expansion_scale
    lg_shape = log_gamma(alpha)
    total = expansion.coefficients[0] * (math.log(beta) + digamma(alpha))
    for m in range(1, expansion.order + 1):
        b = expansion.coefficients[m]
        if b == 0.0:
            continue
        chm = laguerre_polynomial(m, alpha - 1.0).coefficients
        inner = 0.0
        for h in range(m + 1):
            gamma_ratio = math.exp(log_gamma(alpha + h) - lg_shape)
            inner += (
                chm[h]
                * gamma_ratio
                * (beta / tau) ** h
                * (math.log(beta) + digamma(alpha + h))
            )
        total += b * inner
    return float(total)


def histogram_l2(expansion: LaguerreExpansion, samples, order=None) -> float:
    """L2 distance between the (possibly truncated) density and a histogram.

    The histogram uses Freedman-Diaconis bins with density normalization;
    the series is evaluated at bin centers and the squared gaps are summed
    with the bin width as measure.
    """
    use = expansion if order is None else expansion.truncated(order)
    x = np.asarray(samples, dtype=float)
    heights, edges = np.histogram(x, bins="fd", density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    gaps = density_eval(use, centers) - heights
    return float(np.sqrt(np.sum(gaps**2) * width))


def write_expansion_csv(rows, path) -> None:
    """Dump per-index expansions as ``k,alpha,beta,tau,b0,...,bM`` rows.

    ``rows`` is an iterable of (k, LaguerreExpansion); all expansions must
    share one truncation order so the header is well defined.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("nothing to write")
    order = rows[0][1].order
    for _, exp in rows:
        if exp.order != order:
            raise ValueError("all expansions must share one truncation order")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "alpha", "beta", "tau"] + [f"b{m}" for m in range(order + 1)])
        for k, exp in rows:
            writer.writerow(
                [k, f"{exp.fit.shape:.17g}", f"{exp.fit.scale:.17g}",
                 f"{exp.expansion_scale:.17g}"]
                + [f"{b:.17g}" for b in exp.coefficients]
            )


def read_expansion_csv(path):
    """Inverse of :func:`write_expansion_csv`; returns a list of (k, expansion)."""
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:4] != ["k", "alpha", "beta", "tau"]:
            raise ValueError(f"{path}: expected header 'k,alpha,beta,tau,b0,...'")
        for row in reader:
            if not row:
                continue
            k = int(row[0])
            fit = GammaFit(shape=float(row[1]), scale=float(row[2]))
            exp = LaguerreExpansion(
                fit=fit,
                expansion_scale=float(row[3]),
                coefficients=np.array([float(v) for v in row[4:]]),
            )
            out.append((k, exp))
    return out
