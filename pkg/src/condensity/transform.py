"""The reciprocal-moment transform and the density it pushes forward.

For a sequence d with d_0 != 0, the transform returns the coefficients of
the reciprocal formal power series: if F(z) = sum_k d_k z^-k then the output
dt satisfies F(z) * sum_k dt_k z^-k = 1.  Equivalently dt solves
T(d) dt = e_1 with T the lower-triangular Toeplitz matrix of d, which makes
the map an involution.  The transformed sequence feeds the zero pencil, and
its joint density (the pushforward of the Gaussian moment density) together
with a small-noise Gaussian approximation live here too.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .measure import MomentSequence

__all__ = [
    "IllConditionedTransformError",
    "toeplitz_lower_triangular",
    "reciprocal_coefficients",
    "reciprocal_moments",
    "reciprocal_entry_determinant",
    "PushforwardDensity",
    "log_pushforward_density",
    "pushforward_density",
    "log_gaussian_approximation",
    "gaussian_approximation",
    "read_moment_csv",
    "write_moment_csv",
]

#: default relative floor for |d_0| below which the transform is refused
EPS0_RELATIVE = 1e-12


class IllConditionedTransformError(ValueError):
    """|d_0| is too small for a trustworthy reciprocal sequence."""

    def __init__(self, magnitude: float, threshold: float):
        self.magnitude = magnitude
        self.threshold = threshold
        super().__init__(
            f"|d_0| = {magnitude:.3e} is at or below the threshold {threshold:.3e}"
        )


def toeplitz_lower_triangular(values) -> np.ndarray:
    """Dense lower-triangular Toeplitz matrix with the sequence as first column."""
    d = np.asarray(values, dtype=complex)
    n = len(d)
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        out[i:, i] = d[: n - i]
    return out


def _check_head(values: np.ndarray, eps0) -> None:
    head = np.abs(values[..., 0])
    if eps0 is None:
        thresh = EPS0_RELATIVE * np.max(np.abs(values), axis=-1)
    else:
        thresh = np.broadcast_to(eps0, head.shape)
    bad = head <= thresh
    if np.any(bad):
        i = np.argmax(bad)
        raise IllConditionedTransformError(
            float(np.ravel(head)[i]), float(np.ravel(thresh)[i])
        )


def reciprocal_coefficients(values, eps0=None) -> np.ndarray:
    """Reciprocal power-series coefficients along the last axis.

    Forward substitution in O(n^2): dt_0 = 1/d_0 and
    dt_k = -(sum_{j=1}^{k} d_j dt_{k-j}) / d_0.  Accepts a single sequence
    or a stack of sequences (leading axes are batch axes).

    Raises IllConditionedTransformError when |d_0| does not clear ``eps0``
    (default: 1e-12 times the largest entry of that sequence).
    """
    d = np.asarray(values, dtype=complex)
    _check_head(d, eps0)
    out = np.zeros_like(d)
    out[..., 0] = 1.0 / d[..., 0]
    for k in range(1, d.shape[-1]):
        acc = np.einsum("...j,...j->...", d[..., 1 : k + 1], out[..., k - 1 :: -1][..., :k])
        out[..., k] = -acc / d[..., 0]
    return out


def reciprocal_moments(moments: MomentSequence, eps0=None) -> MomentSequence:
    """MomentSequence wrapper around :func:`reciprocal_coefficients`."""
    return MomentSequence(reciprocal_coefficients(moments.values, eps0))


def reciprocal_entry_determinant(moments: MomentSequence, k: int) -> complex:
    """Entry k of the reciprocal sequence via a Hankel determinant.

    Evaluates (-1)^(k(k+1)/2) det[H_k] / d_0^(k+1) where H_k is the k x k
    Hankel matrix of the sequence shifted to start at index 2 - k (entries
    with negative index are zero).  Reversing the rows of H_k gives a
    Toeplitz Hessenberg matrix whose determinant satisfies the last-column
    expansion D_m = sum_i (-1)^(m-i) d_{m-i+1} d_0^(m-i) D_{i-1}, so each
    call is O(k^2) and fully independent of the forward substitution —
    this exists as a cross-check of :func:`reciprocal_moments`, not as a
    fast path.
    """
    d = moments.values
    if not 0 <= k <= len(d) - 1:
        raise ValueError(f"k must be in 0..{len(d) - 1}, got {k}")
    _check_head(d, None)
    if k == 0:
        return complex(1.0 / d[0])
    minors = np.zeros(k + 1, dtype=complex)
    minors[0] = 1.0
    for m in range(1, k + 1):
        acc = 0.0 + 0.0j
        head_power = 1.0 + 0.0j
        for i in range(m, 0, -1):  # i counts surviving leading block size
            acc += (-1) ** (m - i) * d[m - i + 1] * head_power * minors[i - 1]
            head_power *= d[0]
        minors[m] = acc
    row_reversal_sign = (-1) ** (k * (k - 1) // 2)
    hankel_det = row_reversal_sign * minors[k]
    return complex((-1) ** (k * (k + 1) // 2) * hankel_det / d[0] ** (k + 1))


@dataclass
class PushforwardDensity:
    """Gaussian moment model (mean vector and total per-coordinate variance).

    The coordinate count must be even: the Jacobian sign argument for the
    transformed density only closes for even length.
    """

    mu: np.ndarray
    sigma: float

    def __post_init__(self):
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=complex))
        if self.mu.ndim != 1 or len(self.mu) == 0:
            raise ValueError("mu must be a nonempty 1-D complex array")
        if len(self.mu) % 2 != 0:
            raise ValueError("the model length n must be even")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma must be finite and > 0")

    @property
    def n(self) -> int:
        return len(self.mu)


def _model_values(model: PushforwardDensity, y) -> np.ndarray:
    vals = y.values if isinstance(y, MomentSequence) else np.asarray(y, dtype=complex)
    if vals.shape != model.mu.shape:
        raise ValueError(f"y must have length {model.n}")
    return vals


def log_pushforward_density(model: PushforwardDensity, y) -> float:
    """Log density of the transformed moment vector at y.

    log g(y) = -n log(pi sigma^2 |y_0|^2) - sum_k |T(y)_k - mu_k|^2 / sigma^2
    with T the reciprocal transform (its own inverse).  The squared modulus
    |y_0|^2 keeps the density real and positive.
    """
    vals = _model_values(model, y)
    back = reciprocal_coefficients(vals)
    quad = float(np.sum(np.abs(back - model.mu) ** 2)) / model.sigma**2
    prefactor = -model.n * (
        np.log(np.pi) + 2.0 * np.log(model.sigma) + np.log(np.abs(vals[0]) ** 2)
    )
    return float(prefactor - quad)


def pushforward_density(model: PushforwardDensity, y) -> float:
    return float(np.exp(log_pushforward_density(model, y)))


def log_gaussian_approximation(model: PushforwardDensity, y) -> float:
    """Log of the small-noise Gaussian approximation to the pushforward.

    An isotropic complex Gaussian centered at the transformed mean with
    per-coordinate variance sigma^2 / |mu_0|^2:
    log g(y) = n log(|mu_0|^2 / (pi sigma^2))
               - |mu_0|^2 sum_k |y_k - T(mu)_k|^2 / sigma^2.
    """
    vals = _model_values(model, y)
    center = reciprocal_coefficients(model.mu)
    head_sq = float(np.abs(model.mu[0]) ** 2)
    quad = head_sq * float(np.sum(np.abs(vals - center) ** 2)) / model.sigma**2
    prefactor = model.n * (np.log(head_sq) - np.log(np.pi) - 2.0 * np.log(model.sigma))
    return float(prefactor - quad)


def gaussian_approximation(model: PushforwardDensity, y) -> float:
    return float(np.exp(log_gaussian_approximation(model, y)))


def write_moment_csv(moments: MomentSequence, path) -> None:
    """Write a sequence as CSV rows ``k,re,im`` in index order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "re", "im"])
        for k, v in enumerate(moments.values):
            writer.writerow([k, f"{v.real:.17g}", f"{v.imag:.17g}"])


def read_moment_csv(path) -> MomentSequence:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["k", "re", "im"]:
            raise ValueError(f"{path}: expected header 'k,re,im'")
        values = []
        for row in reader:
            if not row:
                continue
            k, re, im = int(row[0]), float(row[1]), float(row[2])
            if k != len(values):
                raise ValueError(f"{path}: rows must be in index order")
            values.append(complex(re, im))
    return MomentSequence(np.array(values))
