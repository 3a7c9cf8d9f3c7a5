"""Atomic measures on the unit disk: moments, noise, and the Cauchy transform.

A measure is a finite set of weighted point masses.  Everything downstream
consumes its complex moment sequence, so this module owns moment generation
(exact and with circular Gaussian noise), direct evaluation of the Cauchy
transform, and polynomial-based reference routines for its zeros and poles
that are independent of the pencil machinery.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AtomicMeasure",
    "MomentSequence",
    "NoiseModel",
    "PoleEvaluationError",
    "DegreeDropWarning",
    "exact_moments",
    "sample_moments",
    "sample_moment_stack",
    "cauchy_transform",
    "cauchy_zeros",
    "cauchy_poles",
    "read_measure_file",
    "write_measure_file",
    "demo_measure",
]


class PoleEvaluationError(ValueError):
    """Raised when the Cauchy transform is evaluated (numerically) at a node."""


class DegreeDropWarning(UserWarning):
    """The numerator polynomial lost leading terms (weights summed to zero)."""


@dataclass
class AtomicMeasure:
    """Weighted point masses ``sum_j weights[j] * delta(z - nodes[j])``.

    All nodes must lie strictly inside the unit disk, be pairwise distinct,
    and carry nonzero weights.
    """

    weights: np.ndarray
    nodes: np.ndarray

    def __post_init__(self):
        self.weights = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        self.nodes = np.atleast_1d(np.asarray(self.nodes, dtype=complex))
        if self.weights.shape != self.nodes.shape or self.weights.ndim != 1:
            raise ValueError("weights and nodes must be 1-D arrays of equal length")
        if self.natoms == 0:
            raise ValueError("a measure needs at least one atom")
        if np.any(np.abs(self.nodes) >= 1.0):
            raise ValueError("all nodes must lie strictly inside the unit disk")
        if np.any(self.weights == 0):
            raise ValueError("weights must be nonzero")
        sep = np.abs(self.nodes[:, None] - self.nodes[None, :])
        if np.any(sep[~np.eye(self.natoms, dtype=bool)] == 0.0):
            raise ValueError("nodes must be pairwise distinct")

    @property
    def natoms(self) -> int:
        return len(self.nodes)


@dataclass
class MomentSequence:
    """A finite complex moment sequence d_0 .. d_{n-1}."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if self.values.ndim != 1 or len(self.values) == 0:
            raise ValueError("a moment sequence is a nonempty 1-D complex array")

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class NoiseModel:
    """Circularly symmetric complex Gaussian noise of total variance sigma^2.

    Real and imaginary parts are independent with variance sigma^2 / 2 each.
    Each realization index gets its own reproducible substream derived from
    (seed, realization), so Monte Carlo runs can be generated in any order.
    """

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError("sigma must be finite and >= 0")

    def generator(self, realization: int = 0) -> np.random.Generator:
        if realization < 0:
            raise ValueError("realization index must be >= 0")
        return np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, realization])

    def draw(self, n: int, realization: int = 0) -> np.ndarray:
        """One length-n complex noise vector from the given substream."""
        if self.sigma == 0.0:
            return np.zeros(n, dtype=complex)
        g = self.generator(realization).standard_normal((n, 2))
        return self.sigma / np.sqrt(2.0) * (g[:, 0] + 1j * g[:, 1])


def exact_moments(measure: AtomicMeasure, n: int) -> MomentSequence:
    """Noiseless moments d_k = sum_j c_j xi_j^k for k = 0..n-1.

    Uses running node powers, with 0^0 treated as 1 so that d_0 is always
    the total weight even when a node sits at the origin.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    powers = np.ones(measure.natoms, dtype=complex)
    out = np.empty(n, dtype=complex)
    for k in range(n):
        out[k] = np.dot(measure.weights, powers)
        powers = powers * measure.nodes
    return MomentSequence(out)


def sample_moments(
    measure: AtomicMeasure, n: int, noise: NoiseModel, realization: int = 0
) -> MomentSequence:
    """Noisy moments: the exact sequence plus one complex Gaussian draw.

    Deterministic given (noise.seed, realization); sigma = 0 returns the
    exact moments bit for bit.
    """
    clean = exact_moments(measure, n).values
    return MomentSequence(clean + noise.draw(n, realization))


def sample_moment_stack(
    measure: AtomicMeasure, n: int, noise: NoiseModel, count: int
) -> np.ndarray:
    """(count, n) array whose row r equals sample_moments(..., realization=r)."""
    clean = exact_moments(measure, n).values
    out = np.empty((count, n), dtype=complex)
    for r in range(count):
        out[r] = clean + noise.draw(n, r)
    return out


_POLE_TOL = 1e-14


def cauchy_transform(measure: AtomicMeasure, z: complex) -> complex:
    """sum_j c_j / (z - xi_j); refuses z within 1e-14 of a node."""
    diffs = z - measure.nodes
    if np.any(np.abs(diffs) <= _POLE_TOL):
        raise PoleEvaluationError(f"z = {z} coincides with a node of the measure")
    return complex(np.sum(measure.weights / diffs))


def _numerator_coefficients(measure: AtomicMeasure) -> np.ndarray:
    """Ascending coefficients of N(z) = sum_j c_j prod_{i != j} (z - xi_i)."""
    p = measure.natoms
    total = np.zeros(p, dtype=complex)
    for j in range(p):
        poly = np.ones(1, dtype=complex)
        for i in range(p):
            if i != j:
                poly = np.convolve(poly, np.array([-measure.nodes[i], 1.0]))
        total += measure.weights[j] * poly
    return total


def _polish_root(coeffs: np.ndarray, root: complex) -> complex:
    # one Newton step; coeffs ascending
    deriv = coeffs[1:] * np.arange(1, len(coeffs))
    pv = np.polyval(coeffs[::-1], root)
    dv = np.polyval(deriv[::-1], root)
    return root - pv / dv if dv != 0 else root


def cauchy_zeros(measure: AtomicMeasure) -> np.ndarray:
    """Zeros of the Cauchy transform via numerator-polynomial roots.

    Expands the degree-(p-1) numerator explicitly, takes companion-matrix
    eigenvalues (the eigensolver balances internally), and polishes each
    root with one Newton step.  Returns p-1 roots when the weights do not
    sum to zero; leading-coefficient cancellation drops the degree and is
    reported through DegreeDropWarning.
    """
    if measure.natoms == 1:
        return np.empty(0, dtype=complex)
    coeffs = _numerator_coefficients(measure)
    scale = np.max(np.abs(coeffs))
    trimmed = coeffs
    while len(trimmed) > 1 and abs(trimmed[-1]) <= 1e-14 * scale:
        trimmed = trimmed[:-1]
    if len(trimmed) < len(coeffs):
        warnings.warn(
            f"weights sum to zero: numerator degree dropped to {len(trimmed) - 1}",
            DegreeDropWarning,
            stacklevel=2,
        )
    deg = len(trimmed) - 1
    if deg == 0:
        return np.empty(0, dtype=complex)
    monic = trimmed / trimmed[-1]
    companion = np.zeros((deg, deg), dtype=complex)
    companion[1:, :-1] = np.eye(deg - 1)
    companion[:, -1] = -monic[:-1]
    roots = np.linalg.eigvals(companion)
    return np.array([_polish_root(trimmed, r) for r in roots])


def cauchy_poles(measure: AtomicMeasure) -> np.ndarray:
    """Poles of the Cauchy transform, i.e. the nodes themselves."""
    return measure.nodes.copy()


def read_measure_file(path) -> AtomicMeasure:
    """Parse an atom-per-line text file: ``c_re c_im xi_re xi_im``.

    Blank lines and ``#`` comments (whole-line or trailing) are ignored.
    """
    weights, nodes = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 'c_re c_im xi_re xi_im'")
            c_re, c_im, x_re, x_im = map(float, parts)
            weights.append(complex(c_re, c_im))
            nodes.append(complex(x_re, x_im))
    return AtomicMeasure(weights=np.array(weights), nodes=np.array(nodes))


def write_measure_file(measure: AtomicMeasure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# c_re c_im xi_re xi_im\n")
        for c, x in zip(measure.weights, measure.nodes):
            fh.write(f"{c.real:.17g} {c.imag:.17g} {x.real:.17g} {x.imag:.17g}\n")


def demo_measure() -> AtomicMeasure:
    """Five-atom demo measure used by the CLI defaults and the demo scripts.

    Two pairs of nodes sit close together near the unit circle with a heavy
    fifth atom apart from them, which makes zero recovery and condensed
    density estimation nontrivial at realistic noise levels.
    """
    decay = np.array([-0.1, -0.05, -0.0001, -0.0001, -0.3])
    turns = np.array([-0.3, -0.28, 0.2, 0.21, -0.35])
    nodes = np.exp(decay + 2j * np.pi * turns)
    weights = np.array([6.0, 3.0, 1.0, 1.0, 20.0], dtype=complex)
    return AtomicMeasure(weights=weights, nodes=nodes)
