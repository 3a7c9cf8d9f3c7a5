"""Condensed-density estimation on a lattice over the complex plane.

The estimator evaluates, at every lattice node z, the sum over the pencil
diagonal of digamma(R_kk(z)^2 / (sigma^2 beta) + 1) — a smoothed stand-in
for the expected log-volume of the pencil — then applies a discrete
Laplacian and normalizes the positive part into a probability field whose
peaks mark the likely locations of zeros (or poles).  Realizations are
independent; Monte Carlo mode accumulates the per-realization potentials
in a fixed order before differentiating, so results are reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .measure import MomentSequence
from .pencil import build_pencil, qr_diagonal_many
from .specfun import digamma
from .transform import reciprocal_coefficients

__all__ = [
    "NormalizationError",
    "ModeShortfallWarning",
    "GridSpec",
    "DensityGrid",
    "EstimatorConfig",
    "CondensedEstimate",
    "potential_field",
    "discrete_laplacian",
    "normalize",
    "estimate_condensed",
    "extract_modes",
    "write_grid_csv",
    "read_grid_csv",
    "write_grid_pgm",
]


class NormalizationError(ValueError):
    """The field has no positive mass to normalize."""


class ModeShortfallWarning(UserWarning):
    """Fewer local maxima exist than were requested."""


@dataclass(frozen=True)
class GridSpec:
    """An m x m lattice over [x_min, x_max] x [y_min, y_max]."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    m: int

    def __post_init__(self):
        if self.m < 3:
            raise ValueError("m must be >= 3")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("the grid rectangle must be nondegenerate")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.m)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.m)

    @property
    def cell_width(self) -> float:
        return (self.x_max - self.x_min) / (self.m - 1)

    @property
    def cell_height(self) -> float:
        return (self.y_max - self.y_min) / (self.m - 1)

    @property
    def cell_area(self) -> float:
        return self.cell_width * self.cell_height

    def nodes(self) -> np.ndarray:
        """Complex lattice nodes, shape (m, m); row index follows the imaginary axis."""
        return self.xs[None, :] + 1j * self.ys[:, None]

    def require_square_cells(self) -> float:
        hx, hy = self.cell_width, self.cell_height
        if abs(hx - hy) > 1e-9 * max(hx, hy):
            raise ValueError(f"grid cells must be square (hx = {hx}, hy = {hy})")
        return hx


def default_grid(m: int = 100) -> GridSpec:
    """Unit disk with margin: [-1.2, 1.2]^2, covering nodes and their hull."""
    return GridSpec(x_min=-1.2, x_max=1.2, y_min=-1.2, y_max=1.2, m=m)


@dataclass
class DensityGrid:
    """Real values on a GridSpec lattice; values[i, j] sits at (xs[j], ys[i])."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.spec.m, self.spec.m):
            raise ValueError(f"values must be {self.spec.m} x {self.spec.m}")


@dataclass
class EstimatorConfig:
    """Noise scale, smoothing parameter, pencil order, and pole/zero mode."""

    sigma: float
    beta_smooth: float
    order: int
    kind: Literal["pole", "zero"] = "zero"

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError("sigma must be finite and > 0")
        if not (np.isfinite(self.beta_smooth) and self.beta_smooth > 0):
            raise ValueError("beta_smooth must be finite and > 0")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.kind not in ("pole", "zero"):
            raise ValueError("kind must be 'pole' or 'zero'")


def potential_field(moments, cfg: EstimatorConfig, spec: GridSpec) -> DensityGrid:
    """Pre-Laplacian field sum_k digamma(R_kk(z)^2 / (sigma^2 beta) + 1).

    For zero kind the reciprocal transform is applied to the sequence before
    the pencil is built.  Lattice nodes are evaluated as one data-parallel
    batch against the shared read-only pencil (no cross-node writes), so
    the computation is deterministic and trivially parallel.
    """
    vals = moments.values if isinstance(moments, MomentSequence) else np.asarray(moments, dtype=complex)
    seq = reciprocal_coefficients(vals) if cfg.kind == "zero" else vals
    pencil = build_pencil(seq, cfg.order, cfg.kind)
    diag_sq = qr_diagonal_many(pencil, spec.nodes())
    field = digamma(diag_sq / (cfg.sigma**2 * cfg.beta_smooth) + 1.0).sum(axis=-1)
    return DensityGrid(spec=spec, values=field)


def discrete_laplacian(grid: DensityGrid) -> DensityGrid:
    """Five-point Laplacian on the interior; the boundary ring is set to zero.

    Requires square cells.  The estimate is only meaningful away from the
    boundary, so one-sided boundary stencils are deliberately not used.
    """
    h = grid.spec.require_square_cells()
    f = grid.values
    out = np.zeros_like(f)
    out[1:-1, 1:-1] = (
        f[2:, 1:-1] + f[:-2, 1:-1] + f[1:-1, 2:] + f[1:-1, :-2] - 4.0 * f[1:-1, 1:-1]
    ) / (h * h)
    return DensityGrid(spec=grid.spec, values=out)


def normalize(grid: DensityGrid) -> DensityGrid:
    """Clip negatives to zero and scale so the field integrates to one."""
    if not np.all(np.isfinite(grid.values)):
        raise NormalizationError("field contains non-finite values")
    clipped = np.clip(grid.values, 0.0, None)
    mass = clipped.sum() * grid.spec.cell_area
    if mass <= 0.0:
        raise NormalizationError("field has no positive mass")
    return DensityGrid(spec=grid.spec, values=clipped / mass)


@dataclass
class CondensedEstimate:
    """Signed Laplacian field (raw) and its normalized positive part."""

    raw: DensityGrid
    normalized: DensityGrid


def estimate_condensed(
    moments, cfg: EstimatorConfig, spec: GridSpec, mode: Literal["single", "montecarlo"] = "single"
) -> CondensedEstimate:
    """Full estimator: potential field(s), discrete Laplacian, normalization.

    ``single`` takes one moment sequence.  ``montecarlo`` takes an iterable
    of realizations and sums their potential fields in the given order
    before differentiating; with one realization the two modes agree
    exactly.  The overall positive scale of the raw field is immaterial —
    normalization removes it.
    """
    if mode == "single":
        realizations = [moments]
    elif mode == "montecarlo":
        realizations = list(moments) if not isinstance(moments, MomentSequence) else [moments]
        if not realizations:
            raise ValueError("montecarlo mode needs at least one realization")
    else:
        raise ValueError("mode must be 'single' or 'montecarlo'")
    total = np.zeros((spec.m, spec.m))
    for ms in realizations:
        total += potential_field(ms, cfg, spec).values
    raw = discrete_laplacian(DensityGrid(spec=spec, values=total))
    return CondensedEstimate(raw=raw, normalized=normalize(raw))


def extract_modes(grid: DensityGrid, count: int, min_separation: float):
    """The ``count`` highest 8-neighborhood local maxima, greedily thinned.

    Maxima closer than ``min_separation`` to an already accepted one are
    suppressed.  The boundary ring is ignored.  If fewer maxima exist than
    requested, the shortfall is reported through ModeShortfallWarning and
    the available modes are returned.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    f = grid.values
    m = grid.spec.m
    interior = f[1:-1, 1:-1]
    neighborhood_max = np.stack(
        [f[1 + di : m - 1 + di, 1 + dj : m - 1 + dj]
         for di in (-1, 0, 1) for dj in (-1, 0, 1)]
    ).max(axis=0)
    is_peak = interior >= neighborhood_max
    xs, ys = grid.spec.xs, grid.spec.ys
    ii, jj = np.nonzero(is_peak)
    order = np.argsort(interior[ii, jj])[::-1]
    selected = []
    for t in order:
        z = complex(xs[jj[t] + 1], ys[ii[t] + 1])
        if all(abs(z - w) >= min_separation for w in selected):
            selected.append(z)
        if len(selected) == count:
            break
    if len(selected) < count:
        warnings.warn(
            f"only {len(selected)} of {count} requested modes exist",
            ModeShortfallWarning,
            stacklevel=2,
        )
    return selected


def write_grid_csv(grid: DensityGrid, path) -> None:
    """Rows ``re,im,value`` in row-major order (imaginary axis varies slowest)."""
    xs, ys = grid.spec.xs, grid.spec.ys
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("re,im,value\n")
        for i in range(grid.spec.m):
            for j in range(grid.spec.m):
                fh.write(f"{xs[j]:.17g},{ys[i]:.17g},{grid.values[i, j]:.17g}\n")


def read_grid_csv(path) -> DensityGrid:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "re,im,value":
            raise ValueError(f"{path}: expected header 're,im,value'")
        rows = [line.split(",") for line in fh if line.strip()]
    total = len(rows)
    m = int(round(total**0.5))
    if m * m != total or m < 3:
        raise ValueError(f"{path}: expected a square lattice, got {total} rows")
    res = np.array([float(r[0]) for r in rows]).reshape(m, m)
    ims = np.array([float(r[1]) for r in rows]).reshape(m, m)
    vals = np.array([float(r[2]) for r in rows]).reshape(m, m)
    spec = GridSpec(
        x_min=res[0, 0], x_max=res[0, -1], y_min=ims[0, 0], y_max=ims[-1, 0], m=m
    )
    return DensityGrid(spec=spec, values=vals)


_PGM_MAXVAL = 65535


def write_grid_pgm(grid: DensityGrid, path) -> None:
    """ASCII graymap of the field, linearly scaled from [0, max(field)].

    Row 0 of the image is the largest imaginary part.  Negative values map
    to black.  A constant-zero field produces an all-black image.
    """
    peak = float(grid.values.max())
    if peak > 0:
        scaled = np.clip(grid.values, 0.0, None) / peak * _PGM_MAXVAL
    else:
        scaled = np.zeros_like(grid.values)
    pixels = np.rint(scaled).astype(int)[::-1]  # flip so row 0 = top of plane
    m = grid.spec.m
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"P2\n{m} {m}\n{_PGM_MAXVAL}\n")
        for row in pixels:
            for start in range(0, m, 12):  # keep lines comfortably short
                fh.write(" ".join(str(v) for v in row[start : start + 12]) + "\n")
