"""Hankel matrix pencils, their QR diagonals, and generalized eigenvalues.

A pencil is the pair (U0, U1) of square Hankel matrices filled with
consecutive entries of a moment sequence.  Pole pencils start at index 0 of
the raw moments; zero pencils start at index 2 of the reciprocal-transformed
moments.  The generalized eigenvalues of U1 - z U0 recover the poles/zeros
of the underlying Cauchy transform, and the squared diagonal of the
Gram-Schmidt QR factorization of U1 - z U0 is the statistic the condensed
density estimator consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .measure import MomentSequence

__all__ = [
    "SingularPencilError",
    "HankelPencil",
    "QRDiagonal",
    "build_pencil",
    "default_order",
    "qr_diagonal",
    "qr_diagonal_many",
    "diagonal_samples",
    "generalized_eigenvalues",
]

PencilKind = Literal["pole", "zero"]

#: index offset of U0 into the sequence, per pencil kind
_OFFSETS = {"pole": 0, "zero": 2}

#: condition-number ceiling for inverting U0
_COND_LIMIT = 1e12


class SingularPencilError(ValueError):
    """U0 is numerically singular, so U0^-1 U1 cannot be trusted."""

    def __init__(self, condition: float):
        self.condition = condition
        super().__init__(
            f"U0 condition number {condition:.3e} exceeds the limit {_COND_LIMIT:.0e}"
        )


@dataclass
class HankelPencil:
    """Pair of q x q complex Hankel matrices (entries constant on antidiagonals)."""

    order: int
    U0: np.ndarray
    U1: np.ndarray
    kind: PencilKind

    def __post_init__(self):
        self.U0 = np.asarray(self.U0, dtype=complex)
        self.U1 = np.asarray(self.U1, dtype=complex)
        q = self.order
        if self.U0.shape != (q, q) or self.U1.shape != (q, q):
            raise ValueError(f"U0 and U1 must both be {q} x {q}")
        for mat in (self.U0, self.U1):
            flipped = np.fliplr(mat)  # antidiagonals of mat are diagonals of flipped
            for off in range(-(q - 1), q):
                anti = np.diagonal(flipped, offset=off)
                if np.any(anti != anti[0]):
                    raise ValueError("matrices must be Hankel (constant antidiagonals)")


@dataclass
class QRDiagonal:
    """Squared magnitudes |R_kk|^2 of the QR factor of U1 - z U0 at one z."""

    z: complex
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("squared diagonal entries must be >= 0")


def _sequence_values(moments) -> np.ndarray:
    return moments.values if isinstance(moments, MomentSequence) else np.asarray(moments, dtype=complex)


def required_length(order: int, kind: PencilKind) -> int:
    """Number of sequence entries a pencil of this order and kind consumes."""
    return 2 * order + _OFFSETS[kind]


def default_order(n: int, kind: PencilKind) -> int:
    """Default pencil order for an n-entry sequence: n/2 - 2 for zeros (one
    antidiagonal of slack), n/2 for poles (the maximum)."""
    q = n // 2 - 2 if kind == "zero" else n // 2
    if q < 1:
        raise ValueError(f"sequence of length {n} is too short for a {kind} pencil")
    return q


def build_pencil(moments, order: int, kind: PencilKind) -> HankelPencil:
    """Fill the pencil matrices from a (possibly transformed) sequence.

    Pole kind reads entries i+j and i+j+1; zero kind expects the
    reciprocal-transformed sequence and reads entries i+j+2 and i+j+3.
    """
    if kind not in _OFFSETS:
        raise ValueError(f"kind must be 'pole' or 'zero', got {kind!r}")
    if order < 1:
        raise ValueError("order must be >= 1")
    seq = _sequence_values(moments)
    need = required_length(order, kind)
    if len(seq) < need:
        raise ValueError(
            f"{kind} pencil of order {order} needs n >= {need} moments, got {len(seq)}"
        )
    idx = np.arange(order)
    base = idx[:, None] + idx[None, :] + _OFFSETS[kind]
    return HankelPencil(order=order, U0=seq[base], U1=seq[base + 1], kind=kind)


def _mgs_diagonal_squared(matrices: np.ndarray) -> np.ndarray:
    """Squared QR diagonals for a (batch, q, q) stack, via modified Gram-Schmidt.

    Each batch entry is factored independently; an exactly zero residual
    column yields a zero diagonal entry and drops out of later projections.
    """
    batch, _, q = matrices.shape
    work = matrices.copy()
    out = np.empty((batch, q))
    for j in range(q):
        col = work[:, :, j]
        norm_sq = np.sum(np.abs(col) ** 2, axis=1)
        out[:, j] = norm_sq
        norm = np.sqrt(norm_sq)
        unit = col / np.where(norm == 0.0, 1.0, norm)[:, None]
        unit[norm == 0.0] = 0.0
        for k in range(j + 1, q):
            overlap = np.sum(np.conj(unit) * work[:, :, k], axis=1)
            work[:, :, k] -= overlap[:, None] * unit
    return out


_CHUNK = 4096


def qr_diagonal(pencil: HankelPencil, z: complex) -> QRDiagonal:
    """Squared QR diagonal of U1 - z U0 at a single point."""
    mat = pencil.U1 - z * pencil.U0
    return QRDiagonal(z=complex(z), values=_mgs_diagonal_squared(mat[None])[0])


def qr_diagonal_many(pencil: HankelPencil, zs) -> np.ndarray:
    """Squared QR diagonals at many points: shape zs.shape + (order,).

    Points are independent of one another and are processed as data-parallel
    batches over the shared read-only pencil.
    """
    flat = np.asarray(zs, dtype=complex).ravel()
    out = np.empty((len(flat), pencil.order))
    for start in range(0, len(flat), _CHUNK):
        zc = flat[start : start + _CHUNK]
        mats = pencil.U1[None, :, :] - zc[:, None, None] * pencil.U0[None, :, :]
        out[start : start + len(zc)] = _mgs_diagonal_squared(mats)
    return out.reshape(np.shape(zs) + (pencil.order,))


def diagonal_samples(sequences: np.ndarray, order: int, kind: PencilKind, z: complex) -> np.ndarray:
    """Squared QR diagonals at one z for a whole stack of sequences.

    ``sequences`` has shape (count, n) and must already be transformed when
    kind is 'zero'.  Returns shape (count, order).
    """
    seq = np.asarray(sequences, dtype=complex)
    need = required_length(order, kind)
    if seq.ndim != 2 or seq.shape[1] < need:
        raise ValueError(f"need a (count, n) stack with n >= {need}")
    idx = np.arange(order)
    base = idx[:, None] + idx[None, :] + _OFFSETS[kind]
    out = np.empty((len(seq), order))
    for start in range(0, len(seq), _CHUNK):
        chunk = seq[start : start + _CHUNK]
        mats = chunk[:, base + 1] - z * chunk[:, base]
        out[start : start + len(chunk)] = _mgs_diagonal_squared(mats)
    return out


def generalized_eigenvalues(pencil: HankelPencil) -> np.ndarray:
    """Eigenvalues of U0^-1 U1 (the points where U1 - z U0 drops rank).

    Refuses pencils whose U0 condition number exceeds 1e12.  The product is
    formed explicitly and handed to the dense eigensolver, which balances
    before iterating; a QZ iteration on (U1, U0) is the standard alternative
    for orders beyond the desk scale used here.
    """
    cond = float(np.linalg.cond(pencil.U0))
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularPencilError(cond)
    prod = np.linalg.solve(pencil.U0, pencil.U1)
    return np.linalg.eigvals(prod)
