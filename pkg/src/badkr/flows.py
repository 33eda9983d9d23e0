"""Diagonal flows on lattices and systole tracking.

The block embedding sends a d-tuple of SL2 matrices to a 2d x 2d matrix in
four diagonal blocks; the scaled ring lattice has covolume 1 exactly, and
trajectories are shortest-vector lengths of flowed unipotent translates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditionTooHigh, ParameterOutOfRange, SingularBasis
from .fieldarith import FieldSpec, WeightVector
from .lattice import shortest_vector

_DET_TOL = 1e-10
_COND_CAP = 1e12


@dataclass(frozen=True)
class LatticeBasis:
    matrix: np.ndarray       # columns are the basis vectors
    covolume: float


@dataclass(frozen=True)
class SystoleSample:
    t: float
    lambda1: float
    vector: tuple[int, ...]  # integer coefficients over the basis columns


def psi(blocks) -> np.ndarray:
    """d blocks [[a,b],[c,d]] of determinant 1 -> [[diag a, diag b],
    [diag c, diag d]]."""
    blocks = [np.asarray(B, dtype=float) for B in blocks]
    d = len(blocks)
    for B in blocks:
        det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
        if abs(det - 1.0) > _DET_TOL:
            raise ParameterOutOfRange(f"block determinant {det} not 1")
    out = np.zeros((2 * d, 2 * d))
    for i, B in enumerate(blocks):
        out[i, i] = B[0, 0]
        out[i, d + i] = B[0, 1]
        out[d + i, i] = B[1, 0]
        out[d + i, d + i] = B[1, 1]
    return out


def flow_matrix(t: float, w: WeightVector) -> np.ndarray:
    d = w.d
    out = np.zeros((2 * d, 2 * d))
    for i in range(d):
        ri = float(w.weights[i])
        out[i, i] = math.exp(ri * t)
        out[d + i, d + i] = math.exp(-ri * t)
    return out


def u_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = len(x)
    out = np.eye(2 * d)
    for i in range(d):
        out[i, d + i] = x[i]
    return out


def lattice_LK(field: FieldSpec) -> LatticeBasis:
    """Columns: the scaled embedded integral basis in each of the two
    factors; the scale D_K^{-1/(2d)} makes the covolume exactly 1."""
    d = field.d
    V = field.embedding_matrix()
    s = abs(field.disc) ** (-1.0 / (2 * d))
    M = np.zeros((2 * d, 2 * d))
    M[:d, :d] = s * V
    M[d:, d:] = s * V
    return LatticeBasis(M, abs(float(np.linalg.det(M))))


def systole(b: LatticeBasis | np.ndarray, t: float = 0.0) -> SystoleSample:
    """Exact shortest nonzero vector (dimension <= 8): LLL at 0.99, then
    enumeration over the reduced Gram data."""
    M = b.matrix if isinstance(b, LatticeBasis) else np.asarray(b, dtype=float)
    det = float(np.linalg.det(M))
    if det == 0.0 or not np.isfinite(det):
        raise SingularBasis(f"determinant {det}")
    cond = float(np.linalg.cond(M))
    if cond > _COND_CAP:
        raise ConditionTooHigh(f"condition number {cond:.3g} exceeds {_COND_CAP:.0e}")
    # shortest_vector works on row bases; our basis vectors are columns
    length, coeffs, _ = shortest_vector(M.T)
    return SystoleSample(t, length, tuple(coeffs))


def hermite_guard(sample: SystoleSample, covolume: float, dim: int) -> bool:
    """lambda1 <= sqrt(gamma_dim) * covol^{1/dim} * 2^{(dim-1)/2}, with
    Hermite's constant bounded by (4/3)^{(dim-1)/2}."""
    gamma = (4.0 / 3.0) ** ((dim - 1) / 2.0)
    return sample.lambda1 <= math.sqrt(gamma) * covolume ** (1.0 / dim) \
        * 2 ** ((dim - 1) / 2.0) + 1e-9


def trajectory(field: FieldSpec, w: WeightVector, x, t_grid) -> list[SystoleSample]:
    """Systole of flow(t) . u(x) . L_K along an ascending time grid."""
    ts = list(t_grid)
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ParameterOutOfRange("t_grid must be ascending")
    base = u_matrix(x) @ lattice_LK(field).matrix
    out = []
    for t in ts:
        M = flow_matrix(t, w) @ base
        out.append(systole(LatticeBasis(M, abs(float(np.linalg.det(M)))), t=t))
    return out
