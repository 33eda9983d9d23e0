"""Lattice reduction and enumeration.

Two LLL variants: a numpy float one for dynamics (systoles of unimodular
lattices, well conditioned after the flow cap) and a Fraction one for the
strategy's point searches, where entries span ~60 orders of magnitude and
doubles cancel catastrophically.  Enumeration is Schnorr-Euchner over the
Gram-Schmidt data; callers filter exactly afterwards.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------------------
# float LLL (rows are basis vectors); returns reduced basis and unimodular U
# with  reduced = U @ B
# ---------------------------------------------------------------------------

def lll_reduce(B: np.ndarray, delta: float = 0.99):
    B = np.array(B, dtype=float)
    n = B.shape[0]
    U = np.eye(n, dtype=object)  # exact integer bookkeeping

    def gso(B):
        Bs = np.zeros_like(B)
        mu = np.zeros((n, n))
        for i in range(n):
            Bs[i] = B[i]
            for j in range(i):
                denom = Bs[j] @ Bs[j]
                mu[i, j] = (B[i] @ Bs[j]) / denom if denom > 0 else 0.0
                Bs[i] = Bs[i] - mu[i, j] * Bs[j]
        return Bs, mu

    Bs, mu = gso(B)
    k = 1
    loops = 0
    while k < n:
        loops += 1
        if loops > 10000 * n * n:
            break
        for j in range(k - 1, -1, -1):
            r = round(mu[k, j])
            if r != 0:
                B[k] -= r * B[j]
                U[k] = [a - r * b for a, b in zip(U[k], U[j])]
                Bs, mu = gso(B)
        lhs = Bs[k] @ Bs[k]
        rhs = (delta - mu[k, k - 1] ** 2) * (Bs[k - 1] @ Bs[k - 1])
        if lhs >= rhs:
            k += 1
        else:
            B[[k - 1, k]] = B[[k, k - 1]]
            U[[k - 1, k]] = U[[k, k - 1]]
            Bs, mu = gso(B)
            k = max(k - 1, 1)
    return B, U


# ---------------------------------------------------------------------------
# shortest nonzero vector, exact coefficients over an LLL-reduced float basis
# ---------------------------------------------------------------------------

def shortest_vector(B: np.ndarray):
    """Shortest nonzero lattice vector of the row basis B (dim <= ~10).

    Returns (length, coeffs, vector) with integer coeffs over the input
    rows.  LLL-reduces first, then enumerates with Schnorr-Euchner.
    """
    R, U = lll_reduce(np.array(B, dtype=float))
    n = R.shape[0]
    Bs = np.zeros_like(R)
    mu = np.zeros((n, n))
    for i in range(n):
        Bs[i] = R[i]
        for j in range(i):
            mu[i, j] = (R[i] @ Bs[j]) / (Bs[j] @ Bs[j])
            Bs[i] = Bs[i] - mu[i, j] * Bs[j]
    c = np.array([Bs[i] @ Bs[i] for i in range(n)])
    bound = float(R[0] @ R[0]) * (1 + 1e-9)

    best = (bound, None)
    x = [0] * n

    def rec(i, partial):
        nonlocal best
        if i < 0:
            if any(x):
                v = sum(x[j] * R[j] for j in range(n))
                l2 = float(v @ v)
                if 0 < l2 < best[0] * (1 - 1e-15):
                    best = (l2, list(x))
            return
        center = -sum(x[j] * mu[j, i] for j in range(i + 1, n))
        room = (best[0] * (1 + 1e-12) - partial) / c[i]
        if room < 0:
            return
        half = np.sqrt(room)
        for cand in range(int(np.ceil(center - half)),
                          int(np.floor(center + half)) + 1):
            x[i] = cand
            contrib = (cand - center) ** 2 * c[i]
            if partial + contrib <= best[0] * (1 + 1e-12):
                rec(i - 1, partial + contrib)
        x[i] = 0

    rec(n - 1, 0.0)
    l2, coeffs = best
    if coeffs is None:
        coeffs = [1] + [0] * (n - 1)
        l2 = float(R[0] @ R[0])
    # back to coefficients over the original rows
    orig = [sum(coeffs[i] * int(U[i][j]) for i in range(n)) for j in range(n)]
    vec = sum(coeffs[i] * R[i] for i in range(n))
    return float(np.sqrt(l2)), orig, vec


# ---------------------------------------------------------------------------
# exact Fraction LLL
# ---------------------------------------------------------------------------

def lll_fraction(rows: list[list[Fraction]], delta: Fraction = Fraction(3, 4)):
    """Exact LLL on Fraction rows; returns (reduced_rows, U) with U integer,
    reduced = U * rows."""
    B = [list(map(Fraction, r)) for r in rows]
    n = len(B)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def dot(a, b):
        return sum(x * y for x, y in zip(a, b))

    # GSO rows [0, valid) are current; size reduction keeps Bs invariant and
    # updates mu in closed form, a swap just invalidates from its row down,
    # so the big-Fraction dot products happen once per (re)computed row
    # instead of once per loop iteration
    Bs = [None] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    nrm = [Fraction(0)] * n
    valid = 0

    def ensure(i):
        nonlocal valid
        while valid <= i:
            r = valid
            v = list(B[r])
            for j in range(r):
                mu[r][j] = dot(B[r], Bs[j]) / nrm[j] if nrm[j] != 0 else Fraction(0)
                v = [a - mu[r][j] * b for a, b in zip(v, Bs[j])]
            Bs[r] = v
            nrm[r] = dot(v, v)
            valid += 1

    k = 1
    while k < n:
        ensure(k)
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if r != 0:
                B[k] = [a - r * b for a, b in zip(B[k], B[j])]
                U[k] = [a - r * b for a, b in zip(U[k], U[j])]
                for jj in range(j):
                    mu[k][jj] -= r * mu[j][jj]
                mu[k][j] -= r
        if nrm[k] >= (delta - mu[k][k - 1] ** 2) * nrm[k - 1]:
            k += 1
        else:
            B[k - 1], B[k] = B[k], B[k - 1]
            U[k - 1], U[k] = U[k], U[k - 1]
            valid = min(valid, k - 1)
            k = max(k - 1, 1)
    return B, U


# ---------------------------------------------------------------------------
# enumerate integer z with |(T z)_i| <= M_i for every row i
# ---------------------------------------------------------------------------

class SupBoxEnum:
    """Lazy enumeration of integer z with (T z)_i in [lo_i, hi_i] per row.

    T is m x n exact rational, m >= n of full column rank.  Each row is
    rescaled so its interval becomes [-1, 1]; an off-center interval turns
    the search into a closest-vectors enumeration around the scaled box
    center.  The column lattice is LLL-reduced exactly, candidates within
    l2 distance sqrt(m) of the target are enumerated in floats with margin
    (center-outward, so points near the box center come first), and the box
    membership is re-checked exactly before yielding.  Iteration stops
    (capped=True) once node_cap tree nodes have been visited; `nodes` tracks
    progress so callers can budget how far past a hit they keep scanning.
    """

    def __init__(self, T: list[list[Fraction]],
                 intervals: list[tuple[Fraction, Fraction]],
                 node_cap: int = 2_000_000):
        self.node_cap = node_cap
        self.nodes = 0
        self.capped = False
        m, n = len(T), len(T[0])
        self._m = m
        self._S = []
        self._t = []
        for i in range(m):
            lo, hi = intervals[i]
            half = (hi - lo) / 2
            self._S.append([T[i][j] / half for j in range(n)])
            self._t.append((hi + lo) / (hi - lo))
        # columns of S generate the lattice; rows-for-LLL = transposed columns
        cols = [[self._S[i][j] for i in range(m)] for j in range(n)]
        self._red, self._U = lll_fraction(cols)

    def __iter__(self):
        Rf = np.array([[float(x) for x in row] for row in self._red])
        tf = np.array([float(v) for v in self._t])
        nn = len(self._red)
        Bs = np.zeros_like(Rf)
        mu = np.zeros((nn, nn))
        for i in range(nn):
            Bs[i] = Rf[i]
            for j in range(i):
                mu[i, j] = (Rf[i] @ Bs[j]) / (Bs[j] @ Bs[j])
                Bs[i] = Bs[i] - mu[i, j] * Bs[j]
        c = np.array([Bs[i] @ Bs[i] for i in range(nn)])
        if np.any(c <= 0):
            self.capped = True
            return
        tau = np.array([(tf @ Bs[i]) / c[i] for i in range(nn)])
        radius2 = float(self._m) * (1 + 1e-6)
        S, U, t = self._S, self._U, self._t
        x = [0] * nn

        def rec(i, partial):
            if i < 0:
                # z in terms of original columns: z_j = sum_i x[i] * U[i][j]
                z = tuple(sum(x[i] * U[i][j] for i in range(nn))
                          for j in range(nn))
                # exact box filter
                for r in range(self._m):
                    val = sum(S[r][j] * z[j] for j in range(nn)) - t[r]
                    if val > 1 or val < -1:
                        return
                yield z
                return
            center = tau[i] - sum(x[j] * mu[j, i] for j in range(i + 1, nn))
            room = (radius2 - partial) / c[i]
            if room < 0:
                return
            half = np.sqrt(room)
            lo = int(np.ceil(center - half))
            hi = int(np.floor(center + half))
            up = int(round(center))
            up = min(max(up, lo), hi)
            down = up - 1
            while up <= hi or down >= lo:
                if down < lo or (up <= hi
                                 and abs(up - center) <= abs(down - center)):
                    cand, up = up, up + 1
                else:
                    cand, down = down, down - 1
                self.nodes += 1
                if self.nodes > self.node_cap:
                    self.capped = True
                    return
                contrib = (cand - center) ** 2 * c[i]
                if partial + contrib > radius2:
                    break  # outward order: everything farther fails too
                x[i] = cand
                yield from rec(i - 1, partial + contrib)
                if self.capped:
                    return
            x[i] = 0

        yield from rec(nn - 1, 0.0)


def enum_sup_box(T: list[list[Fraction]], M: list[Fraction],
                 node_cap: int = 2_000_000) -> list[tuple[int, ...]] | None:
    """All integer vectors z with |(T z)_i| <= M_i, or None on node cap."""
    e = SupBoxEnum(T, [(-b, b) for b in M], node_cap=node_cap)
    sols = list(e)
    return None if e.capped else sols
