"""Exact arithmetic in a totally real number field.

A field is given by a monic integer minimal polynomial plus an integral
basis (rational coordinates over the power basis).  Real embeddings are
Sturm-isolated roots kept as exact rational enclosures that can be refined
on demand, so every embedding value comes with a certified interval.
Embeddings are indexed by descending root: sigma_1 is the largest real root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BasisNotClosed, NotSquarefree, NotTotallyReal, ZeroElement

Interval = tuple[Fraction, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# dense polynomials over Fraction, ascending coefficients
# ---------------------------------------------------------------------------

def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                  for i in range(n)])


def _pscale(a, c):
    return _trim([c * x for x in a])


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _pdivmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    inv = Fraction(1) / b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] * inv
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            a[k + i] -= c * y
        _trim(a)
    return _trim(q), a


def _pderiv(a):
    return _trim([Fraction(i) * a[i] for i in range(1, len(a))])


def _pgcd(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if a:
        a = _pscale(a, Fraction(1) / a[-1])
    return a


def _peval(p, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# Sturm sequences and root isolation
# ---------------------------------------------------------------------------

def _sturm_chain(f):
    chain = [list(f), _pderiv(f)]
    while chain[-1]:
        _, r = _pdivmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_pscale(r, Fraction(-1)))
    return chain


def _sign_changes_at(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = _peval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots(chain, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi]."""
    return _sign_changes_at(chain, lo) - _sign_changes_at(chain, hi)


def isolate_real_roots(f: Sequence[Fraction]) -> list[Interval]:
    """Isolating intervals (lo, hi] for the distinct real roots of squarefree f."""
    chain = _sturm_chain(list(f))
    bound = Fraction(1) + max(abs(c / f[-1]) for c in f[:-1]) if len(f) > 1 else Fraction(1)
    out: list[Interval] = []

    def rec(lo, hi, n):
        if n == 0:
            return
        if n == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        while _peval(f, mid) == 0:
            mid = (lo + mid) / 2
        rec(lo, mid, _count_roots(chain, lo, mid))
        rec(mid, hi, _count_roots(chain, mid, hi))

    rec(-bound, bound, _count_roots(chain, -bound, bound))
    out.sort(key=lambda iv: iv[0])
    return out


class _RootBox:
    """Mutable enclosure [lo, hi] of one root of f; f(lo) and f(hi) nonzero."""

    __slots__ = ("lo", "hi", "_f", "_slo")

    def __init__(self, f, lo, hi):
        self._f = f
        # nudge endpoints off roots
        while _peval(f, lo) == 0:
            lo -= Fraction(1, 10 ** 6)
        while _peval(f, hi) == 0:
            hi += Fraction(1, 10 ** 6)
        self.lo, self.hi = lo, hi
        self._slo = 1 if _peval(f, lo) > 0 else -1

    def width(self) -> Fraction:
        return self.hi - self.lo

    def refine(self, width: Fraction) -> None:
        while self.hi - self.lo > width:
            mid = (self.lo + self.hi) / 2
            v = _peval(self._f, mid)
            if v == 0:
                # rational root; cannot happen for irreducible degree >= 2
                self.lo = self.hi = mid
                return
            if (1 if v > 0 else -1) == self._slo:
                self.lo = mid
            else:
                self.hi = mid


# ---------------------------------------------------------------------------
# interval arithmetic helpers (closed rational intervals)
# ---------------------------------------------------------------------------

def iv_add(a: Interval, b: Interval) -> Interval:
    return (a[0] + b[0], a[1] + b[1])


def iv_mul(a: Interval, b: Interval) -> Interval:
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(ps), max(ps))


def iv_abs(a: Interval) -> Interval:
    lo, hi = a
    if lo >= 0:
        return (lo, hi)
    if hi <= 0:
        return (-hi, -lo)
    return (_ZERO, max(-lo, hi))


def iv_pow(a: Interval, k: int) -> Interval:
    """a assumed nonnegative, k >= 1."""
    return (a[0] ** k, a[1] ** k)


def _int_nth_root(x: int, n: int) -> int:
    """floor(x^(1/n)) for x >= 0."""
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0:
        return 0
    r = 1 << ((x.bit_length() + n - 1) // n)
    while True:
        nr = ((n - 1) * r + x // r ** (n - 1)) // n
        if nr >= r:
            break
        r = nr
    while r ** n > x:
        r -= 1
    return r


def iv_frac_pow(iv: Interval, a: Fraction, bits: int = 128) -> Interval:
    """Enclosure of t^a for t in iv, iv > 0 required when a < 0 or fractional."""
    lo, hi = iv
    if a < 0:
        if lo <= 0:
            raise ValueError("inversion through zero")
        plo, phi = iv_frac_pow(iv, -a, bits)
        return (Fraction(1) / phi, Fraction(1) / plo)
    num, den = a.numerator, a.denominator
    if den == 1:
        return (lo ** num, hi ** num)
    if lo < 0:
        raise ValueError("fractional power of a negative interval")

    def root_lo(x: Fraction) -> Fraction:
        scaled = (x.numerator << (den * bits)) // x.denominator
        return Fraction(_int_nth_root(scaled, den), 1 << bits)

    def root_hi(x: Fraction) -> Fraction:
        scaled = -((-(x.numerator << (den * bits))) // x.denominator)
        r = _int_nth_root(scaled, den)
        if r ** den < scaled:
            r += 1
        return Fraction(r, 1 << bits)

    return (root_lo(lo ** num), root_hi(hi ** num))


def iv_poly(coeffs: Sequence[Fraction], x: Interval) -> Interval:
    acc: Interval = (_ZERO, _ZERO)
    for c in reversed(list(coeffs)):
        acc = iv_add(iv_mul(acc, x), (c, c))
    return acc


# ---------------------------------------------------------------------------
# integer matrix determinant (Bareiss) and rational linear solve
# ---------------------------------------------------------------------------

def _det_bareiss(m: list[list[int]]) -> int:
    a = [row[:] for row in m]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def _mat_inv(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


# ---------------------------------------------------------------------------
# the field itself
# ---------------------------------------------------------------------------

class FieldSpec:
    """Totally real field K with a fixed integral basis.

    Immutable after construction except for the root-enclosure cache, which
    only ever tightens.
    """

    def __init__(self, min_poly, basis, disc, roots):
        self.min_poly: tuple[int, ...] = tuple(min_poly)
        self.d: int = len(min_poly) - 1
        self.basis: tuple[tuple[Fraction, ...], ...] = tuple(tuple(r) for r in basis)
        self.disc: int = disc
        self._roots: list[_RootBox] = roots
        self._basis_inv = _mat_inv([list(r) for r in self.basis])
        self._mul_table = self._build_mul_table()
        self._one = self.from_power([_ONE] + [_ZERO] * (self.d - 1))
        self._float_roots: np.ndarray | None = None

    # -- construction helpers ------------------------------------------------

    def _reduce_power(self, p: list[Fraction]) -> list[Fraction]:
        f = [Fraction(c) for c in self.min_poly]
        _, r = _pdivmod(p, f)
        r = r + [_ZERO] * (self.d - len(r))
        return r[: self.d]

    def _power_to_basis(self, pc: list[Fraction]) -> list[Fraction]:
        pc = pc + [_ZERO] * (self.d - len(pc))
        return [sum(pc[k] * self._basis_inv[k][j] for k in range(self.d))
                for j in range(self.d)]

    def _build_mul_table(self):
        table = []
        for i in range(self.d):
            row = []
            for j in range(self.d):
                prod = self._reduce_power(_pmul(list(self.basis[i]), list(self.basis[j])))
                coords = self._power_to_basis(prod)
                if any(c.denominator != 1 for c in coords):
                    raise BasisNotClosed(
                        f"basis product w{i}*w{j} has non-integral coordinates {coords}")
                row.append(tuple(int(c) for c in coords))
            table.append(row)
        return table

    # -- elements --------------------------------------------------------------

    def element(self, coords: Sequence[int]) -> "FieldElement":
        return FieldElement(self, tuple(int(c) for c in coords))

    def one(self) -> "FieldElement":
        return self._one

    def zero(self) -> "FieldElement":
        return self.element([0] * self.d)

    def from_power(self, pc: Sequence) -> "FieldElement":
        coords = self._power_to_basis([Fraction(c) for c in pc])
        if any(c.denominator != 1 for c in coords):
            raise ValueError(f"element {list(pc)} is not integral over the basis")
        return self.element([int(c) for c in coords])

    def to_power(self, coords: Sequence) -> tuple[Fraction, ...]:
        pc = [_ZERO] * self.d
        for a, brow in zip(coords, self.basis):
            for k, c in enumerate(brow):
                pc[k] += Fraction(a) * c
        return tuple(pc)

    # -- embeddings --------------------------------------------------------------

    def refine_roots(self, width: Fraction) -> None:
        for rb in self._roots:
            rb.refine(width)

    def root_intervals(self, width: Fraction | None = None) -> list[Interval]:
        if width is not None:
            self.refine_roots(width)
        return [(rb.lo, rb.hi) for rb in self._roots]

    def float_roots(self) -> np.ndarray:
        if self._float_roots is None:
            self.refine_roots(Fraction(1, 2 ** 70))
            self._float_roots = np.array(
                [float((rb.lo + rb.hi) / 2) for rb in self._roots])
        return self._float_roots

    def embedding_matrix(self) -> np.ndarray:
        """V[i][j] = sigma_i(basis_j), floats."""
        roots = self.float_roots()
        V = np.empty((self.d, self.d))
        for j, brow in enumerate(self.basis):
            cs = [float(c) for c in brow]
            for i, r in enumerate(roots):
                V[i, j] = _horner_float(cs, r)
        return V

    def embedding_matrix_inv(self) -> np.ndarray:
        return np.linalg.inv(self.embedding_matrix())


def _horner_float(cs, x):
    acc = 0.0
    for c in reversed(cs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    coords: tuple[int, ...]

    def __add__(self, other):
        return FieldElement(self.field,
                            tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return FieldElement(self.field,
                            tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldElement(self.field, tuple(other * a for a in self.coords))
        tbl = self.field._mul_table
        d = self.field.d
        out = [0] * d
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(other.coords):
                if b == 0:
                    continue
                row = tbl[i][j]
                ab = a * b
                for k in range(d):
                    out[k] += ab * row[k]
        return FieldElement(self.field, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers leave the ring of integers")
        acc = self.field.one()
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def mul_matrix(self) -> list[list[int]]:
        """Integer matrix of multiplication by self on the integral basis."""
        d = self.field.d
        cols = []
        for j in range(d):
            basis_j = self.field.element([int(i == j) for i in range(d)])
            cols.append((self * basis_j).coords)
        return [[cols[j][k] for j in range(d)] for k in range(d)]

    def norm(self) -> int:
        return _det_bareiss(self.mul_matrix())

    def trace(self) -> int:
        m = self.mul_matrix()
        return sum(m[i][i] for i in range(self.field.d))

    def conj(self) -> "FieldElement":
        """Field conjugate; quadratic fields only."""
        if self.field.d != 2:
            raise ValueError("conj is only defined for quadratic fields")
        return self.trace() * self.field.one() - self

    def power_coords(self) -> tuple[Fraction, ...]:
        return self.field.to_power(self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.power_coords()[1:])

    def __repr__(self):
        return f"FieldElement{self.coords}"


# ---------------------------------------------------------------------------
# make_field
# ---------------------------------------------------------------------------

def _is_squarefree_int(n: int) -> bool:
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        while n % k == 0:
            n //= k
        k += 1
    return True


def make_field(min_poly: Sequence[int], integral_basis=None) -> FieldSpec:
    """Build a FieldSpec from a monic integer polynomial.

    Degree 2 with min_poly x^2 - D (D squarefree) gets the maximal order
    automatically; otherwise the caller supplies the basis (power basis is
    the fallback for degree 2) and it is validated for multiplicative
    closure.  The discriminant is the exact determinant of the trace form.
    """
    mp = [int(c) for c in min_poly]
    d = len(mp) - 1
    if d < 2:
        raise ValueError("degree must be at least 2")
    if mp[-1] != 1:
        raise ValueError("minimal polynomial must be monic")

    f = [Fraction(c) for c in mp]
    if len(_pgcd(f, _pderiv(f))) > 1:
        raise NotSquarefree("minimal polynomial shares a factor with its derivative")

    ivs = isolate_real_roots(f)
    if len(ivs) != d:
        raise NotTotallyReal(f"{len(ivs)} real roots, need {d}")

    if integral_basis is None:
        if d == 2 and mp[1] == 0 and -mp[0] > 1 and _is_squarefree_int(-mp[0]):
            D = -mp[0]
            if D % 4 == 1:
                basis = [(Fraction(1), Fraction(0)),
                         (Fraction(1, 2), Fraction(1, 2))]
            else:
                basis = [(Fraction(1), Fraction(0)),
                         (Fraction(0), Fraction(1))]
        elif d == 2:
            basis = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
        else:
            raise ValueError("integral basis required for degree >= 3")
    else:
        basis = [tuple(Fraction(c) for c in row) for row in integral_basis]
        if len(basis) != d or any(len(r) != d for r in basis):
            raise ValueError("integral basis must be a d x d rational matrix")

    # roots sorted descending: sigma_1 = largest root
    ivs = sorted(ivs, key=lambda iv: iv[0], reverse=True)
    roots = [_RootBox(f, lo, hi) for lo, hi in ivs]
    for rb in roots:
        rb.refine(Fraction(1, 2 ** 40))

    field = FieldSpec(mp, basis, 0, roots)  # disc patched below

    # exact discriminant via the trace form
    gram = [[(field.element([int(i == a) for i in range(d)]) *
              field.element([int(i == b) for i in range(d)])).trace()
             for b in range(d)] for a in range(d)]
    disc = _det_bareiss(gram)
    field.disc = disc
    return field


# ---------------------------------------------------------------------------
# embeddings of elements
# ---------------------------------------------------------------------------

def embed(field: FieldSpec, q: FieldElement, precision) -> list[Interval]:
    """Certified enclosures of sigma_i(q), widths <= precision."""
    prec = Fraction(precision)
    if prec <= 0:
        raise ValueError("precision must be positive")
    pc = list(q.power_coords())
    if all(c == 0 for c in pc[1:]):
        return [(pc[0], pc[0])] * field.d

    width = min(prec, Fraction(1, 2 ** 40))
    for _ in range(200):
        field.refine_roots(width)
        out = [iv_poly(pc, (rb.lo, rb.hi)) for rb in field._roots]
        if all(hi - lo <= prec for lo, hi in out):
            return out
        width /= 2 ** 8
    raise RuntimeError("embedding refinement failed to converge")


def embed_floats(field: FieldSpec, q: FieldElement) -> np.ndarray:
    pc = [float(c) for c in q.power_coords()]
    roots = field.float_roots()
    return np.array([_horner_float(pc, r) for r in roots])


def embed_ratio_floats(field: FieldSpec, p: FieldElement,
                       q: FieldElement) -> np.ndarray:
    """theta(p/q) to full float accuracy.

    Plain float embeddings cancel catastrophically when sigma(q) is tiny
    relative to the coordinates (the interesting denominators), so the
    quotient is taken on exact rational enclosures refined until its
    relative width is below 1e-14."""
    if q.is_zero():
        raise ZeroElement("ratio needs q != 0")
    ppc = list(p.power_coords())
    qpc = list(q.power_coords())
    out = [None] * field.d
    width = Fraction(1, 2 ** 70)
    for _ in range(8):
        field.refine_roots(width)
        done = True
        for i in range(field.d):
            if out[i] is not None:
                continue
            rb = field._roots[i]
            qlo, qhi = iv_poly(qpc, (rb.lo, rb.hi))
            if qlo <= 0 <= qhi:
                done = False
                continue
            plo, phi = iv_poly(ppc, (rb.lo, rb.hi))
            cands = (plo / qlo, plo / qhi, phi / qlo, phi / qhi)
            lo, hi = min(cands), max(cands)
            if hi - lo <= Fraction(1, 10 ** 14) * max(abs(lo), abs(hi)) \
                    or (lo == 0 and hi == 0):
                out[i] = float((lo + hi) / 2)
            else:
                done = False
        if done:
            return np.array(out, dtype=float)
        width /= 2 ** 60
    raise RuntimeError("ratio embedding failed to converge")


# ---------------------------------------------------------------------------
# weight vectors, r-norm, height
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightVector:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if sum(self.weights) != 1:
            raise ValueError("weights must sum to 1 exactly")
        if not any(w > 0 for w in self.weights):
            raise ValueError("at least one positive weight required")

    @property
    def d(self) -> int:
        return len(self.weights)

    @property
    def S1(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w > 0)

    @property
    def S2(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w == 0)

    @property
    def d1(self) -> int:
        return len(self.S1)

    @property
    def d2(self) -> int:
        return len(self.S2)

    @property
    def r_max(self) -> Fraction:
        return max(self.weights)

    @property
    def omega(self) -> int:
        return max(range(self.d), key=lambda i: self.weights[i])


def make_weights(values) -> WeightVector:
    return WeightVector(tuple(Fraction(v) for v in values))


def weighted_norm(x, w: WeightVector) -> float:
    """r-norm: max over positive-weight coordinates of |x_i|^(1/r_i)."""
    best = 0.0
    for i in w.S1:
        v = abs(float(x[i]))
        if v == 0.0:
            continue
        best = max(best, math.exp(math.log(v) / float(w.weights[i])))
    return best


def log_weighted_norm(log_abs_x, w: WeightVector) -> float:
    """log of the r-norm given log|x_i| (use -inf for zero coordinates)."""
    return max(lx / float(w.weights[i]) for i, lx in
               ((i, log_abs_x[i]) for i in w.S1))


def height(field: FieldSpec, q: FieldElement, w: WeightVector) -> float:
    """H(q) = max over S1 of |sigma(q)| * ||q||_r^{r_sigma}."""
    if q.is_zero():
        raise ZeroElement("height of 0 is undefined")
    return math.exp(log_height(field, q, w))


def log_height(field: FieldSpec, q: FieldElement, w: WeightVector) -> float:
    if q.is_zero():
        raise ZeroElement("height of 0 is undefined")
    sig = embed_floats(field, q)
    logs = [math.log(abs(v)) if v != 0 else float("-inf") for v in sig]
    ln = log_weighted_norm(logs, w)
    return max(logs[i] + float(w.weights[i]) * ln for i in w.S1)
