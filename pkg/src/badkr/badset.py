"""Exclusion boxes and truncated badness decisions.

Denominators are enumerated exhaustively over the integer coordinate box
implied by the height bound, floats do the bulk filtering, and anything
within a relative band of a boundary is re-decided with certified rational
comparisons.  All verdicts are truncated at an explicit height bound.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certify import (cert_abs_leq, cert_height_cmp, cmp_monomials, leq_max,
                      monomial, norm_monomials)
from .errors import DenominatorNotAdmissible, ZeroElement
from .fieldarith import (FieldElement, FieldSpec, WeightVector, embed_floats, embed_ratio_floats,
                         height, log_height, weighted_norm)

_BAND = 1e-9  # relative float band around boundaries that triggers exact checks


@dataclass(frozen=True)
class ExclusionBox:
    p: FieldElement
    q: FieldElement
    eps: float
    centers: tuple[float, ...]
    widths: tuple[float, ...]
    height: float = 0.0   # H(q), carried for deterministic tie-breaking

    def interval(self, i: int) -> tuple[float, float]:
        return (self.centers[i] - self.widths[i], self.centers[i] + self.widths[i])


@dataclass(frozen=True)
class Excluded:
    p: FieldElement
    q: FieldElement


@dataclass(frozen=True)
class Survives:
    height_bound: float


@dataclass(frozen=True)
class BadnessReport:
    value: float
    witness: tuple[FieldElement, FieldElement] | None
    height_bound: float


# ---------------------------------------------------------------------------
# denominator enumeration
# ---------------------------------------------------------------------------

def coordinate_bound(field: FieldSpec, w: WeightVector, eps: float,
                     height_bound: float) -> int:
    """Integer coordinate bound that provably contains every admissible q.

    |sigma(q)| <= max(1, Hb^{1/(2 r_min)})^{r_sigma} on S1 (from the height
    chain, since ||q||_r >= 1 forces H >= ||q||^{2 r} at the norm-attaining
    embedding) and <= eps on S2; invert the embedding matrix row-wise.
    """
    r_min = min(float(w.weights[i]) for i in w.S1)
    nrm_cap = max(1.0, height_bound ** (1.0 / (2.0 * r_min)))
    bounds = np.empty(field.d)
    for i in range(field.d):
        if i in w.S1:
            bounds[i] = nrm_cap ** float(w.weights[i])
        else:
            bounds[i] = eps
    inv = field.embedding_matrix_inv()
    per_coord = np.abs(inv) @ bounds
    return int(np.max(np.ceil(per_coord))) + 1


def _canonical_sign(coords) -> bool:
    for c in coords:
        if c != 0:
            return c > 0
    return False


def enumerate_denominators(field: FieldSpec, w: WeightVector, eps: float,
                           height_bound: float,
                           coord_bound: int | None = None) -> list[FieldElement]:
    """All q != 0 (up to sign) with max_{S2}|sigma(q)| <= eps and H(q) < height_bound.

    Sorted by height then lexicographic coordinates.  Floats prefilter;
    candidates within a relative band of either boundary get certified
    rational comparisons.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if height_bound < 1:
        raise ValueError("height_bound must be at least 1")
    d = field.d
    if coord_bound is None:
        coord_bound = coordinate_bound(field, w, eps, height_bound)

    rng = np.arange(-coord_bound, coord_bound + 1)
    grids = np.meshgrid(*([rng] * d), indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)  # (N, d) ints

    V = field.embedding_matrix()  # sigma_i(omega_j)
    emb = coords.astype(float) @ V.T  # (N, d): emb[:, i] = sigma_i(q)
    nonzero = np.any(coords != 0, axis=1)
    canon = np.zeros(len(coords), dtype=bool)
    # canonical sign: first nonzero coordinate positive
    undecided = nonzero.copy()
    for j in range(d):
        col = coords[:, j]
        canon |= undecided & (col > 0)
        undecided &= col == 0
    mask = canon

    # S2 bound
    s2_tight = np.zeros(len(coords), dtype=bool)
    for i in w.S2:
        a = np.abs(emb[:, i])
        mask &= a <= eps * (1 + _BAND)
        s2_tight |= a >= eps * (1 - _BAND)

    # height bound (float)
    absamb = np.abs(emb)
    with np.errstate(divide="ignore", invalid="ignore"):
        logabs = np.where(absamb > 0, np.log(absamb), -np.inf)
    rvals = np.array([float(c) for c in w.weights])
    lognorm = np.max(
        np.stack([logabs[:, i] / rvals[i] for i in w.S1], axis=1), axis=1)
    logH = np.max(
        np.stack([logabs[:, i] + rvals[i] * lognorm for i in w.S1], axis=1),
        axis=1)
    lb = math.log(height_bound)
    mask &= logH <= lb + _BAND
    h_tight = logH >= lb - _BAND

    out = []
    for idx in np.nonzero(mask)[0]:
        q = field.element([int(c) for c in coords[idx]])
        if s2_tight[idx] or any(
                abs(abs(emb[idx, i]) - eps) <= _BAND * eps for i in w.S2):
            if not all(cert_abs_leq(field, q, i, Fraction(eps)) for i in w.S2):
                continue
        if h_tight[idx]:
            if cert_height_cmp(field, q, w, Fraction(height_bound)) >= 0:
                continue
        out.append((float(np.exp(logH[idx])), tuple(int(c) for c in coords[idx]), q))
    out.sort(key=lambda t: (t[0], t[1]))
    return [q for _, _, q in out]


# ---------------------------------------------------------------------------
# exclusion boxes
# ---------------------------------------------------------------------------

def check_denominator(field: FieldSpec, w: WeightVector, q: FieldElement,
                      eps) -> None:
    if q.is_zero():
        raise DenominatorNotAdmissible("q must be nonzero")
    e = Fraction(eps)
    for i in w.S2:
        if not cert_abs_leq(field, q, i, e):
            raise DenominatorNotAdmissible(
                f"|sigma_{i + 1}(q)| > {float(e)} for q={q.coords}")


def exclusion_box(field: FieldSpec, w: WeightVector, p: FieldElement,
                  q: FieldElement, eps) -> ExclusionBox:
    """Box around theta(p/q): half-width eps/(|sigma(q)| ||q||^{r_sigma}) on S1,
    eps/|sigma(q)| on S2."""
    check_denominator(field, w, q, eps)
    eps = float(eps)
    sq = embed_floats(field, q)
    sp = embed_floats(field, p)
    nrm = weighted_norm(sq, w)
    centers = tuple(sp[i] / sq[i] for i in range(field.d))
    widths = tuple(
        eps / (abs(sq[i]) * nrm ** float(w.weights[i])) if i in w.S1
        else eps / abs(sq[i])
        for i in range(field.d))
    return ExclusionBox(p, q, eps, centers, widths,
                        height=math.exp(log_height(field, q, w)))


def ratio_point(field: FieldSpec, p: FieldElement, q: FieldElement) -> np.ndarray:
    if q.is_zero():
        raise ZeroElement("ratio point needs q != 0")
    return embed_ratio_floats(field, p, q)


# ---------------------------------------------------------------------------
# membership in the eps-box union, truncated
# ---------------------------------------------------------------------------

def _x_fractions(x) -> list[Fraction]:
    return [Fraction(v) if not isinstance(v, Fraction) else v for v in x]


def _p_candidates(field: FieldSpec, target: np.ndarray,
                  slack: np.ndarray) -> list[tuple[int, ...]]:
    """Integer coordinate vectors p with theta(p) possibly in target +- slack."""
    inv = field.embedding_matrix_inv()
    center = inv @ target
    rad = np.abs(inv) @ slack + 1.0
    los = np.ceil(center - rad).astype(int)
    his = np.floor(center + rad).astype(int)
    out = [()]
    for j in range(field.d):
        out = [t + (v,) for t in out for v in range(los[j], his[j] + 1)]
    return out


def _box_memb_certified(field: FieldSpec, w: WeightVector, xf, p, q,
                        eps: Fraction) -> bool:
    """x in Delta_eps(p,q), exact: |sigma_i(x q - p)| <= half-width_i for all i."""
    den = 1
    for v in xf:
        den = den * v.denominator // math.gcd(den, v.denominator)
    # e_i = sigma_i(q) x_i - sigma_i(p); scale by den so coefficients are integers
    qpc = q.power_coords()
    ppc = p.power_coords()
    for i in range(field.d):
        epc = [den * (xf[i] * qc - pc) for qc, pc in zip(qpc, ppc)]
        # this is not one field element per i; it is sigma_i of q scaled by the
        # rational x_i minus p, i.e. a linear combination with rational weight.
        # Evaluate sign of |value| - bound via interval refinement directly.
        if i in w.S1:
            # |e_i| * ||q||^{r_i} <= den*eps  <=>  for all j in S1:
            #   |e_i| * |sigma_j(q)|^{r_i/r_j} <= den*eps
            ok = all(
                _cmp_linval_monomial(field, epc, i,
                                     [(q, j, w.weights[i] / w.weights[j])],
                                     den * eps) <= 0
                for j in w.S1)
        else:
            ok = _cmp_linval_monomial(field, epc, i, [], den * eps) <= 0
        if not ok:
            return False
    return True


def _cmp_linval_monomial(field, epc, i, extra, bound: Fraction) -> int:
    """Sign of |sigma_i(elem with rational power coords epc)| * prod(extra) - bound.

    extra factors are (FieldElement, idx, Fraction expo).  Falls back to
    rational interval refinement; zero linear value short-circuits.
    """
    from .fieldarith import iv_abs, iv_poly
    if all(c == 0 for c in epc):
        return -1 if bound > 0 else 0
    width = Fraction(1, 2 ** 60)
    for _ in range(8):
        field.refine_roots(width)
        rb = field._roots[i]
        acc = iv_abs(iv_poly(epc, (rb.lo, rb.hi)))
        lo, hi = acc
        for (e, j, a) in extra:
            # integer exponents only after scaling; here r_i/r_j rational:
            # raise both sides to the denominator later; for the common cases
            # the exponent is already integral.
            if a.denominator == 1:
                rbj = field._roots[j]
                fe = iv_abs(iv_poly(list(e.power_coords()), (rbj.lo, rbj.hi)))
                lo, hi = lo * fe[0] ** a.numerator, hi * fe[1] ** a.numerator
            else:
                # compare |v|^den * |e|^num vs bound^den instead
                den = a.denominator
                rbj = field._roots[j]
                fe = iv_abs(iv_poly(list(e.power_coords()), (rbj.lo, rbj.hi)))
                lo2 = lo ** den * fe[0] ** a.numerator
                hi2 = hi ** den * fe[1] ** a.numerator
                b2 = bound ** den
                if hi2 < b2:
                    return -1
                if lo2 > b2:
                    return 1
                width /= 2 ** 40
                break
        else:
            if hi < bound:
                return -1
            if lo > bound:
                return 1
            if lo == hi and lo == bound:
                return 0
            width /= 2 ** 40
    from .errors import PrecisionExhausted
    raise PrecisionExhausted("box boundary comparison undecided")


def membership(field: FieldSpec, w: WeightVector, x, eps: float,
               height_bound: float,
               denominators: list[FieldElement] | None = None):
    """Excluded(p, q) for the first box of height < height_bound containing x,
    else Survives(height_bound).  Closed boxes; boundary ties decided exactly."""
    xf = _x_fractions(x)
    xa = np.array([float(v) for v in xf])
    if denominators is None:
        denominators = enumerate_denominators(field, w, eps, height_bound)
    epsf = Fraction(eps) if not isinstance(eps, Fraction) else eps
    for q in denominators:
        sq = embed_floats(field, q)
        nrm = weighted_norm(sq, w)
        widths = np.array([
            float(eps) / (abs(sq[i]) * nrm ** float(w.weights[i]))
            if i in w.S1 else float(eps) / abs(sq[i])
            for i in range(field.d)])
        target = sq * xa  # want sigma(p) near sigma(q) * x
        slack = widths * np.abs(sq)
        for pc in _p_candidates(field, target, slack):
            p = field.element(pc)
            sp = embed_floats(field, p)
            resid = np.abs(target - sp)
            if np.all(resid <= slack * (1 - _BAND)):
                return Excluded(p, q)
            if np.all(resid <= slack * (1 + _BAND)):
                if _box_memb_certified(field, w, xf, p, q, epsf):
                    return Excluded(p, q)
    return Survives(height_bound)


# ---------------------------------------------------------------------------
# truncated badness constant
# ---------------------------------------------------------------------------

def badness_constant(field: FieldSpec, w: WeightVector, x,
                     height_bound: float,
                     exact_ratio: tuple[FieldElement, FieldElement] | None = None
                     ) -> BadnessReport:
    """Truncated infimum of the defining max-expression over H(q) < height_bound.

    The expression for a pair (p, q): max over S1 of ||q||^{r_i} |sigma_i(q) x_i
    + sigma_i(p)| and over S2 of max(|sigma_i(q) x_i + sigma_i(p)|, |sigma_i(q)|).
    exact_ratio marks x as exactly -theta(p0/q0); the value snaps to 0 only when
    a witness matches that ratio by exact cross-multiplication.
    """
    xa = np.array([float(v) for v in x])
    best = math.inf
    witness = None
    rvals = [float(c) for c in w.weights]

    def expression(p, q, sq, nrm):
        sp = embed_floats(field, p)
        resid = np.abs(sq * xa + sp)
        val = 0.0
        for i in w.S1:
            val = max(val, nrm ** rvals[i] * resid[i])
        for i in w.S2:
            val = max(val, max(resid[i], abs(sq[i])))
        return val

    # seed with q = 1 so the S2 bound |sigma(q)| <= value prunes enumeration
    one = field.one()
    s1 = embed_floats(field, one)
    for pc in _p_candidates(field, -xa, np.full(field.d, 2.0)):
        p = field.element(pc)
        v = expression(p, one, s1, 1.0)
        if v < best:
            best, witness = v, (p, one)

    qs = enumerate_denominators(field, w, max(best, 1e-300), height_bound) \
        if best > 0 else []
    for q in qs:
        sq = embed_floats(field, q)
        nrm = weighted_norm(sq, w)
        floor_s2 = max((abs(sq[i]) for i in w.S2), default=0.0)
        if floor_s2 >= best:
            continue
        # p must put every coordinate residual below the incumbent
        slack = np.array([
            min(best, 1e18) / nrm ** rvals[i] if i in w.S1 else min(best, 1e18)
            for i in range(field.d)])
        target = -sq * xa
        for pc in _p_candidates(field, target, slack):
            p = field.element(pc)
            v = expression(p, q, sq, nrm)
            if v < best:
                best, witness = v, (p, q)
    if exact_ratio is not None and witness is not None:
        p0, q0 = exact_ratio
        p1, q1 = witness
        # x = -theta(p0/q0): residuals vanish exactly iff p1/q1 = p0/q0,
        # leaving only the S2 floor max |sigma(q1)|
        if (p1 * q0 - p0 * q1).is_zero():
            sq1 = embed_floats(field, q1)
            best = max((abs(sq1[i]) for i in w.S2), default=0.0)
    return BadnessReport(best, witness, height_bound)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def export_csv(path, field: FieldSpec, w: WeightVector,
               qs: list[FieldElement], constants=None) -> None:
    """Columns: coords..., embeddings..., r_norm, height, n, k; ordered by
    height then lexicographic coordinates."""
    from .strategy import partition_index
    rows = []
    for q in qs:
        sq = embed_floats(field, q)
        nrm = weighted_norm(sq, w)
        h = height(field, q, w)
        if constants is not None:
            nk = partition_index(field, w, constants, q)
            n, k = nk if nk is not None else ("", "")
        else:
            n, k = "", ""
        rows.append(list(q.coords) + ["%.17g" % v for v in sq]
                    + ["%.17g" % nrm, "%.17g" % h, n, k])
    rows.sort(key=lambda r: (float(r[-3]), r[:field.d]))
    header = ([f"c{j + 1}" for j in range(field.d)]
              + [f"sigma{j + 1}" for j in range(field.d)]
              + ["r_norm", "height", "n", "k"])
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        wr.writerows(rows)
