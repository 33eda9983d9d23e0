"""Certified comparisons of products of embedded field elements.

Quantities that show up in box membership and the height inequalities are
maxima of monomials c * prod |sigma_i(e)|^a with rational exponents.  A
comparison first tries fast floats with a conservative relative pad, then
exact rational interval arithmetic at increasing root precision, and for
quadratic fields falls back to an exact sign computation via the conjugate
(so true algebraic equalities terminate instead of looping).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionExhausted, ZeroElement
from .fieldarith import (FieldElement, FieldSpec, Fraction as _F, Interval,
                         WeightVector, embed, embed_floats, iv_abs, iv_mul,
                         iv_poly)

_FLOAT_PAD = 1e-9          # relative separation needed for the float tier
_WIDTHS = (Fraction(1, 2 ** 80), Fraction(1, 2 ** 160), Fraction(1, 2 ** 320))


@dataclass(frozen=True)
class Monomial:
    """coef * prod over factors of |sigma_idx(elem)|^expo, coef > 0."""
    coef: Fraction
    factors: tuple[tuple[FieldElement, int, Fraction], ...]

    def __post_init__(self):
        if self.coef <= 0:
            raise ValueError("monomial coefficient must be positive")
        for elem, _, _ in self.factors:
            if elem.is_zero():
                raise ZeroElement("zero element in monomial")


def monomial(coef, factors=()) -> Monomial:
    return Monomial(Fraction(coef),
                    tuple((e, int(i), Fraction(a)) for e, i, a in factors))


def _log_float(field: FieldSpec, m: Monomial) -> float:
    acc = math.log(float(m.coef))
    for elem, idx, expo in m.factors:
        v = abs(embed_floats(field, elem)[idx])
        acc += float(expo) * math.log(v)
    return acc


def _cancelled_quotient(a: Monomial, b: Monomial):
    """Exponent dict of a/b keyed by (elem, idx), plus the constant a.coef/b.coef."""
    expo: dict[tuple[FieldElement, int], Fraction] = {}
    for elem, idx, e in a.factors:
        expo[(elem, idx)] = expo.get((elem, idx), Fraction(0)) + e
    for elem, idx, e in b.factors:
        expo[(elem, idx)] = expo.get((elem, idx), Fraction(0)) - e
    expo = {k: v for k, v in expo.items() if v != 0}
    return expo, a.coef / b.coef


def _abs_interval(field: FieldSpec, elem: FieldElement, idx: int) -> Interval:
    rb = field._roots[idx]
    iv = iv_poly(list(elem.power_coords()), (rb.lo, rb.hi))
    return iv_abs(iv)


def _iv_int_pow(iv: Interval, n: int) -> Interval | None:
    """|x|^n for closed nonnegative iv; None if inversion hits zero."""
    if n >= 0:
        return (iv[0] ** n, iv[1] ** n)
    if iv[0] == 0:
        return None
    return (iv[1] ** n, iv[0] ** n)


def _sign_of_power_coords(field: FieldSpec, pc: list[Fraction], idx: int) -> int:
    """Exact sign of the idx-th embedding of the element with power coords pc."""
    if all(c == 0 for c in pc):
        return 0
    width = Fraction(1, 2 ** 60)
    for _ in range(64):
        field.refine_roots(width)
        rb = field._roots[idx]
        lo, hi = iv_poly(pc, (rb.lo, rb.hi))
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        width /= 2 ** 32
    raise PrecisionExhausted("sign refinement did not separate from zero")


def _exact_cmp_quadratic(field: FieldSpec, expo, const: Fraction) -> int:
    """Sign of prod |sigma_idx(e)|^n - const for integer exponent dict, d = 2.

    Uses sigma_2(e) = sigma_1(conj e) to pull everything into one embedding,
    then compares squares exactly inside the field.
    """
    num = field.one()
    den = field.one()
    for (elem, idx), n in expo.items():
        base = elem if idx == 0 else elem.conj()
        if n > 0:
            num = num * base ** n
        else:
            den = den * base ** (-n)
    # compare |num| vs const * |den|  <=>  num^2 vs const^2 * den^2 under sigma_1
    lhs = (num * num).power_coords()
    rhs = (den * den).power_coords()
    c2 = const * const
    diff = [a - c2 * b for a, b in zip(lhs, rhs)]
    return _sign_of_power_coords(field, diff, 0)


def cmp_monomials(field: FieldSpec, a: Monomial, b: Monomial) -> int:
    """-1, 0, or 1 comparing the values of a and b.  Certified."""
    expo, const = _cancelled_quotient(a, b)
    if not expo:
        return (const > 1) - (const < 1)

    # scale all exponents to integers
    lcm = 1
    for e in expo.values():
        lcm = lcm * e.denominator // math.gcd(lcm, e.denominator)
    iexpo = {k: int(e * lcm) for k, e in expo.items()}
    target = const ** -lcm  # compare prod |.|^(e*lcm) against const^(-lcm)... careful

    # We decide sign of log(a) - log(b) = sum e*log|.| + log(const).
    # Scaled by lcm > 0: sum (e*lcm) log|.|  vs  -lcm*log(const) = log(const^-lcm).

    # float tier
    try:
        lg = math.log(float(const))
        for (elem, idx), e in expo.items():
            v = abs(embed_floats(field, elem)[idx])
            lg += float(e) * math.log(v)
        scale = abs(math.log(float(const))) + sum(
            abs(float(e)) * abs(math.log(abs(embed_floats(field, elem)[idx])))
            for (elem, idx), e in expo.items()) + 1.0
        if lg > _FLOAT_PAD * scale:
            return 1
        if lg < -_FLOAT_PAD * scale:
            return -1
    except (OverflowError, ValueError):
        pass

    # exact interval tier: prod |sigma(e)|^(n) vs target (both exact rationals)
    for width in _WIDTHS:
        field.refine_roots(width)
        acc: Interval | None = (Fraction(1), Fraction(1))
        for (elem, idx), n in iexpo.items():
            piv = _iv_int_pow(_abs_interval(field, elem, idx), n)
            if piv is None:
                acc = None
                break
            acc = iv_mul(acc, piv)
        if acc is None:
            continue
        if acc[0] > target:
            return 1
        if acc[1] < target:
            return -1

    if field.d == 2:
        return _exact_cmp_quadratic(field, iexpo, target)
    raise PrecisionExhausted("monomial comparison undecided at max precision")


def cmp_monomial_const(field: FieldSpec, m: Monomial, c) -> int:
    return cmp_monomials(field, m, monomial(Fraction(c)))


def leq_max(field: FieldSpec, A: list[Monomial], B: list[Monomial]) -> bool:
    """max(A) <= max(B), each element of A dominated by some element of B."""
    return all(any(cmp_monomials(field, a, b) <= 0 for b in B) for a in A)


# ---------------------------------------------------------------------------
# derived certified quantities
# ---------------------------------------------------------------------------

def norm_monomials(field: FieldSpec, q: FieldElement, w: WeightVector,
                   power: Fraction = Fraction(1)) -> list[Monomial]:
    """||q||_r^power as a max of monomials |sigma_i(q)|^(power/r_i), i in S1."""
    return [monomial(1, [(q, i, power / w.weights[i])]) for i in w.S1]


def height_monomials(field: FieldSpec, q: FieldElement,
                     w: WeightVector) -> list[Monomial]:
    """H(q) = max_i |sigma_i(q)| * ||q||^{r_i} as a flat max over (i, j) pairs."""
    out = []
    for i in w.S1:
        ri = w.weights[i]
        for j in w.S1:
            out.append(monomial(1, [(q, i, Fraction(1)),
                                    (q, j, ri / w.weights[j])]))
    return out


def height_chain_certified(field: FieldSpec, q: FieldElement,
                           w: WeightVector) -> tuple[bool, bool, bool]:
    """Certify 1 <= ||q||^{1/d} <= H(q) <= ||q||^{2 r_max} for nonzero q."""
    if q.is_zero():
        raise ZeroElement("chain undefined for 0")
    one = [monomial(1)]
    nrm_1d = norm_monomials(field, q, w, Fraction(1, field.d))
    hq = height_monomials(field, q, w)
    nrm_2r = norm_monomials(field, q, w, 2 * w.r_max)
    return (leq_max(field, one, nrm_1d),
            leq_max(field, nrm_1d, hq),
            leq_max(field, hq, nrm_2r))


def cert_abs_leq(field: FieldSpec, q: FieldElement, idx: int, bound) -> bool:
    """|sigma_idx(q)| <= bound, certified (bound rational)."""
    b = Fraction(bound)
    if q.is_zero():
        return b >= 0
    if b <= 0:
        return False
    return cmp_monomials(field, monomial(1, [(q, idx, Fraction(1))]),
                         monomial(b)) <= 0


def cert_height_cmp(field: FieldSpec, q: FieldElement, w: WeightVector,
                    bound) -> int:
    """Sign of H(q) - bound: -1 below, 0 equal, 1 above."""
    b = monomial(Fraction(bound))
    cs = [cmp_monomials(field, m, b) for m in height_monomials(field, q, w)]
    return max(cs)
