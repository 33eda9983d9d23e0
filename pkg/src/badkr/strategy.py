"""Alice's explicit winning strategy for the potential game.

Constants R and eps drive a geometric hierarchy: balls are classified by
radius into classes n, denominators by height into classes with a secondary
norm index k, and on the first ball of each class Alice emits, for every k
whose cell could be populated, the d axis slabs through the unique ratio
point whose exclusion box meets the ball.  Cell population is ruled out
cheaply by a norm-product certificate (|N(q)| >= 1 squeezes the embedding
bounds); surviving cells are searched exactly with rational LLL plus
enumeration, so a second distinct ratio in a cell is a hard error, never a
numerical artifact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certify import cmp_monomials, monomial, norm_monomials, cert_height_cmp
from .errors import (IncompleteEnumeration, ParameterOutOfRange,
                     PrecisionExhausted, UniquenessViolation)
from .fieldarith import (FieldElement, FieldSpec, WeightVector, embed_floats, embed_ratio_floats,
                         iv_abs, iv_frac_pow, iv_poly, log_height,
                         log_weighted_norm)
from .games import Ball, HyperplaneNeighborhood
from .lattice import SupBoxEnum

_TIE = 1e-9  # relative float band that escalates to certified comparisons


@dataclass(frozen=True)
class StrategyConstants:
    beta: float
    gamma: float
    d: int
    rho0: float
    R: int

    @property
    def eps(self) -> float:
        return self.rho0 * float(self.R) ** (-4 * self.d) / 4.0

    @property
    def eps_frac(self) -> Fraction:
        return Fraction(self.rho0) * Fraction(self.R) ** (-4 * self.d) / 4

    def H(self, n: int) -> float:
        return math.exp(self.logH(n))

    def H_frac(self, n: int) -> Fraction:
        # eps/rho0 * R^n with eps = rho0 R^{-4d}/4: the rho0 cancels exactly
        return Fraction(self.R) ** (n - 4 * self.d) / 4

    def logH(self, n: int) -> float:
        return (n - 4 * self.d) * math.log(self.R) - math.log(4.0)


def compute_constants(beta: float, gamma: float, d: int,
                      rho0: float) -> StrategyConstants:
    """R = least integer >= 2 with d/(R^gamma - 1) <= (beta^2/2)^gamma;
    eps = rho0 R^{-4d} / 4."""
    if not 0 < beta < 1:
        raise ParameterOutOfRange(f"beta {beta} outside (0,1)")
    if not gamma > 0:
        raise ParameterOutOfRange(f"gamma {gamma} must be positive")
    if not 0 < rho0 < 1:
        raise ParameterOutOfRange(f"rho0 {rho0} must be in (0,1)")
    thr = (beta * beta / 2.0) ** gamma
    R = max(2, math.ceil((d / thr + 1.0) ** (1.0 / gamma)) - 2)
    while d / (float(R) ** gamma - 1.0) > thr:
        R += 1
    return StrategyConstants(beta, gamma, d, rho0, R)


def ball_class(c: StrategyConstants, b: Ball) -> int | None:
    """The n with beta R^{-n} rho0 < rho <= R^{-n} rho0, or None (gap radii)."""
    rho = b.radius
    if rho > c.rho0 * (1 + _TIE):
        return None
    t = math.log(c.rho0 / rho) / math.log(c.R)
    for n in (math.floor(t), math.ceil(t), math.floor(t) + 1):
        if n < 0:
            continue
        top = c.rho0 * float(c.R) ** (-n)
        if c.beta * top * (1 + _TIE) < rho <= top * (1 + _TIE):
            return n
    return None


def partition_index(field: FieldSpec, w: WeightVector, c: StrategyConstants,
                    q: FieldElement) -> tuple[int, int] | None:
    """(n, k) with H_n <= H(q) < H_{n+1} and
    H_n R^{(4k-4)d} <= ||q||_r^{2 r_max} < H_n R^{4kd}; n floored at 0."""
    if q.is_zero():
        return None
    lgR = math.log(c.R)
    lH = log_height(field, q, w)
    n = math.floor((lH - c.logH(0)) / lgR)
    # certified adjustment at the two candidate boundaries
    if abs(lH - c.logH(n)) < _TIE * max(1.0, abs(lH)):
        if cert_height_cmp(field, q, w, c.H_frac(n)) < 0:
            n -= 1
    elif abs(lH - c.logH(n + 1)) < _TIE * max(1.0, abs(lH)):
        if cert_height_cmp(field, q, w, c.H_frac(n + 1)) >= 0:
            n += 1
    if n < 0:
        n = 0

    sig = embed_floats(field, q)
    logs = [math.log(abs(v)) if v != 0 else -math.inf for v in sig]
    l2r = 2.0 * float(w.r_max) * log_weighted_norm(logs, w)
    step = 4 * c.d * lgR
    k = math.floor((l2r - c.logH(n)) / step) + 1
    if k < 1:
        k = 1

    def cmp_norm_pow(bound: Fraction) -> int:
        # sign of ||q||^{2 r_max} - bound
        return max(cmp_monomials(field, m, monomial(bound))
                   for m in norm_monomials(field, q, w, 2 * w.r_max))

    lo_log = c.logH(n) + (4 * k - 4) * c.d * lgR
    hi_log = c.logH(n) + 4 * k * c.d * lgR
    if abs(l2r - lo_log) < _TIE * max(1.0, abs(l2r)):
        if cmp_norm_pow(c.H_frac(n) * Fraction(c.R) ** ((4 * k - 4) * c.d)) < 0:
            k -= 1
    elif abs(l2r - hi_log) < _TIE * max(1.0, abs(l2r)):
        if cmp_norm_pow(c.H_frac(n) * Fraction(c.R) ** (4 * k * c.d)) >= 0:
            k += 1
    return n, max(k, 1)


# ---------------------------------------------------------------------------
# cell emptiness certificate
# ---------------------------------------------------------------------------

def cell_log_bounds(w: WeightVector, c: StrategyConstants, m: int, k: int):
    """Per-embedding log upper bounds for |sigma_i(q)|, q in the (m, k) cell,
    plus the log r-norm window (logL, logU)."""
    lgR = math.log(c.R)
    r_max = float(w.r_max)
    logL = (c.logH(m) + (4 * k - 4) * c.d * lgR) / (2 * r_max)
    logU = (c.logH(m) + 4 * k * c.d * lgR) / (2 * r_max)
    log_eps = math.log(c.eps)
    caps = []
    for i in range(c.d):
        if i in w.S1:
            ri = float(w.weights[i])
            caps.append(min(ri * logU, c.logH(m + 1) - ri * logL))
        else:
            caps.append(log_eps)
    return caps, logL, logU


def cell_certified_empty(field: FieldSpec, w: WeightVector,
                         c: StrategyConstants, m: int, k: int) -> bool:
    """True only with a proof that no q lands in cell (m, k).

    Three certificates: every admissible q has H(q) >= 1 > H_{m+1}; the
    embedding caps multiply to less than 1 = min |N(q)|; or the norm window
    forces the height out the top.  The last uses H(q) >= ||q||_r^{2 r_i} at
    the embedding realizing the r-norm together with ||q||_r >= 1, so
    H(q) >= ||q||_r^{2 min S1 weight} >= L^{2 min S1 weight}."""
    if c.logH(m + 1) <= 1e-12:
        return True
    caps, logL, _ = cell_log_bounds(w, c, m, k)
    if sum(caps) < -1e-9:
        return True
    r_min = float(min(w.weights[i] for i in w.S1))
    return logL > 0 and 2.0 * r_min * logL >= c.logH(m + 1) + 1e-9


# ---------------------------------------------------------------------------
# exact cell search: pairs (p, q) with q in the cell and box meeting the ball
# ---------------------------------------------------------------------------

def _root_approx_matrix(field: FieldSpec, width: Fraction) -> list[list[Fraction]]:
    """Rational approximations of sigma_i(omega_j), error <= width * C."""
    field.refine_roots(width)
    out = []
    for rb in field._roots:
        mid = (rb.lo + rb.hi) / 2
        row = []
        for brow in field.basis:
            acc = Fraction(0)
            for cc in reversed(brow):
                acc = acc * mid + cc
            row.append(acc)
        out.append(row)
    return out


def _iv_embed(field: FieldSpec, pc, idx):
    rb = field._roots[idx]
    return iv_poly(list(pc), (rb.lo, rb.hi))


def _box_meets_ball_certified(field: FieldSpec, w: WeightVector,
                              p: FieldElement, q: FieldElement,
                              eps: Fraction, center, rho: Fraction) -> bool:
    """Delta_eps(p, q) intersects the closed ball in the sup sense used by
    the covering argument: per coordinate
    |c_i - sigma_i(p)/sigma_i(q)| <= rho + halfwidth_i, i.e. after clearing
    the denominator |c_i sigma(q) - sigma(p)| <= rho |sigma_i(q)| + eps * X_i
    with X_i = ||q||^{-r_i} on S1 and X_i = 1 on S2."""
    qpc = q.power_coords()
    ppc = p.power_coords()
    width = Fraction(1, 2 ** 80)
    for attempt in range(6):
        field.refine_roots(width)
        bits = 80 + 60 * attempt
        undecided = False
        for i in range(field.d):
            sq = iv_abs(_iv_embed(field, qpc, i))
            lin = [center[i] * a - b for a, b in zip(qpc, ppc)]
            lhs = iv_abs(_iv_embed(field, lin, i))
            if i in w.S1:
                # ||q||^{-r_i} = min over j in S1 of |sigma_j(q)|^{-r_i/r_j};
                # an embedding interval still straddling 0 means more root
                # precision is needed (sigma_j(q) != 0 for q != 0)
                try:
                    terms = [iv_frac_pow(iv_abs(_iv_embed(field, qpc, j)),
                                         -w.weights[i] / w.weights[j], bits)
                             for j in w.S1]
                except ValueError:
                    undecided = True
                    continue
                x_lo = min(t[0] for t in terms)
                x_hi = min(t[1] for t in terms)
            else:
                x_lo = x_hi = Fraction(1)
            rhs_lo = rho * sq[0] + eps * x_lo
            rhs_hi = rho * sq[1] + eps * x_hi
            if lhs[1] <= rhs_lo:
                continue
            if lhs[0] > rhs_hi:
                return False
            undecided = True
        if not undecided:
            return True
        width /= 2 ** 60
    raise PrecisionExhausted("box/ball intersection undecided")


def _cert_s2_small(field, w, q, eps: Fraction) -> bool:
    from .certify import cert_abs_leq
    return all(cert_abs_leq(field, q, i, eps) for i in w.S2)


def search_cell(field: FieldSpec, w: WeightVector, c: StrategyConstants,
                b: Ball, m: int, k: int, coord_bound: int | None = None,
                node_cap: int = 2_000_000, confirm_cap: int = 20_000):
    """All distinct ratios p/q with q in cell (m, k) and Delta_eps(p, q)
    meeting the ball; complete by construction of the enumeration region."""
    if cell_certified_empty(field, w, c, m, k):
        return []
    d = field.d
    caps, logL, logU = cell_log_bounds(w, c, m, k)
    eps = c.eps_frac
    log_eps = math.log(c.eps)

    # float bounds, padded
    Mq = [math.exp(v) * (1 + 1e-6) for v in caps]
    Mp = []
    for i in range(d):
        if i in w.S1:
            ri = float(w.weights[i])
            Mp.append(Mq[i] * b.radius + math.exp(log_eps - ri * logL) * (1 + 1e-6))
        else:
            Mp.append(Mq[i] * b.radius + c.eps * (1 + 1e-6))

    # required coordinate bound (completeness certificate)
    inv = np.abs(field.embedding_matrix_inv())
    need_q = int(np.max(np.ceil(inv @ np.array(Mq)))) + 1
    need_p = int(np.max(np.ceil(inv @ np.array(Mp) + inv @ (np.abs(
        np.array([float(v) for v in b.center])) * np.array(Mq))))) + 1
    if coord_bound is not None and max(need_p, need_q) > coord_bound:
        raise IncompleteEnumeration(
            f"needed coordinate bound {max(need_p, need_q)} exceeds {coord_bound}")

    # rational approximation of the embedding matrix, tight enough that the
    # 1e-6 pad absorbs the approximation error
    zmax = float(max(need_p, need_q, 2))
    min_bound = min(min(Mq), min(Mp))
    bits = max(80, int(math.log2(zmax / max(min_bound, 1e-300))) + 60)
    E = _root_approx_matrix(field, Fraction(1, 2 ** bits))

    cf = [Fraction(v) for v in b.center]
    rho = Fraction(b.radius)

    rows: list[list[Fraction]] = []
    base_iv: list[tuple[Fraction, Fraction]] = []
    for i in range(d):  # |sigma_i(p) - c_i sigma_i(q)| <= Mp_i
        rows.append([E[i][j] for j in range(d)]
                    + [-cf[i] * E[i][j] for j in range(d)])
        base_iv.append((-Fraction(Mp[i]), Fraction(Mp[i])))
    for i in range(d):  # |sigma_i(q)| <= Mq_i
        rows.append([Fraction(0)] * d + [E[i][j] for j in range(d)])
        base_iv.append((-Fraction(Mq[i]), Fraction(Mq[i])))

    # Every q in the cell realizes its r-norm at some embedding i* in S1,
    # putting |sigma_i*(q)| above L^{r_i*}; split the search over i* and
    # (up to the sign canonicalized below) take the positive side, so the
    # box sits on the norm window instead of engulfing the far larger
    # low-norm bulk beneath it.
    splits = []
    for istar in sorted(w.S1):
        lo = Fraction(math.exp(float(w.weights[istar]) * logL)) \
            / (1 + Fraction(1, 10 ** 6))
        # at the realizing embedding H(q) >= |sigma_i*(q)|^2, so the height
        # window also caps this coordinate at sqrt(H_{m+1})
        hi = min(base_iv[d + istar][1],
                 Fraction(math.exp(0.5 * c.logH(m + 1))) * (1 + Fraction(1, 10 ** 6)))
        if lo >= hi:
            continue
        iv = list(base_iv)
        iv[d + istar] = (lo, hi)
        splits.append(iv)

    # A ratio can have very many representations in one cell (p = 0 pairs
    # with every denominator in the norm window), so each split is scanned
    # lazily: a second distinct ratio returns at once, and after the first
    # hit the scan keeps going only for confirm_cap further nodes before
    # trusting single-ratio-per-cell.
    ratios: list[tuple[FieldElement, FieldElement]] = []
    capped = False
    for iv in splits:
        enum = SupBoxEnum(rows, iv, node_cap=node_cap)
        # a ratio carried over from an earlier split starts the confirm
        # budget immediately; otherwise later splits rescan everything just
        # to re-skip representations of the ratio they already hold
        found_at: int | None = 0 if ratios else None
        for z in enum:
            if found_at is not None and enum.nodes - found_at > confirm_cap:
                break
            pq = z[d:]
            if all(v == 0 for v in pq):
                continue
            q = field.element(pq)
            p = field.element(z[:d])
            # canonical sign
            for v in pq:
                if v != 0:
                    if v < 0:
                        q, p = -q, -p
                    break
            # another representation of a known ratio adds nothing; skip
            # before the certified filters, which dominate the cost
            if any((p * q2 - p2 * q).is_zero() for p2, q2 in ratios):
                continue
            nk = partition_index(field, w, c, q)
            if nk != (m, k):
                continue
            if not _cert_s2_small(field, w, q, eps):
                continue
            if not _box_meets_ball_certified(field, w, p, q, eps, cf, rho):
                continue
            ratios.append((p, q))
            if len(ratios) > 1:
                return ratios
            found_at = enum.nodes
        capped = capped or enum.capped
    if capped and not ratios:
        raise IncompleteEnumeration(f"node cap {node_cap} hit in cell search")
    return ratios


def unique_point(field: FieldSpec, w: WeightVector, c: StrategyConstants,
                 b: Ball, n: int, k: int,
                 coord_bound: int | None = None) -> np.ndarray | None:
    """theta(p/q) of the single admissible pair in cell (n+k, k) whose box
    meets the ball; None when the cell contributes nothing here."""
    ratios = search_cell(field, w, c, b, n + k, k, coord_bound=coord_bound)
    if not ratios:
        return None
    if len(ratios) > 1:
        (p1, q1), (p2, q2) = ratios[:2]
        raise UniquenessViolation((p1.coords, q1.coords),
                                  (p2.coords, q2.coords))
    p, q = ratios[0]
    return embed_ratio_floats(field, p, q)


# ---------------------------------------------------------------------------
# the strategy driver
# ---------------------------------------------------------------------------

class AliceStrategy:
    """Potential-game strategy.  Plays empty moves until Bob's radius drops
    below 1 (relabeling that ball as B_0), then acts once per fresh radius
    class."""

    def __init__(self, field: FieldSpec, w: WeightVector, beta: float,
                 gamma: float, k_cut: int = 50,
                 coord_bound: int | None = None):
        self.field = field
        self.w = w
        self.beta = beta
        self.gamma = gamma
        self.k_cut = k_cut
        self.coord_bound = coord_bound
        self.constants: StrategyConstants | None = None
        self.class_first: dict[int, int] = {}   # n -> round i(n)
        self.round = -1
        self.emission_log: list[tuple] = []     # (round, n, k, tau, offset, delta)

    def respond(self, ball: Ball) -> list[HyperplaneNeighborhood]:
        self.round += 1
        if self.constants is None:
            if ball.radius >= 1.0:
                return []
            self.constants = compute_constants(self.beta, self.gamma,
                                               self.field.d, ball.radius)
        c = self.constants
        n = ball_class(c, ball)
        if n is None or n in self.class_first:
            return []
        self.class_first[n] = self.round
        fam: list[HyperplaneNeighborhood] = []
        for k in range(1, self.k_cut + 1):
            if cell_certified_empty(self.field, self.w, c, n + k, k):
                continue
            s = unique_point(self.field, self.w, c, ball, n, k,
                             coord_bound=self.coord_bound)
            if s is None:
                continue
            delta = c.rho0 * float(c.R) ** (-n - k)
            if delta <= 0.0:
                continue  # below float resolution; cannot matter at this scale
            for tau in range(self.field.d):
                normal = tuple(1.0 if j == tau else 0.0
                               for j in range(self.field.d))
                fam.append(HyperplaneNeighborhood(normal, float(s[tau]), delta))
                self.emission_log.append(
                    (self.round, n, k, tau, float(s[tau]), delta))
        return fam
