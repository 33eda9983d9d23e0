"""Referee-validated hyperplane games on R^d.

Two variants: the absolute game (Alice names one slab per turn, Bob must
avoid it) and the potential game (Alice names a finite family under a
gamma-power budget, Bob only nests).  Every accepted move re-passes its
legality check on replay, and transcripts round-trip through a line format
bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import IllegalMove, ParameterOutOfRange, ParseError

_TOL = 1e-12


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterOutOfRange(f"radius {self.radius} must be positive")

    @property
    def d(self) -> int:
        return len(self.center)


@dataclass(frozen=True)
class HyperplaneNeighborhood:
    normal: tuple[float, ...]
    offset: float
    delta: float

    def __post_init__(self):
        nn = math.sqrt(sum(v * v for v in self.normal))
        if abs(nn - 1.0) > _TOL:
            raise ParameterOutOfRange(f"normal length {nn} not 1 within {_TOL}")
        if not self.delta > 0:
            raise ParameterOutOfRange("delta must be positive")

    def distance(self, point) -> float:
        return abs(sum(n * x for n, x in zip(self.normal, point)) - self.offset)


@dataclass
class GameTranscript:
    kind: str                      # "absolute" | "potential"
    beta: float
    gamma: float | None
    moves: list                    # alternating Ball / list[HyperplaneNeighborhood]
    status: str = "in-progress"

    def balls(self) -> list[Ball]:
        return [m for m in self.moves if isinstance(m, Ball)]

    def families(self) -> list[list]:
        return [m for m in self.moves if not isinstance(m, Ball)]

    def last_ball(self) -> Ball:
        return self.balls()[-1]

    def whose_turn(self) -> str:
        return "alice" if isinstance(self.moves[-1], Ball) else "bob"


def new_game(kind: str, beta: float, gamma: float | None,
             b0: Ball) -> GameTranscript:
    if kind == "absolute":
        if not 0 < beta < 1 / 3:
            raise ParameterOutOfRange(
                f"absolute game needs beta in (0, 1/3), got {beta}")
        if gamma is not None:
            raise ParameterOutOfRange("absolute game takes no gamma")
    elif kind == "potential":
        if not 0 < beta < 1:
            raise ParameterOutOfRange(
                f"potential game needs beta in (0, 1), got {beta}")
        if gamma is None or not gamma > 0:
            raise ParameterOutOfRange(f"potential game needs gamma > 0, got {gamma}")
    else:
        raise ParameterOutOfRange(f"unknown game kind {kind!r}")
    return GameTranscript(kind, beta, gamma, [b0])


def alice_move(t: GameTranscript,
               family: list[HyperplaneNeighborhood]) -> GameTranscript:
    if t.whose_turn() != "alice":
        raise IllegalMove("not Alice's turn")
    rho = t.last_ball().radius
    if t.kind == "absolute":
        if len(family) > 1:
            raise IllegalMove("absolute game allows at most one neighborhood")
        for nb in family:
            if nb.delta > t.beta * rho + _TOL:
                raise IllegalMove(
                    f"delta {nb.delta:.17g} > beta*rho = {t.beta * rho:.17g}")
    else:
        budget = (t.beta * rho) ** t.gamma
        total = sum(nb.delta ** t.gamma for nb in family)
        if total > budget + _TOL:
            raise IllegalMove(
                f"sum delta^gamma = {total:.17g} > (beta*rho)^gamma = {budget:.17g}")
    t.moves.append(list(family))
    return t


def bob_move(t: GameTranscript, b: Ball) -> GameTranscript:
    if t.whose_turn() != "bob":
        raise IllegalMove("not Bob's turn")
    prev = t.last_ball()
    family = t.moves[-1]
    if b.radius < t.beta * prev.radius - _TOL:
        raise IllegalMove(
            f"radius {b.radius:.17g} < beta*rho = {t.beta * prev.radius:.17g}")
    dist = math.sqrt(sum((a - c) ** 2 for a, c in zip(b.center, prev.center)))
    if dist > prev.radius - b.radius + _TOL:
        raise IllegalMove(
            f"containment fails: |c'-c| = {dist:.17g} > "
            f"rho - rho' = {prev.radius - b.radius:.17g}")
    if t.kind == "absolute":
        for nb in family:
            if nb.distance(b.center) < nb.delta + b.radius - _TOL:
                raise IllegalMove(
                    f"ball meets the slab: dist {nb.distance(b.center):.17g} < "
                    f"delta + rho' = {nb.delta + b.radius:.17g}")
    t.moves.append(b)
    return t


def outcome(t: GameTranscript) -> tuple[tuple[float, ...], float]:
    b = t.last_ball()
    return b.center, b.radius


@dataclass(frozen=True)
class AliceWins:
    reason: str       # "InNeighborhood(i,k)" or "InTarget"


@dataclass(frozen=True)
class Undetermined:
    pass


def win_check_potential(t: GameTranscript, survivor_oracle) -> AliceWins | Undetermined:
    """AliceWins if the outcome point is certifiably inside a chosen slab
    (distance + radius_bound < delta) or the oracle accepts it; else honest
    Undetermined."""
    point, rad = outcome(t)
    for i, fam in enumerate(t.families()):
        for k, nb in enumerate(fam):
            if nb.distance(point) + rad < nb.delta:
                return AliceWins(f"InNeighborhood({i},{k})")
    if survivor_oracle(point):
        return AliceWins("InTarget")
    return Undetermined()


# ---------------------------------------------------------------------------
# transcript file format (bit-exact replay)
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return "%.17g" % v


def save_transcript(path, t: GameTranscript) -> None:
    lines = [f"GAME {t.kind} {_fmt(t.beta)}"
             + (f" {_fmt(t.gamma)}" if t.gamma is not None else "")]
    for m in t.moves:
        if isinstance(m, Ball):
            lines.append("BOB " + ",".join(_fmt(c) for c in m.center)
                         + " " + _fmt(m.radius))
        elif not m:
            lines.append("EMPTY")
        else:
            for k, nb in enumerate(m, 1):
                lines.append(f"ALICE {k} ({','.join(_fmt(c) for c in nb.normal)}) "
                             f"{_fmt(nb.offset)} {_fmt(nb.delta)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_transcript(path):
    """Parse a transcript file into (kind, beta, gamma, raw move list).

    Raw moves are Balls and neighborhood lists, not yet referee-validated;
    use replay_transcript to re-check legality."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ParseError("empty transcript")
    head = lines[0].split()
    if head[0] != "GAME" or len(head) < 3:
        raise ParseError(f"bad header {lines[0]!r}")
    kind = head[1]
    beta = float(head[2])
    gamma = float(head[3]) if len(head) > 3 else None
    moves = []
    fam = None
    try:
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] == "BOB":
                if fam is not None:
                    moves.append(fam)
                    fam = None
                center = tuple(float(v) for v in parts[1].split(","))
                moves.append(Ball(center, float(parts[2])))
            elif parts[0] == "EMPTY":
                if fam is not None:
                    moves.append(fam)
                moves.append([])
                fam = None
            elif parts[0] == "ALICE":
                k = int(parts[1])
                normal = tuple(float(v) for v in parts[2].strip("()").split(","))
                nb = HyperplaneNeighborhood(normal, float(parts[3]), float(parts[4]))
                if k == 1 and fam is not None:
                    moves.append(fam)
                    fam = None
                fam = (fam or []) + [nb]
            else:
                raise ParseError(f"unknown record {parts[0]!r}")
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed line {ln!r}: {exc}") from exc
    if fam is not None:
        moves.append(fam)
    return kind, beta, gamma, moves


def replay_transcript(path) -> GameTranscript:
    """Re-validate a saved transcript move by move; IllegalMove on tampering."""
    kind, beta, gamma, moves = load_transcript(path)
    if not moves or not isinstance(moves[0], Ball):
        raise ParseError("transcript must open with a Bob ball")
    t = new_game(kind, beta, gamma, moves[0])
    for m in moves[1:]:
        if isinstance(m, Ball):
            bob_move(t, m)
        else:
            alice_move(t, m)
    t.status = "finished"
    return t


# ---------------------------------------------------------------------------
# product-strategy combinator
# ---------------------------------------------------------------------------

class ProductStrategy:
    """Combine two factor strategies at parameter beta^2 into one at beta.

    Even turns consult factor 1, odd turns factor 2; a factor slab of
    half-width delta <= beta^2 * rho becomes the cylinder slab with the same
    delta on the product, which is legal at beta since delta <= beta * rho.
    Each factor sees the projection of Bob's ball (center slice, same radius).
    """

    def __init__(self, strat_a, strat_b, d1: int, d2: int):
        self.strats = (strat_a, strat_b)
        self.dims = (d1, d2)
        self.turn = 0

    def respond(self, ball: Ball) -> list[HyperplaneNeighborhood]:
        which = self.turn % 2
        self.turn += 1
        d1, d2 = self.dims
        lo = 0 if which == 0 else d1
        hi = d1 if which == 0 else d1 + d2
        sub = Ball(ball.center[lo:hi], ball.radius)
        fam = self.strats[which].respond(sub)
        out = []
        for nb in fam:
            normal = (0.0,) * lo + tuple(nb.normal) + (0.0,) * (len(ball.center) - hi)
            out.append(HyperplaneNeighborhood(normal, nb.offset, nb.delta))
        return out
