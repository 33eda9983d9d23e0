"""Legal Bob players: seeded-random, greedy box-chasing, and scripted replay.

Every policy only proposes balls that the referee will accept; feasibility
failures fall back to a constructive point rather than looping forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .badset import ExclusionBox
from .errors import NoFeasibleBall, ParseError
from .games import Ball, GameTranscript, load_transcript

_MAX_REJECT = 10_000


@dataclass
class BobPolicy:
    kind: str                      # random | greedy_rational | scripted
    seed: int = 0
    shrink: float = 0.5            # radius factor per move, must be >= beta
    target_pool: list | None = None
    rng: np.random.Generator = dc_field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)


def _legal(t: GameTranscript, prev: Ball, cand: Ball) -> bool:
    slack = prev.radius - cand.radius
    dist = math.sqrt(sum((a - b) ** 2 for a, b in zip(cand.center, prev.center)))
    if dist > slack:
        return False
    if t.kind == "absolute":
        for nb in t.moves[-1]:
            if nb.distance(cand.center) < nb.delta + cand.radius:
                return False
    return True


def _constructive_center(t: GameTranscript, prev: Ball, radius: float):
    """Deterministic feasible center: step away from the slab along its
    normal, clamped to containment."""
    fam = t.moves[-1] if t.kind == "absolute" else []
    c = np.array(prev.center)
    if fam:
        nb = fam[0]
        n = np.array(nb.normal)
        side = float(np.sign(float(n @ c) - nb.offset)) or 1.0
        needed = nb.delta + radius - abs(float(n @ c) - nb.offset)
        step = min(max(needed, 0.0), prev.radius - radius)
        c = c + side * step * n
    cand = Ball(tuple(float(v) for v in c), radius)
    return cand if _legal(t, prev, cand) else None


def random_bob(policy: BobPolicy, t: GameTranscript) -> Ball:
    """Uniform center in the feasible region by rejection sampling; radius
    shrink * rho."""
    prev = t.last_ball()
    for radius in (policy.shrink * prev.radius, t.beta * prev.radius):
        slack = prev.radius - radius
        for _ in range(_MAX_REJECT):
            delta = policy.rng.uniform(-slack, slack, size=prev.d)
            if float(np.linalg.norm(delta)) > slack:
                continue
            cand = Ball(tuple(np.array(prev.center) + delta), radius)
            if _legal(t, prev, cand):
                return cand
        cand = _constructive_center(t, prev, radius)
        if cand is not None:
            return cand
    raise NoFeasibleBall(
        f"no legal ball found at radii {policy.shrink * prev.radius} "
        f"and {t.beta * prev.radius}")


def greedy_rational_bob(policy: BobPolicy, t: GameTranscript,
                        boxes: list[ExclusionBox] | None = None) -> Ball:
    """Move maximally toward the nearest surviving box center; ties broken by
    lowest height then lexicographic coordinates."""
    targets = boxes if boxes is not None else policy.target_pool
    if not targets:
        raise NoFeasibleBall("greedy bob needs a target pool")
    prev = t.last_ball()
    c = np.array(prev.center)

    cache = getattr(policy, "_pool_cache", None)
    if cache is None or cache[0] is not targets:
        centers = np.array([b.centers for b in targets])
        order = sorted(range(len(targets)),
                       key=lambda i: (targets[i].height, targets[i].q.coords,
                                      targets[i].p.coords))
        rank = np.empty(len(targets))
        for pos, i in enumerate(order):
            rank[i] = pos
        cache = (targets, centers, rank)
        policy._pool_cache = cache
    _, centers, rank = cache

    alive = np.ones(len(targets), dtype=bool)
    for fam in t.families():
        for nb in fam:
            n = np.array(nb.normal)
            alive &= np.abs(centers @ n - nb.offset) >= nb.delta
    if not np.any(alive):
        # every target is dead; play concentric
        return _shrunk_legal(policy, t, prev, c)
    dist = np.linalg.norm(centers - c, axis=1)
    dist[~alive] = np.inf
    dmin = dist.min()
    tied = np.nonzero(dist <= dmin * (1 + 1e-15) + 1e-300)[0]
    idx = tied[np.argmin(rank[tied])]
    ctr = centers[idx]
    radius = policy.shrink * prev.radius
    slack = prev.radius - radius
    diff = ctr - c
    dist = float(np.linalg.norm(diff))
    if dist > 1e-300:
        step = min(dist, slack)
        c = c + diff / dist * step
    cand = Ball(tuple(float(v) for v in c), radius)
    if _legal(t, prev, cand):
        return cand
    return _shrunk_legal(policy, t, prev, np.array(prev.center))


def _shrunk_legal(policy, t, prev, center) -> Ball:
    cand = Ball(tuple(float(v) for v in center), policy.shrink * prev.radius)
    if _legal(t, prev, cand):
        return cand
    cand = _constructive_center(t, prev, policy.shrink * prev.radius)
    if cand is None:
        raise NoFeasibleBall("constructive fallback failed")
    return cand


class ScriptedBob:
    """Replays the Bob balls of a recorded transcript verbatim."""

    def __init__(self, path):
        kind, beta, gamma, moves = load_transcript(path)
        self.balls = [m for m in moves if isinstance(m, Ball)]
        if not self.balls:
            raise ParseError("transcript contains no Bob moves")
        self.pos = 0

    def next_ball(self, t: GameTranscript) -> Ball:
        if self.pos >= len(self.balls):
            raise ParseError("script exhausted")
        b = self.balls[self.pos]
        self.pos += 1
        return b


def scripted_bob(path) -> ScriptedBob:
    return ScriptedBob(path)


def build_target_pool(field, w, eps: float, height_bound: float,
                      b0: Ball) -> list:
    """Exclusion boxes whose ratio points land inside Bob's opening ball.

    Steering targets only: a floor of 0.25 on eps keeps the pool nonempty
    when the run's eps is too small to admit any denominator below the
    height bound."""
    from .badset import enumerate_denominators, exclusion_box
    from .fieldarith import embed_floats
    eps = max(eps, 0.25)
    qs = enumerate_denominators(field, w, eps, height_bound)
    c0 = np.array(b0.center)
    V = field.embedding_matrix()
    inva = np.abs(field.embedding_matrix_inv())
    invm = field.embedding_matrix_inv()
    out = []
    for q in qs:
        sq = embed_floats(field, q)
        target = sq * c0
        slackv = np.abs(sq) * b0.radius
        center = invm @ target
        rad = inva @ slackv + 1.0
        ranges = [np.arange(int(np.ceil(center[j] - rad[j])),
                            int(np.floor(center[j] + rad[j])) + 1)
                  for j in range(field.d)]
        grids = np.meshgrid(*ranges, indexing="ij")
        pcs = np.stack([g.ravel() for g in grids], axis=1)
        ctrs = (pcs.astype(float) @ V.T) / sq
        keep = np.nonzero(np.max(np.abs(ctrs - c0), axis=1) <= b0.radius)[0]
        for i in keep:
            out.append(exclusion_box(field, w, field.element(pcs[i]), q, eps))
    return out
