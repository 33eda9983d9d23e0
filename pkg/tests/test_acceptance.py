"""Full-system acceptance runs.

Each test prints one PASS line on success; a failure shows up as the usual
pytest FAILED line for that criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from badkr import badset, bobs, games
from badkr.certify import height_chain_certified
from badkr.errors import UniquenessViolation
from badkr.fieldarith import make_field, make_weights, height
from badkr.flows import flow_matrix, lattice_LK, psi, systole, trajectory
from badkr.strategy import (AliceStrategy, compute_constants, partition_index,
                            unique_point)

W12 = [Fraction(1, 2), Fraction(1, 2)]
W10 = [Fraction(1), Fraction(0)]
EPS_REF = 0.25


def _coord_grid(field, bound=100):
    rng = np.arange(-bound, bound + 1)
    g = np.meshgrid(rng, rng, indexing="ij")
    coords = np.stack([x.ravel() for x in g], axis=1)
    coords = coords[np.any(coords != 0, axis=1)]
    emb = coords.astype(float) @ field.embedding_matrix().T
    return coords, emb


def _norm_height(emb, w):
    rvals = [float(c) for c in w.weights]
    nrm = np.max(np.stack([np.abs(emb[:, i]) ** (1.0 / rvals[i])
                           for i in w.S1]), axis=0)
    H = np.max(np.stack([np.abs(emb[:, i]) * nrm ** rvals[i]
                         for i in w.S1]), axis=0)
    return nrm, H


def _admissible(coords, emb, w, eps=EPS_REF):
    mask = np.ones(len(coords), dtype=bool)
    for i in w.S2:
        mask &= np.abs(emb[:, i]) <= eps
    return coords[mask], emb[mask]


@pytest.fixture(scope="module")
def duels():
    """Criterion 5 runs, reused by criterion 9."""
    results = []
    for wv in (W12, W10):
        field = make_field([-2, 0, 1])
        w = make_weights(wv)
        cfg = {"beta": "0.5", "gamma": "1", "rounds": "200",
               "height_bound": "500", "eps": "0.25", "bob": "greedy_rational",
               "shrink": "0.5", "b0_center": "0,0", "b0_radius": "0.5"}
        from badkr.cli import run_duel
        for seed in range(5):
            t, alice, verdict = run_duel(field, w, cfg, None, seed=seed)
            results.append((wv, seed, t, verdict))
    return results


def test_criterion_01_height_chain(capsys):
    t0 = time.time()
    checked_cert = 0
    for poly in ([-2, 0, 1], [-5, 0, 1]):
        field = make_field(poly)
        coords, emb = _coord_grid(field)
        for wv in (W12, W10):
            w = make_weights(wv)
            sub, se = _admissible(coords, emb, w)
            nrm, H = _norm_height(se, w)
            rmax = float(w.r_max)
            ok = ((1.0 <= nrm ** 0.5 * (1 + 1e-9))
                  & (nrm ** 0.5 <= H * (1 + 1e-9))
                  & (H <= nrm ** (2 * rmax) * (1 + 1e-9)))
            assert int((~ok).sum()) == 0, f"{poly} {wv}: float violations"
            # certified enclosures: the whole admissible set when it is
            # small, otherwise a deterministic stride sample
            stride = 1 if len(sub) <= 500 else len(sub) // 300
            for row in sub[::stride]:
                q = field.element(row)
                assert height_chain_certified(field, q, w) == (True, True, True)
                checked_cert += 1
    dt = time.time() - t0
    assert dt < 30
    with capsys.disabled():
        print(f"\nCRITERION 1 PASS height chain: 0 violations, "
              f"{checked_cert} certified, {dt:.1f}s")


def test_criterion_02_partition_facts(capsys):
    t0 = time.time()
    total = 0
    for poly in ([-2, 0, 1], [-5, 0, 1]):
        field = make_field(poly)
        coords, emb = _coord_grid(field)
        for wv in (W12, W10):
            w = make_weights(wv)
            c = compute_constants(0.5, 1.0, 2, 0.5)
            lgR = math.log(c.R)
            nrm, H = _norm_height(emb, w)
            lH = np.log(H)
            n = np.maximum(np.floor((lH - c.logH(0)) / lgR).astype(int), 0)
            l2r = 2.0 * float(w.r_max) * np.log(nrm)
            k = np.maximum(np.floor(
                (l2r - (c.logH(0) + n * lgR)) / (4 * 2 * lgR)).astype(int) + 1, 1)
            # re-adjudicate anything near a cell boundary exactly
            bn = np.minimum(np.abs(lH - (c.logH(0) + n * lgR)),
                            np.abs(lH - (c.logH(0) + (n + 1) * lgR)))
            lo = c.logH(0) + n * lgR + (4 * k - 4) * 2 * lgR
            bk = np.minimum(np.abs(l2r - lo), np.abs(l2r - (lo + 8 * lgR)))
            band = ((bn < 1e-6 * np.maximum(1.0, np.abs(lH)))
                    | (bk < 1e-6 * np.maximum(1.0, np.abs(l2r))))
            for idx in np.nonzero(band)[0]:
                n[idx], k[idx] = partition_index(field, w, c,
                                                 field.element(coords[idx]))
            assert int((k >= n).sum()) == 0, f"{poly} {wv}: k >= n cell hit"
            total += len(coords)
    dt = time.time() - t0
    assert dt < 10
    with capsys.disabled():
        print(f"CRITERION 2 PASS partition: {total} q, all (n,k) unique "
              f"with k < n, {dt:.1f}s")


def test_criterion_03_uniqueness(capsys):
    t0 = time.time()
    field = make_field([-2, 0, 1])
    c = compute_constants(0.5, 1.0, 2, 0.5)
    rng = np.random.default_rng(2024)
    violations = 0
    balls = 0
    for wv in (W12, W10):
        w = make_weights(wv)
        for _ in range(500):
            n = int(rng.integers(0, 7))
            top = c.rho0 * float(c.R) ** (-n)
            radius = float(rng.uniform(c.beta * top, top))
            center = tuple(rng.uniform(-0.5, 0.5, 2))
            b = games.Ball(center, radius)
            balls += 1
            for k in range(1, 9):
                try:
                    unique_point(field, w, c, b, n, k)
                except UniquenessViolation:
                    violations += 1
    dt = time.time() - t0
    assert violations == 0
    assert dt < 300
    with capsys.disabled():
        print(f"CRITERION 3 PASS uniqueness: {balls} balls across classes "
              f"n<=6, 0 violations, {dt:.1f}s")


def test_criterion_04_strategy_legality(capsys):
    t0 = time.time()
    field = make_field([-2, 0, 1])
    w = make_weights(W12)
    illegal = 0
    games_run = 0
    for beta, gamma in ((0.5, 1.0), (0.25, 2.0), (0.1, 0.5)):
        for seed in range(5):
            t = games.new_game("potential", beta, gamma,
                               games.Ball((0.0, 0.0), 0.5))
            alice = AliceStrategy(field, w, beta, gamma)
            pol = bobs.BobPolicy("random", seed=seed, shrink=max(beta, 0.5))
            for _ in range(200):
                fam = alice.respond(t.last_ball())
                try:
                    games.alice_move(t, fam)  # referee applies the budget
                except games.IllegalMove:
                    illegal += 1
                    break
                games.bob_move(t, bobs.random_bob(pol, t))
            games_run += 1
    dt = time.time() - t0
    assert illegal == 0
    assert dt < 120
    with capsys.disabled():
        print(f"CRITERION 4 PASS legality: {games_run} games x 200 rounds, "
              f"0 illegal moves, {dt:.1f}s")


def test_criterion_05_strategy_wins(capsys, duels):
    for wv, seed, t, verdict in duels:
        assert isinstance(verdict, games.AliceWins), \
            f"weights {wv} seed {seed}: {verdict}"
    with capsys.disabled():
        print(f"CRITERION 5 PASS wins: {len(duels)}/10 duels AliceWins")


def test_criterion_06_product_combinator(capsys):
    t0 = time.time()
    field = make_field([-2, 0, 1])
    w = make_weights(W12)
    beta = 0.3
    illegal = 0
    for seed in range(3):
        prod = games.ProductStrategy(
            AliceStrategy(field, w, beta * beta, 1.0),
            AliceStrategy(field, w, beta * beta, 1.0), 2, 2)
        t = games.new_game("potential", beta, 1.0,
                           games.Ball((0.0, 0.0, 0.0, 0.0), 0.5))
        pol = bobs.BobPolicy("random", seed=seed, shrink=0.5)
        for _ in range(100):
            try:
                games.alice_move(t, prod.respond(t.last_ball()))
            except games.IllegalMove:
                illegal += 1
                break
            games.bob_move(t, bobs.random_bob(pol, t))
    dt = time.time() - t0
    assert illegal == 0
    assert dt < 60
    with capsys.disabled():
        print(f"CRITERION 6 PASS product: beta=0.3 from two beta^2 factors, "
              f"3x100 rounds legal, {dt:.1f}s")


def test_criterion_07_psi_lattice(capsys):
    t0 = time.time()
    rng = np.random.default_rng(7)

    def rand_sl2():
        a, b, c = rng.uniform(-2, 2, 3)
        a = a if abs(a) > 0.1 else 1.0
        return np.array([[a, b], [c, (1 + b * c) / a]])

    worst = 0.0
    for _ in range(1000):
        A1, A2, B1, B2 = (rand_sl2() for _ in range(4))
        res = psi([A1 @ B1, A2 @ B2]) - psi([A1, A2]) @ psi([B1, B2])
        worst = max(worst, float(np.max(np.abs(res))))
    assert worst <= 1e-9

    w = make_weights(W12)
    for poly in ([-2, 0, 1], [-5, 0, 1]):
        L = lattice_LK(make_field(poly))
        assert abs(L.covolume - 1.0) <= 1e-9
        for t in np.linspace(0.0, 20.0, 21):
            M = flow_matrix(float(t), w) @ L.matrix
            assert abs(abs(np.linalg.det(M)) - 1.0) <= 1e-9
    dt = time.time() - t0
    assert dt < 30
    with capsys.disabled():
        print(f"CRITERION 7 PASS psi/lattice: residual {worst:.2e}, "
              f"covolume 1, {dt:.1f}s")


def test_criterion_08_dani_negative(capsys):
    t0 = time.time()
    field = make_field([-2, 0, 1])
    w = make_weights(W12)
    r_min = float(min(w.weights[i] for i in w.S1))
    qs = [q for q in badset.enumerate_denominators(field, w, EPS_REF, 50)
          if height(field, q, w) >= 2]
    points = []
    for q in qs:
        for pc in ([1, 0], [0, 1]):
            points.append((field.element(pc), q))
            if len(points) == 20:
                break
        if len(points) == 20:
            break
    assert len(points) == 20
    for p, q in points:
        x = -badset.ratio_point(field, p, q)
        ts = np.arange(2.0, 15.0 + 1e-9, 0.5)
        lam = np.array([s.lambda1 for s in trajectory(field, w, x, ts)])
        slope = float(np.polyfit(ts, np.log(lam), 1)[0])
        assert slope <= -0.3 * r_min, f"{p.coords}/{q.coords}: slope {slope}"
        T = 2.0 * math.log(height(field, q, w)) + 5.0
        grid = np.arange(0.0, T + 1e-9, 0.05)
        mn = min(s.lambda1 for s in trajectory(field, w, x, grid))
        assert mn < 0.05, f"{p.coords}/{q.coords}: min lambda1 {mn}"
    dt = time.time() - t0
    assert dt < 120
    with capsys.disabled():
        print(f"CRITERION 8 PASS dani-: 20 ratio points decay, {dt:.1f}s")


def test_criterion_09_dani_positive(capsys, duels):
    t0 = time.time()
    field = make_field([-2, 0, 1])
    T = math.log(500.0) + 2.0
    grid = np.arange(0.0, T + 1e-9, 0.1)
    worst = math.inf
    for wv, seed, t, verdict in duels:
        w = make_weights(wv)
        point, _ = games.outcome(t)
        mn = min(s.lambda1 for s in trajectory(field, w, point, grid))
        worst = min(worst, mn)
        assert mn >= 0.01, f"weights {wv} seed {seed}: min lambda1 {mn}"
    dt = time.time() - t0
    assert dt < 120
    with capsys.disabled():
        print(f"CRITERION 9 PASS dani+: 10 outcomes, min lambda1 "
              f"{worst:.4f} >= 0.01, {dt:.1f}s")


def test_criterion_10_systole_oracle(capsys):
    t0 = time.time()
    rng = np.random.default_rng(10)

    def rand_unimodular(n, ops=8):
        U = np.eye(n)
        for _ in range(ops):
            i, j = rng.integers(0, n, 2)
            if i != j:
                U[i] += rng.integers(-2, 3) * U[j]
        return U

    def gen(n):
        # regenerate until the certified coefficient box fits ||c||_inf <= 25
        while True:
            D = np.diag(np.exp(rng.uniform(-1.2, 1.2, n)))
            B = rand_unimodular(n) @ D @ rand_unimodular(n)
            s = systole(B)
            # v = B c and |c_i| <= lambda1 ||row_i(B^-1)||
            K = np.floor(s.lambda1 * np.linalg.norm(np.linalg.inv(B), axis=1)
                         * (1 + 1e-9)).astype(int)
            if np.all(K <= 25) and np.prod(2.0 * K + 1.0) <= 3e6:
                return B, s, K

    checked = 0
    for n in (4, 6):
        for _ in range(100):
            B, s, K = gen(n)
            grids = np.meshgrid(*[np.arange(-k, k + 1) for k in K],
                                indexing="ij")
            C = np.stack([g.ravel() for g in grids], axis=1)
            C = C[np.any(C != 0, axis=1)]
            V = C @ B.T
            bf = float(np.sqrt((V * V).sum(axis=1).min()))
            assert abs(bf - s.lambda1) <= 1e-9 * bf
            checked += 1
    dt = time.time() - t0
    assert dt < 120
    with capsys.disabled():
        print(f"CRITERION 10 PASS systole: {checked} bases match brute "
              f"force, {dt:.1f}s")
