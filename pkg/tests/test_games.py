"""Referee, transcripts and the product-of-factors strategy."""

import math

import pytest

from badkr.errors import IllegalMove, ParameterOutOfRange, ParseError
from badkr.games import (AliceWins, Ball, GameTranscript,
                         HyperplaneNeighborhood, ProductStrategy, Undetermined,
                         alice_move, bob_move, load_transcript, new_game,
                         outcome, replay_transcript, save_transcript,
                         win_check_potential)


def _nb(offset, delta, d=2, axis=0):
    normal = tuple(1.0 if j == axis else 0.0 for j in range(d))
    return HyperplaneNeighborhood(normal, offset, delta)


def test_new_game_parameter_gates():
    b0 = Ball((0.0, 0.0), 1.0)
    new_game("absolute", 0.3, None, b0)
    new_game("potential", 0.9, 2.0, b0)
    with pytest.raises(ParameterOutOfRange):
        new_game("absolute", 0.4, None, b0)     # beta >= 1/3
    with pytest.raises(ParameterOutOfRange):
        new_game("absolute", 0.3, 1.0, b0)      # stray gamma
    with pytest.raises(ParameterOutOfRange):
        new_game("potential", 0.5, None, b0)    # missing gamma
    with pytest.raises(ParameterOutOfRange):
        new_game("schmidt", 0.5, 1.0, b0)
    with pytest.raises(ParameterOutOfRange):
        Ball((0.0, 0.0), 0.0)


def test_turn_order():
    t = new_game("potential", 0.5, 1.0, Ball((0.0, 0.0), 1.0))
    assert t.whose_turn() == "alice"
    with pytest.raises(IllegalMove):
        bob_move(t, Ball((0.0, 0.0), 0.5))
    t = alice_move(t, [])
    assert t.whose_turn() == "bob"
    with pytest.raises(IllegalMove):
        alice_move(t, [])


def test_potential_budget():
    t = new_game("potential", 0.5, 2.0, Ball((0.0, 0.0), 1.0))
    # budget (beta rho)^gamma = 0.25: three deltas of 0.3 sum to 0.27
    with pytest.raises(IllegalMove):
        alice_move(t, [_nb(0.0, 0.3), _nb(0.1, 0.3), _nb(0.2, 0.3)])
    # two of them sum to 0.18, inside the budget
    alice_move(t, [_nb(0.0, 0.3), _nb(0.1, 0.3)])


def test_absolute_single_slab_and_avoidance():
    t = new_game("absolute", 0.3, None, Ball((0.0, 0.0), 1.0))
    with pytest.raises(IllegalMove):
        alice_move(t, [_nb(0.0, 0.1), _nb(0.5, 0.1)])
    with pytest.raises(IllegalMove):
        alice_move(t, [_nb(0.0, 0.5)])          # delta > beta rho
    t = alice_move(t, [_nb(0.0, 0.2)])
    # Bob must dodge the slab x1 in [-0.2, 0.2]
    with pytest.raises(IllegalMove):
        bob_move(t, Ball((0.0, 0.0), 0.3))
    t = bob_move(t, Ball((0.55, 0.0), 0.3))
    assert t.last_ball().center == (0.55, 0.0)


def test_bob_radius_and_containment():
    t = new_game("potential", 0.5, 1.0, Ball((0.0, 0.0), 1.0))
    t = alice_move(t, [])
    with pytest.raises(IllegalMove):
        bob_move(t, Ball((0.0, 0.0), 0.4))      # radius < beta rho
    with pytest.raises(IllegalMove):
        bob_move(t, Ball((0.6, 0.0), 0.5))      # pokes outside
    t = bob_move(t, Ball((0.5, 0.0), 0.5))
    assert outcome(t) == ((0.5, 0.0), 0.5)
    # potential game: Bob may enter slabs freely
    t = alice_move(t, [_nb(0.5, 0.2)])
    bob_move(t, Ball((0.5, 0.0), 0.25))


def _tiny_game(rounds=3):
    t = new_game("potential", 0.5, 1.0, Ball((0.25, -0.25), 0.5))
    for i in range(rounds):
        fam = [_nb(0.25, 0.05 * (0.5 ** i), axis=0)] if i == 0 else []
        t = alice_move(t, fam)
        t = bob_move(t, Ball(t.last_ball().center, t.last_ball().radius / 2))
    return t


def test_win_check_in_neighborhood():
    t = _tiny_game(6)
    v = win_check_potential(t, lambda pt: False)
    assert isinstance(v, AliceWins)
    assert v.reason == "InNeighborhood(0,0)"


def test_win_check_target_and_undetermined():
    t = new_game("potential", 0.5, 1.0, Ball((0.25, -0.25), 0.5))
    t = alice_move(t, [])
    t = bob_move(t, Ball((0.25, -0.25), 0.25))
    assert isinstance(win_check_potential(t, lambda pt: True), AliceWins)
    assert win_check_potential(t, lambda pt: True).reason == "InTarget"
    assert isinstance(win_check_potential(t, lambda pt: False), Undetermined)


def test_transcript_roundtrip(tmp_path):
    t = _tiny_game(4)
    path = tmp_path / "game.txt"
    save_transcript(path, t)
    r = replay_transcript(path)
    assert r.kind == t.kind and r.beta == t.beta and r.gamma == t.gamma
    assert len(r.moves) == len(t.moves)
    for a, b in zip(r.balls(), t.balls()):
        assert a.center == b.center and a.radius == b.radius
    # byte-exact resave
    path2 = tmp_path / "game2.txt"
    save_transcript(path2, r)
    assert path.read_bytes() == path2.read_bytes()


def test_replay_rejects_tampering(tmp_path):
    t = _tiny_game(4)
    path = tmp_path / "game.txt"
    save_transcript(path, t)
    lines = path.read_text().splitlines()
    idx = max(i for i, ln in enumerate(lines) if ln.startswith("BOB"))
    parts = lines[idx].split()
    lines[idx] = f"BOB {parts[1]} {float(parts[2]) * 3}"  # inflate a radius
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(IllegalMove):
        replay_transcript(path)


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("GAME potential 0.5 1\nALICE nonsense\n")
    with pytest.raises(ParseError):
        load_transcript(path)
    path.write_text("ALICE 0\n")
    with pytest.raises(ParseError):
        replay_transcript(path)


class _ConstStrategy:
    """Emits one fixed slab scaled to the ball it sees."""

    def __init__(self, axis, beta):
        self.axis = axis
        self.beta = beta

    def respond(self, ball):
        normal = tuple(1.0 if j == self.axis else 0.0
                       for j in range(len(ball.center)))
        return [HyperplaneNeighborhood(normal, ball.center[self.axis],
                                       self.beta * ball.radius)]


def test_product_strategy_legal_and_embeds():
    beta = 0.3
    prod = ProductStrategy(_ConstStrategy(0, beta * beta),
                           _ConstStrategy(0, beta * beta), 2, 2)
    t = new_game("potential", beta, 1.0, Ball((0.1, 0.2, 0.3, 0.4), 1.0))
    for i in range(6):
        fam = prod.respond(t.last_ball())
        t = alice_move(t, fam)   # raises IllegalMove if budget violated
        assert len(fam) == 1
        nz = [j for j, v in enumerate(fam[0].normal) if v != 0.0]
        # even turns act on the first factor, odd on the second
        assert nz == [0] if i % 2 == 0 else [2]
        b = t.last_ball()
        t = bob_move(t, Ball(b.center, b.radius * beta))
