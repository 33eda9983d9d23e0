"""Command-line front end: reproducible experiments from key-value configs.

Exit codes: 0 success / winner verdict, 2 config or field errors, 3 honest
Undetermined, 4 uniqueness violation (a falsification hook that must never
fire), 5 condition cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import shutil
import sys
from fractions import Fraction

import numpy as np

from . import badset, bobs, flows, games, report, strategy
from .errors import (BadkrError, ConditionTooHigh, IllegalMove, ParseError,
                     UniquenessViolation)
from .fieldarith import make_field, make_weights


def _parse_kv(path) -> dict[str, str]:
    cfg = {}
    with open(path) as fh:
        for ln in fh:
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            if "=" not in ln:
                raise ParseError(f"expected key = value, got {ln!r}")
            k, v = ln.split("=", 1)
            cfg[k.strip()] = v.strip()
    return cfg


def _field_from_cfg(cfg):
    if "min_poly" not in cfg:
        raise ParseError("config needs min_poly")
    mp = [int(v) for v in cfg["min_poly"].split(",")]
    basis = None
    if "basis" in cfg:
        basis = [[Fraction(e) for e in row.split(",")]
                 for row in cfg["basis"].split(";")]
    return make_field(mp, basis)


def _weights_from_cfg(cfg):
    if "weights" not in cfg:
        raise ParseError("config needs weights")
    return make_weights([Fraction(v) for v in cfg["weights"].split(",")])


def _t_grid(spec: str):
    if ":" in spec:
        a, b, step = (float(v) for v in spec.split(":"))
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return [a + i * step for i in range(n)]
    if not spec:
        return []
    return [float(v) for v in spec.split(",")]


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    if args.config and os.path.isfile(args.config):
        shutil.copy(args.config, os.path.join(out, "config.echo"))
    return out


def cmd_field(args) -> int:
    cfg = _parse_kv(args.config)
    field = _field_from_cfg(cfg)
    prec = Fraction(args.precision) if args.precision else Fraction(1, 10 ** 12)
    roots = [(float(lo), float(hi)) for lo, hi in field.root_intervals(prec)]
    _emit({"cmd": "field", "degree": field.d, "disc": field.disc,
           "min_poly": list(field.min_poly),
           "roots": [0.5 * (a + b) for a, b in roots],
           "basis": [[str(c) for c in row] for row in field.basis]})
    return 0


def cmd_enumerate(args) -> int:
    cfg = _parse_kv(args.config)
    field = _field_from_cfg(cfg)
    w = _weights_from_cfg(cfg)
    eps = float(cfg.get("eps", "0.25"))
    hb = float(cfg.get("height_bound", "50"))
    qs = badset.enumerate_denominators(field, w, eps, hb)
    out = _outdir(args)
    path = os.path.join(out, "denominators.csv")
    consts = None
    if "beta" in cfg and "gamma" in cfg:
        consts = strategy.compute_constants(
            float(cfg["beta"]), float(cfg["gamma"]), field.d,
            float(cfg.get("b0_radius", "0.5")))
    badset.export_csv(path, field, w, qs, constants=consts)
    _emit({"cmd": "enumerate", "count": len(qs), "eps": eps,
           "height_bound": hb, "csv": path})
    return 0


def cmd_bad(args) -> int:
    cfg = _parse_kv(args.config)
    field = _field_from_cfg(cfg)
    w = _weights_from_cfg(cfg)
    x = [float(v) for v in cfg["x"].split(",")]
    eps = float(cfg.get("eps", "0.25"))
    hb = float(cfg.get("height_bound", "50"))
    verdict = badset.membership(field, w, x, eps, hb)
    rep = badset.badness_constant(field, w, x, hb)
    out = {"cmd": "bad", "x": x, "eps": eps, "height_bound": hb,
           "badness": rep.value,
           "witness": [list(rep.witness[0].coords), list(rep.witness[1].coords)]
           if rep.witness else None}
    if isinstance(verdict, badset.Excluded):
        out["verdict"] = "Excluded"
        out["p"], out["q"] = list(verdict.p.coords), list(verdict.q.coords)
    else:
        out["verdict"] = "Survives"
    _emit(out)
    return 0


def run_duel(field, w, cfg, out_dir, seed=None):
    """One potential-game run: Alice's strategy vs the configured Bob."""
    beta = float(cfg.get("beta", "0.5"))
    gamma = float(cfg.get("gamma", "1"))
    rounds = int(cfg.get("rounds", "200"))
    hb = float(cfg.get("height_bound", "500"))
    eps_cfg = float(cfg.get("eps", "0.25"))
    center = tuple(float(v) for v in cfg.get("b0_center", "0,0").split(","))
    radius = float(cfg.get("b0_radius", "0.5"))
    k_cut = int(cfg.get("k_cut", str(rounds + 5)))
    seed = int(cfg.get("seed", "0")) if seed is None else seed
    shrink = float(cfg.get("shrink", str(max(beta, 0.5))))

    b0 = games.Ball(center, radius)
    t = games.new_game("potential", beta, gamma, b0)
    alice = strategy.AliceStrategy(field, w, beta, gamma, k_cut=k_cut)
    kind = cfg.get("bob", "random")
    policy = bobs.BobPolicy(kind, seed=seed, shrink=shrink)
    if kind == "greedy_rational":
        pool_hb = float(cfg.get("target_height_bound", str(min(hb, 50.0))))
        policy.target_pool = bobs.build_target_pool(field, w, eps_cfg,
                                                    pool_hb, b0)
    script = bobs.scripted_bob(cfg["transcript"]) if kind == "scripted" else None

    for _ in range(rounds):
        fam = alice.respond(t.last_ball())
        games.alice_move(t, fam)
        if kind == "random":
            ball = bobs.random_bob(policy, t)
        elif kind == "greedy_rational":
            ball = bobs.greedy_rational_bob(policy, t)
        else:
            ball = script.next_ball(t)
        games.bob_move(t, ball)
    t.status = "finished"

    eps_run = alice.constants.eps if alice.constants else eps_cfg
    denoms = badset.enumerate_denominators(field, w, eps_run, hb) \
        if rounds > 0 else None

    def survivor(point):
        return isinstance(
            badset.membership(field, w, point, eps_run, hb,
                              denominators=denoms), badset.Survives)

    verdict = games.win_check_potential(t, survivor) if rounds > 0 \
        else games.Undetermined()
    if out_dir is not None:
        games.save_transcript(os.path.join(out_dir, "transcript.txt"), t)
        report.write_emission_csv(os.path.join(out_dir, "emissions.csv"),
                                  alice.emission_log)
        report.plot_game_radii(os.path.join(out_dir, "radii.png"), t)
    return t, alice, verdict


def cmd_play(args) -> int:
    cfg = _parse_kv(args.config)
    field = _field_from_cfg(cfg)
    w = _weights_from_cfg(cfg)
    out = _outdir(args)
    seed = args.seed if args.seed is not None else None
    t, alice, verdict = run_duel(field, w, cfg, out, seed=seed)
    point, rad = games.outcome(t)
    win = isinstance(verdict, games.AliceWins)
    _emit({"cmd": "play", "verdict": "AliceWins" if win else "Undetermined",
           "reason": verdict.reason if win else None,
           "rounds": len(t.balls()) - 1, "outcome": list(point),
           "radius_bound": rad,
           "emissions": len(alice.emission_log),
           "transcript": os.path.join(out, "transcript.txt")})
    return 0 if win else 3


def cmd_flow(args) -> int:
    cfg = _parse_kv(args.config)
    field = _field_from_cfg(cfg)
    w = _weights_from_cfg(cfg)
    x = [float(v) for v in cfg.get("x", ",".join(["0"] * field.d)).split(",")]
    grid = _t_grid(cfg.get("t_grid", "0:20:0.5"))
    samples = flows.trajectory(field, w, x, grid)
    out = _outdir(args)
    csv_path = os.path.join(out, "trajectory.csv")
    report.write_trajectory_csv(csv_path, samples)
    report.plot_trajectory(os.path.join(out, "trajectory.png"), samples)
    lam = [s.lambda1 for s in samples]
    _emit({"cmd": "flow", "x": x, "points": len(samples),
           "min_lambda1": min(lam) if lam else None,
           "max_lambda1": max(lam) if lam else None, "csv": csv_path})
    return 0


def cmd_replay(args) -> int:
    cfg = _parse_kv(args.config) if args.config else {}
    path = cfg.get("transcript", args.transcript)
    if path is None:
        raise ParseError("replay needs a transcript path")
    t = games.replay_transcript(path)
    point, rad = games.outcome(t)
    _emit({"cmd": "replay", "kind": t.kind, "beta": t.beta,
           "moves": len(t.moves) - 1, "outcome": list(point),
           "radius_bound": rad})
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="badkr",
        description="weighted badly approximable vectors over totally real "
                    "fields: games, exclusion boxes, flows")
    ap.add_argument("--config", help="key = value config file")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--precision", default=None,
                    help="rational precision for embeddings, e.g. 1/10**12")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name in ("field", "enumerate", "bad", "play", "flow"):
        sub.add_parser(name)
    rp = sub.add_parser("replay")
    rp.add_argument("transcript", nargs="?", default=None)
    args = ap.parse_args(argv)

    handlers = {"field": cmd_field, "enumerate": cmd_enumerate,
                "bad": cmd_bad, "play": cmd_play, "flow": cmd_flow,
                "replay": cmd_replay}
    try:
        return handlers[args.cmd](args)
    except UniquenessViolation as exc:
        _emit({"cmd": args.cmd, "error": "UniquenessViolation",
               "detail": str(exc), "ratio_a": exc.ratio_a,
               "ratio_b": exc.ratio_b})
        return 4
    except ConditionTooHigh as exc:
        _emit({"cmd": args.cmd, "error": "ConditionTooHigh", "detail": str(exc)})
        return 5
    except (BadkrError, OSError, KeyError, ValueError) as exc:
        _emit({"cmd": args.cmd, "error": type(exc).__name__, "detail": str(exc)})
        return 2


if __name__ == "__main__":
    sys.exit(main())
