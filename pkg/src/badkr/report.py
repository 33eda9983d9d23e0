"""Delimited outputs and the figures rendered next to them."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _g(v) -> str:
    return "%.17g" % v


def write_trajectory_csv(path, samples) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        dim = len(samples[0].vector) if samples else 0
        wr.writerow(["t", "lambda1"] + [f"w{i + 1}" for i in range(dim)])
        for s in samples:
            wr.writerow([_g(s.t), _g(s.lambda1)] + [str(c) for c in s.vector])


def plot_trajectory(path, samples) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    if samples:
        ax.semilogy([s.t for s in samples], [s.lambda1 for s in samples],
                    marker=".", lw=1)
    ax.set_xlabel("t")
    ax.set_ylabel("lambda1")
    ax.set_title("systole along the flow")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_emission_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["round", "n", "k", "tau", "offset", "delta"])
        for r, n, k, tau, offset, delta in rows:
            wr.writerow([r, n, k, tau, _g(offset), _g(delta)])


def plot_game_radii(path, transcript) -> None:
    radii = [b.radius for b in transcript.balls()]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(range(len(radii)), radii, marker=".", lw=1)
    ax.set_xlabel("round")
    ax.set_ylabel("radius")
    ax.set_title(f"{transcript.kind} game, beta={transcript.beta}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
