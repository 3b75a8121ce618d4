"""Diagnostic figures rendered next to the exported tables.

Everything here is presentation only; no figure feeds back into the solve."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .lattice import c1_degree
from .solver import STATUS_SEEDED, STATUS_SOLVED


def render_ladders(table, path, degree_bound=None):
    """Per-degree ladders of |N| against the conjugate-pair count.

    Log scale on the value axis; exact zeros are drawn on the floor line."""
    ladders = {}
    for key, value, status in table.rows(degree_bound):
        if status not in (STATUS_SEEDED, STATUS_SOLVED):
            continue
        ladders.setdefault(c1_degree(table.model, key.B), []).append(
            (key.l, abs(int(value)))
        )
    fig, ax = plt.subplots(figsize=(7, 5))
    floor = 0.5
    for degree in sorted(ladders):
        pts = sorted(ladders[degree])
        xs = [l for l, _ in pts]
        ys = [v if v else floor for _, v in pts]
        ax.plot(xs, ys, marker="o", label="degree %d" % degree)
    ax.set_yscale("log")
    ax.set_xlabel("conjugate point pairs l")
    ax.set_ylabel("|N| (zeros drawn at the dashed floor)")
    ax.axhline(floor, linestyle="--", linewidth=0.8, color="gray")
    ax.set_title("real invariant ladders")
    if ladders:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_stage_profile(report, path):
    """Equations, unknowns, and pinned counts per elimination stage."""
    stages = report.stages
    xs = [s.degree for s in stages]
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(xs, [s.equations for s in stages], marker="o", label="equations")
    ax.plot(xs, [len(s.unknowns) for s in stages], marker="s", label="unknowns")
    ax.plot(xs, [len(s.pinned) for s in stages], marker="^", label="pinned")
    ax.plot(xs, [s.carried for s in stages], marker="x", label="carried forward")
    ax.set_xlabel("stage (degree against the anticanonical class)")
    ax.set_ylabel("count")
    ax.set_title("elimination stage profile")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
