"""Dashboard figure rendering for simulation runs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .sim import RunResult

UNFILTERED_COLOR = "gold"
BALANCED_COLOR = "darkorange"
BOUND_COLOR = "black"


def render_dashboard(result: RunResult, path: str | Path, title: str | None = None) -> Path:
    """Plot both feeds' liberal share against the active bounds.

    X is the iteration, Y the share in percent. Constraint changes add
    a second point at the same iteration, which draws the bound lines
    as vertical steps.
    """
    target = Path(path)
    xs = [row.t for row in result.rows]
    unfiltered = [row.pct_lib_unfiltered * 100 for row in result.rows]
    balanced = [row.pct_lib_balanced * 100 for row in result.rows]
    lower = [row.lower * 100 for row in result.rows]
    upper = [row.upper * 100 for row in result.rows]

    fig, ax = plt.subplots(figsize=(9, 5))
    ax.plot(xs, unfiltered, color=UNFILTERED_COLOR, linewidth=2.2,
            label="unfiltered feed")
    ax.plot(xs, balanced, color=BALANCED_COLOR, linewidth=2.2,
            label="balanced feed")
    ax.plot(xs, lower, color=BOUND_COLOR, linewidth=1.4, linestyle="-",
            label="lower bound")
    ax.plot(xs, upper, color=BOUND_COLOR, linewidth=1.4, linestyle="-",
            label="upper bound")
    ax.set_xlabel("iteration")
    ax.set_ylabel("liberal share of page (%)")
    ax.set_ylim(0, 100)
    ax.set_xlim(min(xs), max(xs) if max(xs) > 0 else 1)
    ax.grid(True, alpha=0.25)
    ax.legend(loc="best")
    ax.set_title(title or f"{result.scenario} (seed {result.seed})")
    fig.tight_layout()
    fig.savefig(target, dpi=144)
    plt.close(fig)
    return target
