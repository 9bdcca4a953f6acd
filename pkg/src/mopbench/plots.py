"""Figure rendering for the benchmark report path.

Front figures are written next to the delimited front dumps: one value-space
scatter per (problem, method), drawn from the same nondominated terminal
points that go into the CSV.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import RunRecord, front_rows

__all__ = ["render_front_figure"]


def render_front_figure(records: list[RunRecord], title: str, path) -> bool:
    """Scatter the nondominated terminal values in the f1-f2 plane.

    Returns False without writing when there is nothing to draw (no
    converged runs, or fewer than two objectives).
    """
    front = front_rows(records)
    if not front or len(front[0].final_values) < 2:
        return False
    values = np.array([r.final_values for r in front])
    fig, ax = plt.subplots(figsize=(4.0, 3.2))
    ax.scatter(values[:, 0], values[:, 1], s=12, alpha=0.8, edgecolors="none")
    ax.set_xlabel("$f_1$")
    ax.set_ylabel("$f_2$")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True
