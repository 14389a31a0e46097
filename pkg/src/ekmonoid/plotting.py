"""Optional figure rendering for distribution reports.

Figures are written to files next to the delimited output; nothing here
is needed for the numeric results and the rest of the library never
imports this module.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy.special import ndtr

from .stats import DistributionReport, ScoreSet


def render_cdf_figure(scores: ScoreSet, path: str) -> None:
    """Empirical CDF of the scores against the standard normal CDF."""
    s = np.sort(scores.scores)
    steps = np.arange(1, len(s) + 1) / len(s)
    grid = np.linspace(min(-4.0, float(s[0])), max(4.0, float(s[-1])), 400)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(s, steps, where="post", label="empirical", lw=1.0)
    ax.plot(grid, ndtr(grid), label="standard normal", lw=1.0, ls="--")
    ax.set_xlabel("standardized score")
    ax.set_ylabel("CDF")
    ax.set_title(f"{scores.stat_name} over {scores.subset}, x={scores.x}")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_moment_figure(report: DistributionReport, path: str) -> None:
    """Empirical raw moments of the scores next to the Gaussian moments."""
    rs = [row[0] for row in report.moment_table]
    emp = [row[1] for row in report.moment_table]
    ref = [row[2] for row in report.moment_table]
    w = 0.35
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([r - w / 2 for r in rs], emp, width=w, label="empirical")
    ax.bar([r + w / 2 for r in rs], ref, width=w, label="gaussian")
    ax.set_xlabel("moment order r")
    ax.set_ylabel("raw moment")
    ax.set_xticks(rs)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
