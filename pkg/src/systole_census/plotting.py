"""Figure rendering for census reports.

Renders the exponent trends of a census run to PNG files next to the
delimited output.  Rows carrying a partial-failure marker are skipped.
"""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .crossing_census import ExponentRow

__all__ = ["render_census_figures"]

# Default acceptance bands for the exponent trends; plotted as guides.
CROSSING_BAND = (4.3, 5.7)
SYSTOLE_BAND = (3.6, 4.4)


def render_census_figures(
    rows: Sequence[ExponentRow], outdir: str, *, dpi: int = 150
) -> list[str]:
    """Write exponent-trend and raw-count figures; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    ok_rows = [r for r in rows if r.error is None and r.crossing_bound]
    paths = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ns = [r.N for r in ok_rows]
    ax.plot(ns, [r.log_crossing_ratio for r in ok_rows], "o-", label="log cr-bound / log N")
    ax.plot(ns, [r.log_systole_ratio for r in ok_rows], "s-", label="log systoles / log N")
    ax.plot(ns, [r.log_index_ratio for r in ok_rows], "^-", label="log index / log N")
    for y in CROSSING_BAND:
        ax.axhline(y, color="C0", ls=":", lw=0.8)
    for y in SYSTOLE_BAND:
        ax.axhline(y, color="C1", ls=":", lw=0.8)
    ax.axhline(3.0, color="C2", ls=":", lw=0.8)
    ax.set_xlabel("N")
    ax.set_ylabel("growth exponent")
    ax.set_title("Exponent trends with reference bands")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = os.path.join(outdir, "exponent_trends.png")
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.loglog(ns, [r.crossing_bound for r in ok_rows], "o-", label="crossing bound")
    ax.loglog(ns, [r.systole_count for r in ok_rows], "s-", label="systole count")
    ax.loglog(ns, [r.index for r in ok_rows], "^-", label="index")
    ax.set_xlabel("N")
    ax.set_ylabel("count")
    ax.set_title("Raw census counts")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = os.path.join(outdir, "census_counts.png")
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    paths.append(path)

    return paths
