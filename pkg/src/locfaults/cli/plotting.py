"""Scaling curves from bench rows, written as PNG files."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def scaling_figures(rows, out_dir) -> list:
    """One figure per program with at least two successful bounds; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_prog = defaultdict(list)
    for r in rows:
        if not r.error:
            by_prog[r.program].append(r)
    written = []
    for prog, rs in sorted(by_prog.items()):
        if len(rs) < 2:
            continue
        rs.sort(key=lambda r: r.b)
        fig, ax = plt.subplots(figsize=(6, 4))
        bs = [r.b for r in rs]
        ax.plot(bs, [r.P for r in rs], "k--", marker="s", label="P")
        for k in range(max(len(r.L) for r in rs)):
            pts = [(r.b, r.L[k]) for r in rs if len(r.L) > k]
            ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"L, {k} deviations")
        ax.set_xlabel("unfolding bound b")
        ax.set_ylabel("seconds")
        ax.set_title(prog)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{prog}.png"
        fig.savefig(path, dpi=100)
        plt.close(fig)
        written.append(path)
    return written
