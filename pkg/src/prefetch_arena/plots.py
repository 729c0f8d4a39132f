"""Render sweep summaries as min/avg/max efficiency figures (PNG)."""

from __future__ import annotations

import os
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

PARAM_LABELS = {
    "w": "look-ahead window w",
    "k": "PPM order k",
    "support": "minimum support",
    "confidence": "minimum confidence",
    "cache_size": "cache size (objects)",
    "delta": "learning rate",
    "p": "prefetch length p",
}

STATS = (("min_eff", "minimum"), ("avg_eff", "average"), ("max_eff", "maximum"))


def _setup_axes(ax, param: str, title: str) -> None:
    ax.set_xlabel(PARAM_LABELS.get(param, param))
    ax.set_ylabel("efficiency (hit / waste)")
    ax.set_title(title, fontsize=11)
    ax.grid(True, alpha=0.3)


def render_summary_figures(summary: Iterable[dict[str, str]], out_dir: str | os.PathLike) -> list[str]:
    """One figure per varied parameter, with min/avg/max panels and a line
    per configuration. Returns the written file paths."""
    rows = list(summary)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    params = list(dict.fromkeys(r["varied_param"] for r in rows))
    for param in params:
        subset = [r for r in rows if r["varied_param"] == param]
        configs = list(dict.fromkeys(r["config_name"] for r in subset))
        fig, axes = plt.subplots(1, 3, figsize=(13, 3.8), sharey=True)
        for ax, (column, label) in zip(axes, STATS):
            for name in configs:
                pts = [(float(r["value"]), float(r[column])) for r in subset if r["config_name"] == name and r[column]]
                if not pts:
                    continue
                xs, ys = zip(*sorted(pts))
                ax.plot(xs, ys, marker="o", label=name)
            _setup_axes(ax, param, f"{label} efficiency")
        axes[0].legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, f"efficiency_by_{param}.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written
