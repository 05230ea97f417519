"""Matplotlib figures written next to the delimited report outputs."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .indicators import IndicatorTable  # noqa: E402
from .report import ALL, FieldAggregate, PercentileRow, common_journals  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "figure.dpi": 120,
}
# keeps PNG bytes stable between runs
_PNG_METADATA = {"Software": None}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata=_PNG_METADATA, bbox_inches="tight")
    plt.close(fig)
    return path


def snip_scatter(modified: IndicatorTable, original: IndicatorTable, path) -> Path:
    journals = [j for j in common_journals(modified, original) if modified.rows[j].snip is not None and original.rows[j].snip is not None]
    x = [original.rows[j].snip for j in journals]
    y = [modified.rows[j].snip for j in journals]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.0))
        ax.scatter(x, y, s=8, alpha=0.6, color="#33658A", linewidths=0)
        if x:
            hi = max(max(x), max(y)) * 1.05
            ax.plot([0, hi], [0, hi], color="0.6", lw=0.8, ls="--")
        ax.set_xlabel("Original SNIP")
        ax.set_ylabel("Modified SNIP")
        ax.set_title(f"SNIP per journal, {modified.citing_year} (n={len(journals)})")
        return _save(fig, path)


def field_bars(rows: Sequence[FieldAggregate], path) -> Path:
    rows = [r for r in rows if r.field_id != ALL]
    labels = [r.field_id for r in rows]
    m = [r.snip_modified or 0.0 for r in rows]
    o = [r.snip_original or 0.0 for r in rows]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(4.0, 0.45 * len(rows) + 2), 3.5))
        pos = range(len(rows))
        ax.bar([p - 0.2 for p in pos], m, width=0.4, label="Modified", color="#33658A")
        ax.bar([p + 0.2 for p in pos], o, width=0.4, label="Original", color="#F6AE2D")
        ax.axhline(1.0, color="0.5", lw=0.8)
        ax.set_xticks(list(pos))
        ax.set_xticklabels(labels, rotation=60, ha="right")
        ax.set_ylabel("Weighted average SNIP")
        ax.legend(frameon=False)
        return _save(fig, path)


def percentile_profile(rows: Sequence[PercentileRow], path) -> Path:
    ps = [10, 25, 50, 75, 90]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.5))
        for r in rows:
            ax.plot(ps, [r.p10, r.p25, r.p50, r.p75, r.p90], marker="o", ms=3, label=r.dataset_label)
        ax.set_yscale("symlog", linthresh=1.0)
        ax.set_xlabel("Percentile")
        ax.set_ylabel("Citations per journal")
        ax.legend(frameon=False)
        return _save(fig, path)
