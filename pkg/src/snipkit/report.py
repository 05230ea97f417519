"""Comparison tables between a modified (M) and an original (O) indicator table,
and the six-section Indicator Comparison Report.

All comparisons run over the journals present in both tables.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from . import stats
from .indicators import IndicatorTable, JournalMetrics
from .universes import UniverseReport

ALL = "ALL"


class ReportError(ValueError):
    pass


def _diff(m: float | None, o: float | None) -> float | None:
    if m is None or o is None or o == 0:
        return None
    return stats.diff_pct(m, o)


def _fmt(v, digits=2) -> str:
    return "n.a." if v is None else f"{v:.{digits}f}"


def write_csv(rows: Sequence[Mapping]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else (repr(v) if isinstance(v, float) else v)) for k, v in r.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Weighted averages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldAggregate:
    field_id: str
    n_journals: int
    rip_modified: float | None
    rip_original: float | None
    rip_diff: float | None
    snip_modified: float | None
    snip_original: float | None
    snip_diff: float | None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class OverallAggregate:
    n_journals: int
    articles_modified: int
    articles_original: int
    articles_diff: float | None
    citations_modified: int
    citations_original: int
    citations_diff: float | None
    row: FieldAggregate

    def to_rows(self) -> list[dict]:
        r = self.row
        return [
            {"indicator": "total_articles", "modified": self.articles_modified, "original": self.articles_original, "diff_pct": self.articles_diff},
            {"indicator": "total_citations", "modified": self.citations_modified, "original": self.citations_original, "diff_pct": self.citations_diff},
            {"indicator": "weighted_rip", "modified": r.rip_modified, "original": r.rip_original, "diff_pct": r.rip_diff},
            {"indicator": "weighted_snip", "modified": r.snip_modified, "original": r.snip_original, "diff_pct": r.snip_diff},
        ]


def common_journals(a: IndicatorTable, b: IndicatorTable) -> list[str]:
    return sorted(set(a.rows) & set(b.rows))


def _weighted(rows: Iterable[JournalMetrics], attr: str) -> float | None:
    pairs = [(getattr(r, attr), r.pub_count) for r in rows if getattr(r, attr) is not None and r.pub_count > 0]
    if not pairs:
        return None
    return stats.weighted_mean(stats.WeightedSample([v for v, _ in pairs], [w for _, w in pairs]))


def _aggregate(label: str, a: IndicatorTable, b: IndicatorTable, journals: Sequence[str]) -> FieldAggregate:
    ma = [a.rows[j] for j in journals]
    ob = [b.rows[j] for j in journals]
    rm, ro = _weighted(ma, "rip"), _weighted(ob, "rip")
    sm, so = _weighted(ma, "snip"), _weighted(ob, "snip")
    return FieldAggregate(label, len(journals), rm, ro, _diff(rm, ro), sm, so, _diff(sm, so))


def overall_aggregate(a: IndicatorTable, b: IndicatorTable) -> OverallAggregate:
    """Totals and publication-weighted means over the journals in both tables.

    ``a`` is the modified table and ``b`` the original one.
    """
    if a.citing_year != b.citing_year:
        raise ReportError(f"citing years differ: {a.citing_year} vs {b.citing_year}")
    journals = common_journals(a, b)
    if not journals:
        raise ReportError("the two tables share no journals")
    art_m = sum(a.rows[j].pub_count for j in journals)
    art_o = sum(b.rows[j].pub_count for j in journals)
    cit_m = sum(a.rows[j].citation_count for j in journals)
    cit_o = sum(b.rows[j].citation_count for j in journals)
    return OverallAggregate(
        len(journals), art_m, art_o, _diff(art_m, art_o), cit_m, cit_o, _diff(cit_m, cit_o), _aggregate(ALL, a, b, journals)
    )


def field_aggregate_table(
    a: IndicatorTable, b: IndicatorTable, fields: Mapping[str, Iterable[str]]
) -> list[FieldAggregate]:
    """ALL row followed by one row per field. A journal counts once in ALL and once per field it belongs to."""
    journals = common_journals(a, b)
    if not journals:
        raise ReportError("the two tables share no journals")
    members: dict[str, list[str]] = {}
    for j in journals:
        for f in sorted(set(fields.get(j, ()))):
            members.setdefault(f, []).append(j)
    out = [_aggregate(ALL, a, b, journals)]
    for f in sorted(members):
        out.append(_aggregate(f, a, b, members[f]))
    return out


@dataclass(frozen=True)
class NormalizedFieldRow:
    field_id: str
    snip_modified: float
    snip_modified_normalized: float
    snip_original_normalized: float


@dataclass(frozen=True)
class DispersionSummary:
    median: float
    stdev: float


@dataclass(frozen=True)
class NormalizedFieldSnip:
    rows: list[NormalizedFieldRow]
    modified: DispersionSummary
    modified_normalized: DispersionSummary
    original_normalized: DispersionSummary

    def to_rows(self) -> list[dict]:
        return [asdict(r) for r in self.rows]

    def summary(self) -> dict:
        return {
            "modified": asdict(self.modified),
            "modified_normalized": asdict(self.modified_normalized),
            "original_normalized": asdict(self.original_normalized),
        }


def normalized_field_snip(aggregates: Sequence[FieldAggregate]) -> NormalizedFieldSnip:
    """Divide each field's weighted SNIP by the all-fields value.

    The dispersion summary uses the median and the population standard
    deviation across fields.
    """
    all_rows = [r for r in aggregates if r.field_id == ALL]
    if not all_rows:
        raise ReportError("ALL row missing")
    top = all_rows[0]
    if not top.snip_modified or not top.snip_original:
        raise ReportError("ALL row has a zero or undefined weighted SNIP")
    rows = []
    for r in aggregates:
        if r.field_id == ALL or r.snip_modified is None or r.snip_original is None:
            continue
        rows.append(
            NormalizedFieldRow(r.field_id, r.snip_modified, r.snip_modified / top.snip_modified, r.snip_original / top.snip_original)
        )
    if not rows:
        raise ReportError("no field rows")

    def summarize(values):
        return DispersionSummary(stats.median(values), stats.pstdev(values))

    return NormalizedFieldSnip(
        rows,
        summarize([r.snip_modified for r in rows]),
        summarize([r.snip_modified_normalized for r in rows]),
        summarize([r.snip_original_normalized for r in rows]),
    )


# ---------------------------------------------------------------------------
# Citation distribution
# ---------------------------------------------------------------------------

PERCENTILES = (0.10, 0.25, 0.50, 0.75, 0.90)


@dataclass(frozen=True)
class PercentileRow:
    dataset_label: str
    n_journals: int
    p10: float
    p25: float
    p50: float
    p75: float
    p90: float

    def to_dict(self) -> dict:
        return asdict(self)


def citation_distribution(table: IndicatorTable, label: str | None = None, method: str = "linear") -> PercentileRow:
    """Percentiles of total citations per journal within the indicator's time window."""
    if not table.rows:
        raise ReportError("empty indicator table")
    counts = [r.citation_count for r in table.rows.values()]
    if label is None:
        label = f"{table.variant} {table.citing_year}"
    return PercentileRow(label, len(counts), *(stats.percentile(counts, p, method) for p in PERCENTILES))


# ---------------------------------------------------------------------------
# Correlations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubsetFilter:
    label: str
    description: str
    keep: Callable[[JournalMetrics, JournalMetrics], bool]


def builtin_filters(min_pubs: int = 100, max_citation_diff: float = 10.0) -> list[SubsetFilter]:
    """The four journal sets: all, large journals, stable citation counts, and both.

    Publication counts come from the original table.
    """

    def large(m, o):
        return o.pub_count > min_pubs

    def stable(m, o):
        d = _diff(m.citation_count, o.citation_count)
        return d is not None and abs(d) < max_citation_diff

    return [
        SubsetFilter("all", "All journals in both tables", lambda m, o: True),
        SubsetFilter(f"pubs>{min_pubs}", f"Journals with more than {min_pubs} publications", large),
        SubsetFilter(
            f"citdiff<{max_citation_diff:g}%",
            f"Absolute difference between modified and original citations below {max_citation_diff:g}%",
            stable,
        ),
        SubsetFilter(
            f"pubs>{min_pubs}&citdiff<{max_citation_diff:g}%",
            f"More than {min_pubs} publications and citation difference below {max_citation_diff:g}%",
            lambda m, o: large(m, o) and stable(m, o),
        ),
    ]


@dataclass(frozen=True)
class CorrelationResult:
    subset_label: str
    n_journals: int
    pearson: float | None
    spearman: float | None
    filter_description: str
    flag: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def correlation_table(
    a: IndicatorTable, b: IndicatorTable, filters: Sequence[SubsetFilter] | None = None
) -> list[CorrelationResult]:
    """Pearson and Spearman between the two tables' snip values on each journal subset.

    Subsets with fewer than two journals or constant values are flagged, not fatal.
    """
    if filters is None:
        filters = builtin_filters()
    journals = [j for j in common_journals(a, b) if a.rows[j].snip is not None and b.rows[j].snip is not None]
    out = []
    for f in filters:
        sel = [j for j in journals if f.keep(a.rows[j], b.rows[j])]
        x = [b.rows[j].snip for j in sel]
        y = [a.rows[j].snip for j in sel]
        if len(sel) < 2:
            out.append(CorrelationResult(f.label, len(sel), None, None, f.description, "subset too small"))
            continue
        try:
            out.append(CorrelationResult(f.label, len(sel), stats.pearson(x, y), stats.spearman(x, y), f.description))
        except stats.StatsError as exc:
            out.append(CorrelationResult(f.label, len(sel), None, None, f.description, str(exc)))
    return out


# ---------------------------------------------------------------------------
# Markdown tables
# ---------------------------------------------------------------------------


def overall_markdown(o: OverallAggregate) -> str:
    lines = [
        f"| Indicator (n={o.n_journals}) | Modified | Original | Difference (%) |",
        "|---|---:|---:|---:|",
        f"| Total number of articles | {o.articles_modified:,} | {o.articles_original:,} | {_fmt(o.articles_diff, 1)} |",
        f"| Total number of citations | {o.citations_modified:,} | {o.citations_original:,} | {_fmt(o.citations_diff, 1)} |",
        f"| Weighted average RIP | {_fmt(o.row.rip_modified)} | {_fmt(o.row.rip_original)} | {_fmt(o.row.rip_diff, 1)} |",
        f"| Weighted average SNIP | {_fmt(o.row.snip_modified)} | {_fmt(o.row.snip_original)} | {_fmt(o.row.snip_diff, 1)} |",
    ]
    return "\n".join(lines) + "\n"


def fields_markdown(rows: Sequence[FieldAggregate]) -> str:
    lines = [
        "| Field | Journals | RIP M | RIP O | DIFF (%) | SNIP M | SNIP O | DIFF (%) |",
        "|---|---:|---:|---:|---:|---:|---:|---:|",
    ]
    for r in rows:
        lines.append(
            f"| {r.field_id} | {r.n_journals:,} | {_fmt(r.rip_modified)} | {_fmt(r.rip_original)} | {_fmt(r.rip_diff, 1)} "
            f"| {_fmt(r.snip_modified)} | {_fmt(r.snip_original)} | {_fmt(r.snip_diff, 1)} |"
        )
    return "\n".join(lines) + "\n"


def percentiles_markdown(rows: Sequence[PercentileRow]) -> str:
    lines = ["| Dataset | Journals | P10 | P25 | P50 | P75 | P90 |", "|---|---:|---:|---:|---:|---:|---:|"]
    for r in rows:
        lines.append(
            f"| {r.dataset_label} | {r.n_journals:,} | {r.p10:,.0f} | {r.p25:,.0f} | {r.p50:,.0f} | {r.p75:,.0f} | {r.p90:,.0f} |"
        )
    return "\n".join(lines) + "\n"


def correlations_markdown(rows: Sequence[CorrelationResult]) -> str:
    lines = ["| Journal set | Journals | Pearson R | Spearman Rho |", "|---|---:|---:|---:|"]
    for r in rows:
        lines.append(f"| {r.filter_description} | {r.n_journals:,} | {_fmt(r.pearson)} | {_fmt(r.spearman)} |")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Indicator Comparison Report
# ---------------------------------------------------------------------------

SECTIONS = (
    ("base_objective", "Base objective", "What is its primary aim?"),
    ("concept_validity", "Concept validity", "What does it measure? What are the main theoretical biases?"),
    ("application_context", "Application context", "How should it be used?"),
    ("statistical_validity", "Statistical validity", "Key statistical assumptions. What are the main statistical biases?"),
    ("universes", "Target and citing universes", "Which sources are included in the database universe?"),
    ("correlation", "Degree of correlation", "Statistical correlation coefficients"),
)
METADATA_KEYS = tuple(k for k, _, _ in SECTIONS[:4])


def _check_metadata(metadata: Mapping) -> dict[str, dict]:
    indicators = metadata.get("indicators") if isinstance(metadata, Mapping) else None
    if not isinstance(indicators, Mapping) or not indicators:
        raise ReportError("metadata needs a non-empty 'indicators' mapping")
    out = {}
    for name, entry in indicators.items():
        if not isinstance(entry, Mapping):
            raise ReportError(f"metadata for {name!r} is not a mapping")
        missing = [k for k in METADATA_KEYS if not entry.get(k)]
        if missing:
            raise ReportError(f"metadata for {name!r} lacks section(s): {', '.join(missing)}")
        out[str(name)] = {"label": str(entry.get("label", name)), **{k: str(entry[k]).strip() for k in METADATA_KEYS}}
    return out


@dataclass
class ICRDocument:
    title: str
    indicators: dict[str, dict]
    universes: list[dict]
    correlations: list[dict]
    sections: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if not self.sections:
            self.sections = [{"number": i + 1, "key": k, "title": t, "question": q} for i, (k, t, q) in enumerate(SECTIONS)]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "indicators": self.indicators,
            "sections": self.sections,
            "universes": self.universes,
            "correlations": self.correlations,
        }

    def to_json(self) -> str:
        # key order is fixed by construction; sorting would reorder the indicators
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ICRDocument:
        obj = json.loads(text)
        return cls(obj["title"], obj["indicators"], obj["universes"], obj["correlations"], obj["sections"])

    def to_markdown(self) -> str:
        out = [f"**{self.title}**", ""]
        for s in self.sections:
            out.append(f"## {s['number']}. {s['title']}")
            out.append("")
            out.append(f"_{s['question']}_")
            out.append("")
            key = s["key"]
            if key in METADATA_KEYS:
                for entry in self.indicators.values():
                    out.append(f"- **{entry['label']}**: {entry[key]}")
                out.append("")
            elif key == "universes":
                for u in self.universes:
                    out.append(UniverseReport(
                        u["variant"], u["citing_year"], u["n_journals_publishing"],
                        {k: v["journals"] for k, v in u["exclusions"].items()}, u["deleted_targets"], u["retained"],
                    ).to_markdown())
            else:
                rows = [CorrelationResult(**c) for c in self.correlations]
                out.append(correlations_markdown(rows) if rows else "No correlations computed.\n")
        return "\n".join(out).rstrip("\n") + "\n"


def build_icr(
    metadata: Mapping,
    universes: Sequence[UniverseReport | Mapping],
    correlations: Sequence[CorrelationResult],
) -> ICRDocument:
    indicators = _check_metadata(metadata)
    title = metadata.get("title") or "Indicator Comparison Report: " + " versus ".join(e["label"] for e in indicators.values())
    return ICRDocument(
        str(title),
        indicators,
        [u.to_dict() if isinstance(u, UniverseReport) else dict(u) for u in universes],
        [c.to_dict() for c in correlations],
    )


def render_icr(
    metadata: Mapping,
    universes: Sequence[UniverseReport | Mapping],
    correlations: Sequence[CorrelationResult],
    format: str = "markdown",
) -> str:
    doc = build_icr(metadata, universes, correlations)
    if format == "markdown":
        return doc.to_markdown()
    if format == "json":
        return doc.to_json()
    raise ReportError(f"unknown format {format!r}")


def read_field_map(path) -> dict[str, set[str]]:
    """CSV with columns journal_id,field_id; one row per membership."""
    out: dict[str, set[str]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["journal_id"], set()).add(row["field_id"])
    return out
