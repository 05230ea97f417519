"""RIP, original SNIP and modified SNIP.

Tables are computed in three phases: per-journal metrics (independent,
optionally on a thread pool), one global reduction for the normalization
constant, and per-journal finalization of rcp and snip.

Undefined values are None. A journal with target documents but no counted
citations gets rip = snip = 0 with cp and rcp left undefined.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping

from . import stats
from .corpus import Corpus
from .universes import (
    PEER_REVIEWED_TYPES,
    Normalization,
    Universe,
    UniverseSpec,
    Variant,
    _count_active,
    build_universe,
    citing_instances,
    subject_field,
    target_documents,
)

TABLE_COLUMNS = ("journal_id", "year", "variant", "pubs", "citations", "rip", "cp", "rcp", "snip")


class UndefinedMetric(ArithmeticError):
    """The metric has no value for this journal (no targets or no citing set)."""


@dataclass(frozen=True)
class JournalMetrics:
    journal_id: str
    citing_year: int
    variant: str
    pub_count: int
    citation_count: int
    rip: float | None = None
    cp: float | None = None
    rcp: float | None = None
    snip: float | None = None

    def as_row(self) -> list:
        return [
            self.journal_id,
            self.citing_year,
            self.variant,
            self.pub_count,
            self.citation_count,
            self.rip,
            self.cp,
            self.rcp,
            self.snip,
        ]


@dataclass
class IndicatorTable:
    spec: UniverseSpec
    rows: dict[str, JournalMetrics]
    normalization_constant: float | None
    normalization: str
    note: str = ""
    universe_report: dict | None = field(default=None, compare=False)

    @property
    def variant(self) -> str:
        return self.spec.variant.value

    @property
    def citing_year(self) -> int:
        return self.spec.citing_year

    def weighted_mean(self, attr: str = "snip") -> float:
        pairs = [(getattr(r, attr), r.pub_count) for r in self.rows.values() if getattr(r, attr) is not None]
        if not pairs:
            raise UndefinedMetric(f"no journal has a defined {attr}")
        return stats.weighted_mean(stats.WeightedSample([v for v, _ in pairs], [w for _, w in pairs]))

    # -- serialization ------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in self.rows.values():
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in r.as_row()])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "normalization": self.normalization,
            "normalization_constant": self.normalization_constant,
            "note": self.note,
            "rows": [dict(zip(TABLE_COLUMNS, r.as_row())) for r in self.rows.values()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, obj: Mapping) -> IndicatorTable:
        spec = UniverseSpec(**obj["spec"])
        rows = {}
        for r in obj["rows"]:
            rows[r["journal_id"]] = JournalMetrics(
                r["journal_id"], int(r["year"]), r["variant"], int(r["pubs"]), int(r["citations"]),
                r["rip"], r["cp"], r["rcp"], r["snip"],
            )
        return cls(spec, dict(sorted(rows.items())), obj.get("normalization_constant"), obj.get("normalization", ""), obj.get("note", ""))

    @classmethod
    def from_json(cls, text: str) -> IndicatorTable:
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_csv(cls, text: str) -> IndicatorTable:
        """Rebuild a table from its CSV form. Only year and variant of the spec survive."""

        def num(s):
            return None if s == "" else float(s)

        rows = {}
        year = variant = None
        for rec in csv.DictReader(io.StringIO(text)):
            year, variant = int(rec["year"]), rec["variant"]
            rows[rec["journal_id"]] = JournalMetrics(
                rec["journal_id"], year, variant, int(rec["pubs"]), int(rec["citations"]),
                num(rec["rip"]), num(rec["cp"]), num(rec["rcp"]), num(rec["snip"]),
            )
        if year is None:
            raise ValueError("empty indicator table")
        spec = UniverseSpec(citing_year=year, variant=Variant(variant))
        return cls(spec, dict(sorted(rows.items())), None, "")


# ---------------------------------------------------------------------------
# Per-journal kernels
# ---------------------------------------------------------------------------


def _active_counts(corpus: Corpus, universe: Universe) -> dict[str, int]:
    """Active reference counts of every peer-reviewed citing-year document."""
    key = ("active", universe)
    cached = corpus._memo.get(key)
    if cached is None:
        spec = universe.spec
        years = spec.target_years
        cached = {}
        for j, per_year in corpus.pubs_by_journal_year.items():
            for d in per_year.get(spec.citing_year, ()):
                doc = corpus.documents[d]
                if doc.doc_type in PEER_REVIEWED_TYPES:
                    cached[d] = _count_active(doc, corpus, years, universe.target_excluded)
        corpus._memo[key] = cached
    return cached


def _resolve(corpus: Corpus, spec: UniverseSpec, universe: Universe | None) -> Universe:
    return build_universe(corpus, spec) if universe is None else universe


def compute_rip(corpus: Corpus, journal: str, spec: UniverseSpec, universe: Universe | None = None) -> float:
    """Citations in the citing year per target document."""
    universe = _resolve(corpus, spec, universe)
    targets = target_documents(corpus, journal, spec, universe)
    if not targets:
        raise UndefinedMetric(f"journal {journal!r} has no target documents")
    return len(citing_instances(corpus, journal, spec, universe)) / len(targets)


def citation_potential_original(
    corpus: Corpus, journal: str, spec: UniverseSpec, universe: Universe | None = None
) -> float:
    """Arithmetic mean active-reference count over the journal's subject field.

    Every subject-field document contributes its active references to the
    whole database, including documents that only cite older work of the journal.
    """
    universe = _resolve(corpus, spec, universe)
    sf = subject_field(corpus, journal, spec, universe)
    if not sf:
        raise UndefinedMetric(f"journal {journal!r} has an empty subject field")
    active = _active_counts(corpus, universe)
    return stats.mean([active[d] for d in sf])


def _journal_r(corpus: Corpus, journal: str, spec: UniverseSpec, universe: Universe) -> float | None:
    active = _active_counts(corpus, universe)
    counts = [active[d] for d in corpus.pubs_by_journal_year.get(journal, {}).get(spec.citing_year, ()) if active.get(d)]
    if not counts:
        return None
    return stats.mean(counts)


def journal_mean_active_refs(
    corpus: Corpus, journal: str, spec: UniverseSpec, universe: Universe | None = None
) -> float:
    """Mean active references over the journal's citing-year publications that have at least one."""
    universe = _resolve(corpus, spec, universe)
    r = _journal_r(corpus, journal, spec, universe)
    if r is None:
        raise UndefinedMetric(f"journal {journal!r} has no citing-year publication with an active reference")
    return r


def citing_journal_means(corpus: Corpus, spec: UniverseSpec, universe: Universe | None = None) -> dict[str, float]:
    """r_q for every citing-universe journal where it is defined."""
    universe = _resolve(corpus, spec, universe)
    out = {}
    for q in sorted(universe.citing_journals):
        r = _journal_r(corpus, q, spec, universe)
        if r is not None:
            out[q] = r
    return out


def _inverse_ref_sum(corpus, journal, spec, universe, r_q) -> tuple[int, float]:
    instances = citing_instances(corpus, journal, spec, universe)
    docs = corpus.documents
    terms = []
    for c in instances:
        q = docs[c].journal_id
        r = r_q[q] if r_q is not None and q in r_q else journal_mean_active_refs(corpus, q, spec, universe)
        terms.append(1.0 / r)
    return len(instances), math.fsum(terms)


def citation_potential_modified(
    corpus: Corpus,
    journal: str,
    spec: UniverseSpec,
    universe: Universe | None = None,
    r_q: Mapping[str, float] | None = None,
) -> float:
    """Harmonic mean of the citing journals' r_q over the journal's citation instances."""
    universe = _resolve(corpus, spec, universe)
    c, inv = _inverse_ref_sum(corpus, journal, spec, universe, r_q)
    if c == 0:
        raise UndefinedMetric(f"journal {journal!r} received no counted citations")
    return c / inv


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Frozen:
    """State held fixed across corpus perturbations in consistency experiments."""

    universe: Universe
    normalization_constant: float | None
    r_q: Mapping[str, float] = field(default_factory=dict)


def freeze(corpus: Corpus, spec: UniverseSpec, table: IndicatorTable | None = None) -> Frozen:
    universe = build_universe(corpus, spec)
    if table is None:
        table = compute_indicator_table(corpus, spec)
    r_q = citing_journal_means(corpus, spec, universe) if spec.modified else {}
    return Frozen(universe, table.normalization_constant, r_q)


def _phase1(corpus, spec, universe, r_q, journal) -> JournalMetrics | None:
    targets = target_documents(corpus, journal, spec, universe)
    if not targets:
        return None
    p = len(targets)
    if spec.modified:
        c, inv = _inverse_ref_sum(corpus, journal, spec, universe, r_q)
        cp = c / inv if c else None
    else:
        c = len(citing_instances(corpus, journal, spec, universe))
        sf = subject_field(corpus, journal, spec, universe)
        cp = None
        if sf:
            active = _active_counts(corpus, universe)
            cp = stats.mean([active[d] for d in sf])
            if cp <= 0:
                cp = None
    return JournalMetrics(journal, spec.citing_year, spec.variant.value, p, c, c / p, cp)


def _per_journal(corpus, spec, universe, r_q, threads) -> list[JournalMetrics]:
    journals = sorted(corpus.journals)
    # warm shared caches before fanning out
    _active_counts(corpus, universe)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: _phase1(corpus, spec, universe, r_q, j), journals))
    else:
        results = [_phase1(corpus, spec, universe, r_q, j) for j in journals]
    return [r for r in results if r is not None]


def _finalize(metrics: list[JournalMetrics], constant: float | None) -> dict[str, JournalMetrics]:
    rows = {}
    for m in metrics:
        rcp = snip = None
        if m.cp is not None and constant:
            rcp = m.cp / constant
            snip = m.rip / rcp
        elif m.citation_count == 0:
            snip = 0.0
        rows[m.journal_id] = replace(m, rcp=rcp, snip=snip)
    return rows


def snip_original(
    corpus: Corpus,
    spec: UniverseSpec,
    *,
    universe: Universe | None = None,
    normalization_constant: float | None = None,
    threads: int = 1,
) -> IndicatorTable:
    """Original SNIP: rcp = cp / median cp over journals with a defined cp."""
    if spec.modified:
        raise ValueError("snip_original needs variant=original")
    universe = _resolve(corpus, spec, universe)
    metrics = _per_journal(corpus, spec, universe, None, threads)
    note = ""
    constant = normalization_constant
    if constant is None:
        cps = [m.cp for m in metrics if m.cp is not None]
        if cps:
            constant = stats.median(cps)
        else:
            note = "no journal has a defined citation potential"
    rows = _finalize(metrics, constant)
    if note:
        rows = {}
    return IndicatorTable(spec, rows, constant, "median_cp", note, universe.report.to_dict())


def snip_modified(
    corpus: Corpus,
    spec: UniverseSpec,
    *,
    universe: Universe | None = None,
    normalization_constant: float | None = None,
    r_q: Mapping[str, float] | None = None,
    threads: int = 1,
) -> IndicatorTable:
    """Modified SNIP: cp is a harmonic mean of citing-journal r_q over citation instances.

    Normalization modes: ``window_length`` divides cp by the target-window
    length; ``weighted_mean_cp`` divides by the publication-weighted mean cp;
    ``exact_mean_one`` rescales so the publication-weighted mean snip is 1.
    """
    if not spec.modified:
        raise ValueError("snip_modified needs variant=modified")
    universe = _resolve(corpus, spec, universe)
    if r_q is None:
        r_q = citing_journal_means(corpus, spec, universe)
    metrics = _per_journal(corpus, spec, universe, r_q, threads)
    with_cp = [m for m in metrics if m.cp is not None]
    note = ""
    constant = normalization_constant
    if constant is None and not with_cp:
        note = "no journal has a defined citation potential"
    elif constant is None:
        mode = spec.normalization
        if mode is Normalization.WINDOW_LENGTH:
            constant = float(spec.target_window)
        elif mode is Normalization.WEIGHTED_MEAN_CP:
            constant = stats.weighted_mean(stats.WeightedSample([m.cp for m in with_cp], [m.pub_count for m in with_cp]))
        else:
            raw = [m.rip / m.cp if m.cp is not None else 0.0 for m in metrics]
            mean_raw = stats.weighted_mean(stats.WeightedSample(raw, [m.pub_count for m in metrics]))
            constant = 1.0 / mean_raw
    rows = {} if note else _finalize(metrics, constant)
    return IndicatorTable(spec, rows, constant, spec.normalization.value, note, universe.report.to_dict())


def compute_indicator_table(
    corpus: Corpus,
    spec: UniverseSpec,
    *,
    frozen: Frozen | None = None,
    threads: int = 1,
) -> IndicatorTable:
    """Dispatch on the variant. ``frozen`` pins universe, r_q and the normalization constant."""
    universe = frozen.universe if frozen else None
    constant = frozen.normalization_constant if frozen else None
    if spec.modified:
        r_q = frozen.r_q if frozen else None
        return snip_modified(corpus, spec, universe=universe, normalization_constant=constant, r_q=r_q, threads=threads)
    return snip_original(corpus, spec, universe=universe, normalization_constant=constant, threads=threads)
