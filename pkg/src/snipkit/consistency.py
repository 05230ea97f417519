"""Consistency-criterion experiments: one added citation, and a journal merge.

Each experiment holds the citing universe, citing-journal r_q values and
the normalization constant fixed at their pre-perturbation values.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .corpus import Corpus
from .indicators import compute_indicator_table, freeze
from .synth import add_citation, build_add_citation_fixture, build_merge_fixture, merge_journals
from .universes import UniverseSpec, Variant, citing_instances

TOL = 1e-9


@dataclass
class ExperimentResult:
    criterion: str
    variant: str
    status: str  # pass | fail | not-applicable
    values: dict = field(default_factory=dict)
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        extra = ", ".join(f"{k}={_short(v)}" for k, v in self.values.items())
        return f"{self.criterion} [{self.variant}] {self.status.upper()}" + (f" ({extra})" if extra else "")


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else v


def merge_experiment(corpus: Corpus, j1: str, j2: str, spec: UniverseSpec) -> ExperimentResult:
    """Merged journal's snip must lie between the constituents' snips."""
    table = compute_indicator_table(corpus, spec)
    r1, r2 = table.rows.get(j1), table.rows.get(j2)
    if r1 is None or r2 is None or r1.snip is None or r2.snip is None or r1.cp is None or r2.cp is None:
        return ExperimentResult("merge", spec.variant.value, "not-applicable", detail="constituent snip undefined")
    merged = compute_indicator_table(merge_journals(corpus, j1, j2), spec, frozen=freeze(corpus, spec, table))
    m = merged.rows[j1]
    lo, hi = min(r1.snip, r2.snip), max(r1.snip, r2.snip)
    ok = m.snip is not None and lo - TOL <= m.snip <= hi + TOL
    values = {"snip_1": r1.snip, "snip_2": r2.snip, "snip_merged": m.snip}
    if r1.snip == r2.snip and m.snip is not None and r1.snip:
        values["merged_over_constituent"] = m.snip / r1.snip
    if m.cp:
        values.update(ratio_1=r1.rip / r1.cp, ratio_2=r2.rip / r2.cp, ratio_merged=m.rip / m.cp)
    return ExperimentResult("merge", spec.variant.value, "pass" if ok else "fail", values)


def add_citation_experiment(
    corpus: Corpus, citing_journal: str, target: str, active_refs: int, spec: UniverseSpec
) -> ExperimentResult:
    """One more citation must raise the target journal's snip."""
    journal = corpus.documents[target].journal_id
    table = compute_indicator_table(corpus, spec)
    before = table.rows.get(journal)
    if before is None or before.snip is None:
        return ExperimentResult("add-citation", spec.variant.value, "not-applicable", detail="target journal has no snip")
    perturbed = add_citation(corpus, citing_journal, active_refs, target, spec.citing_year, spec.target_window)
    after = compute_indicator_table(perturbed, spec, frozen=freeze(corpus, spec, table)).rows[journal]
    delta = after.snip - before.snip
    values = {"snip_before": before.snip, "snip_after": after.snip, "delta": delta, "active_refs": active_refs}
    return ExperimentResult("add-citation", spec.variant.value, "pass" if delta > TOL else "fail", values)


def _pick_add_citation(corpus: Corpus, spec: UniverseSpec):
    table = compute_indicator_table(corpus, spec)
    for j, row in table.rows.items():
        if row.citation_count == 0 or row.cp is None:
            continue
        instances = citing_instances(corpus, j, spec)
        citing_journal = corpus.documents[instances[0]].journal_id
        for y in spec.target_years:
            for d in corpus.pubs_by_journal_year[j].get(y, ()):
                if corpus.citation_count(d, spec.citing_year):
                    return citing_journal, d, max(10, math.ceil(10 * row.cp))
    return None


def run_consistency(corpus: Corpus | None = None, citing_year: int | None = None) -> list[ExperimentResult]:
    """Run both experiments for both variants.

    Without a corpus the built-in fixtures are used. With one, the first
    eligible journals (by id) are chosen and inapplicable experiments are
    reported as such.
    """
    results = []
    if corpus is None:
        year = citing_year or 2010
        merge_corpus, expected = build_merge_fixture(year)
        add_corpus, params = build_add_citation_fixture(year)
        for v in Variant:
            spec = UniverseSpec(year, v)
            results.append(add_citation_experiment(add_corpus, params["citing_journal"], params["target"], params["active_refs"], spec))
            results.append(merge_experiment(merge_corpus, *expected["journals"], spec))
        return results

    year = citing_year or (corpus.year_range[1] if corpus.year_range else None)
    for v in Variant:
        if year is None:
            results.append(ExperimentResult("add-citation", v.value, "not-applicable", detail="empty corpus"))
            results.append(ExperimentResult("merge", v.value, "not-applicable", detail="empty corpus"))
            continue
        spec = UniverseSpec(year, v)
        pick = _pick_add_citation(corpus, spec)
        if pick is None:
            results.append(ExperimentResult("add-citation", v.value, "not-applicable", detail="no cited journal"))
        else:
            results.append(add_citation_experiment(corpus, pick[0], pick[1], pick[2], spec))
        table = compute_indicator_table(corpus, spec)
        eligible = [j for j, r in table.rows.items() if r.citation_count > 0 and r.cp is not None]
        if len(eligible) < 2:
            results.append(ExperimentResult("merge", v.value, "not-applicable", detail="fewer than two cited journals"))
        else:
            results.append(merge_experiment(corpus, eligible[0], eligible[1], spec))
    return results
