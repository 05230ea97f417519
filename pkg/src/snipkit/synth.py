"""Seeded synthetic corpora and scenario builders for consistency experiments.

Each journal draws from its own random stream, derived from the config
seed and a CRC32 of the journal id, so adding or reordering journals never
changes the references generated for the others.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from .corpus import Corpus, CorpusError, DocType, DocumentRecord, JournalKind, JournalRecord, Reference
from .universes import PEER_REVIEWED_TYPES


class SynthConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    field_id: str
    n_journals: int = 10
    pubs_per_journal_per_year: int = 20
    mean_refs_per_doc: float = 20.0
    # weights for cited ages 1, 2, ... years; normalized on use
    age_weights: tuple[float, ...] = (1.0,) * 8
    within_field_citation_share: float = 1.0
    resolved_share: float = 1.0
    ref_distribution: str = "poisson"

    def __post_init__(self):
        object.__setattr__(self, "age_weights", tuple(float(w) for w in self.age_weights))
        if self.n_journals < 0 or self.pubs_per_journal_per_year < 0:
            raise SynthConfigError(f"{self.field_id}: counts must be non-negative")
        if self.mean_refs_per_doc < 0:
            raise SynthConfigError(f"{self.field_id}: mean_refs_per_doc must be >= 0")
        for name in ("within_field_citation_share", "resolved_share"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise SynthConfigError(f"{self.field_id}: {name} outside [0, 1]")
        if not self.age_weights or any(w < 0 for w in self.age_weights) or sum(self.age_weights) <= 0:
            raise SynthConfigError(f"{self.field_id}: age_weights must be non-negative with a positive sum")
        if self.ref_distribution not in ("poisson", "fixed"):
            raise SynthConfigError(f"{self.field_id}: unknown ref_distribution {self.ref_distribution!r}")

    def journal_ids(self) -> list[str]:
        return [f"{self.field_id}-J{i:03d}" for i in range(self.n_journals)]

    def expected_active_refs(self, target_window: int = 3) -> float:
        """Mean active references per document once every cited year is inside the corpus."""
        w = np.asarray(self.age_weights)
        recent = w[:target_window].sum() / w.sum()
        return self.mean_refs_per_doc * recent * self.resolved_share


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    years: tuple[int, int]
    fields: tuple[FieldSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "fields", tuple(f if isinstance(f, FieldSpec) else FieldSpec(**f) for f in self.fields))
        if len(self.years) != 2 or self.years[0] > self.years[1]:
            raise SynthConfigError(f"invalid year range {self.years}")
        ids = [f.field_id for f in self.fields]
        if len(set(ids)) != len(ids):
            raise SynthConfigError("duplicate field_id")

    def require_windows(self, citing_year: int, field_window: int = 8) -> None:
        if not self.years[0] <= citing_year - field_window or citing_year > self.years[1]:
            raise SynthConfigError(
                f"years {self.years} do not cover citing year {citing_year} with a {field_window}-year window"
            )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["years"] = list(self.years)
        for f in d["fields"]:
            f["age_weights"] = list(f["age_weights"])
        return d

    @classmethod
    def from_dict(cls, obj: dict) -> SynthConfig:
        try:
            return cls(
                seed=int(obj["seed"]),
                years=tuple(obj["years"]),
                fields=tuple(FieldSpec(**f) for f in obj.get("fields", ())),
            )
        except (KeyError, TypeError) as exc:
            raise SynthConfigError(f"invalid synth config: {exc}") from exc

    @classmethod
    def load(cls, path) -> SynthConfig:
        text = Path(path).read_text(encoding="utf-8")
        obj = yaml.safe_load(text)
        if not isinstance(obj, dict):
            raise SynthConfigError(f"{path}: expected a mapping")
        return cls.from_dict(obj)

    def dump(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _journal_rng(seed: int, journal_id: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed & (2**64 - 1), spawn_key=(zlib.crc32(journal_id.encode("utf-8")),))
    return np.random.Generator(np.random.PCG64(ss))


def doc_id_for(journal_id: str, year: int, index: int) -> str:
    return f"{journal_id}-{year}-{index:04d}"


def generate_corpus(config: SynthConfig, citing_year: int | None = None, field_window: int = 8) -> Corpus:
    """Deterministic corpus where every journal publishes a fixed number of articles per year.

    Reference counts are Poisson around the field mean (or fixed at its
    rounded value), cited ages follow the field's age weights, and a cited
    year before the corpus start yields an unresolved reference.
    """
    if citing_year is not None:
        config.require_windows(citing_year, field_window)
    start, end = config.years
    fields = [f for f in config.fields if f.n_journals > 0]
    journals = []
    for f in config.fields:
        for jid in f.journal_ids():
            journals.append(JournalRecord(jid, title=f"{f.field_id} journal {jid}", field_ids=frozenset({f.field_id})))

    documents = []
    for fi, f in enumerate(fields):
        others = [g for g in range(len(fields)) if g != fi and fields[g].pubs_per_journal_per_year > 0]
        ages = np.arange(1, len(f.age_weights) + 1)
        age_p = np.asarray(f.age_weights) / sum(f.age_weights)
        for jid in f.journal_ids():
            rng = _journal_rng(config.seed, jid)
            for year in range(start, end + 1):
                npubs = f.pubs_per_journal_per_year
                if f.ref_distribution == "poisson":
                    counts = rng.poisson(f.mean_refs_per_doc, size=npubs)
                else:
                    counts = np.full(npubs, int(round(f.mean_refs_per_doc)))
                total = int(counts.sum())
                lag = rng.choice(ages, size=total, p=age_p)
                resolved = rng.random(total) < f.resolved_share
                within = rng.random(total) < f.within_field_citation_share
                other_pick = rng.integers(0, max(len(others), 1), size=total)
                journal_u = rng.random(total)
                doc_u = rng.random(total)
                pos = 0
                for i in range(npubs):
                    refs = []
                    for _ in range(int(counts[i])):
                        cited_year = year - int(lag[pos])
                        if not resolved[pos] or cited_year < start:
                            refs.append(Reference(None, cited_year))
                        else:
                            g = fi if (within[pos] or not others) else others[int(other_pick[pos])]
                            gf = fields[g]
                            if gf.pubs_per_journal_per_year == 0:
                                refs.append(Reference(None, cited_year))
                            else:
                                tj = gf.journal_ids()[int(journal_u[pos] * gf.n_journals)]
                                ti = int(doc_u[pos] * gf.pubs_per_journal_per_year)
                                refs.append(Reference(doc_id_for(tj, cited_year, ti), cited_year))
                        pos += 1
                    documents.append(DocumentRecord(doc_id_for(jid, year, i), jid, year, DocType.ARTICLE, tuple(refs)))
    return Corpus.build(journals, documents, year_range=(start, end))


# ---------------------------------------------------------------------------
# Scenario builders
# ---------------------------------------------------------------------------


def merge_journals(corpus: Corpus, j1: str, j2: str) -> Corpus:
    """Reassign every document of ``j2`` to ``j1`` and drop ``j2``. References are untouched."""
    if j1 == j2:
        raise ValueError("cannot merge a journal with itself")
    for j in (j1, j2):
        if j not in corpus.journals:
            raise KeyError(f"unknown journal {j!r}")
    journals = [rec for jid, rec in corpus.journals.items() if jid != j2]
    docs = [
        DocumentRecord(d.doc_id, j1, d.pub_year, d.doc_type, d.references) if d.journal_id == j2 else d
        for d in corpus.documents.values()
    ]
    return Corpus.build(journals, docs, year_range=corpus.year_range)


def add_citation(
    corpus: Corpus,
    citing_journal: str,
    active_refs_of_new_doc: int,
    target: str,
    citing_year: int | None = None,
    target_window: int = 3,
) -> Corpus:
    """Add one citing-year article that cites ``target`` once.

    The new article carries ``active_refs_of_new_doc - 1`` further references
    to peer-reviewed target-window documents outside the target's journal.
    """
    if target not in corpus.documents:
        raise KeyError(f"unknown doc_id {target!r}")
    if citing_journal not in corpus.journals:
        raise KeyError(f"unknown journal {citing_journal!r}")
    if active_refs_of_new_doc < 1:
        raise ValueError("the new document needs at least one reference")
    if citing_year is None:
        citing_year = corpus.year_range[1]
    tdoc = corpus.documents[target]
    window = range(citing_year - target_window, citing_year)
    fillers = [
        d.doc_id
        for d in corpus.documents.values()
        if d.pub_year in window
        and d.journal_id != tdoc.journal_id
        and d.doc_type in PEER_REVIEWED_TYPES
        and corpus.journals[d.journal_id].journal_kind is not JournalKind.TRADE
    ]
    n_fill = active_refs_of_new_doc - 1
    if n_fill and not fillers:
        raise CorpusError("no documents available for filler references")
    refs = [Reference(target, tdoc.pub_year)]
    for i in range(n_fill):
        f = corpus.documents[fillers[i % len(fillers)]]
        refs.append(Reference(f.doc_id, f.pub_year))
    n = 0
    while f"{citing_journal}-added-{n}" in corpus.documents:
        n += 1
    new = DocumentRecord(f"{citing_journal}-added-{n}", citing_journal, citing_year, DocType.ARTICLE, tuple(refs))
    return Corpus.build(corpus.journals.values(), [*corpus.documents.values(), new], year_range=corpus.year_range)


def _docs(journal: str, years: Sequence[int], per_year: Sequence[int], refs=lambda i: ()) -> list[DocumentRecord]:
    out = []
    i = 0
    for y, n in zip(years, per_year):
        for _ in range(n):
            out.append(DocumentRecord(f"{journal}-{y}-{i:03d}", journal, y, DocType.ARTICLE, tuple(refs(i))))
            i += 1
    return out


def _fixture_base(Y: int, extra_journals: Sequence[str]):
    """Filler journal F plus continuity documents for the given journals."""
    window = [Y - 3, Y - 2, Y - 1]
    unresolved = lambda i: (Reference(None, None),)  # noqa: E731
    f_docs = _docs("F", window, [7, 7, 6], unresolved)
    f_docs.append(DocumentRecord(f"F-{Y}-Y", "F", Y, DocType.ARTICLE, (Reference(f_docs[0].doc_id, f_docs[0].pub_year),)))
    journals = [JournalRecord("F", "Filler")]
    docs = list(f_docs)
    for j in extra_journals:
        journals.append(JournalRecord(j, f"Journal {j}"))
        docs.extend(_docs(j, window, [1, 1, 1], unresolved))
    return journals, docs, f_docs[:20]


def _citers(journal, Y, targets, per_target, n_active, fillers):
    docs = []
    i = 0
    for rnd in range(per_target):
        for t in targets:
            refs = [Reference(t.doc_id, t.pub_year)]
            for k in range(n_active - 1):
                f = fillers[(i + k) % len(fillers)]
                refs.append(Reference(f.doc_id, f.pub_year))
            docs.append(DocumentRecord(f"{journal}-{Y}-{i:03d}", journal, Y, DocType.ARTICLE, tuple(refs)))
            i += 1
    return docs


def build_merge_fixture(citing_year: int = 2010) -> tuple[Corpus, dict]:
    """Two journals with equal unnormalized SNIP whose rates and potentials differ by a factor 2.

    A and B each have 20 target articles. A is cited 4 times per article by
    articles carrying 20 active references; B twice per article by articles
    carrying 10. Every citing article cites exactly one target article.
    """
    Y = citing_year
    journals, docs, fillers = _fixture_base(Y, ["CA", "CB"])
    unresolved = lambda i: (Reference(None, None),)  # noqa: E731
    for j in ("A", "B"):
        journals.append(JournalRecord(j, f"Journal {j}"))
        docs.extend(_docs(j, [Y - 3, Y - 2, Y - 1], [7, 7, 6], unresolved))
        docs.append(DocumentRecord(f"{j}-{Y}-Y", j, Y, DocType.ARTICLE, (Reference(fillers[0].doc_id, fillers[0].pub_year),)))
    a_targets = [d for d in docs if d.journal_id == "A" and d.pub_year < Y]
    b_targets = [d for d in docs if d.journal_id == "B" and d.pub_year < Y]
    docs.extend(_citers("CA", Y, a_targets, 4, 20, fillers))
    docs.extend(_citers("CB", Y, b_targets, 2, 10, fillers))
    corpus = Corpus.build(journals, docs, year_range=(Y - 8, Y))
    expected = {
        "journals": ("A", "B"),
        "pubs": 20,
        "rip": {"A": 4.0, "B": 2.0, "merged": 3.0},
        "cp": {"A": 20.0, "B": 10.0, "merged": 50.0 / 3.0},
        "ratio": {"A": 0.2, "B": 0.2, "merged": 0.18},
        "merged_over_constituent": 0.9,
    }
    return corpus, expected


def build_add_citation_fixture(citing_year: int = 2010) -> tuple[Corpus, dict]:
    """Journal T with 10 target articles, each cited once by an article with 5 active references.

    The scenario adds one citation to T from an article with 100 active
    references, far above T's subject-field mean.
    """
    Y = citing_year
    journals, docs, fillers = _fixture_base(Y, ["C"])
    unresolved = lambda i: (Reference(None, None),)  # noqa: E731
    journals.append(JournalRecord("T", "Journal T"))
    docs.extend(_docs("T", [Y - 3, Y - 2, Y - 1], [4, 3, 3], unresolved))
    docs.append(DocumentRecord(f"T-{Y}-Y", "T", Y, DocType.ARTICLE, (Reference(fillers[1].doc_id, fillers[1].pub_year),)))
    targets = [d for d in docs if d.journal_id == "T" and d.pub_year < Y]
    docs.extend(_citers("C", Y, targets, 1, 5, fillers))
    corpus = Corpus.build(journals, docs, year_range=(Y - 8, Y))
    params = {"journal": "T", "citing_journal": "C", "target": targets[0].doc_id, "active_refs": 100}
    return corpus, params
