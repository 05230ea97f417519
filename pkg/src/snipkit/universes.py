"""Target and citing universes for the two SNIP variants.

The original variant counts every citation in the database. The modified
variant drops three groups of citing journals, applied in order:

a. trade journals,
b. journals without a peer-reviewed publication in every year of the
   continuity span ending at the citing year,
c. journals where fewer than ``min_active_ref_share`` of the citing-year
   publications carry an active reference,

and it deletes target documents that have no references at all.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction

from .corpus import Corpus, DocType, DocumentRecord, JournalKind

PEER_REVIEWED_TYPES = frozenset({DocType.ARTICLE, DocType.REVIEW, DocType.CONFERENCE_PAPER})


class UniverseError(ValueError):
    """The spec cannot be evaluated on this corpus (e.g. truncated windows)."""


class Variant(str, Enum):
    ORIGINAL = "original"
    MODIFIED = "modified"


class Normalization(str, Enum):
    WINDOW_LENGTH = "window_length"
    WEIGHTED_MEAN_CP = "weighted_mean_cp"
    EXACT_MEAN_ONE = "exact_mean_one"


@dataclass(frozen=True)
class UniverseSpec:
    """Parameters of one indicator run.

    ``exclude_trade`` left as None follows the variant: trade journals are
    dropped for ``modified`` and kept for ``original``. ``normalization`` only
    matters for the modified variant.
    """

    citing_year: int
    variant: Variant = Variant.ORIGINAL
    target_window: int = 3
    field_window: int = 8
    min_active_ref_share: float = 0.20
    continuity_span: int = 4
    exclude_trade: bool | None = None
    normalization: Normalization = Normalization.WINDOW_LENGTH

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "normalization", Normalization(self.normalization))
        if not 1 <= self.target_window <= self.field_window:
            raise UniverseError("need 1 <= target_window <= field_window")
        if self.continuity_span < 1:
            raise UniverseError("continuity_span must be >= 1")
        if not 0.0 <= self.min_active_ref_share <= 1.0:
            raise UniverseError("min_active_ref_share must lie in [0, 1]")

    @property
    def modified(self) -> bool:
        return self.variant is Variant.MODIFIED

    @property
    def trade_excluded(self) -> bool:
        return self.modified if self.exclude_trade is None else self.exclude_trade

    @property
    def target_years(self) -> range:
        return range(self.citing_year - self.target_window, self.citing_year)

    @property
    def field_years(self) -> range:
        """Cited-publication years that place a citing document in a journal's subject field."""
        w = self.target_window if self.modified else self.field_window
        return range(self.citing_year - w, self.citing_year)

    @property
    def continuity_years(self) -> range:
        return range(self.citing_year - self.continuity_span + 1, self.citing_year + 1)

    def check(self, corpus: Corpus) -> None:
        if corpus.year_range is None:
            return
        start, end = corpus.year_range
        if self.citing_year > end:
            raise UniverseError(f"citing year {self.citing_year} after corpus end {end}")
        if not self.modified and self.citing_year - self.field_window < start:
            raise UniverseError(
                f"field window [{self.citing_year - self.field_window}, {self.citing_year - 1}] "
                f"truncated by corpus start {start}"
            )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        d["normalization"] = self.normalization.value
        return d


@dataclass
class UniverseReport:
    variant: str
    citing_year: int
    n_journals_publishing: int
    excluded: dict[str, list[str]] = field(default_factory=dict)
    deleted_targets: int = 0
    retained: int = 0

    SET_LABELS = {
        "a": "Trade journals",
        "b": "Not publishing continuously",
        "c": "Low share of publications with active references",
    }

    def count(self, key: str) -> int:
        return len(self.excluded.get(key, ()))

    def share(self, key: str) -> float:
        if not self.n_journals_publishing:
            return 0.0
        return 100.0 * self.count(key) / self.n_journals_publishing

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "citing_year": self.citing_year,
            "n_journals_publishing": self.n_journals_publishing,
            "exclusions": {
                k: {"count": self.count(k), "share_pct": self.share(k), "journals": sorted(self.excluded.get(k, ()))}
                for k in ("a", "b", "c")
            },
            "deleted_targets": self.deleted_targets,
            "retained": self.retained,
        }

    def to_markdown(self) -> str:
        lines = [
            f"Citing universe, {self.variant} variant, citing year {self.citing_year} "
            f"({self.n_journals_publishing} journals publishing in that year)",
            "",
            "| Set | Exclusion | Journals | Share (%) |",
            "|---|---|---:|---:|",
        ]
        for k in ("a", "b", "c"):
            lines.append(f"| {k} | {self.SET_LABELS[k]} | {self.count(k)} | {self.share(k):.1f} |")
        lines.append(f"| | Retained citing journals | {self.retained} | |")
        lines.append(f"| | Deleted zero-reference target documents | {self.deleted_targets} | |")
        return "\n".join(lines) + "\n"


@dataclass(eq=False)
class Universe:
    """Resolved universes for one spec on one corpus. Hashes by identity."""

    spec: UniverseSpec
    citing_journals: frozenset[str]
    target_excluded: frozenset[str]
    report: UniverseReport


def is_peer_reviewed(doc: DocumentRecord) -> bool:
    return doc.doc_type in PEER_REVIEWED_TYPES


def _count_active(doc: DocumentRecord, corpus: Corpus, years: range, target_excluded: frozenset[str]) -> int:
    n = 0
    docs = corpus.documents
    for ref in doc.references:
        if ref.target is None or ref.cited_year not in years:
            continue
        tgt = docs[ref.target]
        if tgt.doc_type in PEER_REVIEWED_TYPES and tgt.journal_id not in target_excluded:
            n += 1
    return n


def _peer_reviewed_pubs(corpus: Corpus, journal: str, year: int) -> list[str]:
    ids = corpus.pubs_by_journal_year.get(journal, {}).get(year, ())
    return [d for d in ids if corpus.documents[d].doc_type in PEER_REVIEWED_TYPES]


def _target_excluded(corpus: Corpus, spec: UniverseSpec) -> tuple[list[str], list[str]]:
    trade = []
    if spec.trade_excluded:
        trade = [j for j, rec in corpus.journals.items() if rec.journal_kind is JournalKind.TRADE]
    discontinuous = []
    if spec.modified:
        for j in corpus.journals:
            if any(not _peer_reviewed_pubs(corpus, j, y) for y in spec.continuity_years):
                discontinuous.append(j)
    return trade, discontinuous


def build_universe(corpus: Corpus, spec: UniverseSpec) -> Universe:
    """Resolve citing universe and target exclusions; memoized on the corpus."""
    key = ("universe", spec)
    cached = corpus._memo.get(key)
    if cached is not None:
        return cached
    spec.check(corpus)
    Y = spec.citing_year
    trade, discontinuous = _target_excluded(corpus, spec)
    target_excluded = frozenset(trade) | frozenset(discontinuous)

    publishing = [j for j in corpus.journals if _peer_reviewed_pubs(corpus, j, Y)]
    excluded: dict[str, list[str]] = {"a": [], "b": [], "c": []}
    trade_set, disc_set = set(trade), set(discontinuous)
    threshold = Fraction(str(spec.min_active_ref_share))
    retained = []
    for j in publishing:
        if j in trade_set:
            excluded["a"].append(j)
            continue
        if not spec.modified:
            retained.append(j)
            continue
        if j in disc_set:
            excluded["b"].append(j)
            continue
        pubs = _peer_reviewed_pubs(corpus, j, Y)
        with_active = sum(
            1 for d in pubs if _count_active(corpus.documents[d], corpus, spec.target_years, target_excluded) > 0
        )
        if Fraction(with_active, len(pubs)) < threshold:
            excluded["c"].append(j)
            continue
        retained.append(j)

    if spec.modified:
        citing = frozenset(retained)
    else:
        citing = frozenset(j for j in corpus.journals if j not in trade_set)

    deleted = 0
    if spec.modified:
        for j in corpus.journals:
            if j in target_excluded:
                continue
            for y in spec.target_years:
                deleted += sum(1 for d in _peer_reviewed_pubs(corpus, j, y) if not corpus.documents[d].references)

    report = UniverseReport(
        variant=spec.variant.value,
        citing_year=Y,
        n_journals_publishing=len(publishing),
        excluded=excluded,
        deleted_targets=deleted,
        retained=len(retained),
    )
    universe = Universe(spec, citing, target_excluded, report)
    corpus._memo[key] = universe
    return universe


def citing_universe(corpus: Corpus, spec: UniverseSpec) -> tuple[frozenset[str], UniverseReport]:
    u = build_universe(corpus, spec)
    return u.citing_journals, u.report


def active_reference_count(
    doc: DocumentRecord, corpus: Corpus, spec: UniverseSpec, universe: Universe | None = None
) -> int:
    """Resolved references into the target window pointing at peer-reviewed documents
    of journals that are not excluded as targets."""
    if universe is None:
        trade, disc = _target_excluded(corpus, spec)
        excluded = frozenset(trade) | frozenset(disc)
    else:
        excluded = universe.target_excluded
    return _count_active(doc, corpus, spec.target_years, excluded)


def _check_journal(corpus: Corpus, journal: str) -> None:
    if journal not in corpus.journals:
        raise KeyError(f"unknown journal {journal!r}")


def target_documents(
    corpus: Corpus, journal: str, spec: UniverseSpec, universe: Universe | None = None
) -> tuple[str, ...]:
    """Peer-reviewed documents of ``journal`` published in the target window."""
    _check_journal(corpus, journal)
    if universe is None:
        universe = build_universe(corpus, spec)
    if journal in universe.target_excluded:
        return ()
    out = []
    for y in spec.target_years:
        for d in _peer_reviewed_pubs(corpus, journal, y):
            if spec.modified and not corpus.documents[d].references:
                continue
            out.append(d)
    return tuple(sorted(out))


def citing_instances(
    corpus: Corpus, journal: str, spec: UniverseSpec, universe: Universe | None = None
) -> list[str]:
    """Citing doc_id of every counted citation instance to the journal's target documents."""
    if universe is None:
        universe = build_universe(corpus, spec)
    Y = spec.citing_year
    docs = corpus.documents
    out = []
    for t in target_documents(corpus, journal, spec, universe):
        for c in corpus.citation_index.get(t, {}).get(Y, ()):
            cd = docs[c]
            if cd.doc_type in PEER_REVIEWED_TYPES and cd.journal_id in universe.citing_journals:
                out.append(c)
    return out


def subject_field(
    corpus: Corpus, journal: str, spec: UniverseSpec, universe: Universe | None = None
) -> frozenset[str]:
    """Citing-year documents that cite the journal within the subject-field window."""
    _check_journal(corpus, journal)
    if universe is None:
        universe = build_universe(corpus, spec)
    if spec.modified:
        return frozenset(citing_instances(corpus, journal, spec, universe))
    if journal in universe.target_excluded:
        return frozenset()
    Y = spec.citing_year
    docs = corpus.documents
    out = set()
    for y in spec.field_years:
        for d in _peer_reviewed_pubs(corpus, journal, y):
            for c in corpus.citation_index.get(d, {}).get(Y, ()):
                cd = docs[c]
                if cd.doc_type in PEER_REVIEWED_TYPES and cd.journal_id in universe.citing_journals:
                    out.add(c)
    return frozenset(out)
