"""Corpus data model, file ingestion and citation indices.

A corpus holds journals, documents and the references between documents.
Indices are derived once at construction; the corpus is never mutated
afterwards, so it can be shared freely between readers.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

logger = logging.getLogger(__name__)

JOURNAL_COLUMNS = ("journal_id", "title", "journal_kind", "field_ids", "active")
DOCUMENT_COLUMNS = ("doc_id", "journal_id", "pub_year", "doc_type", "references")


class CorpusError(ValueError):
    """Raised for data integrity problems in corpus input."""


class ParseError(CorpusError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class JournalKind(str, Enum):
    PEER_REVIEWED = "peer_reviewed"
    TRADE = "trade"


class DocType(str, Enum):
    ARTICLE = "article"
    REVIEW = "review"
    CONFERENCE_PAPER = "conference_paper"
    EDITORIAL = "editorial"
    LETTER = "letter"
    OTHER = "other"


@dataclass(frozen=True)
class JournalRecord:
    journal_id: str
    title: str = ""
    journal_kind: JournalKind = JournalKind.PEER_REVIEWED
    field_ids: frozenset[str] = frozenset()
    active: bool = True

    def __post_init__(self):
        object.__setattr__(self, "journal_kind", JournalKind(self.journal_kind))
        object.__setattr__(self, "field_ids", frozenset(self.field_ids))


@dataclass(frozen=True)
class Reference:
    """A cited reference. ``target`` is None when it does not resolve to a document."""

    target: str | None = None
    cited_year: int | None = None

    @property
    def resolved(self) -> bool:
        return self.target is not None


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    journal_id: str
    pub_year: int
    doc_type: DocType = DocType.ARTICLE
    references: tuple[Reference, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "doc_type", DocType(self.doc_type))
        object.__setattr__(self, "references", tuple(self.references))


@dataclass(frozen=True)
class Corpus:
    """Immutable store of journals and documents plus derived citation indices.

    Construct through :meth:`build` (or :func:`load_corpus`), which validates
    referential integrity and builds the indices.
    """

    journals: Mapping[str, JournalRecord]
    documents: Mapping[str, DocumentRecord]
    year_range: tuple[int, int] | None
    dangling: tuple[tuple[str, str], ...] = ()
    # derived
    docs_by_journal: Mapping[str, tuple[str, ...]] = field(default=MappingProxyType({}), compare=False, repr=False)
    pubs_by_journal_year: Mapping[str, Mapping[int, tuple[str, ...]]] = field(
        default=MappingProxyType({}), compare=False, repr=False
    )
    citation_index: Mapping[str, Mapping[int, tuple[str, ...]]] = field(
        default=MappingProxyType({}), compare=False, repr=False
    )
    _memo: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def build(
        cls,
        journals: Iterable[JournalRecord],
        documents: Iterable[DocumentRecord],
        year_range: tuple[int, int] | None = None,
        strict: bool = False,
    ) -> Corpus:
        jmap: dict[str, JournalRecord] = {}
        for j in journals:
            if j.journal_id in jmap:
                raise CorpusError(f"duplicate journal_id {j.journal_id!r}")
            jmap[j.journal_id] = j
        dmap: dict[str, DocumentRecord] = {}
        for d in documents:
            if d.doc_id in dmap:
                raise CorpusError(f"duplicate doc_id {d.doc_id!r}")
            if d.journal_id not in jmap:
                raise CorpusError(f"document {d.doc_id!r} references unknown journal_id {d.journal_id!r}")
            dmap[d.doc_id] = d

        if year_range is None and dmap:
            years = [d.pub_year for d in dmap.values()]
            year_range = (min(years), max(years))
        if year_range is not None:
            lo, hi = year_range
            if lo > hi:
                raise CorpusError(f"invalid year range {year_range}")
            for d in dmap.values():
                if not lo <= d.pub_year <= hi:
                    raise CorpusError(f"document {d.doc_id!r} pub_year {d.pub_year} outside year range {year_range}")
            year_range = (int(lo), int(hi))

        dangling = []
        for doc_id in sorted(dmap):
            d = dmap[doc_id]
            fixed = []
            changed = False
            for ref in d.references:
                if ref.target is None:
                    fixed.append(ref)
                    continue
                tgt = dmap.get(ref.target)
                if tgt is None:
                    if strict:
                        raise CorpusError(f"document {doc_id!r} cites unknown doc_id {ref.target!r}")
                    logger.warning("document %s cites unknown doc_id %s; treated as unresolved", doc_id, ref.target)
                    dangling.append((doc_id, ref.target))
                    fixed.append(Reference(None, ref.cited_year))
                    changed = True
                    continue
                if ref.cited_year is None or ref.cited_year != tgt.pub_year:
                    raise CorpusError(
                        f"document {doc_id!r}: reference to {ref.target!r} has cited_year "
                        f"{ref.cited_year}, target was published in {tgt.pub_year}"
                    )
                fixed.append(ref)
            if changed:
                dmap[doc_id] = DocumentRecord(d.doc_id, d.journal_id, d.pub_year, d.doc_type, tuple(fixed))

        jmap = {k: jmap[k] for k in sorted(jmap)}
        dmap = {k: dmap[k] for k in sorted(dmap)}
        by_journal: dict[str, list[str]] = defaultdict(list)
        by_jy: dict[str, dict[int, list[str]]] = defaultdict(lambda: defaultdict(list))
        cites: dict[str, dict[int, list[str]]] = defaultdict(lambda: defaultdict(list))
        for doc_id, d in dmap.items():  # sorted, so every list below comes out sorted
            by_journal[d.journal_id].append(doc_id)
            by_jy[d.journal_id][d.pub_year].append(doc_id)
            for ref in d.references:
                if ref.target is not None:
                    cites[ref.target][d.pub_year].append(doc_id)

        def freeze(nested):
            return MappingProxyType(
                {k: MappingProxyType({y: tuple(v) for y, v in sorted(inner.items())}) for k, inner in sorted(nested.items())}
            )

        return cls(
            journals=MappingProxyType(jmap),
            documents=MappingProxyType(dmap),
            year_range=year_range,
            dangling=tuple(dangling),
            docs_by_journal=MappingProxyType({k: tuple(v) for k, v in sorted(by_journal.items())}),
            pubs_by_journal_year=freeze(by_jy),
            citation_index=freeze(cites),
        )

    def __eq__(self, other):
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            dict(self.journals) == dict(other.journals)
            and dict(self.documents) == dict(other.documents)
            and self.year_range == other.year_range
            and self.dangling == other.dangling
        )

    __hash__ = None

    @property
    def n_references(self) -> int:
        return sum(len(d.references) for d in self.documents.values())

    @property
    def n_resolved_references(self) -> int:
        return sum(1 for d in self.documents.values() for r in d.references if r.target is not None)

    def pub_count(self, journal_id: str, year: int | None = None) -> int:
        if year is None:
            return len(self.docs_by_journal.get(journal_id, ()))
        return len(self.pubs_by_journal_year.get(journal_id, {}).get(year, ()))

    def citation_count(self, doc_id: str, citing_year: int | None = None) -> int:
        per_year = self.citation_index.get(doc_id, {})
        if citing_year is None:
            return sum(len(v) for v in per_year.values())
        return len(per_year.get(citing_year, ()))

    def years(self) -> range:
        if self.year_range is None:
            return range(0)
        return range(self.year_range[0], self.year_range[1] + 1)


def citations_to(corpus: Corpus, doc: str, citing_year: int) -> list[str]:
    """Citing doc_id for every citation instance of ``doc`` made in ``citing_year``.

    Each resolved reference is one instance, so a document citing ``doc``
    twice appears twice. Sorted by citing doc_id.
    """
    if doc not in corpus.documents:
        raise KeyError(f"unknown doc_id {doc!r}")
    return list(corpus.citation_index.get(doc, {}).get(citing_year, ()))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    severity: str  # "fatal" | "warning"
    code: str
    message: str
    subject: str = ""


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def fatal(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "fatal"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.fatal

    def to_dict(self) -> dict:
        return {
            "n_fatal": len(self.fatal),
            "n_warning": len(self.warnings),
            "findings": [f.__dict__ for f in self.findings],
        }


def validate_corpus(corpus: Corpus, unresolved_warn_share: float = 0.0) -> ValidationReport:
    """Check referential integrity and index consistency.

    Dangling keys are fatal. An unresolved-reference share above
    ``unresolved_warn_share`` and documents typed ``other`` are warnings.
    """
    report = ValidationReport()
    add = report.findings.append
    for citing, target in corpus.dangling:
        add(Finding("fatal", "dangling_reference", f"{citing} cites missing document {target}", target))
    for d in corpus.documents.values():
        if d.journal_id not in corpus.journals:
            add(Finding("fatal", "dangling_journal", f"{d.doc_id} belongs to missing journal {d.journal_id}", d.journal_id))
        for ref in d.references:
            if ref.target is None:
                continue
            tgt = corpus.documents.get(ref.target)
            if tgt is None:
                add(Finding("fatal", "dangling_reference", f"{d.doc_id} cites missing document {ref.target}", ref.target))
            elif tgt.pub_year != ref.cited_year:
                add(Finding("fatal", "cited_year_mismatch", f"{d.doc_id} -> {ref.target}: {ref.cited_year}", ref.target))

    indexed = sum(len(v) for per_year in corpus.citation_index.values() for v in per_year.values())
    if indexed != corpus.n_resolved_references:
        add(Finding("fatal", "index_mismatch", f"{indexed} indexed citations vs {corpus.n_resolved_references} resolved references"))

    n_refs = corpus.n_references
    n_unresolved = n_refs - corpus.n_resolved_references
    if n_refs and n_unresolved / n_refs > unresolved_warn_share:
        share = 100.0 * n_unresolved / n_refs
        add(Finding("warning", "unresolved_share", f"{n_unresolved} of {n_refs} references unresolved ({share:.1f}%)"))
    n_other = sum(1 for d in corpus.documents.values() if d.doc_type is DocType.OTHER)
    if n_other:
        add(Finding("warning", "doc_type_other", f"{n_other} documents typed 'other'"))
    return report


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "y", "t"):
        return True
    if t in ("false", "0", "no", "n", "f", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_reference(token: str) -> Reference:
    """Parse ``target@year``, ``@year`` or ``?``."""
    token = token.strip()
    if token == "?":
        return Reference(None, None)
    if "@" not in token:
        raise ValueError(f"malformed reference {token!r}")
    target, _, year = token.rpartition("@")
    return Reference(target or None, int(year))


def format_reference(ref: Reference) -> str:
    if ref.cited_year is None:
        return "?" if ref.target is None else f"{ref.target}@"
    return f"{ref.target or ''}@{ref.cited_year}"


def _journal_from_row(row: Mapping) -> JournalRecord:
    fids = row.get("field_ids") or ()
    if isinstance(fids, str):
        fids = [f for f in fids.split("|") if f]
    active = row.get("active", True)
    if isinstance(active, str):
        active = _parse_bool(active)
    return JournalRecord(
        journal_id=str(row["journal_id"]),
        title=row.get("title") or "",
        journal_kind=JournalKind(row.get("journal_kind") or "peer_reviewed"),
        field_ids=frozenset(fids),
        active=bool(active),
    )


def _document_from_csv(row: Mapping) -> DocumentRecord:
    refs_text = row.get("references") or ""
    refs = tuple(parse_reference(t) for t in refs_text.split("|") if t.strip())
    return DocumentRecord(
        doc_id=row["doc_id"],
        journal_id=row["journal_id"],
        pub_year=int(row["pub_year"]),
        doc_type=DocType(row.get("doc_type") or "article"),
        references=refs,
    )


def _document_from_json(obj: Mapping) -> DocumentRecord:
    refs = []
    for r in obj.get("references") or ():
        year = r.get("cited_year")
        refs.append(Reference(r.get("target"), None if year is None else int(year)))
    return DocumentRecord(
        doc_id=str(obj["doc_id"]),
        journal_id=str(obj["journal_id"]),
        pub_year=int(obj["pub_year"]),
        doc_type=DocType(obj.get("doc_type") or "article"),
        references=tuple(refs),
    )


def _read_records(path: Path, fmt: str, columns: tuple[str, ...], make_csv, make_json) -> list:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        if fmt == "csv":
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                return out
            missing = [c for c in columns[:1] if c not in reader.fieldnames]
            if missing:
                raise ParseError(path, 1, f"missing column(s) {missing}")
            for row in reader:
                try:
                    out.append(make_csv(row))
                except (KeyError, ValueError, TypeError) as exc:
                    raise ParseError(path, reader.line_num, str(exc)) from exc
        elif fmt == "jsonl":
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    out.append(make_json(json.loads(line)))
                except (KeyError, ValueError, TypeError, AttributeError) as exc:
                    raise ParseError(path, lineno, str(exc)) from exc
        else:
            raise ValueError(f"unknown format {fmt!r}")
    return out


def load_corpus(
    journal_path,
    document_path,
    format: str = "csv",
    strict: bool = False,
    year_range: tuple[int, int] | None = None,
) -> Corpus:
    """Read journal and document files and return a validated corpus."""
    journals = _read_records(Path(journal_path), format, JOURNAL_COLUMNS, _journal_from_row, _journal_from_row)
    documents = _read_records(Path(document_path), format, DOCUMENT_COLUMNS, _document_from_csv, _document_from_json)
    return Corpus.build(journals, documents, year_range=year_range, strict=strict)


def journals_to_text(corpus: Corpus, format: str = "csv") -> str:
    buf = io.StringIO()
    if format == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(JOURNAL_COLUMNS)
        for j in corpus.journals.values():
            w.writerow([j.journal_id, j.title, j.journal_kind.value, "|".join(sorted(j.field_ids)), str(j.active).lower()])
    else:
        for j in corpus.journals.values():
            obj = {
                "journal_id": j.journal_id,
                "title": j.title,
                "journal_kind": j.journal_kind.value,
                "field_ids": sorted(j.field_ids),
                "active": j.active,
            }
            buf.write(json.dumps(obj, sort_keys=True) + "\n")
    return buf.getvalue()


def documents_to_text(corpus: Corpus, format: str = "csv") -> str:
    buf = io.StringIO()
    if format == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(DOCUMENT_COLUMNS)
        for d in corpus.documents.values():
            refs = "|".join(format_reference(r) for r in d.references)
            w.writerow([d.doc_id, d.journal_id, d.pub_year, d.doc_type.value, refs])
    else:
        for d in corpus.documents.values():
            obj = {
                "doc_id": d.doc_id,
                "journal_id": d.journal_id,
                "pub_year": d.pub_year,
                "doc_type": d.doc_type.value,
                "references": [{"target": r.target, "cited_year": r.cited_year} for r in d.references],
            }
            buf.write(json.dumps(obj, sort_keys=True) + "\n")
    return buf.getvalue()


def write_corpus(corpus: Corpus, journal_path, document_path, format: str = "csv") -> None:
    Path(journal_path).write_text(journals_to_text(corpus, format), encoding="utf-8")
    Path(document_path).write_text(documents_to_text(corpus, format), encoding="utf-8")
