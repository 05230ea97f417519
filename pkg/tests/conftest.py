from __future__ import annotations

from pathlib import Path

import pytest

from snipkit.corpus import Corpus, DocumentRecord, JournalRecord, load_corpus, parse_reference
from snipkit.synth import FieldSpec, SynthConfig

DATA = Path(__file__).parent / "data"


def make_corpus(journals, docs, year_range=None, strict=False) -> Corpus:
    """Terse corpus builder.

    journals: ids, or (id, kind) pairs. docs: (doc_id, journal, year, refs[, doc_type])
    with refs as a list of ``target@year`` / ``@year`` / ``?`` tokens.
    """
    jrecs = []
    for j in journals:
        if isinstance(j, str):
            jrecs.append(JournalRecord(j))
        else:
            jrecs.append(JournalRecord(j[0], journal_kind=j[1]))
    drecs = []
    for d in docs:
        doc_type = d[4] if len(d) > 4 else "article"
        drecs.append(DocumentRecord(d[0], d[1], d[2], doc_type, tuple(parse_reference(t) for t in d[3])))
    return Corpus.build(jrecs, drecs, year_range=year_range, strict=strict)


@pytest.fixture
def small_corpus() -> Corpus:
    return load_corpus(DATA / "small_journals.csv", DATA / "small_documents.csv")


def two_field_config(seed=11, n_journals=10, pubs=50, refs=(30.0, 10.0), within=1.0, resolved=1.0) -> SynthConfig:
    return SynthConfig(
        seed=seed,
        years=(2001, 2010),
        fields=(
            FieldSpec("A", n_journals, pubs, refs[0], within_field_citation_share=within, resolved_share=resolved),
            FieldSpec("B", n_journals, pubs, refs[1], within_field_citation_share=within, resolved_share=resolved),
        ),
    )


def universe_fixture(Y=2010):
    """Five journals, one per citing-universe outcome.

    T: clean target/citing journal. TR: trade. GAP: no publication in Y-1.
    LOW: 3 of 20 year-Y publications carry an active reference (15%).
    EDGE: 4 of 20 (20%, exactly the threshold).
    """
    journals = ["T", ("TR", "trade"), "GAP", "LOW", "EDGE"]
    docs = []
    anchor = f"T-{Y - 1}-0@{Y - 1}"

    def add(j, year, n, n_active):
        for i in range(n):
            refs = [anchor] if i < n_active else [f"@{Y - 9}"]
            docs.append((f"{j}-{year}-{i}", j, year, refs))

    for y in range(Y - 3, Y):
        for i in range(5):
            docs.append((f"T-{y}-{i}", "T", y, [f"@{Y - 9}"]))
    add("T", Y, 5, 5)
    for j in ("TR", "LOW", "EDGE"):
        for y in range(Y - 3, Y):
            add(j, y, 1, 0)
    for y in (Y - 3, Y - 2):
        add("GAP", y, 1, 0)
    add("TR", Y, 4, 4)
    add("GAP", Y, 4, 4)
    add("LOW", Y, 20, 3)
    add("EDGE", Y, 20, 4)
    return make_corpus(journals, docs, year_range=(Y - 8, Y))


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
