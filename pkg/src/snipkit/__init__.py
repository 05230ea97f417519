"""Journal citation-impact indicators: RIP, original SNIP and modified SNIP,
plus comparison reports between the two SNIP variants."""

__version__ = "0.1.0"

from .corpus import Corpus, DocumentRecord, JournalRecord, Reference, citations_to, load_corpus, validate_corpus
from .indicators import IndicatorTable, JournalMetrics, compute_indicator_table
from .universes import UniverseSpec, build_universe

__all__ = [
    "Corpus",
    "DocumentRecord",
    "IndicatorTable",
    "JournalMetrics",
    "JournalRecord",
    "Reference",
    "UniverseSpec",
    "build_universe",
    "citations_to",
    "compute_indicator_table",
    "load_corpus",
    "validate_corpus",
]
