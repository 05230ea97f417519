"""Command-line interface.

Exit codes: 0 success, 1 configuration or usage error, 2 data integrity error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from . import __version__
from .consistency import run_consistency
from .corpus import CorpusError, documents_to_text, journals_to_text, load_corpus, validate_corpus
from .indicators import IndicatorTable, compute_indicator_table
from .report import (
    ReportError,
    builtin_filters,
    citation_distribution,
    correlation_table,
    correlations_markdown,
    field_aggregate_table,
    fields_markdown,
    normalized_field_snip,
    overall_aggregate,
    overall_markdown,
    percentiles_markdown,
    read_field_map,
    render_icr,
    write_csv,
)
from .stats import StatsError
from .synth import SynthConfig, SynthConfigError, generate_corpus
from .universes import UniverseError, UniverseSpec

logger = logging.getLogger("snipkit")

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 1, 2

DEFAULTS = {
    "format": "csv",
    "out": "out",
    "seed": None,
    "threads": 1,
    "strict": False,
    "variant": "original",
    "normalization": "window_length",
    "target_window": 3,
    "field_window": 8,
    "min_active_share": 0.20,
    "continuity_span": 4,
    "exclude_trade": None,
    "min_pubs": 100,
    "max_citation_diff": 10.0,
    "percentile_method": "linear",
    "figures": False,
    "field_map": None,
    "year": None,
}
# execution details that never change results; kept out of manifests
_NOT_IN_MANIFEST = {"out", "threads", "config", "command", "verbose"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p):
    g = p.add_argument_group("global options")
    g.add_argument("--config", help="YAML/JSON key-value file; command-line flags win on conflict")
    g.add_argument("--format", choices=["csv", "jsonl"], help="corpus file format (default csv)")
    g.add_argument("--out", help="output directory (default ./out)")
    g.add_argument("--seed", type=int, help="random seed")
    g.add_argument("--threads", type=int, help="worker threads for per-journal computation")
    g.add_argument("-v", "--verbose", action="store_true")


def _corpus_args(p, required=True):
    p.add_argument("--journals", required=required, help="journals file")
    p.add_argument("--documents", required=required, help="documents file")
    p.add_argument("--strict", action="store_true", default=argparse.SUPPRESS, help="fail on references to unknown documents")


def _spec_args(p, variant=True):
    p.add_argument("--year", type=int, help="citing year")
    if variant:
        p.add_argument("--variant", choices=["original", "modified"])
    p.add_argument("--normalization", type=lambda s: s.replace("-", "_"),
                   choices=["window_length", "weighted_mean_cp", "exact_mean_one"])
    p.add_argument("--target-window", type=int)
    p.add_argument("--field-window", type=int)
    p.add_argument("--min-active-share", type=float)
    p.add_argument("--continuity-span", type=int)
    t = p.add_mutually_exclusive_group()
    t.add_argument("--exclude-trade", dest="exclude_trade", action="store_const", const=True)
    t.add_argument("--include-trade", dest="exclude_trade", action="store_const", const=False)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="snipkit", description="Journal citation indicators (RIP, original and modified SNIP).")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="load and validate a corpus")
    _common(p)
    _corpus_args(p)

    p = sub.add_parser("compute", help="compute an indicator table")
    _common(p)
    _corpus_args(p)
    _spec_args(p)

    p = sub.add_parser("compare", help="compare a modified and an original indicator table")
    _common(p)
    p.add_argument("--modified", required=True, help="modified-variant table (.csv or .json)")
    p.add_argument("--original", required=True, help="original-variant table (.csv or .json)")
    p.add_argument("--field-map", help="CSV journal_id,field_id")
    p.add_argument("--min-pubs", type=int)
    p.add_argument("--max-citation-diff", type=float)
    p.add_argument("--percentile-method", choices=["linear", "nearest_rank"])
    p.add_argument("--figures", action="store_true", default=argparse.SUPPRESS)

    p = sub.add_parser("report", help="compute both variants and write the full comparison report")
    _common(p)
    _corpus_args(p)
    _spec_args(p, variant=False)
    p.add_argument("--metadata", required=True, help="YAML/JSON with per-indicator sections 1-4")
    p.add_argument("--field-map", help="CSV journal_id,field_id (default: journal field_ids)")
    p.add_argument("--min-pubs", type=int)
    p.add_argument("--max-citation-diff", type=float)
    p.add_argument("--percentile-method", choices=["linear", "nearest_rank"])

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    _common(p)
    p.add_argument("synth_config", metavar="CONFIG", help="synthetic corpus config (YAML/JSON)")

    p = sub.add_parser("consistency", help="run the consistency-criterion experiments")
    _common(p)
    _corpus_args(p, required=False)
    p.add_argument("--year", type=int, help="citing year")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < explicit flags."""
    given = {k: v for k, v in vars(args).items() if v is not None}
    cfg = {}
    if given.get("config"):
        try:
            loaded = yaml.safe_load(Path(given["config"]).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise UsageError(f"cannot read config {given['config']}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a mapping")
        cfg = {k.replace("-", "_"): v for k, v in loaded.items()}
    return {**DEFAULTS, **cfg, **given}


def _spec(cfg: dict, variant: str | None = None) -> UniverseSpec:
    if cfg.get("year") is None:
        raise UsageError("--year is required")
    return UniverseSpec(
        citing_year=int(cfg["year"]),
        variant=variant or cfg["variant"],
        target_window=int(cfg["target_window"]),
        field_window=int(cfg["field_window"]),
        min_active_ref_share=float(cfg["min_active_share"]),
        continuity_span=int(cfg["continuity_span"]),
        exclude_trade=cfg["exclude_trade"],
        normalization=cfg["normalization"],
    )


def _load(cfg: dict):
    for key in ("journals", "documents"):
        if not cfg.get(key) or not Path(cfg[key]).exists():
            raise UsageError(f"{key} file not found: {cfg.get(key)}")
    return load_corpus(cfg["journals"], cfg["documents"], format=cfg["format"], strict=bool(cfg["strict"]))


class _Writer:
    def __init__(self, out: str):
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def text(self, name: str, content: str) -> None:
        (self.dir / name).write_text(content, encoding="utf-8")
        self.files.append(name)

    def json(self, name: str, obj) -> None:
        self.text(name, json.dumps(obj, indent=2, sort_keys=True) + "\n")

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def manifest(self, cfg: dict, extra: dict | None = None) -> None:
        config = {k: v for k, v in sorted(cfg.items()) if k not in _NOT_IN_MANIFEST}
        body = {"command": cfg["command"], "version": __version__, "config": config, "outputs": sorted(self.files)}
        if extra:
            body.update(extra)
        (self.dir / "manifest.json").write_text(json.dumps(body, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


def _read_table(path: str) -> IndicatorTable:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"table not found: {path}")
    text = p.read_text(encoding="utf-8")
    try:
        return IndicatorTable.from_json(text) if p.suffix == ".json" else IndicatorTable.from_csv(text)
    except (ValueError, KeyError) as exc:
        raise CorpusError(f"{path}: cannot parse indicator table: {exc}") from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_ingest(cfg: dict) -> int:
    corpus = _load(cfg)
    report = validate_corpus(corpus)
    w = _Writer(cfg["out"])
    ext = cfg["format"]
    w.text(f"journals.{ext}", journals_to_text(corpus, ext))
    w.text(f"documents.{ext}", documents_to_text(corpus, ext))
    summary = {
        "journals": len(corpus.journals),
        "documents": len(corpus.documents),
        "references": corpus.n_references,
        "resolved_references": corpus.n_resolved_references,
        "year_range": list(corpus.year_range) if corpus.year_range else None,
    }
    w.json("validation.json", {"summary": summary, **report.to_dict()})
    w.manifest(cfg)
    for f in report.findings:
        print(f"{f.severity}: {f.message}")
    print(f"{summary['journals']} journals, {summary['documents']} documents, {len(report.fatal)} fatal, {len(report.warnings)} warnings")
    return EXIT_DATA if report.fatal else EXIT_OK


def _write_table(w: _Writer, table: IndicatorTable) -> None:
    tag = f"{table.citing_year}_{table.variant}"
    w.text(f"indicators_{tag}.csv", table.to_csv())
    w.text(f"indicators_{tag}.json", table.to_json())
    if table.universe_report:
        w.json(f"universe_{tag}.json", table.universe_report)


def cmd_compute(cfg: dict) -> int:
    spec = _spec(cfg)
    corpus = _load(cfg)
    table = compute_indicator_table(corpus, spec, threads=int(cfg["threads"]))
    w = _Writer(cfg["out"])
    _write_table(w, table)
    w.manifest(cfg, {"spec": spec.to_dict(), "normalization_constant": table.normalization_constant, "note": table.note})
    if table.note:
        logger.warning(table.note)
    print(f"{len(table.rows)} journals, {spec.variant.value} variant, normalization constant {table.normalization_constant}")
    return EXIT_OK


def _comparison(w: _Writer, modified: IndicatorTable, original: IndicatorTable, fields, cfg: dict, figures: bool) -> dict:
    overall = overall_aggregate(modified, original)
    w.text("overall.csv", write_csv(overall.to_rows()))
    md = ["### All fields", "", overall_markdown(overall)]
    percentiles = [
        citation_distribution(modified, f"modified {modified.citing_year}", cfg["percentile_method"]),
        citation_distribution(original, f"original {original.citing_year}", cfg["percentile_method"]),
    ]
    w.text("percentiles.csv", write_csv([p.to_dict() for p in percentiles]))
    md += ["### Citation distribution", "", percentiles_markdown(percentiles)]
    correlations = correlation_table(modified, original, builtin_filters(int(cfg["min_pubs"]), float(cfg["max_citation_diff"])))
    w.text("correlations.csv", write_csv([c.to_dict() for c in correlations]))
    md += ["### Correlations", "", correlations_markdown(correlations)]
    bundle = {
        "overall": overall.to_rows(),
        "percentiles": [p.to_dict() for p in percentiles],
        "correlations": [c.to_dict() for c in correlations],
    }
    field_rows = None
    if fields is None:
        logger.warning("no field map given; per-field tables omitted")
    else:
        field_rows = field_aggregate_table(modified, original, fields)
        w.text("fields.csv", write_csv([r.to_dict() for r in field_rows]))
        md += ["### Per field", "", fields_markdown(field_rows)]
        bundle["fields"] = [r.to_dict() for r in field_rows]
        try:
            norm = normalized_field_snip(field_rows)
        except ReportError as exc:
            logger.warning("normalized field SNIP skipped: %s", exc)
        else:
            w.text("normalized_fields.csv", write_csv(norm.to_rows()))
            bundle["normalized_fields"] = {"rows": norm.to_rows(), "summary": norm.summary()}
    w.json("compare.json", bundle)
    w.text("compare.md", "\n".join(md))
    if figures:
        from . import figures as fig

        fig.snip_scatter(modified, original, w.path("figures/snip_scatter.png"))
        fig.percentile_profile(percentiles, w.path("figures/citation_percentiles.png"))
        if field_rows:
            fig.field_bars(field_rows, w.path("figures/field_snip.png"))
    return {"correlations": correlations}


def cmd_compare(cfg: dict) -> int:
    modified = _read_table(cfg["modified"])
    original = _read_table(cfg["original"])
    fields = read_field_map(cfg["field_map"]) if cfg.get("field_map") else None
    w = _Writer(cfg["out"])
    _comparison(w, modified, original, fields, cfg, bool(cfg["figures"]))
    w.manifest(cfg)
    print(f"compared {len(set(modified.rows) & set(original.rows))} journals")
    return EXIT_OK


def cmd_report(cfg: dict) -> int:
    path = Path(cfg["metadata"])
    if not path.exists():
        raise UsageError(f"metadata file not found: {path}")
    metadata = yaml.safe_load(path.read_text(encoding="utf-8"))
    corpus = _load(cfg)
    threads = int(cfg["threads"])
    original = compute_indicator_table(corpus, _spec(cfg, "original"), threads=threads)
    modified = compute_indicator_table(corpus, _spec(cfg, "modified"), threads=threads)
    if cfg.get("field_map"):
        fields = read_field_map(cfg["field_map"])
    else:
        fields = {j: set(rec.field_ids) for j, rec in corpus.journals.items() if rec.field_ids}
    w = _Writer(cfg["out"])
    _write_table(w, original)
    _write_table(w, modified)
    res = _comparison(w, modified, original, fields, cfg, figures=True)
    universes = [original.universe_report, modified.universe_report]
    try:
        w.text("icr.md", render_icr(metadata, universes, res["correlations"], "markdown"))
        w.text("icr.json", render_icr(metadata, universes, res["correlations"], "json"))
    except ReportError as exc:
        raise UsageError(str(exc)) from exc
    w.manifest(cfg)
    print(f"report written to {w.dir}")
    return EXIT_OK


def cmd_synth(cfg: dict) -> int:
    try:
        config = SynthConfig.load(cfg["synth_config"])
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.get("seed") is not None:
        config = SynthConfig(int(cfg["seed"]), config.years, config.fields)
    corpus = generate_corpus(config)
    w = _Writer(cfg["out"])
    ext = cfg["format"]
    w.text(f"journals.{ext}", journals_to_text(corpus, ext))
    w.text(f"documents.{ext}", documents_to_text(corpus, ext))
    w.text("synth_config.json", config.dump())
    w.manifest(cfg, {"seed": config.seed})
    print(f"{len(corpus.journals)} journals, {len(corpus.documents)} documents (seed {config.seed})")
    return EXIT_OK


def cmd_consistency(cfg: dict) -> int:
    corpus = None
    if cfg.get("journals") or cfg.get("documents"):
        corpus = _load(cfg)
    results = run_consistency(corpus, cfg.get("year"))
    w = _Writer(cfg["out"])
    w.json("consistency.json", [r.to_dict() for r in results])
    w.text("consistency.md", "\n".join(f"- {r.line()}" for r in results) + "\n")
    w.manifest(cfg)
    for r in results:
        print(r.line())
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "compute": cmd_compute,
    "compare": cmd_compare,
    "report": cmd_report,
    "synth": cmd_synth,
    "consistency": cmd_consistency,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve(args)
        return COMMANDS[cfg["command"]](cfg)
    except (UsageError, UniverseError, SynthConfigError, ValueError) as exc:
        if isinstance(exc, (CorpusError, ReportError, StatsError)):
            print(f"data error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
