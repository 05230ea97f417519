"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Runs under pytest (lines are repeated in the terminal summary) or directly:
``python -m tests.test_acceptance``.
"""

from __future__ import annotations

import math
import random
import tempfile
import time
from pathlib import Path

import pytest

from snipkit.cli import main as cli_main
from snipkit.consistency import add_citation_experiment, merge_experiment
from snipkit.indicators import compute_indicator_table
from snipkit.stats import harmonic_mean, mean, median, pearson, percentile, spearman, diff_pct
from snipkit.synth import FieldSpec, SynthConfig, build_add_citation_fixture, build_merge_fixture, generate_corpus
from snipkit.universes import UniverseSpec, citing_universe

from .conftest import ACCEPTANCE_LINES, two_field_config, universe_fixture

Y = 2010


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)


# --- 1 -------------------------------------------------------------------


def check_1():
    t0 = time.perf_counter()
    corpus, exp = build_merge_fixture(Y)
    orig = merge_experiment(corpus, "A", "B", UniverseSpec(Y, "original"))
    mod = merge_experiment(corpus, "A", "B", UniverseSpec(Y, "modified"))
    elapsed = time.perf_counter() - t0
    v = orig.values
    ok = (
        math.isclose(v["ratio_1"], 0.20, abs_tol=1e-12)
        and math.isclose(v["ratio_2"], 0.20, abs_tol=1e-12)
        and math.isclose(v["ratio_merged"], 0.18, abs_tol=1e-12)
        and abs(v["merged_over_constituent"] - 0.90) <= 0.005
        and mod.status == "pass"
        and elapsed < 1.0
    )
    detail = (
        f"original ratios {v['ratio_1']:.4f}/{v['ratio_2']:.4f} -> merged {v['ratio_merged']:.4f}, "
        f"merged/constituent {v['merged_over_constituent']:.4f}; modified merged {mod.values['snip_merged']:.6f} "
        f"in [{min(mod.values['snip_1'], mod.values['snip_2']):.6f}, {max(mod.values['snip_1'], mod.values['snip_2']):.6f}]; "
        f"{elapsed:.3f}s"
    )
    return ok, detail


# --- 2 -------------------------------------------------------------------


def check_2():
    t0 = time.perf_counter()
    corpus, p = build_add_citation_fixture(Y)
    o = add_citation_experiment(corpus, p["citing_journal"], p["target"], p["active_refs"], UniverseSpec(Y, "original"))
    m = add_citation_experiment(corpus, p["citing_journal"], p["target"], p["active_refs"], UniverseSpec(Y, "modified"))
    elapsed = time.perf_counter() - t0
    do, dm = o.values["delta"], m.values["delta"]
    ok = do < -1e-6 and dm > 1e-9 and elapsed < 1.0
    return ok, f"original delta {do:+.6f}, modified delta {dm:+.6f}; {elapsed:.3f}s"


# --- 3 -------------------------------------------------------------------


def check_3():
    checked = 0
    failures = []
    for seed in range(1, 6):
        for n_journals in (7, 9, 11):
            cfg = SynthConfig(seed, (2001, 2010), (FieldSpec("A", n_journals, 6, 8.0 + seed),))
            table = compute_indicator_table(generate_corpus(cfg), UniverseSpec(Y, "original"))
            defined = [r for r in table.rows.values() if r.cp is not None]
            if len(defined) % 2 == 0:
                continue
            med = median([r.cp for r in defined])
            # the journal at the median position; cp ties keep input order
            ordered = sorted(defined, key=lambda r: r.cp)
            mid = ordered[len(ordered) // 2]
            others = [r for r in defined if r is not mid]
            above = sum(1 for r in others if r.snip > r.rip)
            # tie-robust form: snip exceeds rip exactly when cp is below the median
            sides = all((r.snip > r.rip) == (r.cp < med) and (r.snip < r.rip) == (r.cp > med) for r in defined)
            if abs(mid.snip - mid.rip) > 1e-12 or above != len(others) // 2 or not sides:
                failures.append((seed, n_journals))
            checked += 1
    ok = checked > 0 and not failures
    return ok, f"{checked} odd-count tables checked, failures {failures}"


# --- 4 and 5 share one 10k-document corpus --------------------------------

_CLOSED = {}


def closed_corpus():
    if "c" not in _CLOSED:
        t0 = time.perf_counter()
        _CLOSED["c"] = generate_corpus(two_field_config(seed=7))
        _CLOSED["t"] = time.perf_counter() - t0
    return _CLOSED["c"], _CLOSED["t"]


def check_4():
    corpus, gen_time = closed_corpus()
    t0 = time.perf_counter()
    default = compute_indicator_table(corpus, UniverseSpec(Y, "modified")).weighted_mean("snip")
    exact = compute_indicator_table(corpus, UniverseSpec(Y, "modified", normalization="exact_mean_one")).weighted_mean("snip")
    elapsed = gen_time + time.perf_counter() - t0
    ok = len(corpus.documents) == 10_000 and 0.95 <= default <= 1.05 and abs(exact - 1.0) <= 1e-12 and elapsed < 10.0
    return ok, (
        f"{len(corpus.documents)} documents; weighted mean modified snip {default:.4f} (default), "
        f"{exact!r} (exact_mean_one); {elapsed:.2f}s"
    )


def check_5():
    corpus, _ = closed_corpus()
    parts = []
    ok = True
    for variant in ("original", "modified"):
        table = compute_indicator_table(corpus, UniverseSpec(Y, variant))

        def field_mean(attr, prefix):
            rows = [r for j, r in table.rows.items() if j.startswith(prefix) and getattr(r, attr) is not None]
            return math.fsum(getattr(r, attr) * r.pub_count for r in rows) / sum(r.pub_count for r in rows)

        rip_ratio = field_mean("rip", "A-") / field_mean("rip", "B-")
        snip_ratio = field_mean("snip", "A-") / field_mean("snip", "B-")
        ok = ok and 2.5 <= rip_ratio <= 3.5 and 0.9 <= snip_ratio <= 1.1
        parts.append(f"{variant}: RIP ratio {rip_ratio:.3f}, SNIP ratio {snip_ratio:.3f}")
    return ok, "; ".join(parts)


# --- 6 -------------------------------------------------------------------


def check_6():
    a = round(diff_pct(4_259_574, 4_460_165), 1)
    c = round(diff_pct(8_371_042, 9_024_382), 1)
    return a == -4.5 and c == -7.2, f"articles {a}%, citations {c}%"


# --- 7 -------------------------------------------------------------------


def _oracle_pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return num / math.sqrt(sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y))


def _oracle_ranks(xs):
    return [1 + sum(v < x for v in xs) + (sum(v == x for v in xs) - 1) / 2 for x in xs]


def _oracle_percentile(xs, p):
    s = sorted(xs)
    r = p * (len(s) - 1)
    lo = int(r)
    return s[lo] if lo == len(s) - 1 else s[lo] + (s[lo + 1] - s[lo]) * (r - lo)


def check_7():
    rng = random.Random(2024)
    worst = 0.0
    hm_ok = True
    n_cases = 0
    for _ in range(1000):
        n = rng.randint(2, 40)
        if rng.random() < 0.3:
            x = [float(rng.randint(0, 6)) for _ in range(n)]
        else:
            x = [rng.uniform(-50, 50) for _ in range(n)]
        y = [v * rng.uniform(-1, 1) + rng.gauss(0, 10) for v in x]
        s = sorted(x)
        med = s[n // 2] if n % 2 else (s[n // 2 - 1] + s[n // 2]) / 2
        p = rng.random()
        errs = [abs(median(x) - med), abs(percentile(x, p) - _oracle_percentile(x, p))]
        if len(set(x)) > 1 and len(set(y)) > 1:
            errs.append(abs(pearson(x, y) - _oracle_pearson(x, y)))
            errs.append(abs(spearman(x, y) - _oracle_pearson(_oracle_ranks(x), _oracle_ranks(y))))
        worst = max(worst, *errs)
        pos = [abs(v) + 0.01 for v in x]
        hm_ok = hm_ok and harmonic_mean(pos) <= mean(pos) * (1 + 1e-12)
        n_cases += 1
    ok = worst <= 1e-12 and hm_ok
    return ok, f"{n_cases} random inputs, max |error| {worst:.2e}, harmonic <= arithmetic: {hm_ok}"


# --- 8 -------------------------------------------------------------------


def _tree(d: Path) -> dict:
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def check_8():
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        cfg = tmp / "synth.yaml"
        cfg.write_text(two_field_config(seed=3, n_journals=6, pubs=10, resolved=0.9, within=0.9).dump())
        synth = []
        for i, threads in enumerate(("1", "4", "1")):
            out = tmp / f"synth{i}"
            assert cli_main(["synth", str(cfg), "--threads", threads, "--out", str(out)]) == 0
            synth.append(_tree(out))
        corpus = tmp / "synth0"
        compute = []
        for variant in ("original", "modified"):
            for i, threads in enumerate(("1", "4", "1")):
                out = tmp / f"compute_{variant}{i}"
                argv = ["compute", "--journals", str(corpus / "journals.csv"), "--documents", str(corpus / "documents.csv"),
                        "--year", str(Y), "--variant", variant, "--threads", threads, "--out", str(out)]
                assert cli_main(argv) == 0
                compute.append((variant, _tree(out)))
    synth_ok = synth[0] == synth[1] == synth[2]
    compute_ok = all(
        trees[0] == trees[1] == trees[2]
        for trees in ([t for v, t in compute if v == variant] for variant in ("original", "modified"))
    )
    n_files = sum(len(t) for _, t in compute) + sum(len(t) for t in synth)
    return synth_ok and compute_ok, f"synth identical: {synth_ok}, compute identical: {compute_ok} ({n_files} files, threads 1/4, repeated runs)"


# --- 9 -------------------------------------------------------------------


def check_9():
    corpus = universe_fixture(Y)
    universe, rep = citing_universe(corpus, UniverseSpec(Y, "modified"))
    ok = (
        rep.excluded["a"] == ["TR"]
        and rep.excluded["b"] == ["GAP"]
        and rep.excluded["c"] == ["LOW"]
        and "EDGE" in universe
        and "T" in universe
    )
    return ok, (
        f"set a {rep.excluded['a']}, set b {rep.excluded['b']}, set c (15% share) {rep.excluded['c']}, "
        f"20% share retained: {'EDGE' in universe}"
    )


CHECKS = {
    1: ("merge anomaly", check_1),
    2: ("add-citation pair", check_2),
    3: ("median identity", check_3),
    4: ("closed-corpus mean", check_4),
    5: ("field-bias removal", check_5),
    6: ("DIFF arithmetic", check_6),
    7: ("statistics oracles", check_7),
    8: ("determinism", check_8),
    9: ("universe filters", check_9),
}


@pytest.mark.parametrize("n", sorted(CHECKS))
def test_criterion(n):
    title, fn = CHECKS[n]
    ok, detail = fn()
    report(n, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for n, (title, fn) in CHECKS.items():
        report(n, title, *fn())
