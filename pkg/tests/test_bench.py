"""Benchmark harness plumbing (timing numbers themselves are not asserted)."""

import pytest

from fuzzkit import corpus
from fuzzkit.bench import (CSV_HEADER, BenchResult, bench_seed, format_table,
                           make_inputs, run_case, run_threaded, to_csv)


def test_make_inputs_is_seed_deterministic():
    fis = corpus.load_system("tipper")
    a = make_inputs(fis, 50, seed=7)
    b = make_inputs(fis, 50, seed=7)
    c = make_inputs(fis, 50, seed=8)
    assert a == b
    assert a != c
    assert len(a) == 50
    for row in a:
        assert set(row) == {"service", "food"}
        for name, v in row.items():
            dom = fis.inputs[name].domain
            assert dom.low <= v <= dom.high


def test_bench_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("FUZZKIT_SEED", "1234")
    assert bench_seed(None) == 1234
    assert bench_seed(9) == 9
    monkeypatch.delenv("FUZZKIT_SEED")
    assert isinstance(bench_seed(None), int)


def test_csv_shape():
    assert CSV_HEADER == "case,impl,median_ns,p99_ns,iterations"
    rows = [BenchResult("tipper", "interp", 1500, 2000, 64)]
    csv = to_csv(rows)
    lines = csv.strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "tipper,interp,1500,2000,64"


def test_format_table_alignment():
    rows = [BenchResult("tipper", "interp", 1500, 2000, 64),
            BenchResult("tipper", "codegen", 900, 1100, 128)]
    table = format_table(rows)
    lines = table.strip().splitlines()
    assert lines[0].split() == ["case", "impl", "median", "p99", "iters"]
    assert set(lines[1]) == {"-"}
    assert len(lines) == 4


def test_run_case_smoke():
    results = run_case("tipper", iterations=30)
    assert [r.impl for r in results] == ["interp", "codegen"]
    for r in results:
        assert r.case == "tipper"
        assert r.median_ns > 0
        assert r.p99_ns >= r.median_ns
        assert r.iterations >= 30


def test_run_case_without_codegen():
    results = run_case("denoise", iterations=10, with_codegen=False)
    assert [r.impl for r in results] == ["interp"]


def test_run_case_rejects_unknown():
    with pytest.raises(KeyError):
        run_case("nope", iterations=1)


def test_run_threaded_smoke():
    count, elapsed = run_threaded("tipper", threads=2, iterations=40)
    assert count >= 40
    assert elapsed > 0.0
