import csv
import io
import math
import random

from zkcec.bench import COLUMNS, BenchRow, corpus_pairs, run_bench, structure_report, to_csv, to_text
from zkcec.proof import factorial_bound

from conftest import CORPUS


def test_corpus_listing():
    names = [n for n, *_ in corpus_pairs(CORPUS)]
    assert {"and2", "adder4", "parity8", "mul3", "sbox4", "bad_adder2"} <= set(names)
    large = corpus_pairs(CORPUS / "large")
    assert [n for n, *_ in large] == ["aes_sbox"]


def test_small_bench_rows():
    rows = run_bench(CORPUS, names=["and2", "adder2", "cmp2", "dec3", "adder3"])
    assert len(rows) == 5
    for r in rows:
        assert r.status == "ok", r.status
        assert r.R_prime <= r.R and r.speedup > 0
        assert r.W >= 2 and r.t_total > 0


def test_inequivalent_rows_are_recorded():
    rows = run_bench(CORPUS, names=["bad_and_or", "and2"])
    st = {r.circuit: r.status for r in rows}
    assert st == {"and2": "ok", "bad_and_or": "not-equivalent"}


def test_large_pair_refused_with_estimate():
    (row,) = run_bench(CORPUS / "large")
    assert row.status.startswith("refused") and "GB" in row.status
    assert row.R is None and row.lits > 0
    assert row.extra["tape_lower_bound"] == 2 * row.extra["inputs"] ** 2


def test_tape_limit_refusal():
    (row,) = run_bench(CORPUS, names=["adder2"], max_tape=10)
    assert row.status.startswith("refused") and row.R is not None


def test_csv_shape():
    rows = [BenchRow("x", 1, 2, 3, 4, 0.5, 0.25, 0.25, 1.0, 2, 0.5), BenchRow("y", status="bad")]
    data = list(csv.reader(io.StringIO(to_csv(rows))))
    assert data[0] == COLUMNS and len(COLUMNS) == 12
    assert data[1][-1] == "2.000000" and data[2][1:] == [""] * 11
    assert "bad" in to_text(rows)


def test_structure_report():
    rep = structure_report((1, 1, 2, 5))
    assert (rep["N"], rep["factorial"]) == (210, 6)
    assert rep["ratio"] == 35
    one = structure_report((7,))
    assert one["N"] == 1 and one["factorial"] == 1


def test_structure_report_huge():
    rng = random.Random(5)
    n = [rng.randint(1, 9) for _ in range(400)]
    rep = structure_report(n)
    assert rep["log2_ratio"] >= 0
    assert rep["N"] >= factorial_bound(len(n))
    assert math.isfinite(rep["log2_ratio"])
