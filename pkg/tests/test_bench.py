import csv
import io

import pytest

from tdr.bench import CSV_HEADER, BenchReport, QuerySpec, generate_workload, run_bench
from tdr.errors import InvalidParam, MismatchError, QuotaUnmet
from tdr.generators import generate_pa
from tdr.index import build_index
from tdr.oracle import oracle_lcr, oracle_pcr
from tdr.pattern import Label

from conftest import labeled


@pytest.fixture(scope="module")
def pa():
    g = generate_pa(300, 3, 6, 4)
    return g, build_index(g)


def test_toy_and_workload(toy):
    w = generate_workload(toy, "AND", 2, 10, 10, seed=1)
    assert len(w) == 20
    assert sum(q.ground_truth for q in w) == 10
    for q in w:
        assert q.kind == "AND"
        assert oracle_pcr(toy, q.source, q.target, q.pattern) == q.ground_truth


def test_seed_determinism(pa):
    g, _ = pa
    assert generate_workload(g, "OR", 2, 15, 15, seed=3) == generate_workload(g, "OR", 2, 15, 15, seed=3)
    assert generate_workload(g, "OR", 2, 15, 15, seed=3) != generate_workload(g, "OR", 2, 15, 15, seed=4)


@pytest.mark.parametrize("kind", ["AND", "OR", "NOT", "LCR"])
def test_every_kind_is_oracle_labeled(pa, kind):
    g, _ = pa
    for q in generate_workload(g, kind, 3, 8, 8, seed=2):
        if kind == "LCR":
            assert len(q.allowed) == 3
            assert oracle_lcr(g, q.source, q.target, q.allowed) == q.ground_truth
        assert oracle_pcr(g, q.source, q.target, q.pattern) == q.ground_truth


def test_not_true_quota_unmet_without_label_free_paths():
    # every edge carries one of the two labels, so NOT over both holds only
    # on the empty path: about 1 sample in 200 has u == v
    g = labeled(200, [(i, (i + 1) % 200, "ab"[i % 2]) for i in range(200)])
    with pytest.raises(QuotaUnmet) as exc:
        generate_workload(g, "NOT", 2, 50, 0, seed=0, max_attempts=2000)
    assert exc.value.kind == "NOT" and exc.value.polarity is True


def test_workload_validation(toy):
    with pytest.raises(InvalidParam):
        generate_workload(toy, "XOR", 1, 1, 1)
    with pytest.raises(InvalidParam):
        generate_workload(toy, "AND", 9, 1, 1)
    with pytest.raises(InvalidParam):
        generate_workload(toy, "AND", 1, -1, 1)


def test_empty_workload(toy):
    report = run_bench(toy, build_index(toy), [], 1)
    assert report.rows == []
    assert report.to_csv().splitlines() == [",".join(CSV_HEADER)]


def test_rows_per_kind_and_polarity(pa):
    g, index = pa
    w = generate_workload(g, "AND", 2, 5, 7, seed=1) + generate_workload(g, "NOT", 2, 4, 0, seed=1)
    report = run_bench(g, index, w, 1, dataset="pa")
    keys = [(r.kind, r.polarity, r.count) for r in report.rows]
    assert keys == [("AND", True, 5), ("AND", False, 7), ("NOT", True, 4)]
    for r in report.rows:
        assert r.p50_us <= r.p95_us <= r.max_us
        assert r.mean_us * r.count <= r.total_us * (1 + 1e-9)
    assert report.answers["tdr"] == [q.ground_truth for q in w]


def test_comparative_mode_pairs_rows(pa):
    g, index = pa
    w = generate_workload(g, "OR", 2, 6, 6, seed=9)
    report = run_bench(g, index, w, 0, dataset="pa", baseline="oracle")
    rows = list(csv.DictReader(io.StringIO(report.to_csv())))
    assert [r["dataset"] for r in rows] == ["pa", "pa", "pa:oracle", "pa:oracle"]
    assert [(r["kind"], r["polarity"], r["count"]) for r in rows[:2]] == [
        (r["kind"], r["polarity"], r["count"]) for r in rows[2:]
    ]
    assert report.answers["tdr"] == report.answers["oracle"]
    assert "p95_us" in report.to_table()


def test_answer_determinism_and_threads(pa):
    g, index = pa
    w = generate_workload(g, "LCR", 3, 10, 10, seed=5)
    a = run_bench(g, index, w, 0).answers["tdr"]
    b = run_bench(g, index, w, 0, threads=4).answers["tdr"]
    assert a == b == [q.ground_truth for q in w]


def test_mismatch_aborts(toy):
    index = build_index(toy)
    wrong = QuerySpec(0, 4, Label("a"), "AND", False)
    with pytest.raises(MismatchError) as exc:
        run_bench(toy, index, [wrong], 0)
    assert len(exc.value.offenders) == 1


def test_merge_is_associative(pa):
    g, index = pa
    parts = [run_bench(g, index, generate_workload(g, "AND", 2, 3, 3, seed=s), 0) for s in range(3)]
    left = parts[0].merge(parts[1]).merge(parts[2])
    right = parts[0].merge(parts[1].merge(parts[2]))
    assert left.to_csv() == right.to_csv()
    assert sum(r.count for r in left.rows) == 18


def test_report_echoes_config(pa):
    g, index = pa
    report = run_bench(g, index, [], seed=42)
    assert isinstance(report, BenchReport)
    assert report.params == index.params and report.seed == 42
    assert report.index_bytes == index.index_bytes
