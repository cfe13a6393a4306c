import csv

import pytest

from tdr.cli import main
from tdr.graph import load_edge_list
from tdr.serialize import load_index

TOY = "0 1 a\n0 2 b\n1 3 d\n2 3 c\n3 4 b\n2 5 e\n5 4 a\n"


@pytest.fixture
def toy_files(tmp_path):
    g = tmp_path / "toy.txt"
    g.write_text(TOY)
    idx = tmp_path / "toy.idx"
    assert main(["build", "--graph", str(g), "--out", str(idx)]) == 0
    return g, idx


def query(files, source, target, pattern, *extra):
    g, idx = files
    return main(["query", "--graph", str(g), "--index", str(idx), "--source", source, "--target", target,
                 "--pattern", pattern, *extra])


def test_query_reachable(toy_files, capsys):
    assert query(toy_files, "0", "4", "b AND d") == 0
    assert capsys.readouterr().out.strip() == "reachable"


def test_query_unreachable(toy_files, capsys):
    assert query(toy_files, "0", "4", "NONE_OF{b}") == 0
    assert capsys.readouterr().out.strip() == "unreachable"


def test_query_stats_and_unknown_label_warning(toy_files, capsys):
    assert query(toy_files, "0", "4", "a AND NOT zz", "--stats") == 0
    out = capsys.readouterr()
    assert out.out.strip() == "reachable"
    assert "zz" in out.err and "visited=" in out.err


def test_query_syntax_error_is_usage_error(toy_files, capsys):
    assert query(toy_files, "0", "4", "a ANDD b") == 2
    assert "offset" in capsys.readouterr().err


def test_unknown_vertex_is_runtime_error(toy_files, capsys):
    assert query(toy_files, "0", "99", "a") == 1
    assert "99" in capsys.readouterr().err


def test_usage_errors(tmp_path, capsys):
    assert main([]) == 2
    assert main(["frob"]) == 2
    assert main(["gen", "--model", "xx", "--n", "5", "--d", "1", "--labels", "2", "--out", "x"]) == 2
    assert main(["gen", "--model", "er", "--n", "0", "--d", "1", "--labels", "2", "--out", "x"]) == 2
    assert main(["verify", "--bogus"]) == 2
    # invalid index params are rejected before the graph file is touched
    assert main(["build", "--graph", str(tmp_path / "missing"), "--out", "x", "--k", "0"]) == 2
    capsys.readouterr()


def test_missing_file_is_runtime_error(tmp_path, capsys):
    assert main(["build", "--graph", str(tmp_path / "missing"), "--out", str(tmp_path / "i")]) == 1
    assert "error" in capsys.readouterr().err


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        assert main(["gen", "--model", "pa", "--n", "200", "--d", "3", "--labels", "4", "--seed", "5",
                     "--out", str(path)]) == 0
    assert a.read_text() == b.read_text()
    with open(a) as fh:
        assert load_edge_list(fh).edge_count == 600


def test_seed_env_fallback(tmp_path, monkeypatch):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    args = ["gen", "--model", "er", "--n", "50", "--d", "2", "--labels", "3", "--out"]
    monkeypatch.setenv("TDR_SEED", "17")
    assert main(args + [str(a)]) == 0
    assert main(args + [str(b), "--seed", "17"]) == 0
    assert a.read_text() == b.read_text()
    monkeypatch.setenv("TDR_SEED", "18")
    assert main(args + [str(c)]) == 0
    assert a.read_text() != c.read_text()
    monkeypatch.setenv("TDR_SEED", "nope")
    assert main(args + [str(c)]) == 2


def test_build_params_recorded(tmp_path, toy_files):
    g, _ = toy_files
    idx = tmp_path / "k3.idx"
    assert main(["build", "--graph", str(g), "--out", str(idx), "--k", "3", "--group-size", "1",
                 "--vertex-bits", "16", "--seed", "4"]) == 0
    params = load_index(idx).params
    assert (params.k, params.group_size, params.vertex_bits, params.seeds[0]) == (3, 1, 16, 4)


def test_bench_writes_csv(tmp_path, capsys):
    g, idx, out = tmp_path / "g.txt", tmp_path / "g.idx", tmp_path / "r.csv"
    assert main(["gen", "--model", "pa", "--n", "300", "--d", "3", "--labels", "6", "--seed", "1",
                 "--out", str(g)]) == 0
    assert main(["build", "--graph", str(g), "--out", str(idx)]) == 0
    assert main(["bench", "--graph", str(g), "--index", str(idx), "--kind", "and", "--labels-per-query", "2",
                 "--true", "5", "--false", "5", "--seed", "2", "--baseline", "oracle", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == ("dataset", "kind", "polarity", "count", "total_us", "mean_us", "p50_us", "p95_us")
    assert [r[0] for r in rows[1:]] == ["g.txt", "g.txt", "g.txt:oracle", "g.txt:oracle"]
    assert "p95_us" in capsys.readouterr().out


def test_bench_rejects_too_many_labels(toy_files):
    g, idx = toy_files
    assert main(["bench", "--graph", str(g), "--index", str(idx), "--kind", "and", "--labels-per-query", "9",
                 "--true", "1", "--false", "1", "--out", "-"]) == 2


def test_verify_sweep(capsys):
    assert main(["verify", "--n-graphs", "50", "--n-queries", "100", "--seed", "7"]) == 0
    assert capsys.readouterr().out.startswith("mismatches: 0 of 5000")
