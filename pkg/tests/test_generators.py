import numpy as np
import pytest

from tdr.errors import InvalidParam
from tdr.generators import generate_er, generate_pa

GENERATORS = [generate_er, generate_pa]


@pytest.mark.parametrize("gen", GENERATORS)
def test_exact_edge_count(gen):
    g = gen(1000, 4, 8, 3)
    assert g.vertex_count == 1000
    assert g.edge_count == 4000


@pytest.mark.parametrize("gen", GENERATORS)
def test_zero_degree(gen):
    g = gen(10, 0, 4, 1)
    assert (g.vertex_count, g.edge_count) == (10, 0)


@pytest.mark.parametrize("gen", GENERATORS)
def test_deterministic(gen):
    assert gen(500, 3, 5, 42) == gen(500, 3, 5, 42)
    assert gen(500, 3, 5, 42) != gen(500, 3, 5, 43)


@pytest.mark.parametrize("gen", GENERATORS)
def test_simple_and_distinct(gen):
    g = gen(300, 4, 3, 9)
    assert not np.any(g.src == g.dst)
    assert len(set(g.edges)) == g.edge_count
    assert set(g.lab.tolist()) == {0, 1, 2}


@pytest.mark.parametrize("gen", GENERATORS)
def test_dense_limit_reachable(gen):
    # every possible (s, t, l) triple
    g = gen(4, 6, 2, 0)
    assert g.edge_count == 4 * 3 * 2


@pytest.mark.parametrize("gen", GENERATORS)
def test_invalid_params(gen):
    with pytest.raises(InvalidParam):
        gen(4, 6.5, 2, 0)
    with pytest.raises(InvalidParam):
        gen(0, 1, 2, 0)
    with pytest.raises(InvalidParam):
        gen(5, -1, 2, 0)
    with pytest.raises(InvalidParam):
        gen(5, 1, 0, 0)


def test_labels_roughly_uniform():
    g = generate_er(2000, 5, 4, 1)
    counts = np.bincount(g.lab, minlength=4)
    assert counts.min() > 0.9 * g.edge_count / 4


def test_pa_out_degree_more_skewed_than_er():
    wins = 0
    for seed in range(20):
        pa = generate_pa(5000, 4, 4, seed)
        er = generate_er(5000, 4, 4, seed)
        wins += int(pa.out_degree.max() > er.out_degree.max())
    assert wins >= 18


def test_pa_in_degree_heavy_tail():
    pa = generate_pa(5000, 4, 4, 0)
    er = generate_er(5000, 4, 4, 0)
    assert pa.in_degree.max() > 3 * er.in_degree.max()
