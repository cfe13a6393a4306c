import pytest

from tdr.graph import Graph

TOY_EDGES = [(0, 1, "a"), (0, 2, "b"), (1, 3, "d"), (2, 3, "c"), (3, 4, "b"), (2, 5, "e"), (5, 4, "a")]
CYCLIC_EDGES = [(0, 1, "a"), (1, 2, "b"), (2, 0, "c"), (2, 3, "d")]


def labeled(n, edges, labels=None):
    """Graph from (src, tgt, label-name) triples; labels interned in first-seen order."""
    names = list(labels or [])
    for _, _, l in edges:
        if l not in names:
            names.append(l)
    ids = {name: i for i, name in enumerate(names)}
    return Graph.from_edges(n, [(s, t, ids[l]) for s, t, l in edges], names)


@pytest.fixture
def toy():
    return labeled(6, TOY_EDGES, ["a", "b", "c", "d", "e"])


@pytest.fixture
def cyclic():
    return labeled(4, CYCLIC_EDGES, ["a", "b", "c", "d"])


# -- acceptance summary ---------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
