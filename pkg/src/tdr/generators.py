"""Seeded synthetic graph generators (Erdos-Renyi and preferential attachment).

Both produce exactly ``round(n * d)`` distinct edges without self-loops and
assign each edge a label drawn uniformly from ``label_count`` labels.
"""

from __future__ import annotations

import random

import numpy as np

from .errors import InvalidParam
from .graph import Graph


def _label_names(label_count: int) -> tuple[str, ...]:
    return tuple(f"l{i}" for i in range(label_count))


def _check(n: int, d: float, label_count: int) -> int:
    if n < 1:
        raise InvalidParam("n must be >= 1")
    if d < 0:
        raise InvalidParam("d must be >= 0")
    if label_count < 1:
        raise InvalidParam("label_count must be >= 1")
    m = int(round(n * d))
    if m > n * (n - 1) * label_count:
        raise InvalidParam(f"{m} edges exceed the {n * (n - 1) * label_count} possible distinct edges")
    return m


def generate_er(n: int, d: float, label_count: int, seed: int) -> Graph:
    """Uniform random digraph: endpoints and labels drawn i.i.d.; rejects redrawn."""
    m = _check(n, d, label_count)
    rng = np.random.default_rng(seed)
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < m:
        batch = max(1024, int((m - len(keys)) * 1.1))
        s = rng.integers(0, n, batch, dtype=np.int64)
        t = rng.integers(0, n, batch, dtype=np.int64)
        l = rng.integers(0, label_count, batch, dtype=np.int64)
        ok = s != t
        cand = (s[ok] * n + t[ok]) * label_count + l[ok]
        merged = np.concatenate([keys, cand])
        _, first = np.unique(merged, return_index=True)
        keys = merged[np.sort(first)][:m]
    l = keys % label_count
    st = keys // label_count
    return Graph(n, st // n, st % n, l, _label_names(label_count))


def generate_pa(n: int, d: float, label_count: int, seed: int) -> Graph:
    """Growing preferential-attachment digraph.

    Vertices arrive one at a time; edges are spread evenly over arrivals 1..n-1.
    Each edge picks its source uniformly among vertices present so far and its
    target with probability proportional to ``in_degree + 1``.
    """
    m = _check(n, d, label_count)
    rng = random.Random(seed)
    # urn holds each vertex once plus once per received edge
    urn: list[int] = [0]
    seen: set[tuple[int, int, int]] = set()
    edges: list[tuple[int, int, int]] = []
    pending = 0
    for t in range(1, n):
        urn.append(t)
        pending += (t * m) // (n - 1) - ((t - 1) * m) // (n - 1)
        capacity = (t + 1) * t * label_count - len(edges)
        quota = min(pending, capacity)
        pending -= quota
        randrange, choice = rng.randrange, rng.choice
        while quota:
            s = randrange(t + 1)
            tgt = choice(urn)
            if s == tgt:
                continue
            e = (s, tgt, randrange(label_count))
            if e in seen:
                continue
            seen.add(e)
            edges.append(e)
            urn.append(tgt)
            quota -= 1
    arr = np.array(edges, dtype=np.int64).reshape(-1, 3)
    return Graph(n, arr[:, 0], arr[:, 1], arr[:, 2], _label_names(label_count))
