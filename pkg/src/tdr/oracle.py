"""Index-free exact answers, used as ground truth and as the baseline engine.

``oracle_clause`` runs a breadth-first search over product states
``(vertex, subset of required labels collected so far)``, never crossing an
excluded label. The frontier is expanded level by level with numpy.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

import numpy as np

from .errors import TooManyRequiredLabels
from .graph import Graph
from .pattern import ClauseSet, Pattern, bind, normalize, parse

MAX_REQUIRED = 30
_DENSE_LIMIT = 1 << 26


def oracle_clause(graph: Graph, u: int, v: int, required: Iterable[int], excluded: Iterable[int] = ()) -> bool:
    """Is there a u->v path whose label set contains ``required`` and avoids ``excluded``?

    The empty path (u == v) counts only when nothing is required.
    """
    n_labels = graph.label_count
    req = sorted(set(required))
    if len(req) > MAX_REQUIRED:
        raise TooManyRequiredLabels(f"{len(req)} required labels (max {MAX_REQUIRED})")
    if any(l >= n_labels for l in req):
        return False  # no edge carries an unknown label
    if u == v and not req:
        return True
    r = len(req)
    full = (1 << r) - 1

    bit = np.zeros(n_labels, dtype=np.int64)
    for i, l in enumerate(req):
        bit[l] = 1 << i
    blocked = np.zeros(n_labels, dtype=bool)
    for l in excluded:
        if 0 <= l < n_labels:
            blocked[l] = True
    ptr, tgt, lab = graph.out_ptr, graph.out_tgt.astype(np.int64), graph.out_lab
    slot_ok = ~blocked[lab]
    slot_bit = bit[lab]

    n_states = graph.vertex_count << r
    dense = n_states <= _DENSE_LIMIT
    seen = np.zeros(n_states, dtype=bool) if dense else set()
    start = u << r
    goal = (v << r) | full
    if dense:
        seen[start] = True
    else:
        seen.add(start)
    frontier = np.array([start], dtype=np.int64)
    while len(frontier):
        verts = frontier >> r
        masks = frontier & full
        starts = ptr[verts]
        counts = ptr[verts + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        owner = np.repeat(np.arange(len(frontier)), counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        slots = starts[owner] + offsets
        ok = slot_ok[slots]
        slots, owner = slots[ok], owner[ok]
        nxt = np.unique((tgt[slots] << r) | (masks[owner] | slot_bit[slots]))
        if dense:
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            if seen[goal]:
                return True
        else:
            nxt = np.array([s for s in nxt.tolist() if s not in seen], dtype=np.int64)
            seen.update(nxt.tolist())
            if goal in seen:
                return True
        frontier = nxt
    return False


def _clauses(graph: Graph, pattern: Pattern | str | ClauseSet) -> ClauseSet:
    if isinstance(pattern, ClauseSet):
        return pattern
    if isinstance(pattern, str):
        pattern = parse(pattern)
    bound, _ = bind(pattern, graph.label_ids)
    return normalize(bound)


def oracle_pcr(graph: Graph, u: int, v: int, pattern: Pattern | str | ClauseSet) -> bool:
    """Exact pattern-constrained reachability without any index."""
    return any(oracle_clause(graph, u, v, c.required, c.excluded) for c in _clauses(graph, pattern))


def oracle_lcr(graph: Graph, u: int, v: int, allowed: Iterable[int]) -> bool:
    """Plain BFS restricted to edges whose label is in ``allowed``."""
    if u == v:
        return True
    allowed = set(allowed)
    ptr, tgt, lab = graph.adjacency_lists
    seen = {u}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        for i in range(ptr[w], ptr[w + 1]):
            if lab[i] in allowed:
                t = tgt[i]
                if t == v:
                    return True
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    return False


def reachable_from(graph: Graph, u: int) -> set[int]:
    """Vertices reachable from u by any path (u included)."""
    ptr, tgt, _ = graph.adjacency_lists
    seen = {u}
    stack = [u]
    while stack:
        w = stack.pop()
        for t in tgt[ptr[w] : ptr[w + 1]]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


__all__ = ["oracle_clause", "oracle_pcr", "oracle_lcr", "reachable_from"]
