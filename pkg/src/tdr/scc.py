"""Strongly connected components and the condensation DAG.

A single iterative DFS computes Tarjan's SCCs together with push/pop
timestamps. Roots (vertices without predecessors) are started first, then any
still-unvisited vertex in id order, so the same traversal serves both the
condensation and the DFS interval labeling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class DfsResult:
    push: np.ndarray
    pop: np.ndarray
    finish_order: np.ndarray  # vertices in the order they were popped
    scc_of: np.ndarray
    scc_count: int


@dataclass(frozen=True, eq=False)
class Condensation:
    """SCC decomposition of a graph.

    SCC ids are assigned in Tarjan completion order, so every condensation
    edge ``C -> C'`` satisfies ``C' < C``. ``topo_order`` lists SCC ids in
    reverse-topological order (sinks first); ``dag_ptr``/``dag_adj`` form the
    CSR adjacency of the condensation with duplicate edges removed.
    """

    scc_of: np.ndarray
    scc_count: int
    dag_ptr: np.ndarray
    dag_adj: np.ndarray
    topo_order: np.ndarray = field(repr=False)

    def successors(self, c: int) -> np.ndarray:
        return self.dag_adj[self.dag_ptr[c] : self.dag_ptr[c + 1]]

    def members(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.scc_count)]
        for v, c in enumerate(self.scc_of.tolist()):
            groups[c].append(v)
        return groups


def dfs_scc(graph: Graph) -> DfsResult:
    """Iterative Tarjan DFS that also records push/pop times (one shared clock)."""
    n = graph.vertex_count
    ptr, tgt, _ = graph.adjacency_lists
    indeg = graph.in_degree.tolist()

    index = [-1] * n
    low = [0] * n
    onstack = [False] * n
    scc_of = [-1] * n
    push = [0] * n
    pop = [0] * n
    finish: list[int] = []
    stack: list[int] = []
    clock = 0
    counter = 0
    n_scc = 0

    starts = [u for u in range(n) if indeg[u] == 0]
    starts.extend(range(n))
    for r in starts:
        if index[r] != -1:
            continue
        index[r] = low[r] = counter
        counter += 1
        push[r] = clock
        clock += 1
        stack.append(r)
        onstack[r] = True
        call = [(r, ptr[r])]
        while call:
            u, i = call[-1]
            end = ptr[u + 1]
            while i < end:
                w = tgt[i]
                i += 1
                if index[w] == -1:
                    call[-1] = (u, i)
                    index[w] = low[w] = counter
                    counter += 1
                    push[w] = clock
                    clock += 1
                    stack.append(w)
                    onstack[w] = True
                    call.append((w, ptr[w]))
                    break
                if onstack[w] and index[w] < low[u]:
                    low[u] = index[w]
            else:
                call.pop()
                pop[u] = clock
                clock += 1
                finish.append(u)
                if low[u] == index[u]:
                    while True:
                        w = stack.pop()
                        onstack[w] = False
                        scc_of[w] = n_scc
                        if w == u:
                            break
                    n_scc += 1
                if call:
                    p = call[-1][0]
                    if low[u] < low[p]:
                        low[p] = low[u]

    return DfsResult(
        np.array(push, dtype=np.int64),
        np.array(pop, dtype=np.int64),
        np.array(finish, dtype=np.int64),
        np.array(scc_of, dtype=np.int32),
        n_scc,
    )


def condense(graph: Graph, scc_of: np.ndarray, scc_count: int) -> Condensation:
    cs = scc_of[graph.src].astype(np.int64)
    cd = scc_of[graph.dst].astype(np.int64)
    keep = cs != cd
    pairs = np.unique(cs[keep] * max(scc_count, 1) + cd[keep])
    src = pairs // max(scc_count, 1)
    dst = pairs % max(scc_count, 1)
    ptr = np.zeros(scc_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=scc_count), out=ptr[1:])
    return Condensation(
        scc_of=scc_of,
        scc_count=scc_count,
        dag_ptr=ptr,
        dag_adj=dst.astype(np.int32),
        topo_order=np.arange(scc_count, dtype=np.int32),
    )


def compute_sccs(graph: Graph) -> Condensation:
    """Tarjan SCC decomposition plus the condensation DAG."""
    res = dfs_scc(graph)
    return condense(graph, res.scc_of, res.scc_count)
