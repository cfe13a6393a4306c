"""Pattern-constrained reachability queries answered with the index.

The search is a depth-first backtracking walk over states
``(vertex, progress)``, where progress is the subset of a clause's required
labels already collected. Edges with excluded labels are never crossed. A
state is expanded only if no earlier state at the same vertex had a superset
of its progress. Pruning comes from three sources:

* ``vertex_reach``: DFS intervals, SCC finish order and the ``n_in``/``n_out``
  masks settle many (m, target) pairs without search;
* group filters: a group of successor slots is skipped when the target is
  absent from its vertex mask, when it lacks a still-missing required label,
  or when every path through it is cut by excluded labels before reaching the
  target (vertical layers, exact label mode only);
* once all required labels are collected and nothing is excluded, the rest is
  plain reachability, so an interval containment answers immediately.

Every filter is conservative: disabling any of them changes visit counts only,
never answers (see ``Filters``).
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, replace
from typing import Iterable

from .errors import InvalidParam, TooManyRequiredLabels
from .graph import Graph
from .index import TdrIndex, group_layout, rows_to_ints
from .pattern import Clause, ClauseSet, Pattern, bind, normalize, parse

MAX_REQUIRED = 30


class Reach3(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Filters:
    """Switches for each pruning rule; all on by default."""

    intervals: bool = True  # interval containment (yes) and SCC finish order (no)
    masks: bool = True  # n_in / n_out subset tests
    topo_group: bool = True  # (a) target must be in the group's vertex mask
    label_group: bool = True  # (b) missing required labels must be in the group's label mask
    frontier: bool = True  # (c) vertical layers cut by excluded labels
    shortcut: bool = True  # pure reachability once the pattern is satisfied

    @classmethod
    def none(cls) -> "Filters":
        return cls(False, False, False, False, False, False)

    def without(self, name: str) -> "Filters":
        return replace(self, **{name: False})


ALL_FILTERS = Filters()
FILTER_NAMES = ("intervals", "masks", "topo_group", "label_group", "frontier", "shortcut")


@dataclass
class SearchStats:
    visited: int = 0
    pruned_groups: int = 0
    elapsed_us: float = 0.0
    clauses: int = 0

    def merge(self, other: "SearchStats") -> None:
        self.visited += other.visited
        self.pruned_groups += other.pruned_groups
        self.elapsed_us += other.elapsed_us
        self.clauses += other.clauses


class QueryEngine:
    """Read-only query state prepared from a graph and its index."""

    def __init__(self, graph: Graph, index: TdrIndex):
        if (graph.vertex_count, graph.edge_count, graph.label_count) != (
            index.vertex_count,
            index.edge_count,
            index.label_count,
        ):
            raise InvalidParam("index was built for a different graph")
        self.graph = graph
        self.index = index
        self.k = index.params.k
        self.exact = index.exact_labels
        self.eps = 1 << index.epsilon_bit
        self.label_count = graph.label_count
        self.label_bit = [1 << int(p) for p in index.label_pos]

        self.push = index.push.tolist()
        self.pop = index.pop.tolist()
        self.scc = index.scc_of.tolist()
        self.fin = index.scc_finish.tolist()
        self.n_in = index.n_in.tolist()
        self.n_out = index.n_out.tolist()
        self.hash = index.hashes.tolist()

        layout = group_layout(graph.out_ptr, index.params)
        self.gptr = index.group_ptr.tolist()
        self.gedge = layout.edge_ptr.tolist()
        self.h_vtx = index.h_vtx.tolist()
        self.h_lab = rows_to_ints(index.h_lab)
        G, k = index.v_vtx.shape if index.group_total else (0, self.k)
        flat_lab = rows_to_ints(index.v_lab.reshape(G * k, -1)) if G else []
        self.v_lab = [flat_lab[i * k : (i + 1) * k] for i in range(G)]
        self.v_vtx = index.v_vtx.tolist()
        _, self.tgt, self.lab = graph.adjacency_lists

    # -- topological reachability ---------------------------------------

    def vertex_reach(self, u: int, v: int, filters: Filters = ALL_FILTERS) -> Reach3:
        if u == v or self.scc[u] == self.scc[v]:
            return Reach3.YES
        if filters.intervals:
            if self.push[u] <= self.push[v] and self.pop[v] <= self.pop[u]:
                return Reach3.YES
            if self.fin[u] < self.fin[v]:
                return Reach3.NO
        if filters.masks:
            if self.n_out[v] & ~self.n_out[u] or self.n_in[u] & ~self.n_in[v]:
                return Reach3.NO
        return Reach3.UNKNOWN

    # -- group pruning --------------------------------------------------

    def _admit(self, i: int, m: int, v: int, need: int, xmask: int, f: Filters) -> bool:
        if f.topo_group and self.n_out[v] & ~self.h_vtx[i]:
            return False
        if need and f.label_group and need & ~self.h_lab[i]:
            return False
        if xmask and f.frontier and self.exact:
            hv = self.hash[v]
            reach = self.hash[m]
            eps = self.eps
            vv = self.v_vtx[i]
            for j, layer in enumerate(self.v_lab[i]):
                cut = layer & ~eps
                if cut and not cut & ~xmask and hv & ~reach:
                    return False
                reach |= vv[j]
        return True

    def group_admissible(
        self,
        m: int,
        i: int,
        clause: Clause,
        collected: Iterable[int],
        v: int,
        filters: Filters = ALL_FILTERS,
    ) -> bool:
        """Can group ``i`` of vertex ``m`` lead to ``v`` satisfying the rest of ``clause``?

        ``i`` is the group's position among m's groups. False means pruned.
        """
        gid = self.gptr[m] + i
        if not self.gptr[m] <= gid < self.gptr[m + 1]:
            raise IndexError(f"vertex {m} has no group {i}")
        missing = set(clause.required) - set(collected)
        return self._admit(gid, m, v, self.index.label_mask(missing), self.index.label_mask(clause.excluded), filters)

    def group_slots(self, m: int) -> list[list[tuple[int, int]]]:
        """Successor (target, label) pairs of each group of m."""
        out = []
        for gid in range(self.gptr[m], self.gptr[m + 1]):
            a, b = self.gedge[gid], self.gedge[gid + 1]
            out.append(list(zip(self.tgt[a:b], self.lab[a:b])))
        return out

    # -- search ----------------------------------------------------------

    def clause_query(
        self,
        u: int,
        v: int,
        clause: Clause,
        filters: Filters = ALL_FILTERS,
        stats: SearchStats | None = None,
    ) -> bool:
        required = clause.required
        if len(required) > MAX_REQUIRED:
            raise TooManyRequiredLabels(f"{len(required)} required labels (max {MAX_REQUIRED})")
        n_labels = self.label_count
        if any(not 0 <= l < n_labels for l in required):
            return False
        if u == v and not required:
            return True

        req = sorted(required)
        full = (1 << len(req)) - 1
        prog = [0] * n_labels
        for i, l in enumerate(req):
            prog[l] = 1 << i
        blocked = [False] * n_labels
        for l in clause.excluded:
            if 0 <= l < n_labels:
                blocked[l] = True
        has_x = any(blocked)
        xmask = self.index.label_mask(clause.excluded)
        label_bit = self.label_bit
        need_cache: dict[int, int] = {}

        gptr, gedge, tgt, lab = self.gptr, self.gedge, self.tgt, self.lab
        admit = self._admit
        reach = self.vertex_reach
        NO, YES = Reach3.NO, Reach3.YES
        shortcut = filters.shortcut

        visited = pruned = 0
        memo: dict[int, list[int]] = {}
        stack = [(u, 0)]
        found = False
        while stack:
            m, p = stack.pop()
            seen = memo.get(m)
            if seen is None:
                memo[m] = [p]
            elif any(not p & ~q for q in seen):
                continue
            else:
                seen.append(p)
            visited += 1
            if m == v and p == full:
                found = True
                break
            r3 = reach(m, v, filters)
            if r3 is NO:
                continue
            if p == full:
                if shortcut and not has_x and r3 is YES:
                    found = True
                    break
                need = 0
            else:
                need = need_cache.get(p)
                if need is None:
                    need = 0
                    for i, l in enumerate(req):
                        if not p >> i & 1:
                            need |= label_bit[l]
                    need_cache[p] = need
            for gid in range(gptr[m], gptr[m + 1]):
                if not admit(gid, m, v, need, xmask, filters):
                    pruned += 1
                    continue
                for s in range(gedge[gid], gedge[gid + 1]):
                    l = lab[s]
                    if blocked[l]:
                        continue
                    t = tgt[s]
                    p2 = p | prog[l]
                    if t == v and p2 == full:  # accept on the edge, no need to pop it
                        visited += 1
                        found = True
                        break
                    seen = memo.get(t)
                    if seen is not None and any(not p2 & ~q for q in seen):
                        continue
                    stack.append((t, p2))
                if found:
                    break
            if found:
                break
        if stats is not None:
            stats.visited += visited
            stats.pruned_groups += pruned
            stats.clauses += 1
        return found

    def clauses_for(self, pattern: Pattern | str | ClauseSet) -> ClauseSet:
        if isinstance(pattern, ClauseSet):
            return pattern
        if isinstance(pattern, str):
            pattern = parse(pattern)
        bound, _ = bind(pattern, self.graph.label_ids)
        return normalize(bound)

    def pcr_query(
        self,
        u: int,
        v: int,
        pattern: Pattern | str | ClauseSet,
        filters: Filters = ALL_FILTERS,
        stats: SearchStats | None = None,
    ) -> bool:
        """OR over the pattern's DNF clauses (short-circuits on the first hit)."""
        t0 = time.perf_counter()
        clauses = self.clauses_for(pattern)
        answer = False
        for clause in clauses:
            if self.clause_query(u, v, clause, filters, stats):
                answer = True
                break
        if stats is not None:
            stats.elapsed_us += (time.perf_counter() - t0) * 1e6
        return answer

    def lcr_query(
        self,
        u: int,
        v: int,
        allowed: Iterable[int],
        filters: Filters = ALL_FILTERS,
        stats: SearchStats | None = None,
    ) -> bool:
        """Path using only labels in ``allowed``."""
        allowed = set(allowed)
        excluded = frozenset(l for l in range(self.label_count) if l not in allowed)
        return self.clause_query(u, v, Clause(frozenset(), excluded), filters, stats)


def engine_for(graph: Graph, index: TdrIndex) -> QueryEngine:
    """Cached engine for (graph, index); the cache lives on the index."""
    cached = index.__dict__.get("_engine")
    if cached is not None and cached.graph is graph:
        return cached
    engine = QueryEngine(graph, index)
    index.__dict__["_engine"] = engine
    return engine


def vertex_reach(index: TdrIndex, u: int, v: int, graph: Graph | None = None, filters: Filters = ALL_FILTERS) -> Reach3:
    """Three-valued topological reachability from the index alone."""
    if u == v or index.scc_of[u] == index.scc_of[v]:
        return Reach3.YES
    if filters.intervals:
        if index.push[u] <= index.push[v] and index.pop[v] <= index.pop[u]:
            return Reach3.YES
        if index.scc_finish[u] < index.scc_finish[v]:
            return Reach3.NO
    if filters.masks:
        nu, nv = int(index.n_out[u]), int(index.n_out[v])
        iu, iv = int(index.n_in[u]), int(index.n_in[v])
        if nv & ~nu or iu & ~iv:
            return Reach3.NO
    return Reach3.UNKNOWN


def group_admissible(graph, index, m, i, clause, collected, v, filters: Filters = ALL_FILTERS) -> bool:
    return engine_for(graph, index).group_admissible(m, i, clause, collected, v, filters)


def clause_query(graph, index, u, v, clause, filters: Filters = ALL_FILTERS, stats=None) -> bool:
    return engine_for(graph, index).clause_query(u, v, clause, filters, stats)


def pcr_query(graph, index, u, v, pattern, filters: Filters = ALL_FILTERS, stats=None) -> bool:
    return engine_for(graph, index).pcr_query(u, v, pattern, filters, stats)


def lcr_query(graph, index, u, v, allowed, filters: Filters = ALL_FILTERS, stats=None) -> bool:
    return engine_for(graph, index).lcr_query(u, v, allowed, filters, stats)
