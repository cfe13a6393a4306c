"""Immutable edge-labeled digraph and edge-list text I/O.

Edges carry exactly one label; a multi-labeled edge is stored as one edge per
label. Vertex and label ids are dense and 0-based. Adjacency is kept in CSR
form (numpy) for the index builder and as flat Python lists for the search
loops, which are faster to index from pure Python.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import CapacityError, InvalidParam, ParseError

#: Largest id representable in the int32 arrays used throughout.
MAX_ID = 2**31 - 1


def _csr(keys: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr, order


@dataclass(frozen=True, eq=False)
class Graph:
    """Edge-labeled digraph G = (V, E, labels).

    ``src``/``dst``/``lab`` hold the edge list in stored order (for loaded
    graphs: first-seen input order). ``vertex_names`` keeps the original
    vertex tokens of a loaded file; it is ``None`` for generated graphs,
    whose names are the ids themselves.
    """

    vertex_count: int
    src: np.ndarray
    dst: np.ndarray
    lab: np.ndarray
    label_names: tuple[str, ...]
    vertex_names: tuple[str, ...] | None = None

    def __post_init__(self):
        n = self.vertex_count
        for name in ("src", "dst", "lab"):
            object.__setattr__(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.int32))
        if not (len(self.src) == len(self.dst) == len(self.lab)):
            raise InvalidParam("edge arrays differ in length")
        if len(self.src):
            if self.src.min() < 0 or self.dst.min() < 0 or max(self.src.max(), self.dst.max()) >= n:
                raise InvalidParam("edge endpoint out of range")
            if self.lab.min() < 0 or self.lab.max() >= len(self.label_names):
                raise InvalidParam("edge label out of range")
        if self.vertex_names is not None and len(self.vertex_names) != n:
            raise InvalidParam("vertex_names must name every vertex")
        for arr in (self.src, self.dst, self.lab):
            arr.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[tuple[int, int, int]],
        label_names: Sequence[str],
        vertex_names: Sequence[str] | None = None,
    ) -> "Graph":
        """Build a graph from (source, target, label) triples, dropping duplicates."""
        unique = list(dict.fromkeys((int(s), int(t), int(l)) for s, t, l in edges))
        arr = np.array(unique, dtype=np.int64).reshape(-1, 3)
        return cls(
            vertex_count,
            arr[:, 0],
            arr[:, 1],
            arr[:, 2],
            tuple(label_names),
            tuple(vertex_names) if vertex_names is not None else None,
        )

    @property
    def edge_count(self) -> int:
        return len(self.src)

    @property
    def label_count(self) -> int:
        return len(self.label_names)

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.lab.tolist()))

    # -- CSR views -------------------------------------------------------

    @cached_property
    def _forward(self):
        ptr, order = _csr(self.src, self.vertex_count)
        return ptr, self.dst[order], self.lab[order]

    @cached_property
    def _reverse(self):
        ptr, order = _csr(self.dst, self.vertex_count)
        return ptr, self.src[order], self.lab[order]

    @property
    def out_ptr(self) -> np.ndarray:
        return self._forward[0]

    @property
    def out_tgt(self) -> np.ndarray:
        return self._forward[1]

    @property
    def out_lab(self) -> np.ndarray:
        return self._forward[2]

    @property
    def in_ptr(self) -> np.ndarray:
        return self._reverse[0]

    @property
    def in_src(self) -> np.ndarray:
        return self._reverse[1]

    @property
    def in_lab(self) -> np.ndarray:
        return self._reverse[2]

    @cached_property
    def out_src(self) -> np.ndarray:
        """Source of each forward CSR slot."""
        return np.repeat(np.arange(self.vertex_count, dtype=np.int32), np.diff(self.out_ptr))

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    @cached_property
    def adjacency_lists(self) -> tuple[list[int], list[int], list[int]]:
        """Forward CSR as plain lists ``(ptr, targets, labels)``."""
        ptr, tgt, lab = self._forward
        return ptr.tolist(), tgt.tolist(), lab.tolist()

    def successors(self, u: int) -> list[tuple[int, int]]:
        """Suc(u) as (target, label) pairs in adjacency-slot order."""
        ptr, tgt, lab = self._forward
        a, b = ptr[u], ptr[u + 1]
        return list(zip(tgt[a:b].tolist(), lab[a:b].tolist()))

    def predecessors(self, u: int) -> list[tuple[int, int]]:
        ptr, src, lab = self._reverse
        a, b = ptr[u], ptr[u + 1]
        return list(zip(src[a:b].tolist(), lab[a:b].tolist()))

    # -- name lookups ----------------------------------------------------

    @cached_property
    def label_ids(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.label_names)}

    @cached_property
    def _vertex_ids(self) -> dict[str, int]:
        if self.vertex_names is None:
            return {}
        return {name: i for i, name in enumerate(self.vertex_names)}

    def vertex_id(self, token: str | int) -> int:
        """Resolve an original vertex token (or plain id for generated graphs)."""
        if self.vertex_names is None:
            vid = int(token)
            if not 0 <= vid < self.vertex_count:
                raise KeyError(f"no vertex {token!r}")
            return vid
        try:
            return self._vertex_ids[str(token)]
        except KeyError:
            raise KeyError(f"no vertex {token!r}") from None

    def vertex_name(self, vid: int) -> str:
        return str(vid) if self.vertex_names is None else self.vertex_names[vid]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and self.label_names == other.label_names
            and self.vertex_names == other.vertex_names
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.lab, other.lab)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(|V|={self.vertex_count}, |E|={self.edge_count}, |labels|={self.label_count})"


def load_edge_list(stream: IO[str] | Iterable[str], *, id_limit: int = MAX_ID) -> Graph:
    """Parse ``<src> <tgt> <label>`` lines; ``#`` starts a comment line.

    Vertex tokens are remapped to dense ids and labels interned, both in
    first-seen order. Duplicate triples are dropped.
    """
    vertex_ids: dict[str, int] = {}
    label_ids: dict[str, int] = {}
    seen: dict[tuple[int, int, int], None] = {}

    def intern(table: dict[str, int], token: str, what: str) -> int:
        idx = table.get(token)
        if idx is None:
            idx = len(table)
            if idx > id_limit:
                raise CapacityError(f"too many {what}s for id width (limit {id_limit})")
            table[token] = idx
        return idx

    for lineno, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 3:
            raise ParseError(lineno, f"expected '<src> <tgt> <label>', got {len(parts)} fields")
        s = intern(vertex_ids, parts[0], "vertex")
        t = intern(vertex_ids, parts[1], "vertex")
        l = intern(label_ids, parts[2], "label")
        seen[(s, t, l)] = None

    arr = np.array(list(seen), dtype=np.int64).reshape(-1, 3)
    return Graph(len(vertex_ids), arr[:, 0], arr[:, 1], arr[:, 2], tuple(label_ids), tuple(vertex_ids))


def write_edge_list(graph: Graph, stream: IO[str], *, header: str | None = None) -> None:
    """Write edges in stored order so that reloading reproduces the graph."""
    if header:
        for line in header.splitlines():
            stream.write(f"# {line}\n")
    names = graph.vertex_names
    labels = graph.label_names
    for s, t, l in graph.edges:
        if names is None:
            stream.write(f"{s} {t} {labels[l]}\n")
        else:
            stream.write(f"{names[s]} {names[t]} {labels[l]}\n")
