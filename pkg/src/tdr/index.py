"""Two-dimensional reachability index.

Per vertex the index keeps

* a DFS interval ``(push, pop)`` and its SCC id,
* ``n_in``: a single mask over the vertices that reach it,
* ``n_out``: a single mask over the vertices it reaches,
* for vertices with successors, ``g`` groups ("ways") of successor slots and
  per group a horizontal vertex mask ``h_vtx``, a horizontal label mask
  ``h_lab``, and ``k`` vertical layers of label (``v_lab``) and vertex
  (``v_vtx``) masks describing edges at depth 1..k through that group.

Vertex masks are ``b_v`` bits (``b_v <= 64``, stored as uint64). Label masks
are stored as rows of uint64 words; bit ``l`` is label ``l`` in exact mode
(or a hashed position in Bloom mode) and one extra bit past the label space
marks epsilon, i.e. a path that ended at a leaf before that depth.

All propagation runs over the SCC condensation so that masks stay exact
(never under-filled) on cyclic graphs.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParam
from .graph import Graph
from .scc import Condensation, condense, dfs_scc

_U64 = np.uint64
_MASK64 = (1 << 64) - 1


def _pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


@dataclass(frozen=True)
class IndexParams:
    group_size: int = 4  # target successors per group (m)
    max_groups: int = 8
    vertex_bits: int = 64
    label_bits: int = 64  # Bloom width when the alphabet is too large for exact masks
    exact_label_threshold: int = 4096
    k: int = 2
    locality_shift: int = 2
    seeds: tuple[int, int] = (0, 0x5EED)
    use_locality: bool = True
    use_mixing: bool = True

    def __post_init__(self):
        if self.group_size < 1:
            raise InvalidParam("group_size must be >= 1")
        if self.max_groups < 1:
            raise InvalidParam("max_groups must be >= 1")
        if not _pow2(self.vertex_bits) or self.vertex_bits > 64:
            raise InvalidParam("vertex_bits must be a power of two <= 64")
        if not _pow2(self.label_bits):
            raise InvalidParam("label_bits must be a power of two")
        if self.k < 1:
            raise InvalidParam("k must be >= 1")
        if self.locality_shift < 0:
            raise InvalidParam("locality_shift must be >= 0")
        if not (self.use_locality or self.use_mixing):
            raise InvalidParam("at least one vertex hash function must be enabled")
        if len(self.seeds) != 2 or any(not 0 <= s <= _MASK64 for s in self.seeds):
            raise InvalidParam("seeds must be two unsigned 64-bit integers")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def exact_labels(self, label_count: int) -> bool:
        return label_count <= self.exact_label_threshold


# -- hashing -----------------------------------------------------------------


def mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, elementwise on uint64."""
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=_U64) + _U64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
        return z ^ (z >> _U64(31))


def vertex_hashes(ids: np.ndarray, params: IndexParams) -> np.ndarray:
    """Vertex masks for (renumbered) ids: a locality bit shared by runs of
    ``2**locality_shift`` consecutive ids, and a mixing bit."""
    ids = np.asarray(ids, dtype=np.int64).astype(_U64)
    bv = _U64(params.vertex_bits)
    out = np.zeros(ids.shape, dtype=_U64)
    one = _U64(1)
    if params.use_locality:
        pos = ((ids >> _U64(params.locality_shift)) + _U64(params.seeds[0] % params.vertex_bits)) % bv
        out |= one << pos
    if params.use_mixing:
        pos = mix64(ids ^ _U64(params.seeds[1])) % bv
        out |= one << pos
    return out


def vertex_hash(vid: int, params: IndexParams) -> int:
    return int(vertex_hashes(np.array([vid]), params)[0])


def label_positions(label_count: int, params: IndexParams) -> np.ndarray:
    """Bit position of each label id inside a label mask."""
    ids = np.arange(label_count, dtype=np.int64)
    if params.exact_labels(label_count):
        return ids
    salt = _U64(params.seeds[1] ^ 0xA5A5A5A5A5A5A5A5)
    return (mix64(ids.astype(_U64) ^ salt) % _U64(params.label_bits)).astype(np.int64)


def label_space(label_count: int, params: IndexParams) -> int:
    """Number of label bit positions; the epsilon bit sits right after them."""
    return label_count if params.exact_labels(label_count) else params.label_bits


def _bit_rows(pos: np.ndarray, words: int) -> np.ndarray:
    rows = np.zeros((len(pos), words), dtype=_U64)
    rows[np.arange(len(pos)), pos >> 6] = _U64(1) << (pos & 63).astype(_U64)
    return rows


def rows_to_ints(rows: np.ndarray) -> list[int]:
    """(N, W) uint64 word rows -> Python ints (word 0 is least significant)."""
    if rows.shape[-1] == 1:
        return rows[..., 0].reshape(-1).tolist()
    flat = rows.reshape(-1, rows.shape[-1])
    raw = flat.astype("<u8").tobytes()
    step = 8 * flat.shape[1]
    return [int.from_bytes(raw[i : i + step], "little") for i in range(0, len(raw), step)]


def ints_to_rows(values: list[int], words: int) -> np.ndarray:
    if words == 1:
        return np.array(values, dtype=_U64).reshape(-1, 1)
    raw = b"".join(v.to_bytes(8 * words, "little") for v in values)
    return np.frombuffer(raw, dtype="<u8").astype(_U64).reshape(-1, words)


# -- grouping ----------------------------------------------------------------


def group_count(out_degree: int, params: IndexParams) -> int:
    if out_degree <= 0:
        return 0
    return min(params.max_groups, -(-out_degree // params.group_size))


def plan_groups(out_degree: int, params: IndexParams) -> tuple[int, list[int]]:
    """Group count and the group of each successor slot (contiguous runs)."""
    g = group_count(out_degree, params)
    return g, [s * g // out_degree for s in range(out_degree)]


@dataclass(frozen=True)
class GroupLayout:
    group_ptr: np.ndarray  # (V+1,) group range of each vertex
    edge_ptr: np.ndarray  # (G+1,) CSR slot range of each group
    owner: np.ndarray  # (G,) vertex owning each group

    @property
    def total(self) -> int:
        return len(self.owner)


def group_layout(out_ptr: np.ndarray, params: IndexParams) -> GroupLayout:
    deg = np.diff(out_ptr)
    g = np.where(deg > 0, np.minimum(params.max_groups, -(-deg // params.group_size)), 0)
    group_ptr = np.zeros(len(deg) + 1, dtype=np.int64)
    np.cumsum(g, out=group_ptr[1:])
    owner = np.repeat(np.arange(len(deg), dtype=np.int64), g)
    local = np.arange(len(owner), dtype=np.int64) - group_ptr[owner]
    # group i of a vertex with degree d and g groups starts at slot ceil(i*d/g)
    gd, gg = deg[owner], g[owner]
    starts = out_ptr[owner] + (local * gd + gg - 1) // np.maximum(gg, 1)
    edge_ptr = np.append(starts, out_ptr[-1]).astype(np.int64)
    return GroupLayout(group_ptr, edge_ptr, owner)


# -- index -------------------------------------------------------------------


@dataclass(eq=False)
class TdrIndex:
    params: IndexParams
    vertex_count: int
    label_count: int
    edge_count: int
    rank: np.ndarray  # renumbered id (position in DFS finish order)
    push: np.ndarray
    pop: np.ndarray
    scc_of: np.ndarray
    n_in: np.ndarray
    n_out: np.ndarray
    group_ptr: np.ndarray
    h_vtx: np.ndarray  # (G,)
    h_lab: np.ndarray  # (G, W)
    v_lab: np.ndarray  # (G, k, W)
    v_vtx: np.ndarray  # (G, k)
    build_seconds: float = 0.0

    ARRAYS = ("rank", "push", "pop", "scc_of", "n_in", "n_out", "group_ptr", "h_vtx", "h_lab", "v_lab", "v_vtx")

    @property
    def exact_labels(self) -> bool:
        return self.params.exact_labels(self.label_count)

    @property
    def label_space(self) -> int:
        return label_space(self.label_count, self.params)

    @property
    def epsilon_bit(self) -> int:
        return self.label_space

    @property
    def label_words(self) -> int:
        return self.label_space // 64 + 1

    @property
    def group_total(self) -> int:
        return len(self.h_vtx)

    @property
    def index_bytes(self) -> int:
        return sum(getattr(self, name).nbytes for name in self.ARRAYS)

    @cached_property
    def hashes(self) -> np.ndarray:
        return vertex_hashes(self.rank, self.params)

    @cached_property
    def label_pos(self) -> np.ndarray:
        return label_positions(self.label_count, self.params)

    @cached_property
    def scc_finish(self) -> np.ndarray:
        """Latest pop time inside each vertex's SCC (the SCC's DFS finish)."""
        if self.vertex_count == 0:
            return np.zeros(0, dtype=np.int64)
        fin = np.zeros(int(self.scc_of.max()) + 1, dtype=np.int64)
        np.maximum.at(fin, self.scc_of, self.pop)
        return fin[self.scc_of]

    def groups_of(self, u: int) -> range:
        return range(int(self.group_ptr[u]), int(self.group_ptr[u + 1]))

    def label_mask(self, labels) -> int:
        """Python-int mask of the given label ids (ids outside the alphabet ignored)."""
        mask = 0
        pos = self.label_pos
        for l in labels:
            if 0 <= l < self.label_count:
                mask |= 1 << int(pos[l])
        return mask

    def __eq__(self, other):
        if not isinstance(other, TdrIndex):
            return NotImplemented
        same = (
            self.params == other.params
            and self.vertex_count == other.vertex_count
            and self.label_count == other.label_count
            and self.edge_count == other.edge_count
        )
        return same and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in self.ARRAYS)

    __hash__ = object.__hash__

    def stats(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "edges": self.edge_count,
            "labels": self.label_count,
            "groups": self.group_total,
            "label_mode": "exact" if self.exact_labels else "bloom",
            "index_bytes": self.index_bytes,
            "build_seconds": self.build_seconds,
            "params": asdict(self.params),
        }


def compute_intervals(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    """DFS push/pop timestamps (one shared counter starting at 0)."""
    res = dfs_scc(graph)
    return res.push, res.pop


def build_nin(graph: Graph, cond: Condensation, hashes: np.ndarray) -> np.ndarray:
    """Mask over every vertex that reaches u (u included), SCC members equal."""
    own = np.zeros(cond.scc_count, dtype=_U64)
    np.bitwise_or.at(own, cond.scc_of, hashes)
    acc = own.tolist()
    ptr = cond.dag_ptr.tolist()
    adj = cond.dag_adj.tolist()
    # successors carry smaller SCC ids, so descending ids is sources-first
    for c in range(cond.scc_count - 1, -1, -1):
        val = acc[c]
        for s in adj[ptr[c] : ptr[c + 1]]:
            acc[s] |= val
    return np.array(acc, dtype=_U64)[cond.scc_of] if cond.scc_count else np.zeros(0, dtype=_U64)


def _scc_out_aggregates(graph: Graph, cond: Condensation, hashes, lab_rows_by_edge, words):
    """Per-SCC OR of reachable vertex hashes and of labels on outgoing paths."""
    n_scc = cond.scc_count
    own_vtx = np.zeros(n_scc, dtype=_U64)
    np.bitwise_or.at(own_vtx, cond.scc_of, hashes)
    own_lab = np.zeros((n_scc, words), dtype=_U64)
    if graph.edge_count:
        np.bitwise_or.at(own_lab, cond.scc_of[graph.out_src], lab_rows_by_edge)
    vtx = own_vtx.tolist()
    lab = rows_to_ints(own_lab) if n_scc else []
    ptr = cond.dag_ptr.tolist()
    adj = cond.dag_adj.tolist()
    for c in range(n_scc):  # sinks first
        v, l = vtx[c], lab[c]
        for s in adj[ptr[c] : ptr[c + 1]]:
            v |= vtx[s]
            l |= lab[s]
        vtx[c], lab[c] = v, l
    return np.array(vtx, dtype=_U64), ints_to_rows(lab, words) if n_scc else own_lab


def build_horizontal(graph: Graph, cond: Condensation, hashes: np.ndarray, layout: GroupLayout, label_pos, words):
    """Per-group ``h_vtx``/``h_lab`` and per-vertex ``n_out``."""
    lab_rows = _bit_rows(label_pos[graph.out_lab], words)
    scc_vtx, scc_lab = _scc_out_aggregates(graph, cond, hashes, lab_rows, words)
    n_out = hashes.copy()
    if layout.total == 0:
        return np.zeros(0, dtype=_U64), np.zeros((0, words), dtype=_U64), n_out
    tgt = graph.out_tgt
    tgt_scc = cond.scc_of[tgt]
    starts = layout.edge_ptr[:-1]
    h_vtx = np.bitwise_or.reduceat(scc_vtx[tgt_scc], starts) | hashes[layout.owner]
    h_lab = np.bitwise_or.reduceat(lab_rows | scc_lab[tgt_scc], starts, axis=0)
    has = np.flatnonzero(np.diff(layout.group_ptr))
    n_out[has] = np.bitwise_or.reduceat(h_vtx, layout.group_ptr[has])
    return h_vtx, h_lab, n_out


def build_vertical(graph: Graph, hashes: np.ndarray, layout: GroupLayout, label_pos, words, k: int, eps_bit: int):
    """k-layer label/vertex masks per group via k sweeps over the edges."""
    G = layout.total
    v_lab = np.zeros((G, k, words), dtype=_U64)
    v_vtx = np.zeros((G, k), dtype=_U64)
    if G == 0:
        return v_lab, v_vtx
    n = graph.vertex_count
    tgt = graph.out_tgt
    lab_rows = _bit_rows(label_pos[graph.out_lab], words)
    deg = graph.out_degree
    inner = np.flatnonzero(deg)
    leaves = deg == 0
    vstarts = graph.out_ptr[inner]
    gstarts = layout.edge_ptr[:-1]
    eps = _bit_rows(np.array([eps_bit]), words)[0]

    tgt_hash = hashes[tgt]
    v_lab[:, 0] = np.bitwise_or.reduceat(lab_rows, gstarts, axis=0)
    v_vtx[:, 0] = np.bitwise_or.reduceat(tgt_hash, gstarts)
    # per-vertex layer aggregates: labels / vertices at depth j+1 from u
    a_lab = np.zeros((n, words), dtype=_U64)
    a_lab[inner] = np.bitwise_or.reduceat(lab_rows, vstarts, axis=0)
    a_lab[leaves] = eps
    a_vtx = np.zeros(n, dtype=_U64)
    a_vtx[inner] = np.bitwise_or.reduceat(tgt_hash, vstarts)
    for j in range(1, k):
        slot_lab = a_lab[tgt]
        slot_vtx = a_vtx[tgt]
        v_lab[:, j] = np.bitwise_or.reduceat(slot_lab, gstarts, axis=0)
        v_vtx[:, j] = np.bitwise_or.reduceat(slot_vtx, gstarts)
        if j + 1 < k:
            nxt_lab = np.zeros_like(a_lab)
            nxt_lab[inner] = np.bitwise_or.reduceat(slot_lab, vstarts, axis=0)
            nxt_lab[leaves] = eps
            nxt_vtx = np.zeros_like(a_vtx)
            nxt_vtx[inner] = np.bitwise_or.reduceat(slot_vtx, vstarts)
            a_lab, a_vtx = nxt_lab, nxt_vtx
    return v_lab, v_vtx


def build_index(graph: Graph, params: IndexParams | None = None) -> TdrIndex:
    """SCCs and intervals -> finish-order renumbering -> n_in -> horizontal -> vertical."""
    params = params or IndexParams()
    t0 = time.perf_counter()
    n = graph.vertex_count
    dfs = dfs_scc(graph)
    cond = condense(graph, dfs.scc_of, dfs.scc_count)
    rank = np.empty(n, dtype=np.int32)
    rank[dfs.finish_order] = np.arange(n, dtype=np.int32)
    hashes = vertex_hashes(rank, params)

    n_in = build_nin(graph, cond, hashes)
    label_pos = label_positions(graph.label_count, params)
    space = label_space(graph.label_count, params)
    words = space // 64 + 1
    layout = group_layout(graph.out_ptr, params)
    h_vtx, h_lab, n_out = build_horizontal(graph, cond, hashes, layout, label_pos, words)
    v_lab, v_vtx = build_vertical(graph, hashes, layout, label_pos, words, params.k, space)

    return TdrIndex(
        params=params,
        vertex_count=n,
        label_count=graph.label_count,
        edge_count=graph.edge_count,
        rank=rank,
        push=dfs.push.astype(np.int32),
        pop=dfs.pop.astype(np.int32),
        scc_of=dfs.scc_of,
        n_in=n_in,
        n_out=n_out,
        group_ptr=layout.group_ptr,
        h_vtx=h_vtx,
        h_lab=h_lab,
        v_lab=v_lab,
        v_vtx=v_vtx,
        build_seconds=time.perf_counter() - t0,
    )


def layout_for(graph: Graph, index: TdrIndex) -> GroupLayout:
    return group_layout(graph.out_ptr, index.params)


__all__ = [
    "IndexParams",
    "TdrIndex",
    "build_index",
    "build_nin",
    "build_horizontal",
    "build_vertical",
    "compute_intervals",
    "group_count",
    "group_layout",
    "label_positions",
    "plan_groups",
    "vertex_hash",
    "vertex_hashes",
]
