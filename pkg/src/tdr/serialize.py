"""Binary index file format (little-endian).

Layout::

    magic   b"TDR1"
    version u16
    header  IndexParams, |V|, |labels|, |E|, group total, label words,
            build seconds
    arrays  rank, push, pop, scc_of, n_in, n_out, group_ptr,
            h_vtx, h_lab, v_lab, v_vtx   (raw, fixed dtypes)
"""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from .errors import FormatError
from .index import IndexParams, TdrIndex

MAGIC = b"TDR1"
VERSION = 1

# group_size, max_groups, vertex_bits, label_bits, exact_label_threshold, k,
# locality_shift, seed0, seed1, flags, |V|, |labels|, |E|, groups, words,
# build seconds
_HEADER = struct.Struct("<IIIIIIIQQIQQQQId")

_DTYPES = {
    "rank": "<i4",
    "push": "<i4",
    "pop": "<i4",
    "scc_of": "<i4",
    "n_in": "<u8",
    "n_out": "<u8",
    "group_ptr": "<i8",
    "h_vtx": "<u8",
    "h_lab": "<u8",
    "v_lab": "<u8",
    "v_vtx": "<u8",
}


def _shapes(n: int, groups: int, k: int, words: int) -> dict[str, tuple[int, ...]]:
    return {
        "rank": (n,),
        "push": (n,),
        "pop": (n,),
        "scc_of": (n,),
        "n_in": (n,),
        "n_out": (n,),
        "group_ptr": (n + 1,),
        "h_vtx": (groups,),
        "h_lab": (groups, words),
        "v_lab": (groups, k, words),
        "v_vtx": (groups, k),
    }


def serialize(index: TdrIndex, sink: BinaryIO) -> None:
    p = index.params
    flags = int(p.use_locality) | int(p.use_mixing) << 1
    sink.write(MAGIC)
    sink.write(struct.pack("<H", VERSION))
    sink.write(
        _HEADER.pack(
            p.group_size, p.max_groups, p.vertex_bits, p.label_bits, p.exact_label_threshold,
            p.k, p.locality_shift, p.seeds[0], p.seeds[1], flags,
            index.vertex_count, index.label_count, index.edge_count,
            index.group_total, index.label_words, index.build_seconds,
        )
    )
    for name, dtype in _DTYPES.items():
        sink.write(np.ascontiguousarray(getattr(index, name), dtype=dtype).tobytes())


def _read(source: BinaryIO, size: int, what: str) -> bytes:
    data = source.read(size)
    if len(data) != size:
        raise FormatError(f"truncated index file while reading {what}")
    return data


def deserialize(source: BinaryIO) -> TdrIndex:
    if _read(source, 4, "magic") != MAGIC:
        raise FormatError("bad magic: not a TDR index file")
    (version,) = struct.unpack("<H", _read(source, 2, "version"))
    if version != VERSION:
        raise FormatError(f"unsupported index version {version}")
    fields = _HEADER.unpack(_read(source, _HEADER.size, "header"))
    (m, gmax, bv, bl, thresh, k, shift, s0, s1, flags, n, n_labels, n_edges, groups, words, build_seconds) = fields
    try:
        params = IndexParams(
            group_size=m, max_groups=gmax, vertex_bits=bv, label_bits=bl,
            exact_label_threshold=thresh, k=k, locality_shift=shift, seeds=(s0, s1),
            use_locality=bool(flags & 1), use_mixing=bool(flags & 2),
        )
    except ValueError as exc:
        raise FormatError(f"invalid parameters in header: {exc}") from exc
    arrays = {}
    for name, shape in _shapes(n, groups, k, words).items():
        dtype = np.dtype(_DTYPES[name])
        count = int(np.prod(shape))
        raw = _read(source, count * dtype.itemsize, name)
        native = dtype.newbyteorder("=")
        arrays[name] = np.frombuffer(raw, dtype=dtype).astype(native).reshape(shape)
    if source.read(1):
        raise FormatError("trailing bytes after index payload")
    arrays["scc_of"] = arrays["scc_of"].astype(np.int32)
    arrays["group_ptr"] = arrays["group_ptr"].astype(np.int64)
    index = TdrIndex(
        params=params, vertex_count=n, label_count=n_labels, edge_count=n_edges,
        build_seconds=build_seconds, **arrays,
    )
    if index.label_words != words:
        raise FormatError("label word count disagrees with parameters")
    return index


def save_index(index: TdrIndex, path) -> None:
    with open(path, "wb") as fh:
        serialize(index, fh)


def load_index(path) -> TdrIndex:
    with open(path, "rb") as fh:
        return deserialize(fh)
