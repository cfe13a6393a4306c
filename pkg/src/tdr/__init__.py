"""Pattern-constrained reachability on edge-labeled digraphs with the TDR index."""

__version__ = "0.1.0"

from .bench import BenchReport, QuerySpec, generate_workload, run_bench
from .errors import (
    CapacityError,
    FormatError,
    InvalidParam,
    MismatchError,
    ParseError,
    PatternSyntaxError,
    PatternTooComplex,
    QuotaUnmet,
    TdrError,
    TooManyRequiredLabels,
    UnknownLabel,
)
from .generators import generate_er, generate_pa
from .graph import Graph, load_edge_list, write_edge_list
from .index import IndexParams, TdrIndex, build_index
from .oracle import oracle_lcr, oracle_pcr
from .pattern import And, Clause, ClauseSet, Label, Not, Or, evaluate, normalize, parse, to_text
from .query import Filters, QueryEngine, Reach3, SearchStats, clause_query, lcr_query, pcr_query, vertex_reach
from .scc import Condensation, compute_sccs
from .serialize import deserialize, load_index, save_index, serialize

__all__ = [
    "And", "BenchReport", "CapacityError", "Clause", "ClauseSet", "Condensation", "Filters", "FormatError",
    "Graph", "IndexParams", "InvalidParam", "Label", "MismatchError", "Not", "Or", "ParseError",
    "PatternSyntaxError", "PatternTooComplex", "QueryEngine", "QuerySpec", "QuotaUnmet", "Reach3",
    "SearchStats", "TdrError", "TdrIndex", "TooManyRequiredLabels", "UnknownLabel", "build_index",
    "clause_query", "compute_sccs", "deserialize", "evaluate", "generate_er", "generate_pa",
    "generate_workload", "lcr_query", "load_edge_list", "load_index", "normalize", "oracle_lcr",
    "oracle_pcr", "parse", "pcr_query", "run_bench", "save_index", "serialize", "to_text",
    "vertex_reach", "write_edge_list",
]
