"""Query workloads with oracle ground truth, and a timed benchmark runner.

A workload is a list of ``QuerySpec``. ``run_bench`` times every query on its
own (so tail percentiles mean something), checks each answer against the
ground truth and aggregates per (engine, kind, polarity).
"""

from __future__ import annotations

import csv
import io
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import InvalidParam, MismatchError, QuotaUnmet
from .graph import Graph
from .index import IndexParams, TdrIndex
from .oracle import oracle_lcr, oracle_pcr
from .pattern import Pattern, all_of, any_of, none_of, to_text
from .query import engine_for

KINDS = ("AND", "OR", "NOT", "LCR")
ENGINES = ("tdr", "oracle")
CSV_HEADER = ("dataset", "kind", "polarity", "count", "total_us", "mean_us", "p50_us", "p95_us")


@dataclass(frozen=True)
class QuerySpec:
    source: int
    target: int
    pattern: Pattern
    kind: str
    ground_truth: bool
    allowed: frozenset[int] | None = None  # LCR only: the permitted label ids

    def __str__(self):
        return f"{self.kind}({self.source}->{self.target}, {to_text(self.pattern)})={self.ground_truth}"


def make_pattern(kind: str, names: list[str]) -> Pattern:
    """AND: all present; OR: any present; NOT and LCR: none present.

    For LCR the names are the labels *outside* the allowed set.
    """
    if kind == "AND":
        return all_of(names)
    if kind == "OR":
        return any_of(names)
    if kind in ("NOT", "LCR"):
        return none_of(names)
    raise InvalidParam(f"unknown query kind {kind!r}")


def generate_workload(
    graph: Graph,
    kind: str,
    labels_per_query: int,
    quota_true: int,
    quota_false: int,
    seed: int = 0,
    max_attempts: int = 100_000,
) -> list[QuerySpec]:
    """Sample uniform (u, v) pairs and label subsets until both quotas are met.

    LCR queries draw the allowed set; their pattern forbids the complement,
    and ground truth comes from a BFS restricted to allowed edges.
    """
    kind = kind.upper()
    if kind not in KINDS:
        raise InvalidParam(f"unknown query kind {kind!r}")
    if quota_true < 0 or quota_false < 0:
        raise InvalidParam("quotas must be non-negative")
    if not 0 <= labels_per_query <= graph.label_count:
        raise InvalidParam(f"labels_per_query must be in [0, {graph.label_count}]")
    if graph.vertex_count == 0 and quota_true + quota_false:
        raise InvalidParam("cannot sample queries from an empty graph")

    rng = random.Random(seed)
    n, names = graph.vertex_count, graph.label_names
    wanted = {True: quota_true, False: quota_false}
    found = {True: 0, False: 0}
    out: list[QuerySpec] = []
    attempts = 0
    while found[True] < quota_true or found[False] < quota_false:
        if attempts >= max_attempts:
            short = True if found[True] < quota_true else False
            raise QuotaUnmet(kind, short, found[short], wanted[short])
        attempts += 1
        u, v = rng.randrange(n), rng.randrange(n)
        picked = sorted(rng.sample(range(graph.label_count), labels_per_query))
        if kind == "LCR":
            allowed = frozenset(picked)
            pattern = make_pattern(kind, [names[l] for l in range(graph.label_count) if l not in allowed])
            truth = oracle_lcr(graph, u, v, allowed)
        else:
            allowed = None
            pattern = make_pattern(kind, [names[l] for l in picked])
            truth = oracle_pcr(graph, u, v, pattern)
        if found[truth] >= wanted[truth]:
            continue
        found[truth] += 1
        out.append(QuerySpec(u, v, pattern, kind, truth, allowed))
    return out


def _nearest_rank(sorted_values: list[float], q: float) -> float:
    return sorted_values[max(0, math.ceil(q * len(sorted_values)) - 1)]


@dataclass(frozen=True)
class BenchRow:
    dataset: str
    engine: str
    kind: str
    polarity: bool
    count: int
    total_us: float
    mean_us: float
    p50_us: float
    p95_us: float
    max_us: float

    @classmethod
    def from_samples(cls, dataset: str, engine: str, kind: str, polarity: bool, samples: list[float]) -> "BenchRow":
        s = sorted(samples)
        total = math.fsum(s)
        return cls(
            dataset, engine, kind, polarity, len(s), total, total / len(s),
            _nearest_rank(s, 0.5), _nearest_rank(s, 0.95), s[-1],
        )

    @property
    def tag(self) -> str:
        # the CSV has no engine column; baseline rows carry it in the tag
        return self.dataset if self.engine == "tdr" else f"{self.dataset}:{self.engine}"

    def csv_fields(self) -> list:
        return [
            self.tag, self.kind, "true" if self.polarity else "false", self.count,
            f"{self.total_us:.3f}", f"{self.mean_us:.3f}", f"{self.p50_us:.3f}", f"{self.p95_us:.3f}",
        ]


@dataclass
class BenchReport:
    dataset: str = ""
    samples: dict[tuple[str, str, bool], list[float]] = field(default_factory=dict)
    answers: dict[str, list[bool]] = field(default_factory=dict)
    build_seconds: float = 0.0
    index_bytes: int = 0
    params: IndexParams | None = None
    seed: int | None = None

    @property
    def rows(self) -> list[BenchRow]:
        def order(key):
            engine, kind, pol = key
            return (ENGINES.index(engine), KINDS.index(kind), not pol)

        return [
            BenchRow.from_samples(self.dataset, *key, self.samples[key])
            for key in sorted(self.samples, key=order)
            if self.samples[key]
        ]

    def row(self, engine: str, kind: str, polarity: bool) -> BenchRow | None:
        s = self.samples.get((engine, kind, polarity))
        return BenchRow.from_samples(self.dataset, engine, kind, polarity, s) if s else None

    def merge(self, other: "BenchReport") -> "BenchReport":
        """Pool timing samples; answers are concatenated in order."""
        merged = BenchReport(
            self.dataset or other.dataset,
            {k: list(v) for k, v in self.samples.items()},
            {k: list(v) for k, v in self.answers.items()},
            self.build_seconds or other.build_seconds,
            self.index_bytes or other.index_bytes,
            self.params or other.params,
            self.seed if self.seed is not None else other.seed,
        )
        for key, vals in other.samples.items():
            merged.samples.setdefault(key, []).extend(vals)
        for key, vals in other.answers.items():
            merged.answers.setdefault(key, []).extend(vals)
        return merged

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def to_table(self) -> str:
        lines = [[str(x) for x in CSV_HEADER]]
        for r in self.rows:
            lines.append([str(x) for x in r.csv_fields()])
        widths = [max(len(line[i]) for line in lines) for i in range(len(CSV_HEADER))]
        text = [
            "  ".join(cell.ljust(w) if i < 3 else cell.rjust(w) for i, (cell, w) in enumerate(zip(line, widths)))
            for line in lines
        ]
        if self.params is not None:
            text.append(f"index: {self.index_bytes} bytes, built in {self.build_seconds:.3f}s, params={self.params}")
        if self.seed is not None:
            text.append(f"seed: {self.seed}")
        return "\n".join(text)


def _answer_fn(graph: Graph, index: TdrIndex, engine: str):
    if engine == "tdr":
        eng = engine_for(graph, index)

        def run(q: QuerySpec) -> bool:
            if q.allowed is not None:
                return eng.lcr_query(q.source, q.target, q.allowed)
            return eng.pcr_query(q.source, q.target, q.pattern)

    elif engine == "oracle":

        def run(q: QuerySpec) -> bool:
            if q.allowed is not None:
                return oracle_lcr(graph, q.source, q.target, q.allowed)
            return oracle_pcr(graph, q.source, q.target, q.pattern)

    else:
        raise InvalidParam(f"unknown engine {engine!r}")
    return run


def _timed(run, q: QuerySpec) -> tuple[bool, float]:
    t0 = time.perf_counter()
    answer = run(q)
    return answer, (time.perf_counter() - t0) * 1e6


def run_bench(
    graph: Graph,
    index: TdrIndex,
    workload: list[QuerySpec],
    warmup_rounds: int = 1,
    *,
    dataset: str = "",
    baseline: str | None = None,
    threads: int = 1,
    seed: int | None = None,
) -> BenchReport:
    """Time each query on the index engine (and optionally the oracle baseline).

    Raises MismatchError listing every query whose answer disagrees with its
    ground truth, for either engine.
    """
    if warmup_rounds < 0 or threads < 1:
        raise InvalidParam("warmup_rounds must be >= 0 and threads >= 1")
    engines = ["tdr"] + ([baseline] if baseline else [])
    report = BenchReport(
        dataset=dataset,
        build_seconds=index.build_seconds,
        index_bytes=index.index_bytes,
        params=index.params,
        seed=seed,
    )
    offenders = []
    for engine in engines:
        run = _answer_fn(graph, index, engine)
        for _ in range(warmup_rounds):
            for q in workload:
                run(q)
        if threads == 1:
            results = [_timed(run, q) for q in workload]
        else:
            with ThreadPoolExecutor(threads) as pool:
                results = list(pool.map(lambda q: _timed(run, q), workload))
        answers = []
        for q, (answer, us) in zip(workload, results):
            answers.append(answer)
            report.samples.setdefault((engine, q.kind, q.ground_truth), []).append(us)
            if answer != q.ground_truth:
                offenders.append((engine, str(q)))
        report.answers[engine] = answers
    if offenders:
        raise MismatchError(offenders)
    return report
