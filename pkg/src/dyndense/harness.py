"""Replay of update streams, oracle cross-checking and throughput measurement."""

from __future__ import annotations

import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .directed import DirectedDensest
from .fast import make_densest
from .lazy_labels import InvariantError, StoreError
from .oracle import brute_directed, brute_undirected, DIRECTED_LIMIT, OracleLimitError, UNDIRECTED_LIMIT
from .stream import TraceRecord, UpdateStream, format_vertex_set
from .threshold import ChainBudgetError

MAX_REPORTED = 20
# violation categories
SANDWICH, SUBGRAPH, GAP, STRUCTURE, CHAIN, ROUND = "sandwich", "subgraph", "gap", "structure", "chain", "round"


@dataclass
class Config:
    eps: Fraction = Fraction(1, 2)
    alpha: Optional[int] = None
    engine: str = "auto"
    grid: str = "geometric"
    strict: bool = False
    timing: bool = False
    parallel: bool = False


@dataclass
class Report:
    ops: int = 0
    queries: int = 0
    subgraph_queries: int = 0
    max_rel_error: float = 0.0
    violations: list[str] = field(default_factory=list)
    by_kind: Counter = field(default_factory=Counter)
    skipped_deletes: int = 0
    # budget usage: worst round total over copies * (2 alpha + 2), longest chain seen
    round_budget_use: float = 0.0
    max_chain: int = 0
    forced_flushes: int = 0

    @property
    def violation_count(self) -> int:
        return sum(self.by_kind.values())

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def fail(self, kind: str, msg: str) -> None:
        self.by_kind[kind] += 1
        if len(self.violations) < MAX_REPORTED:
            self.violations.append(f"{msg} [{kind}]")


def build(stream: UpdateStream, cfg: Config):
    if stream.mode == "directed":
        return DirectedDensest(stream.n, cfg.eps, cfg.grid, cfg.alpha, cfg.engine, cfg.parallel)
    weights = stream.weights if stream.mode == "weighted" else None
    return make_densest(stream.n, cfg.eps, weights, cfg.alpha, cfg.engine)


def check_oracle_limits(stream: UpdateStream) -> None:
    limit = DIRECTED_LIMIT if stream.mode == "directed" else UNDIRECTED_LIMIT
    if stream.n > limit:
        raise OracleLimitError(f"n={stream.n} exceeds the oracle limit {limit} for {stream.mode} mode")


class _Oracle:
    """Exact optimum of the current graph, recomputed only after updates."""

    def __init__(self, stream: UpdateStream):
        self.stream = stream
        self._cached = None

    def invalidate(self) -> None:
        self._cached = None

    def optimum(self, live) -> Fraction:
        """Optimal density, or its square in directed mode."""
        if self._cached is None:
            edges = [e for e, c in live.items() for _ in range(c)]
            if self.stream.mode == "directed":
                self._cached = brute_directed(self.stream.n, edges).squared
            else:
                self._cached = brute_undirected(self.stream.n, edges, self.stream.weights).density
        return self._cached


def _sandwich(est: Fraction, opt: Fraction, eps: Fraction, directed: bool) -> tuple[bool, float]:
    """Check (1 - eps) opt <= est <= opt; directed optima arrive squared."""
    if directed:
        sq = est * est
        ok = (1 - eps) ** 2 * opt <= sq <= opt
        rel = 0.0 if opt == 0 else 1 - float(sq / opt) ** 0.5
    else:
        ok = (1 - eps) * opt <= est <= opt
        rel = 0.0 if opt == 0 else float(1 - est / opt)
    return ok, rel


def replay(stream: UpdateStream, cfg: Config, verify: bool = False) -> tuple[list[TraceRecord], Report]:
    """Apply every operation, returning one trace record each and a verification report.

    Without ``verify`` only the cheap bookkeeping is done.  A chain exceeding its
    cap stops the replay; with ``verify`` that counts as a violation, otherwise
    the error propagates.
    """
    if verify:
        check_oracle_limits(stream)
    ds = build(stream, cfg)
    directed = stream.mode == "directed"
    oracle = _Oracle(stream)
    report = Report()
    records: list[TraceRecord] = []
    budget_seen = 0
    try:
        for idx, op in enumerate(stream.ops):
            t0 = time.perf_counter_ns()
            density = None
            subgraph = None
            flips = 0
            if op.kind == "+":
                try:
                    ds.insert(op.u, op.v)
                except ChainBudgetError as exc:
                    if not verify:
                        raise
                    report.fail(CHAIN, f"op {idx}: {exc}")
                    break
                flips = ds.stats.flips_last_op
                oracle.invalidate()
            elif op.kind == "-":
                key = stream.edge_key(op.u, op.v)
                if not ds.live.get(key):
                    if cfg.strict:
                        raise StoreError(f"op {idx}: deletion of non-live edge ({op.u}, {op.v})")
                    print(f"warning: op {idx}: ignoring deletion of non-live edge ({op.u}, {op.v})", file=sys.stderr)
                    report.skipped_deletes += 1
                else:
                    try:
                        ds.delete(op.u, op.v)
                    except ChainBudgetError as exc:
                        if not verify:
                            raise
                        report.fail(CHAIN, f"op {idx}: {exc}")
                        break
                    flips = ds.stats.flips_last_op
                    oracle.invalidate()
            elif op.kind == "q":
                density = ds.query_density()
            else:
                if directed:
                    pair = ds.query_subgraph()
                    subgraph = f"{format_vertex_set(pair.s)} | {format_vertex_set(pair.t)}"
                else:
                    chosen = ds.query_subgraph()
                    subgraph = format_vertex_set(chosen)
            elapsed = time.perf_counter_ns() - t0 if cfg.timing else None
            records.append(
                TraceRecord(idx, op.kind, density, ds.active, flips, ds.max_load_raw(), elapsed, subgraph)
            )
            report.ops += 1
            if not verify:
                continue
            if op.kind == "q":
                report.queries += 1
                opt = oracle.optimum(ds.live)
                ok, rel = _sandwich(density, opt, cfg.eps, directed)
                report.max_rel_error = max(report.max_rel_error, rel)
                if not ok:
                    shown = f"sqrt({opt})" if directed else str(opt)
                    report.fail(SANDWICH, f"op {idx}: estimate {density} outside the sandwich of optimum {shown}")
            elif op.kind == "s":
                report.subgraph_queries += 1
                opt = oracle.optimum(ds.live)
                if directed:
                    got = pair.squared
                    good = got >= (1 - cfg.eps) ** 2 * opt
                else:
                    got = ds.density_of(chosen)
                    good = got >= (1 - cfg.eps) * opt
                if not good:
                    report.fail(SUBGRAPH, f"op {idx}: subgraph density {got} below (1 - eps) of optimum {opt}")
            try:
                ds.check()
            except InvariantError as exc:
                report.fail(GAP if "gap" in str(exc) else STRUCTURE, f"op {idx}: {exc}")
            seen = ds.stats.round_budget_violations
            if seen > budget_seen:
                report.fail(ROUND, f"op {idx}: a duplicate round exceeded its flip budget")
                budget_seen = seen
    finally:
        if directed:
            ds.close()
    _budget_usage(ds, report)
    return records, report


def _budget_usage(ds, report: Report) -> None:
    parts = ds.instances if isinstance(ds, DirectedDensest) else [ds]
    for p in parts:
        st = p.stats
        budget = p.num_copies * (2 * p.alpha + 2)
        report.round_budget_use = max(report.round_budget_use, st.max_round_flips / budget)
        report.forced_flushes += st.forced_flushes
        for pos in range(1, p.num_copies + 1):
            report.max_chain = max(report.max_chain, p.copy_counters(pos)["max_chain"])


# ----------------------------------------------------------------------
# bench


@dataclass
class BenchResult:
    n: int
    updates: int
    seconds: float
    flips_total: int
    max_flips: int
    single_ops: int
    single_flips: int
    per_copy: list[dict[str, int]]
    alpha: int
    engine: str

    @property
    def ops_per_sec(self) -> float:
        return self.updates / self.seconds if self.seconds > 0 else float("inf")

    @property
    def mean_flips(self) -> float:
        return self.flips_total / self.updates if self.updates else 0.0

    @property
    def mean_chain(self) -> float:
        return self.single_flips / self.single_ops if self.single_ops else 0.0


def _copy_rows(ds) -> list[dict[str, int]]:
    if isinstance(ds, DirectedDensest):
        rows = []
        for k, inst in enumerate(ds.instances):
            for pos in range(1, inst.num_copies + 1):
                rows.append({"instance": k, "copy": pos, **inst.copy_counters(pos)})
        return rows
    return [{"copy": pos, **ds.copy_counters(pos)} for pos in range(1, ds.num_copies + 1)]


def bench(stream: UpdateStream, cfg: Config) -> BenchResult:
    ds = build(stream, cfg)
    flips_total = max_flips = updates = 0
    seconds = 0.0
    try:
        for op in stream.ops:
            if op.kind == "q":
                ds.query_density()
                continue
            if op.kind == "s":
                continue
            t0 = time.perf_counter()
            if op.kind == "+":
                ds.insert(op.u, op.v)
            else:
                ds.delete(op.u, op.v)
            seconds += time.perf_counter() - t0
            f = ds.stats.flips_last_op
            flips_total += f
            max_flips = max(max_flips, f)
            updates += 1
    finally:
        if isinstance(ds, DirectedDensest):
            ds.close()
    rows = _copy_rows(ds)
    if isinstance(ds, DirectedDensest):
        alpha, engine = ds.instances[0].alpha, ds.instances[0].engine
    else:
        alpha, engine = ds.alpha, ds.engine
    return BenchResult(
        n=stream.n,
        updates=updates,
        seconds=seconds,
        flips_total=flips_total,
        max_flips=max_flips,
        single_ops=sum(r["inserts"] + r["deletes"] for r in rows),
        single_flips=sum(r["flips"] for r in rows),
        per_copy=rows,
        alpha=alpha,
        engine=engine,
    )
