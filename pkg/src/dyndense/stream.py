"""Update-stream text format, CSV traces and random stream generation.

Stream format (line oriented, ``#`` starts a comment)::

    n=4 mode=weighted
    w 0 3/2
    + 0 1
    - 0 1
    q
    s
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ._rational import fmt_rational

MODES = ("undirected", "weighted", "directed")
RANDOM_WEIGHTS = (Fraction(1), Fraction(3, 2), Fraction(3))


class StreamParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Op:
    kind: str  # one of + - q s
    u: int = -1
    v: int = -1

    def __str__(self) -> str:
        return f"{self.kind} {self.u} {self.v}" if self.kind in "+-" else self.kind


@dataclass
class UpdateStream:
    n: int
    mode: str = "undirected"
    weights: Optional[tuple[Fraction, ...]] = None
    ops: list[Op] = field(default_factory=list)

    def edge_key(self, u: int, v: int) -> tuple[int, int]:
        if self.mode == "directed":
            return (u, v)
        return (u, v) if u < v else (v, u)


def _parse_header(line: str, lineno: int) -> tuple[int, str]:
    fields = {}
    for tok in line.split():
        if "=" not in tok:
            raise StreamParseError(lineno, f"header token {tok!r} is not key=value")
        key, val = tok.split("=", 1)
        fields[key] = val
    unknown = set(fields) - {"n", "mode"}
    if unknown:
        raise StreamParseError(lineno, f"unknown header keys {sorted(unknown)}")
    if "n" not in fields:
        raise StreamParseError(lineno, "header lacks n=")
    try:
        n = int(fields["n"])
    except ValueError:
        raise StreamParseError(lineno, f"bad vertex count {fields['n']!r}") from None
    if n < 1:
        raise StreamParseError(lineno, "vertex count must be positive")
    mode = fields.get("mode", "undirected")
    if mode not in MODES:
        raise StreamParseError(lineno, f"unknown mode {mode!r}")
    return n, mode


def _vertex(tok: str, n: int, lineno: int) -> int:
    try:
        x = int(tok)
    except ValueError:
        raise StreamParseError(lineno, f"bad vertex id {tok!r}") from None
    if not 0 <= x < n:
        raise StreamParseError(lineno, f"vertex {x} outside [0, {n})")
    return x


def parse(text: str, strict: bool = False) -> UpdateStream:
    """Parse a stream; with ``strict`` a deletion of a non-live edge is an error here."""
    stream: Optional[UpdateStream] = None
    weights: dict[int, Fraction] = {}
    live: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if stream is None:
            n, mode = _parse_header(line, lineno)
            stream = UpdateStream(n, mode)
            continue
        toks = line.split()
        kind = toks[0]
        if kind == "w":
            if len(toks) != 3:
                raise StreamParseError(lineno, "weight lines read 'w <vertex> <p/q>'")
            if stream.ops:
                raise StreamParseError(lineno, "weights must precede operations")
            x = _vertex(toks[1], stream.n, lineno)
            try:
                w = Fraction(toks[2])
            except (ValueError, ZeroDivisionError):
                raise StreamParseError(lineno, f"bad weight {toks[2]!r}") from None
            if w <= 0:
                raise StreamParseError(lineno, "weights must be positive")
            weights[x] = w
        elif kind in ("+", "-"):
            if len(toks) != 3:
                raise StreamParseError(lineno, f"'{kind}' takes two vertex ids")
            u = _vertex(toks[1], stream.n, lineno)
            v = _vertex(toks[2], stream.n, lineno)
            if u == v and stream.mode != "directed":
                raise StreamParseError(lineno, f"self-loop ({u}, {v}) in {stream.mode} mode")
            key = stream.edge_key(u, v)
            if kind == "+":
                live[key] = live.get(key, 0) + 1
            else:
                if not live.get(key):
                    if strict:
                        raise StreamParseError(lineno, f"deletion of non-live edge ({u}, {v})")
                else:
                    live[key] -= 1
            stream.ops.append(Op(kind, u, v))
        elif kind in ("q", "s"):
            if len(toks) != 1:
                raise StreamParseError(lineno, f"'{kind}' takes no arguments")
            stream.ops.append(Op(kind))
        else:
            raise StreamParseError(lineno, f"unknown operation {kind!r}")
    if stream is None:
        raise StreamParseError(0, "missing header line")
    if weights:
        if stream.mode != "weighted":
            raise StreamParseError(0, f"weight lines need mode=weighted, not {stream.mode}")
        stream.weights = tuple(weights.get(x, Fraction(1)) for x in range(stream.n))
    return stream


def format_stream(stream: UpdateStream) -> str:
    lines = [f"n={stream.n} mode={stream.mode}"]
    if stream.weights is not None:
        lines += [f"w {x} {fmt_rational(w)}" for x, w in enumerate(stream.weights)]
    lines += [str(op) for op in stream.ops]
    return "\n".join(lines) + "\n"


def gen_random(
    n: int,
    steps: int,
    seed: int,
    p_delete: float = 0.3,
    mode: str = "undirected",
    subgraph_every: int = 0,
) -> UpdateStream:
    """Random simple-graph stream with a ``q`` after every update.

    Insertions pick uniformly among absent pairs (ordered pairs including
    self-loops in directed mode), deletions uniformly among live edges; when
    one kind is impossible the other is used, except that ``p_delete=0``
    never deletes.  ``subgraph_every`` > 0 adds an
    ``s`` after every that many updates.
    """
    if n < 1 or steps < 0:
        raise ValueError("n must be positive and steps nonnegative")
    if not 0 <= p_delete <= 1:
        raise ValueError("p_delete must lie in [0, 1]")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    stream = UpdateStream(n, mode)
    if mode == "weighted":
        stream.weights = tuple(rng.choice(RANDOM_WEIGHTS) for _ in range(n))
    if mode == "directed":
        pairs = [(u, v) for u in range(n) for v in range(n)]
    else:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    live: list[tuple[int, int]] = []
    absent = set(pairs)
    for step in range(1, steps + 1):
        if not pairs or (not absent and p_delete == 0):
            # nothing to insert and deletions are off: the step is a bare query
            stream.ops.append(Op("q"))
            continue
        delete = bool(live) and (not absent or rng.random() < p_delete)
        if delete:
            e = live.pop(rng.randrange(len(live)))
            absent.add(e)
            stream.ops.append(Op("-", *e))
        else:
            if 2 * len(absent) >= len(pairs):
                # mostly empty graph: rejection sampling takes at most two tries on average
                e = pairs[rng.randrange(len(pairs))]
                while e not in absent:
                    e = pairs[rng.randrange(len(pairs))]
            else:
                e = rng.choice(sorted(absent))
            absent.remove(e)
            live.append(e)
            stream.ops.append(Op("+", *e))
        stream.ops.append(Op("q"))
        if subgraph_every and step % subgraph_every == 0:
            stream.ops.append(Op("s"))
    return stream


# ----------------------------------------------------------------------
# traces

TRACE_COLUMNS = (
    "op_index",
    "op_kind",
    "density_decimal",
    "density_exact",
    "active_index",
    "flips_this_op",
    "max_load_raw",
    "elapsed_ns",
    "subgraph",
)


@dataclass
class TraceRecord:
    op_index: int
    op_kind: str
    density: Optional[Fraction]
    active_index: int
    flips_this_op: int
    max_load_raw: Fraction
    elapsed_ns: Optional[int] = None
    subgraph: Optional[str] = None

    def row(self) -> list[str]:
        has_density = self.density is not None
        return [
            str(self.op_index),
            self.op_kind,
            decimal_str(self.density) if has_density else "",
            fmt_rational(self.density) if has_density else "",
            str(self.active_index),
            str(self.flips_this_op),
            fmt_rational(self.max_load_raw),
            "" if self.elapsed_ns is None else str(self.elapsed_ns),
            self.subgraph or "",
        ]


def decimal_str(x: Fraction, places: int = 12) -> str:
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return f"{d:.{places}f}"


def format_vertex_set(vs: Iterable[int]) -> str:
    return " ".join(str(x) for x in sorted(vs))


def write_trace(records: Sequence[TraceRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for rec in records:
        w.writerow(rec.row())
    return buf.getvalue()


def read_trace(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
