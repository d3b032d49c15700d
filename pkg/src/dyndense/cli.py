"""Command-line front end: ``run``, ``verify`` and ``bench``.

Exit codes: 0 ok, 1 usage, 2 parse or input error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .directed import GRIDS
from .harness import Config, bench, replay
from .lazy_labels import StoreError
from .oracle import OracleLimitError
from .stream import MODES, StreamParseError, UpdateStream, gen_random, parse, write_trace
from .threshold import ChainBudgetError

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _epsilon(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    if not 0 < eps < 1:
        raise argparse.ArgumentTypeError("epsilon must lie strictly between 0 and 1")
    return eps


def _positive(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return x


def _probability(text: str) -> float:
    p = float(text)
    if not 0 <= p <= 1:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("input", nargs="?", help="stream file, or '-' for standard input")
    common.add_argument("--mode", choices=MODES, help="graph kind; must match the stream header when one is given")
    common.add_argument("--epsilon", type=_epsilon, default=Fraction(1, 2), metavar="P/Q")
    common.add_argument("--alpha", type=_positive, metavar="N", help="override the duplication factor")
    common.add_argument("--engine", choices=("auto", "python", "numba"), default="auto")
    common.add_argument("--grid", choices=sorted(GRIDS), default="geometric", help="t grid for directed mode")
    common.add_argument("--strict", action="store_true", help="reject deletions of non-live edges while parsing")
    common.add_argument("--parallel", action="store_true", help="fan directed updates out over threads")

    gen = _Parser(add_help=False)
    gen.add_argument("--n", type=_positive, default=8, help="vertices of a generated stream")
    gen.add_argument("--steps", type=int, default=200, metavar="N")
    gen.add_argument("--seed", type=int, default=0, metavar="N")
    gen.add_argument("--p-delete", type=_probability, default=0.3)
    gen.add_argument("--subgraph-every", type=int, default=0, metavar="K", help="add an 's' every K updates")

    p = _Parser(prog="dyndense", description="Approximate densest subgraph under edge updates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", parents=[common], help="replay a stream and write a CSV trace")
    r.add_argument("--trace", default="-", metavar="PATH")
    r.add_argument("--timing", action="store_true", help="fill elapsed_ns (makes traces nondeterministic)")

    v = sub.add_parser("verify", parents=[common, gen], help="replay with exact oracle checks")
    v.add_argument("--seeds", type=_positive, default=1, help="number of consecutive seeds when generating")
    v.add_argument("--trace", metavar="PATH", help="also write the trace of a single stream")

    b = sub.add_parser("bench", parents=[common, gen], help="report throughput and flip statistics")
    b.add_argument("--json", action="store_true", help="emit one JSON object instead of text")
    return p


def _read_input(path: Optional[str]) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _has_content(text: str) -> bool:
    return any(line.split("#", 1)[0].strip() for line in text.splitlines())


def _load(args) -> Optional[UpdateStream]:
    """Parse the input stream; ``None`` for an input without any content."""
    text = _read_input(args.input)
    if not _has_content(text):
        return None
    stream = parse(text, strict=args.strict)
    if args.mode and args.mode != stream.mode:
        raise UsageError(f"--mode {args.mode} contradicts the stream header mode={stream.mode}")
    return stream


def _config(args) -> Config:
    return Config(
        eps=args.epsilon,
        alpha=args.alpha,
        engine=args.engine,
        grid=args.grid,
        strict=args.strict,
        timing=getattr(args, "timing", False),
        parallel=args.parallel,
    )


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _generated(args, seed: int) -> UpdateStream:
    return gen_random(args.n, args.steps, seed, args.p_delete, args.mode or "undirected", args.subgraph_every)


def cmd_run(args) -> int:
    stream = _load(args)
    records = [] if stream is None else replay(stream, _config(args))[0]
    _write(args.trace, write_trace(records))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.input is not None:
        stream = _load(args)
        streams = [] if stream is None else [("input", stream)]
    else:
        streams = [(f"seed {s}", _generated(args, s)) for s in range(args.seed, args.seed + args.seeds)]
    failed = 0
    worst = 0.0
    for label, stream in streams:
        records, rep = replay(stream, cfg, verify=True)
        worst = max(worst, rep.max_rel_error)
        status = "ok" if rep.ok else "FAIL"
        print(
            f"{label}: {status} ops={rep.ops} queries={rep.queries} subgraph_queries={rep.subgraph_queries} "
            f"max_rel_error={rep.max_rel_error:.6f} violations={rep.violation_count}"
        )
        for msg in rep.violations:
            print(f"  {label}: {msg}", file=sys.stderr)
        if not rep.ok:
            failed += 1
        if args.trace and len(streams) == 1:
            _write(args.trace, write_trace(records))
    print(f"streams={len(streams)} failed={failed} max_rel_error={worst:.6f}")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_bench(args) -> int:
    if args.input is not None:
        stream = _load(args) or UpdateStream(1, args.mode or "undirected")
    else:
        stream = _generated(args, args.seed)
    res = bench(stream, _config(args))
    summary = {
        "n": res.n,
        "mode": stream.mode,
        "engine": res.engine,
        "alpha": res.alpha,
        "updates": res.updates,
        "seconds": res.seconds,
        "ops_per_sec": res.ops_per_sec,
        "mean_flips_per_update": res.mean_flips,
        "max_flips_per_update": res.max_flips,
        "mean_flips_per_update_over_alpha": res.mean_flips / res.alpha,
        "mean_chain_length": res.mean_chain,
        "per_copy": res.per_copy,
    }
    if args.json:
        print(json.dumps(summary, indent=2))
        return EXIT_OK
    for key, val in summary.items():
        if key == "per_copy":
            continue
        print(f"{key}: {val:.4f}" if isinstance(val, float) else f"{key}: {val}")
    cols = list(res.per_copy[0]) if res.per_copy else []
    print("per_copy:")
    print("  " + " ".join(f"{c:>10}" for c in cols))
    for row in res.per_copy:
        print("  " + " ".join(f"{row[c]:>10}" for c in cols))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "verify": cmd_verify, "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dyndense: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleLimitError as exc:
        print(f"dyndense: refusing to verify: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StreamParseError, StoreError, OSError) as exc:
        print(f"dyndense: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ChainBudgetError as exc:
        print(f"dyndense: budget violated: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
