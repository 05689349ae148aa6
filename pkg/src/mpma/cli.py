"""Command-line interface.

Exit codes: 0 ok, 1 bad input data, 2 corner assertion in strict mode, 64 usage.

Module documents are JSON objects::

    {"n_params": 2, "delta": 0.25, "box": {"low": [...], "high": [...]},
     "intervals": [{"dim": 0, "birth_corners": [[0.0, "-inf"]], "death_corners": [["inf", 3.0]],
                    "n_bars": 12}],
     "warnings": ["..."]}

Infinite coordinates are written as the strings "inf" and "-inf".
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .approximation import ApproxModule, CornerAssertionError, IntervalModule, approximate_module
from .bench import bench_csv, run_bench
from .complex import ComplexError, FilteredComplex, parse_complex, serialize
from .fixtures import FIXTURE_NAMES, fixture_info
from .grid import Box
from .metrics import bottleneck_estimate, default_probe, estimate_interleaving, rasterize

EXIT_OK, EXIT_DATA, EXIT_ASSERT, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class DocumentError(ValueError):
    """A module document does not follow the schema."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# Module documents


def _encode(v: float) -> float | str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(v)


def _decode(v: Any) -> float:
    if isinstance(v, str):
        if v in ("inf", "-inf"):
            return float(v)
        raise DocumentError(f"bad coordinate {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DocumentError(f"bad coordinate {v!r}")
    return float(v)


def module_to_doc(intervals: Sequence[IntervalModule], n_params: int, delta: float | None,
                  box: Box | None, warnings: Sequence[str] = ()) -> dict:
    return {
        "n_params": n_params,
        "delta": delta,
        "box": None if box is None else {"low": [_encode(v) for v in box.low], "high": [_encode(v) for v in box.high]},
        "intervals": [
            {
                "dim": I.hom_dim,
                "birth_corners": [[_encode(v) for v in c] for c in I.births.tolist()],
                "death_corners": [[_encode(v) for v in c] for c in I.deaths.tolist()],
                "n_bars": I.n_bars,
            }
            for I in intervals
        ],
        "warnings": list(warnings),
    }


def approx_to_doc(M: ApproxModule) -> dict:
    return module_to_doc(M.intervals, M.n_params, M.delta, M.box, M.warnings)


def dump_doc(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def _corners(raw: Any, n: int, what: str) -> list[tuple[float, ...]]:
    if not isinstance(raw, list):
        raise DocumentError(f"{what} must be a list")
    out = []
    for c in raw:
        if not isinstance(c, list) or len(c) != n:
            raise DocumentError(f"{what} entries must be lists of {n} coordinates")
        out.append(tuple(_decode(v) for v in c))
    return out


def doc_to_module(doc: Any) -> tuple[list[IntervalModule], int, Box | None, dict]:
    if not isinstance(doc, dict):
        raise DocumentError("module document must be a JSON object")
    n = doc.get("n_params")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DocumentError("n_params must be a positive integer")
    box = None
    if doc.get("box") is not None:
        b = doc["box"]
        if not isinstance(b, dict) or "low" not in b or "high" not in b:
            raise DocumentError("box must have low and high")
        low, high = _corners([b["low"], b["high"]], n, "box")
        try:
            box = Box(np.array(low), np.array(high))
        except ValueError as exc:
            raise DocumentError(str(exc)) from None
    raw = doc.get("intervals")
    if not isinstance(raw, list):
        raise DocumentError("intervals must be a list")
    intervals = []
    for k, item in enumerate(raw):
        if not isinstance(item, dict):
            raise DocumentError(f"interval {k} must be an object")
        dim = item.get("dim")
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
            raise DocumentError(f"interval {k}: dim must be a nonnegative integer")
        births = _corners(item.get("birth_corners"), n, f"interval {k} birth_corners")
        deaths = _corners(item.get("death_corners"), n, f"interval {k} death_corners")
        intervals.append(IntervalModule(births, deaths, dim, int(item.get("n_bars", 0))))
    return intervals, n, box, doc


def load_doc(path: str) -> tuple[list[IntervalModule], int, Box | None, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON: {exc}") from None
    return doc_to_module(doc)


# Argument helpers


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return v


def _dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must be comma-separated integers, got {text!r}") from None
    if not dims or min(dims) < 0:
        raise argparse.ArgumentTypeError("dims must be a nonempty list of nonnegative integers")
    return dims


def _box_arg(text: str) -> str | Box:
    """'auto' or 'l1,...,ln:h1,...,hn'."""
    if text == "auto":
        return text
    try:
        lo, hi = text.split(":")
        return Box(np.array([float(x) for x in lo.split(",")]), np.array([float(x) for x in hi.split(",")]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"box must be 'auto' or 'l1,..,ln:h1,..,hn' ({exc})") from None


def resolve_threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("MPMA_THREADS")
    if env is None:
        return 1
    try:
        return _positive_int(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"MPMA_THREADS: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_complex(args) -> tuple[FilteredComplex, tuple[int, ...] | None]:
    if args.fixture:
        fx = fixture_info(args.fixture)
        return fx.complex, fx.dims
    return parse_complex(Path(args.input).read_bytes()), None


def _warning_summary(warnings: Sequence[str]) -> str:
    if not warnings:
        return "warnings: none"
    kinds: dict[str, int] = {}
    for w in warnings:
        key = w.split(" between ")[0].split(" on line ")[0].split(" with ")[0]
        kinds[key] = kinds.get(key, 0) + 1
    parts = ", ".join(f"{v}× {k}" for k, v in sorted(kinds.items()))
    return f"warnings: {len(warnings)} ({parts})"


# Commands


def cmd_approximate(args) -> int:
    resolve_threads(args.threads)
    C, fixture_dims = _load_complex(args)
    dims = args.dims or fixture_dims or tuple(range(C.max_dim + 1))
    K = None if args.box == "auto" else args.box
    if K is not None and K.n != C.n_params:
        raise UsageError(f"box has {K.n} coordinates but the complex has {C.n_params} parameters")
    t0 = time.perf_counter()
    M = approximate_module(C, K, args.delta, matcher=args.matcher, dims=dims, tol=args.tol, strict=not args.lenient)
    elapsed = time.perf_counter() - t0
    _write(args.out, dump_doc(approx_to_doc(M)))
    log = sys.stderr if args.out in (None, "-") else sys.stdout
    print(f"summands: {len(M.intervals)}", file=log)
    print(f"lines: {M.n_lines}", file=log)
    print(f"seconds: {elapsed:.3f}", file=log)
    print(_warning_summary(M.warnings), file=log)
    for w in M.warnings:
        if "ambiguous" in w:
            print("hint: compatibility matching was ambiguous; try --matcher vineyard or a smaller --delta", file=log)
            break
    return EXIT_OK


def cmd_rasterize(args) -> int:
    resolve_threads(args.threads)
    intervals, n, box, _ = load_doc(args.module)
    if args.box != "auto":
        box = args.box
    if box is None or not np.all(np.isfinite(box.low)) or not np.all(np.isfinite(box.high)):
        raise DocumentError("module has no finite box; pass --box explicitly")
    if box.n != n:
        raise UsageError(f"box has {box.n} coordinates but the module has {n} parameters")
    R = rasterize(intervals, box, args.resolution)
    _write(args.out, R.to_csv() if args.format == "csv" else R.to_json() + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    A, nA, _, _ = load_doc(args.a)
    B, nB, _, _ = load_doc(args.b)
    if nA != nB:
        raise DocumentError(f"modules have {nA} and {nB} parameters")
    probe = default_probe(A, B)
    if probe is None:
        d_i = d_b = 0.0
    else:
        d_i = estimate_interleaving(A, B, probe, args.resolution)
        d_b = bottleneck_estimate(A, B, probe, args.resolution)
    lines = [f"resolution={args.resolution!r}"]
    if probe is not None:
        lines.append(f"probe_low={','.join(repr(float(v)) for v in probe.low)}")
        lines.append(f"probe_high={','.join(repr(float(v)) for v in probe.high)}")
    lines += [f"d_I={d_i!r}", f"d_b={d_b!r}"]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    resolve_threads(args.threads)
    rows = run_bench(args.sizes, args.deltas, args.matcher, args.params, seed=args.seed)
    _write(args.out, bench_csv(rows))
    return EXIT_OK


def cmd_inspect(args) -> int:
    path = args.path
    if args.fixture:
        C = fixture_info(args.fixture).complex
    else:
        text = Path(path).read_text(encoding="utf-8")
        if text.lstrip().startswith("{"):
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DocumentError(f"{path}: invalid JSON: {exc}") from None
            intervals, n, box, raw = doc_to_module(doc)
            print(f"module: {len(intervals)} intervals, n_params={n}, delta={raw.get('delta')}")
            if box is not None:
                print(f"box: {box.low.tolist()} .. {box.high.tolist()}")
            for k, I in enumerate(intervals):
                print(f"  [{k}] dim={I.hom_dim} births={len(I.births)} deaths={len(I.deaths)} bars={I.n_bars}")
            print(_warning_summary(raw.get("warnings") or []))
            return EXIT_OK
        C = parse_complex(text)
    counts: dict[int, int] = {}
    for s in C.simplices:
        counts[s.dim] = counts.get(s.dim, 0) + 1
    box = C.bounding_box()
    print(f"complex: {len(C)} simplices, n_params={C.n_params}")
    print("by dimension: " + ", ".join(f"{d}:{c}" for d, c in sorted(counts.items())))
    print(f"grade box: {box.low.tolist()} .. {box.high.tolist()}")
    return EXIT_OK


def cmd_fixture(args) -> int:
    if args.list or not args.name:
        for name in FIXTURE_NAMES:
            print(f"{name}: {fixture_info(name).note}")
        return EXIT_OK
    fx = fixture_info(args.name)
    _write(args.out, serialize(fx.complex))
    if args.truth:
        if fx.truth is None:
            raise UsageError(f"fixture {fx.name} has no interval decomposition to write")
        doc = module_to_doc(fx.truth, fx.complex.n_params, None, fx.complex.bounding_box())
        Path(args.truth).write_text(dump_doc(doc), encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mpma", description="Interval-decomposable approximation of multi-parameter persistence modules")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("approximate", help="approximate the module of a complex by intervals")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", "-i", help="complex file in mpcomplex format")
    src.add_argument("--fixture", choices=FIXTURE_NAMES, help="built-in fixture complex")
    a.add_argument("--delta", type=_positive_float, required=True, help="grid spacing")
    a.add_argument("--box", type=_box_arg, default="auto", help="'auto' or 'l1,..,ln:h1,..,hn'")
    a.add_argument("--matcher", choices=("vineyard", "compatibility"), default="vineyard")
    a.add_argument("--dims", type=_dims, help="homology degrees, comma-separated")
    a.add_argument("--tol", type=_positive_float, help="coordinate equality tolerance")
    a.add_argument("--lenient", action="store_true", help="warn instead of failing on unlabeled endpoints outside K")
    a.add_argument("--out", "-o", help="output JSON path (default stdout)")
    a.add_argument("--threads", type=_positive_int)
    a.set_defaults(func=cmd_approximate)

    r = sub.add_parser("rasterize", help="pointwise dimension of a module on a pixel grid")
    r.add_argument("module")
    r.add_argument("--box", type=_box_arg, default="auto")
    r.add_argument("--resolution", type=_positive_int, default=100)
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--out", "-o")
    r.add_argument("--threads", type=_positive_int)
    r.set_defaults(func=cmd_rasterize)

    c = sub.add_parser("compare", help="interleaving and bottleneck estimates between two modules")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--resolution", type=_positive_float, default=0.01)
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_compare)

    b = sub.add_parser("bench", help="time the approximation on random lower-star complexes")
    b.add_argument("--sizes", type=int, nargs="+", default=[1500], help="simplex budgets")
    b.add_argument("--deltas", type=_positive_float, nargs="+", default=[0.01, 0.0025])
    b.add_argument("--matcher", choices=("vineyard", "compatibility"), default="vineyard")
    b.add_argument("--params", type=_positive_int, default=2)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", "-o")
    b.add_argument("--threads", type=_positive_int)
    b.set_defaults(func=cmd_bench)

    i = sub.add_parser("inspect", help="summarize a complex file or a module document")
    i.add_argument("path", nargs="?")
    i.add_argument("--fixture", choices=FIXTURE_NAMES)
    i.set_defaults(func=cmd_inspect)

    f = sub.add_parser("fixture", help="write a built-in fixture complex")
    f.add_argument("name", nargs="?", choices=FIXTURE_NAMES)
    f.add_argument("--out", "-o")
    f.add_argument("--truth", help="also write the known decomposition as a module document")
    f.add_argument("--list", action="store_true")
    f.set_defaults(func=cmd_fixture)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "inspect" and not args.path and not args.fixture:
        parser.print_usage(sys.stderr)
        print("mpma inspect: a path or --fixture is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mpma: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CornerAssertionError as exc:
        print(f"mpma: corner assertion failed: {exc}", file=sys.stderr)
        print("hint: rerun with --lenient to fall back to raw endpoints", file=sys.stderr)
        return EXIT_ASSERT
    except (ComplexError, DocumentError, OSError, ValueError) as exc:
        print(f"mpma: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
