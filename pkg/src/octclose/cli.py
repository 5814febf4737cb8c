"""Command-line interface: ``octclose {close,incr,check,gen,bench}``.

Exit codes: 0 success, 1 usage or parse error, 2 unsatisfiable, 3 an
algorithm disagreed with the non-incremental reference.
"""

from __future__ import annotations

import argparse
import random
import re
import sys
import warnings
from dataclasses import asdict

from . import bench
from .bounds import MinCounter, NumericMode, parse_number
from .closure import close, strong_closure, tight_closure
from .codbm import CoDbm, run_over
from .dbm import Dbm, OctConstraint, classify, from_constraints
from .incremental import ALGORITHMS, IN_SITU, TraversalOrder, fast_unsat, to_difference

EXIT_OK, EXIT_USAGE, EXIT_UNSAT, EXIT_VERIFY = 0, 1, 2, 3


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownVariable(ParseError):
    pass


class UsageError(Exception):
    pass


_CONSTRAINT = re.compile(
    r"""^\s*(?P<s1>[+-]?)\s*x(?P<v1>\d+)
        (?:\s*(?P<s2>[+-])\s*x(?P<v2>\d+))?
        \s*<=\s*(?P<d>\S+)\s*$""",
    re.VERBOSE,
)
_HEADER = re.compile(r"^\s*vars\s+(\d+)\s*$")


def parse_constraint(text: str, n: int, mode: NumericMode = NumericMode.RAT,
                     line: int | None = None) -> OctConstraint:
    """One constraint such as ``x0 - x1 <= 7`` or ``-x2 <= 3/2``."""
    match = _CONSTRAINT.match(text)
    if match is None:
        raise ParseError(f"cannot parse constraint {text.strip()!r}", line)
    try:
        d = parse_number(match["d"], mode)
    except ValueError as exc:
        raise ParseError(str(exc), line) from None
    if d == float("inf"):
        raise ParseError("constraint constant must be finite", line)
    s1 = -1 if match["s1"] == "-" else 1
    v1 = int(match["v1"])
    v2 = None if match["v2"] is None else int(match["v2"])
    for v in (v1, v2):
        if v is not None and v >= n:
            raise UnknownVariable(f"x{v} is not declared (vars {n})", line)
    if v2 is None:
        return OctConstraint.unary(s1, v1, d)
    if v2 == v1:
        raise ParseError(f"x{v1} appears twice", line)
    return OctConstraint.binary(s1, v1, -1 if match["s2"] == "-" else 1, v2, d)


def parse_system(text: str, mode: NumericMode = NumericMode.RAT) -> tuple[int, list[OctConstraint]]:
    """Read a ``vars N`` header followed by one constraint per line; ``#`` starts a comment."""
    n = None
    constraints = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        header = _HEADER.match(body)
        if header:
            if n is not None:
                raise ParseError("duplicate vars header", lineno)
            n = int(header.group(1))
            if n < 1:
                raise ParseError("vars must be at least 1", lineno)
            continue
        if n is None:
            raise ParseError("expected a 'vars N' header before the first constraint", lineno)
        constraints.append(parse_constraint(body, n, mode, lineno))
    if n is None:
        raise ParseError("missing 'vars N' header")
    return n, constraints


def format_system(n: int, constraints, extra: OctConstraint | None = None) -> str:
    text = f"vars {n}\n" + "".join(f"{c}\n" for c in constraints)
    if extra is not None:
        text += f"# extra: {extra}\n"
    return text


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dense(result) -> Dbm | None:
    if isinstance(result, CoDbm):
        return result.to_dense()
    return result


def _base_closure(m: Dbm, backend: str):
    pipeline = "tight_closure" if m.mode is NumericMode.INT else "strong_closure"
    if backend == "codbm":
        return run_over(CoDbm.from_dense(m), pipeline)
    return tight_closure(m) if m.mode is NumericMode.INT else strong_closure(m)


def cmd_close(args) -> int:
    mode = NumericMode(args.mode)
    if args.algo == "tight" and mode is not NumericMode.INT:
        raise UsageError("--algo tight needs --mode int")
    n, cs = parse_system(_read(args.input), mode)
    m = from_constraints(n, mode, cs)
    name = {"fw": "close", "strong": "strong_closure", "tight": "tight_closure"}[args.algo]
    if args.backend == "codbm":
        result = _dense(run_over(CoDbm.from_dense(m), name))
    else:
        result = {"close": close, "strong_closure": strong_closure, "tight_closure": tight_closure}[name](m)
    if result is None:
        _emit("UNSAT\n", args.out)
        return EXIT_UNSAT
    _emit(result.to_csv(), args.out)
    return EXIT_OK


def _order(spec: str, n: int) -> TraversalOrder:
    if spec == "rowmajor":
        return TraversalOrder.row_major(n)
    if spec == "colmajor":
        return TraversalOrder.column_major(n)
    if spec.startswith("random:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad order seed in {spec!r}") from None
        return TraversalOrder.random(n, random.Random(f"octclose-order:{seed}"))
    raise UsageError(f"unknown order {spec!r} (rowmajor, colmajor or random:<seed>)")


def cmd_incr(args) -> int:
    mode = NumericMode(args.mode)
    if args.algo == "tight" and mode is not NumericMode.INT:
        raise UsageError("--algo tight needs --mode int")
    if args.algo in ("strong", "strong-reduce") and mode is NumericMode.INT:
        raise UsageError("integer strong closure is --algo tight")
    if args.in_place and args.algo not in IN_SITU:
        raise UsageError(f"--in-place supports {', '.join(IN_SITU)}")
    if args.in_place and args.count_mins:
        raise UsageError("--count-mins is not available with --in-place")

    n, cs = parse_system(_read(args.input), mode)
    extra = parse_constraint(args.constraint, n, mode)
    base = _base_closure(from_constraints(n, mode, cs), args.backend)
    if base is None:
        print("octclose: the base system is unsatisfiable; nothing to add to", file=sys.stderr)
        _emit("UNSAT\n", args.out)
        return EXIT_UNSAT
    o = to_difference(_dense(base), extra)

    counter = MinCounter()
    if fast_unsat(_dense(base), o):
        result = None
    elif args.in_place:
        order = _order(args.order, n)
        if args.algo in ("strong", "tight"):
            order = order.keys_first()
        result = IN_SITU[args.algo](base, o, order)
    elif args.backend == "codbm":
        result = run_over(base, args.algo, o, counter=counter)
    else:
        result = ALGORITHMS[args.algo](base, o, counter=counter)

    result = _dense(result)
    text = "UNSAT\n" if result is None else result.to_csv()
    if args.count_mins:
        text += f"min_ops={counter.count}\n"
    _emit(text, args.out)
    return EXIT_UNSAT if result is None else EXIT_OK


def cmd_check(args) -> int:
    m = Dbm.from_csv(_read(args.input), NumericMode(args.mode))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        props = classify(m)
    lines = [f"{k}={'true' if v else 'false'}" for k, v in asdict(props).items()]
    if m.mode is not NumericMode.INT:
        lines[-1] += "  # only defined for --mode int"
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _config(args, algorithms=()) -> bench.BenchConfig:
    return bench.BenchConfig(
        n_vars=args.vars,
        n_constraints=args.constraints,
        trials=getattr(args, "trials", 1),
        seed=args.seed,
        algorithms=tuple(algorithms),
        mode=NumericMode(args.mode),
        backend=args.backend,
        magnitude=args.magnitude,
        unary_fraction=args.unary_fraction,
        repeats=getattr(args, "repeats", 1),
    )


def cmd_gen(args) -> int:
    try:
        cfg = _config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    system, extra = bench.gen_random(cfg, args.trial)
    _emit(format_system(cfg.n_vars, system, extra), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    algorithms = [a.strip() for a in args.algos.split(",") if a.strip()]
    try:
        cfg = _config(args, algorithms)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        result = bench.run_bench(cfg)
    except bench.VerificationFailure as exc:
        print(f"octclose: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    text = bench.BenchRecord.HEADER + "\n" + "".join(r.csv_row() + "\n" for r in result.records)
    _emit(text, args.csv)
    for algo, nanos in result.medians().items():
        print(f"median {algo}: {nanos} ns", file=sys.stderr)
    print(f"fast-unsat hits: {result.fast_unsat_hits}/{cfg.trials}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[m.value for m in NumericMode], default="rat")
    common.add_argument("--backend", choices=["dense", "codbm"], default="dense")
    common.add_argument("--out", help="write the result here instead of stdout")

    gen_opts = argparse.ArgumentParser(add_help=False)
    gen_opts.add_argument("--vars", type=int, default=8)
    gen_opts.add_argument("--constraints", type=int, default=16)
    gen_opts.add_argument("--seed", type=int, default=0)
    gen_opts.add_argument("--magnitude", type=int, default=8, help="constants are drawn from [0, D] / [-D, D]")
    gen_opts.add_argument("--unary-fraction", type=float, default=0.5)

    p = argparse.ArgumentParser(prog="octclose", description="Octagon closure kernel")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("close", parents=[common], help="close a constraint system")
    c.add_argument("input")
    c.add_argument("--algo", choices=["fw", "strong", "tight"], default="strong")
    c.set_defaults(func=cmd_close)

    i = sub.add_parser("incr", parents=[common], help="close a system, then add one constraint incrementally")
    i.add_argument("input")
    i.add_argument("constraint")
    i.add_argument("--algo", choices=list(ALGORITHMS), default="incr")
    i.add_argument("--in-place", action="store_true")
    i.add_argument("--order", default="rowmajor", help="rowmajor, colmajor or random:<seed>")
    i.add_argument("--count-mins", action="store_true")
    i.set_defaults(func=cmd_incr)

    k = sub.add_parser("check", parents=[common], help="report closure properties of a CSV dump")
    k.add_argument("input")
    k.set_defaults(func=cmd_check)

    g = sub.add_parser("gen", parents=[common, gen_opts], help="print a random benchmark problem")
    g.add_argument("--trial", type=int, default=0)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", parents=[common, gen_opts], help="time and verify the incremental algorithms")
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--repeats", type=int, default=1, help="timing repetitions per trial (median kept)")
    b.add_argument("--algos", default="mine,incr,hoist,strong")
    b.add_argument("--csv", help="CSV output path (default stdout)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError, ArithmeticError) as exc:
        print(f"octclose: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"octclose: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
