"""Random micro-benchmark problems and the timing/verification harness.

Each problem is a random octagon that contains the origin plus one extra
random constraint that need not.  Randomness comes from
:class:`random.Random` (Mersenne Twister) seeded with the string
``"octclose:<seed>:<trial>"``, so a problem depends only on the seed and
the trial number.
"""

from __future__ import annotations

import hashlib
import random
import statistics
import time
from dataclasses import dataclass, field

from .bounds import MinCounter, NumericMode, format_bound
from .closure import check_integer_consistent, close, strengthen, strong_closure, tight_closure, tighten
from .dbm import Dbm, OctConstraint, from_constraints, set_coherent, translate
from .incremental import ALGORITHMS, fast_unsat, to_difference


class VerificationFailure(RuntimeError):
    """An algorithm disagreed with the non-incremental reference."""


@dataclass
class BenchConfig:
    n_vars: int = 8
    n_constraints: int = 16
    trials: int = 10
    seed: int = 0
    algorithms: tuple[str, ...] = ("mine", "incr", "hoist", "strong")
    mode: NumericMode = NumericMode.RAT
    backend: str = "dense"
    magnitude: int = 8
    unary_fraction: float = 0.5
    repeats: int = 1

    def __post_init__(self):
        if self.trials < 1 or self.n_vars < 1 or self.magnitude <= 0 or self.repeats < 1:
            raise ValueError("trials, n_vars, repeats and magnitude must be positive")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if "tight" in self.algorithms and self.mode is not NumericMode.INT:
            raise ValueError("the tight algorithm needs integer mode")
        if self.mode is NumericMode.INT and {"strong", "strong-reduce"} & set(self.algorithms):
            raise ValueError("strong closure of integer DBMs needs the tight algorithm")
        if self.backend not in ("dense", "codbm"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class BenchRecord:
    algo: str
    n: int
    trial: int
    wall_nanos: int
    min_ops: int
    outcome: str
    checksum: str

    HEADER = "algo,n,trial,wall_nanos,min_ops,outcome,checksum"

    def csv_row(self) -> str:
        return f"{self.algo},{self.n},{self.trial},{self.wall_nanos},{self.min_ops},{self.outcome},{self.checksum}"


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"octclose:{seed}:{trial}")


def random_constraint(rng: random.Random, n: int, lo: int, hi: int, unary_fraction: float = 0.5) -> OctConstraint:
    """Uniform shape (unary/binary, signs, variables) with an integer constant in ``[lo, hi]``."""
    d = rng.randint(lo, hi)
    if n == 1 or rng.random() < unary_fraction:
        return OctConstraint.unary(rng.choice((1, -1)), rng.randrange(n), d)
    i, j = rng.sample(range(n), 2)
    return OctConstraint.binary(rng.choice((1, -1)), i, rng.choice((1, -1)), j, d)


def gen_random(cfg: BenchConfig, trial: int) -> tuple[list[OctConstraint], OctConstraint]:
    """``(system, extra)``: the system always contains the origin, ``extra`` may not."""
    rng = trial_rng(cfg.seed, trial)
    D = cfg.magnitude
    system = [random_constraint(rng, cfg.n_vars, 0, D, cfg.unary_fraction) for _ in range(cfg.n_constraints)]
    extra = random_constraint(rng, cfg.n_vars, -D, D, cfg.unary_fraction)
    return system, extra


def checksum(m: Dbm | None) -> str:
    if m is None:
        return "unsat"
    return hashlib.sha256(m.to_csv().encode()).hexdigest()[:16]


def base_closure(system, cfg: BenchConfig) -> Dbm | None:
    """The closed octagon the incremental algorithms start from."""
    m = from_constraints(cfg.n_vars, cfg.mode, system)
    if cfg.mode is NumericMode.INT:
        return tight_closure(m)
    return strong_closure(m)


def with_constraint(m: Dbm, extra: OctConstraint) -> Dbm:
    """``m`` with the extra constraint written in (pointwise min), not yet closed."""
    out = m.copy()
    for dc in translate(extra):
        d = m.mode.coerce(dc.d)
        if d < out.rows[dc.a][dc.b]:
            set_coherent(out, dc.a, dc.b, d, in_place=True)
    return out


def canonical(closed: Dbm | None) -> Dbm | None:
    """Strong closure (or tight closure for integers) of an already closed DBM."""
    if closed is None:
        return None
    if closed.mode is NumericMode.INT:
        t = check_integer_consistent(tighten(closed))
        return None if t is None else strengthen(t)
    return strengthen(closed)


def reference(base: Dbm, extra: OctConstraint) -> tuple[Dbm | None, Dbm | None]:
    """Non-incremental ``(closure, canonical form)`` of ``base`` plus ``extra``."""
    closed = close(with_constraint(base, extra))
    return closed, canonical(closed)


CLOSURE_ONLY = ("mine", "incr", "hoist")


def _run_one(algo, base: Dbm, extra, cfg: BenchConfig):
    from .codbm import CoDbm, run_over  # local: codbm imports this package's algorithms

    o = to_difference(base, extra)
    timings = []
    for _ in range(cfg.repeats):
        counter = MinCounter()
        if cfg.backend == "codbm":
            c = CoDbm.from_dense(base)
            t0 = time.perf_counter_ns()
            res = run_over(c, algo, o, counter=counter)
            elapsed = time.perf_counter_ns() - t0
            res = None if res is None else res.to_dense()
        else:
            t0 = time.perf_counter_ns()
            res = ALGORITHMS[algo](base, o, counter=counter)
            elapsed = time.perf_counter_ns() - t0
        timings.append(elapsed)
    return res, int(statistics.median(timings)), counter.count


@dataclass
class BenchResult:
    records: list[BenchRecord] = field(default_factory=list)
    fast_unsat_hits: int = 0

    def medians(self) -> dict[str, int]:
        by_algo: dict[str, list[int]] = {}
        for r in self.records:
            by_algo.setdefault(r.algo, []).append(r.wall_nanos)
        return {a: int(statistics.median(v)) for a, v in sorted(by_algo.items())}


def run_bench(cfg: BenchConfig) -> BenchResult:
    """Time every algorithm on the same problems and verify against the reference.

    Closure-only algorithms (``mine``, ``incr``, ``hoist``) must match the
    closure of the augmented system; strong/tight ones its canonical form.
    Raises :class:`VerificationFailure` on any disagreement.
    """
    result = BenchResult()
    for trial in range(cfg.trials):
        system, extra = gen_random(cfg, trial)
        base = base_closure(system, cfg)
        if base is None:
            raise VerificationFailure(f"trial {trial}: generated system does not contain the origin")
        closed_ref, canon_ref = reference(base, extra)
        if fast_unsat(base, to_difference(base, extra)):
            result.fast_unsat_hits += 1
        for algo in cfg.algorithms:
            res, nanos, mins = _run_one(algo, base, extra, cfg)
            expected = closed_ref if algo in CLOSURE_ONLY else canon_ref
            if checksum(res) != checksum(expected):
                raise VerificationFailure(
                    f"trial {trial}: {algo} disagrees with the non-incremental closure "
                    f"(extra constraint {extra})"
                )
            result.records.append(
                BenchRecord(algo, cfg.n_vars, trial, nanos, mins, "unsat" if res is None else "closed", checksum(res))
            )
    result.records.sort(key=lambda r: (r.algo, r.trial))
    return result


def describe(system, extra) -> str:
    lines = [str(c) for c in system]
    return "\n".join(lines) + f"\n# extra: {extra}\n"


__all__ = [
    "BenchConfig",
    "BenchRecord",
    "BenchResult",
    "VerificationFailure",
    "gen_random",
    "random_constraint",
    "run_bench",
    "checksum",
    "format_bound",
]
