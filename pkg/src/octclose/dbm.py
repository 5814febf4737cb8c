"""Difference-bound matrices representing octagons.

Variable ``x_k`` is split into the extended variables ``x'_{2k}`` (= +x_k)
and ``x'_{2k+1}`` (= -x_k); entry ``(i, j)`` of a DBM bounds
``x'_i - x'_j``.  Storage is a dense ``2n x 2n`` list of rows.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .bounds import POS_INF, Bound, CheckedInt, NumericMode, format_bound, is_even, parse_number


class DimensionMismatch(ValueError):
    pass


def bar(i: int) -> int:
    """Index of the opposite-sign extended variable."""
    return i ^ 1


class Dbm:
    """Dense ``2n x 2n`` matrix of bounds.

    Rows are plain lists; algorithms may read ``rows`` directly and replace
    whole rows, but should not mutate a row list they did not create.
    """

    __slots__ = ("n", "mode", "rows")

    def __init__(self, n: int, mode: NumericMode, rows: list[list[Bound]]):
        if n < 1:
            raise ValueError("an octagon needs at least one variable")
        if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
            raise DimensionMismatch(f"expected a {2 * n}x{2 * n} matrix")
        self.n = n
        self.mode = mode
        self.rows = rows

    @property
    def dim(self) -> int:
        return 2 * self.n

    @classmethod
    def filled(cls, n: int, mode: NumericMode, value: Bound = POS_INF) -> "Dbm":
        dim = 2 * n
        return cls(n, mode, [[value] * dim for _ in range(dim)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], mode: NumericMode = NumericMode.RAT) -> "Dbm":
        """Build from a square nested sequence of numbers / literals (``"inf"``)."""
        dim = len(rows)
        if dim % 2:
            raise DimensionMismatch("an octagon DBM has even dimension")
        return cls(dim // 2, mode, [[mode.coerce(v) for v in r] for r in rows])

    def like(self, rows: list[list[Bound]]) -> "Dbm":
        """A matrix of the same kind and shape holding ``rows``."""
        return Dbm(self.n, self.mode, rows)

    def blank(self) -> "Dbm":
        return Dbm.filled(self.n, self.mode)

    def copy(self) -> "Dbm":
        return Dbm(self.n, self.mode, [list(r) for r in self.rows])

    def __getitem__(self, ij: tuple[int, int]) -> Bound:
        i, j = ij
        return self.rows[i][j]

    def __setitem__(self, ij: tuple[int, int], value: Bound) -> None:
        i, j = ij
        self.rows[i][j] = value

    def entries(self) -> Iterator[tuple[int, int, Bound]]:
        for i, r in enumerate(self.rows):
            for j, v in enumerate(r):
                yield i, j, v

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dbm):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    __hash__ = None

    def __le__(self, other: "Dbm") -> bool:
        """Pointwise order."""
        _check_same_shape(self, other)
        return all(x <= y for r1, r2 in zip(self.rows, other.rows) for x, y in zip(r1, r2))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_bound(v) for v in r) for r in self.rows)
        return f"Dbm(n={self.n}, {self.mode.value}, [{body}])"

    def to_csv(self) -> str:
        return "".join(",".join(format_bound(v) for v in r) + "\n" for r in self.rows)

    @classmethod
    def from_csv(cls, text: str, mode: NumericMode = NumericMode.RAT) -> "Dbm":
        rows = [
            [parse_number(cell, mode) for cell in line.split(",")]
            for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        dim = len(rows)
        if dim == 0 or dim % 2:
            raise DimensionMismatch("an octagon DBM has non-zero even dimension")
        return cls(dim // 2, mode, rows)


def _check_same_shape(m1: Dbm, m2: Dbm) -> None:
    if m1.n != m2.n or m1.mode is not m2.mode:
        raise DimensionMismatch(f"cannot compare n={m1.n}/{m1.mode.value} with n={m2.n}/{m2.mode.value}")


def dbm_equal(m1: Dbm, m2: Dbm) -> bool:
    _check_same_shape(m1, m2)
    return m1.rows == m2.rows


def top(n: int, mode: NumericMode = NumericMode.RAT) -> Dbm:
    """The unconstrained octagon: zero diagonal, ``POS_INF`` elsewhere."""
    m = Dbm.filled(n, mode)
    zero = mode.coerce(0)
    for i in range(m.dim):
        m.rows[i][i] = zero
    return m


def set_coherent(m: Dbm, i: int, j: int, b: Bound, in_place: bool = False) -> Dbm:
    """Set entry ``(i, j)`` together with its mirror ``(bar(j), bar(i))``."""
    out = m if in_place else m.copy()
    out.rows[i][j] = b
    out.rows[bar(j)][bar(i)] = b
    return out


@dataclass(frozen=True)
class OctConstraint:
    """``sign_i*x_i + sign_j*x_j <= d``, or ``sign_i*x_i <= d`` when ``j`` is None."""

    sign_i: int
    i: int
    d: Bound
    sign_j: int | None = None
    j: int | None = None

    def __post_init__(self):
        if self.sign_i not in (1, -1) or (self.j is not None and self.sign_j not in (1, -1)):
            raise ValueError("signs must be +1 or -1")
        if self.j is not None and self.j == self.i:
            raise ValueError("binary constraint needs two distinct variables")
        if self.d == POS_INF:
            raise ValueError("constraint constant must be finite")

    @classmethod
    def unary(cls, sign: int, i: int, d: Bound) -> "OctConstraint":
        return cls(sign, i, d)

    @classmethod
    def binary(cls, sign_i: int, i: int, sign_j: int, j: int, d: Bound) -> "OctConstraint":
        return cls(sign_i, i, d, sign_j, j)

    @property
    def is_unary(self) -> bool:
        return self.j is None

    def variables(self) -> tuple[int, ...]:
        return (self.i,) if self.j is None else (self.i, self.j)

    def __str__(self) -> str:
        s = ("" if self.sign_i > 0 else "-") + f"x{self.i}"
        if self.j is not None:
            s += (" + " if self.sign_j > 0 else " - ") + f"x{self.j}"
        return f"{s} <= {format_bound(self.d)}"


@dataclass(frozen=True)
class DiffConstraint:
    """``x'_a - x'_b <= d`` over extended variables."""

    a: int
    b: int
    d: Bound


def translate(c: OctConstraint) -> list[DiffConstraint]:
    """Difference constraints equivalent to one octagonal constraint.

    Binary constraints give the pair ``(a, b)`` and its mirror
    ``(bar(b), bar(a))``; unary constraints give a single self-mirrored
    entry with the constant doubled.
    """
    a = 2 * c.i if c.sign_i > 0 else 2 * c.i + 1
    if c.j is None:
        return [DiffConstraint(a, bar(a), c.d + c.d)]
    # +x_j is -x'_{2j+1}
    b = 2 * c.j + 1 if c.sign_j > 0 else 2 * c.j
    return [DiffConstraint(a, b, c.d), DiffConstraint(bar(b), bar(a), c.d)]


def from_constraints(n: int, mode: NumericMode, cs: Iterable[OctConstraint]) -> Dbm:
    """DBM of a constraint system, before closure (the diagonal stays ``POS_INF``)."""
    m = Dbm.filled(n, mode)
    rows = m.rows
    for c in cs:
        for v in c.variables():
            if not 0 <= v < n:
                raise IndexError(f"variable x{v} out of range for n={n}")
        c = OctConstraint(c.sign_i, c.i, mode.coerce(c.d), c.sign_j, c.j)
        for dc in translate(c):
            if dc.d < rows[dc.a][dc.b]:
                rows[dc.a][dc.b] = dc.d
                rows[bar(dc.b)][bar(dc.a)] = dc.d
    return m


@dataclass(frozen=True)
class DbmProperties:
    coherent: bool
    consistent: bool
    closed: bool
    strongly_closed: bool
    weakly_closed: bool
    tightly_closed: bool


def _exact(b: Bound):
    # CheckedInt sums inside the oracle must not trip the overflow guard
    if isinstance(b, CheckedInt):
        return int(b)
    return b


def classify(m: Dbm) -> DbmProperties:
    """Evaluate every closure property by brute force over all index triples.

    This is the reference oracle for the algorithms; it is cubic in the
    dimension and makes no shortcuts.  Tight closure is only defined for
    integer DBMs; other modes report ``tightly_closed=False`` with a warning.
    """
    dim = m.dim
    e = [[_exact(v) for v in r] for r in m.rows]
    rng = range(dim)

    coherent = all(e[i][j] == e[bar(j)][bar(i)] for i in rng for j in rng)
    consistent = all(e[i][i] >= 0 for i in rng)
    zero_diag = all(e[i][i] == 0 for i in rng)
    closed = zero_diag and all(e[i][j] <= e[i][k] + e[k][j] for i in rng for j in rng for k in rng)
    # m[i][j] <= m[i][bar i]/2 + m[bar j][j]/2, compared without halving
    unary_bound = [[e[i][bar(i)] + e[bar(j)][j] for j in rng] for i in rng]
    strong_pairs = all(2 * e[i][j] <= unary_bound[i][j] for i in rng for j in rng)
    strongly_closed = closed and strong_pairs

    def relaxed(i, j):
        u = unary_bound[i][j]
        return min(e[i][j], u if u == POS_INF else Fraction(u) / 2)

    weakly_closed = zero_diag and all(
        e[i][k] + e[k][j] >= relaxed(i, j) for i in rng for j in rng for k in rng
    )

    if m.mode is NumericMode.INT:
        tightly_closed = strongly_closed and all(is_even(e[i][bar(i)]) for i in rng)
    else:
        warnings.warn("tight closure is only defined for integer DBMs", stacklevel=2)
        tightly_closed = False

    return DbmProperties(coherent, consistent, closed, strongly_closed, weakly_closed, tightly_closed)


def gamma_contains(m: Dbm, point: Sequence) -> bool:
    """Whether the rational point lies in the octagon described by ``m``."""
    if len(point) != m.n:
        raise DimensionMismatch(f"point has {len(point)} coordinates, DBM has {m.n} variables")
    ext = []
    for v in point:
        v = Fraction(v)
        ext.extend((v, -v))
    for i, r in enumerate(m.rows):
        vi = ext[i]
        for j, bound in enumerate(r):
            if bound != POS_INF and vi - ext[j] > _exact(bound):
                return False
    return True
