"""Compact DBMs: a coherence-aware half matrix of handles into a value cache.

Only one entry of each coherent pair ``(i, j) ~ (bar j, bar i)`` is stored.
Row ``i`` of the half matrix holds columns ``0 .. i|1`` and starts at offset
``(i+1)**2 // 2``, giving ``2n(n+1)`` cells for ``n`` variables.  Each cell
holds a handle into an append-only cache of distinct bounds; handle 0 is
``POS_INF``.  A sorted table over the cache finds existing handles by
bisection.

A :class:`CoDbm` exposes the same ``rows`` / ``like`` / ``copy`` surface as
:class:`~octclose.dbm.Dbm`, so every closure algorithm runs on it unchanged,
reading and writing entries through :meth:`CoDbm.get` and :meth:`CoDbm.set`.
"""

from __future__ import annotations

from bisect import bisect_left
from functools import lru_cache
from typing import Callable

from . import closure, incremental
from .bounds import POS_INF, Bound, MinCounter, NumericMode
from .dbm import Dbm, DiffConstraint, bar


def half_index(i: int, j: int) -> int:
    if i >= j or i == j ^ 1:
        return j + (i + 1) * (i + 1) // 2
    return half_index(j ^ 1, i ^ 1)


def half_size(n: int) -> int:
    return 2 * n * (n + 1)


@lru_cache(maxsize=None)
def _row_indices(n: int) -> tuple[tuple[int, ...], ...]:
    dim = 2 * n
    return tuple(tuple(half_index(i, j) for j in range(dim)) for i in range(dim))


class _Row:
    __slots__ = ("_c", "_idx")

    def __init__(self, c: "CoDbm", i: int):
        self._c = c
        self._idx = c._rows_idx[i]

    def __getitem__(self, j: int) -> Bound:
        c = self._c
        return c.cache[c.cells[self._idx[j]]]

    def __setitem__(self, j: int, value: Bound) -> None:
        c = self._c
        c.cells[self._idx[j]] = c.intern(value)

    def __iter__(self):
        cache, cells = self._c.cache, self._c.cells
        return (cache[cells[k]] for k in self._idx)

    def __len__(self) -> int:
        return len(self._idx)


class _Rows:
    __slots__ = ("_c",)

    def __init__(self, c: "CoDbm"):
        self._c = c

    def __getitem__(self, i: int) -> _Row:
        if not 0 <= i < self._c.dim:
            raise IndexError(i)
        return _Row(self._c, i)

    def __iter__(self):
        return (_Row(self._c, i) for i in range(self._c.dim))

    def __len__(self) -> int:
        return self._c.dim


class CoDbm:
    """Compact DBM.  Writing ``(i, j)`` also writes its coherent mirror."""

    def __init__(self, n: int, mode: NumericMode):
        if n < 1:
            raise ValueError("an octagon needs at least one variable")
        self.n = n
        self.mode = mode
        self.cache: list[Bound] = [POS_INF]
        self._sorted: list[Bound] = [POS_INF]
        self._handles: list[int] = [0]
        self.cells: list[int] = [0] * half_size(n)
        self._rows_idx = _row_indices(n)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def intern(self, b: Bound) -> int:
        """Handle of ``b`` in the cache, appending it if new."""
        k = bisect_left(self._sorted, b)
        if k < len(self._sorted) and self._sorted[k] == b:
            return self._handles[k]
        h = len(self.cache)
        self.cache.append(b)
        self._sorted.insert(k, b)
        self._handles.insert(k, h)
        return h

    def get(self, i: int, j: int) -> Bound:
        return self.cache[self.cells[half_index(i, j)]]

    def set(self, i: int, j: int, b: Bound) -> None:
        self.cells[half_index(i, j)] = self.intern(b)

    @property
    def rows(self) -> _Rows:
        return _Rows(self)

    def like(self, rows) -> "CoDbm":
        """A fresh compact DBM holding the (coherent) dense ``rows``."""
        out = CoDbm(self.n, self.mode)
        for i, r in enumerate(rows):
            for j in range(min(i | 1, self.dim - 1) + 1):
                out.cells[half_index(i, j)] = out.intern(r[j])
        return out

    def copy(self) -> "CoDbm":
        out = CoDbm(self.n, self.mode)
        out.cache = list(self.cache)
        out._sorted = list(self._sorted)
        out._handles = list(self._handles)
        out.cells = list(self.cells)
        return out

    @classmethod
    def from_dense(cls, m: Dbm) -> "CoDbm":
        rows = m.rows
        dim = m.dim
        for i in range(dim):
            for j in range(dim):
                if rows[i][j] != rows[bar(j)][bar(i)]:
                    raise ValueError(f"DBM is not coherent at ({i}, {j})")
        return cls(m.n, m.mode).like(rows)

    def to_dense(self) -> Dbm:
        return Dbm(self.n, self.mode, [list(r) for r in self.rows])

    def __repr__(self) -> str:
        return f"CoDbm(n={self.n}, {self.mode.value}, cache={len(self.cache)})"


PIPELINES: dict[str, Callable] = {
    "close": closure.close,
    "strong_closure": closure.strong_closure,
    "tight_closure": closure.tight_closure,
}


def run_over(c: CoDbm, algorithm: str | Callable, o: DiffConstraint | None = None,
             counter: MinCounter | None = None) -> CoDbm | None:
    """Run a closure pipeline (no ``o``) or an incremental algorithm on a compact DBM."""
    if isinstance(algorithm, str):
        fn = PIPELINES.get(algorithm) or incremental.ALGORITHMS.get(algorithm)
        if fn is None:
            raise ValueError(f"unknown algorithm {algorithm!r}")
    else:
        fn = algorithm
    if o is None:
        return fn(c, counter=counter)
    return fn(c, o, counter=counter)
