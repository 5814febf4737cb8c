"""Non-incremental closure pipeline.

Floyd-Warshall, then the consistency check, then strengthening (rationals
and floats) or tightening, integer consistency and strengthening
(integers).  Functions that can detect an empty octagon return ``None`` in
that case and a fresh :class:`Dbm` otherwise; inputs are never mutated.
"""

from __future__ import annotations

from .bounds import MinCounter, NumericMode, halve, tighten_even
from .dbm import Dbm


def _require_int(m: Dbm, what: str) -> None:
    if m.mode is not NumericMode.INT:
        raise ValueError(f"{what} is only defined for integer DBMs (got mode {m.mode.value!r})")


def floyd_warshall(m: Dbm, counter: MinCounter | None = None) -> Dbm:
    """All-pairs shortest paths; the diagonal keeps the shortest cycle weights."""
    dim = m.dim
    rows = [list(r) for r in m.rows]
    for k in range(dim):
        rk = rows[k]
        for i in range(dim):
            ri = rows[i]
            mik = ri[k]
            rows[i] = [x if x <= (s := mik + y) else s for x, y in zip(ri, rk)]
        if counter is not None:
            counter.count += dim * dim
    return m.like(rows)


def check_consistent(m: Dbm) -> Dbm | None:
    """``None`` on a negative diagonal entry, else a copy with the diagonal reset to zero."""
    zero = m.mode.coerce(0)
    out = m.copy()
    for i, r in enumerate(out.rows):
        if r[i] < 0:
            return None
        r[i] = zero
    return out


def close(m: Dbm, counter: MinCounter | None = None) -> Dbm | None:
    """Shortest-path closure followed by the consistency check."""
    return check_consistent(floyd_warshall(m, counter))


def strengthen(m: Dbm, counter: MinCounter | None = None) -> Dbm:
    """``m'[i][j] = min(m[i][j], (m[i][bar i] + m[bar j][j]) / 2)``.

    Raises ``OddIntegerHalving`` on integer DBMs whose key-entry sums are odd;
    tighten first.
    """
    dim = m.dim
    keys = [m.rows[i][i ^ 1] for i in range(dim)]
    # keys_by_col[j] = m[bar j][j]
    keys_by_col = [keys[j ^ 1] for j in range(dim)]
    out = []
    for i, r in enumerate(m.rows):
        ki = keys[i]
        out.append([x if x <= (h := halve(ki + kj)) else h for x, kj in zip(r, keys_by_col)])
    if counter is not None:
        counter.count += dim * dim
    return m.like(out)


def strong_closure(m: Dbm, counter: MinCounter | None = None) -> Dbm | None:
    closed = close(m, counter)
    if closed is None:
        return None
    return strengthen(closed, counter)


def tighten(m: Dbm) -> Dbm:
    """Round every key entry ``m[i][bar i]`` down to an even integer."""
    _require_int(m, "tightening")
    out = m.copy()
    for i, r in enumerate(out.rows):
        r[i ^ 1] = tighten_even(r[i ^ 1])
    return out


def check_integer_consistent(m: Dbm) -> Dbm | None:
    """``None`` if some unary pair ``m[i][bar i] + m[bar i][i]`` is negative."""
    _require_int(m, "integer consistency")
    rows = m.rows
    for i in range(m.dim):
        if rows[i][i ^ 1] + rows[i ^ 1][i] < 0:
            return None
    return m


def tight_closure(m: Dbm, counter: MinCounter | None = None) -> Dbm | None:
    _require_int(m, "tight closure")
    closed = close(m, counter)
    if closed is None:
        return None
    t = check_integer_consistent(tighten(closed))
    if t is None:
        return None
    return strengthen(t, counter)


def tight_formula(m: Dbm) -> Dbm:
    """``min(m[i][j], floor(m[i][bar i]/2) + floor(m[bar j][j]/2))`` entrywise.

    The one-shot characterisation of tighten-then-strengthen on closed,
    coherent integer DBMs; kept as an independent check of that pipeline.
    """
    _require_int(m, "tight closure")
    dim = m.dim
    inf = float("inf")
    halves = [m.rows[i][i ^ 1] for i in range(dim)]
    halves = [h if h == inf else type(h)(int(h) >> 1) for h in halves]
    out = []
    for i, r in enumerate(m.rows):
        out.append([min(x, halves[i] + halves[j ^ 1]) for j, x in enumerate(r)])
    return m.like(out)
