"""Incremental closure: adding one constraint ``x'_a - x'_b <= d`` to a closed DBM.

Every algorithm takes a closed, coherent :class:`Dbm` and a
:class:`DiffConstraint` and returns the new DBM, or ``None`` when the
augmented system is inconsistent.  A unary octagonal constraint is passed
with ``b == bar(a)`` and the doubled constant (see :func:`translate`).

The out-of-place algorithms read only their input and build a fresh
matrix.  The ``*_in_situ`` variants overwrite the input matrix, visiting
entries in the order given by a :class:`TraversalOrder`.

Each entry update takes the minimum over the direct bound and the four
ways a path ``i -> j`` can be shortened by the new edge and its coherent
mirror::

    m[i][a] + d + m[b][j]
    m[i][bar b] + d + m[bar a][j]
    m[i][bar b] + d + m[bar a][a] + d + m[b][j]
    m[i][a] + d + m[b][bar b] + d + m[bar a][j]

Sums are evaluated left to right; shared prefixes are computed once per
row, which gives bit-identical results to the literal expression.
"""

from __future__ import annotations

import random
from typing import Callable, Iterable, Sequence

from .bounds import MinCounter, NumericMode, halve, tighten_even
from .closure import _require_int, check_consistent
from .dbm import Dbm, DiffConstraint, OctConstraint, bar, translate


class InvalidTraversal(ValueError):
    """Traversal order is not a bijection, or lacks a required key-first prefix."""


def _unpack(m: Dbm, o: DiffConstraint):
    dim = m.dim
    a, b = o.a, o.b
    if not (0 <= a < dim and 0 <= b < dim) or a == b:
        raise IndexError(f"bad constraint indices a={a}, b={b} for dimension {dim}")
    return a, b, bar(a), bar(b), m.mode.coerce(o.d)


def _row_prefixes(ri, a, nb, d, t_aa, t_bb):
    """Left-to-right prefixes of the four path sums for row i."""
    ia = ri[a] + d
    inb = ri[nb] + d
    return ia, inb, inb + t_aa + d, ia + t_bb + d


def _any_negative_diagonal(rows) -> bool:
    return any(r[i] < 0 for i, r in enumerate(rows))


def fast_unsat(m: Dbm, o: DiffConstraint) -> bool:
    """Sufficient test for inconsistency that needs no min operations."""
    a, b, na, nb, d = _unpack(m, o)
    r = m.rows
    return r[b][a] + d < 0 or r[na][nb] + d < 0 or r[b][nb] + d + r[na][a] + d < 0


def consistent_after(m: Dbm, o: DiffConstraint) -> bool:
    """Exact consistency test for ``incr(m, o)`` on a closed ``m``."""
    a, b, na, nb, d = _unpack(m, o)
    r = m.rows
    return r[b][a] + d >= 0 and r[na][nb] + d >= 0 and r[na][a] + d + r[b][nb] + d >= 0


def incr_mine(m: Dbm, o: DiffConstraint, counter: MinCounter | None = None) -> Dbm | None:
    """Classical incremental closure: resume Floyd-Warshall from the smallest touched index."""
    a, b, na, nb, d = _unpack(m, o)
    dim = m.dim
    rows = [list(r) for r in m.rows]
    if d < rows[a][b]:
        rows[a][b] = d
    if d < rows[nb][na]:
        rows[nb][na] = d
    v = min(a, b, na, nb)
    for k in range(v, dim):
        rk = rows[k]
        for i in range(dim):
            ri = rows[i]
            mik = ri[k]
            rows[i] = [x if x <= (s := mik + y) else s for x, y in zip(ri, rk)]
        if counter is not None:
            counter.count += dim * dim
    return check_consistent(m.like(rows))


def incr(m: Dbm, o: DiffConstraint, counter: MinCounter | None = None) -> Dbm | None:
    """Quadratic incremental closure; consistency is checked after the full pass."""
    a, b, na, nb, d = _unpack(m, o)
    rows = m.rows
    rb, rna = rows[b], rows[na]
    t_aa, t_bb = rows[na][a], rows[b][nb]
    out = []
    for ri in rows:
        p1, p2, p3, p4 = _row_prefixes(ri, a, nb, d, t_aa, t_bb)
        out.append([min(x, p1 + y, p2 + z, p3 + y, p4 + z) for x, y, z in zip(ri, rb, rna)])
    if counter is not None:
        counter.count += 4 * m.dim * m.dim
    if _any_negative_diagonal(out):
        return None
    return m.like(out)


def incr_hoisted(m: Dbm, o: DiffConstraint, counter: MinCounter | None = None) -> Dbm | None:
    """:func:`incr` with per-row temporaries; one ternary min per entry."""
    a, b, na, nb, d = _unpack(m, o)
    rows = m.rows
    dim = m.dim
    rb, rna = rows[b], rows[na]
    t1 = d + rows[na][a] + d
    t2 = d + rows[b][nb] + d
    out = []
    for i, ri in enumerate(rows):
        mia, minb = ri[a], ri[nb]
        t3 = min(mia + d, minb + t1)
        t4 = min(minb + d, mia + t2)
        new = [min(x, t3 + y, t4 + z) for x, y, z in zip(ri, rb, rna)]
        if counter is not None:
            counter.count += 2 + 2 * dim
        if new[i] < 0:
            return None
        out.append(new)
    return m.like(out)


def _key_entries(rows, a, b, na, nb, d):
    """Quintic min for every key entry ``(i, bar i)``, reading the input only."""
    rb, rna = rows[b], rows[na]
    t_aa, t_bb = rows[na][a], rows[b][nb]
    keys = []
    for i, ri in enumerate(rows):
        k = i ^ 1
        p1, p2, p3, p4 = _row_prefixes(ri, a, nb, d, t_aa, t_bb)
        keys.append(min(ri[k], p1 + rb[k], p2 + rna[k], p3 + rb[k], p4 + rna[k]))
    return keys


def _strengthening_pass(m: Dbm, keys, a, b, na, nb, d, counter):
    """Close and strengthen every non-key entry, given the final key entries."""
    rows = m.rows
    dim = m.dim
    rb, rna = rows[b], rows[na]
    t_aa, t_bb = rows[na][a], rows[b][nb]
    keys_by_col = [keys[j ^ 1] for j in range(dim)]
    out = []
    for i, ri in enumerate(rows):
        p1, p2, p3, p4 = _row_prefixes(ri, a, nb, d, t_aa, t_bb)
        ki = keys[i]
        new = [
            min(x, p1 + y, p2 + z, p3 + y, p4 + z, halve(ki + kj))
            for x, y, z, kj in zip(ri, rb, rna, keys_by_col)
        ]
        new[i ^ 1] = ki
        if counter is not None:
            counter.count += 5 * (dim - 1)
        if new[i] < 0:
            return None
        out.append(new)
    return m.like(out)


def incr_strong(m: Dbm, o: DiffConstraint, counter: MinCounter | None = None) -> Dbm | None:
    """Incremental strong closure: key entries first, then close-and-strengthen the rest.

    Equal to ``strengthen(incr(m, o))``.  The key entries are cached in a
    linear list and reused by the strengthening term of every other entry.
    """
    a, b, na, nb, d = _unpack(m, o)
    keys = _key_entries(m.rows, a, b, na, nb, d)
    if counter is not None:
        counter.count += 4 * m.dim
    return _strengthening_pass(m, keys, a, b, na, nb, d, counter)


def incr_strong_reduce(m: Dbm, o: DiffConstraint, counter: MinCounter | None = None) -> Dbm | None:
    """Incremental strong closure with the key-entry computation moved into the main loop.

    Requires a strongly closed input.  The first pass only applies the
    ``m[i][a] + d + m[b][bar i]`` shortening to key entries; the main loop
    then updates every entry, key entries included, with the full min.
    """
    a, b, na, nb, d = _unpack(m, o)
    rows = m.rows
    dim = m.dim
    rb, rna = rows[b], rows[na]
    t_aa, t_bb = rows[na][a], rows[b][nb]
    keys = []
    for i, ri in enumerate(rows):
        k = i ^ 1
        keys.append(min(ri[k], ri[a] + d + rb[k]))
    if counter is not None:
        counter.count += dim
    keys_by_col = [keys[j ^ 1] for j in range(dim)]
    out = []
    for i, ri in enumerate(rows):
        p1, p2, p3, p4 = _row_prefixes(ri, a, nb, d, t_aa, t_bb)
        ki = keys[i]
        new = [
            min(x, p1 + y, p2 + z, p3 + y, p4 + z, halve(ki + kj))
            for x, y, z, kj in zip(ri, rb, rna, keys_by_col)
        ]
        if counter is not None:
            counter.count += 5 * dim
        if new[i] < 0:
            return None
        out.append(new)
    return m.like(out)


def incr_tight(m: Dbm, o: DiffConstraint, counter: MinCounter | None = None) -> Dbm | None:
    """Incremental tight closure for integer DBMs.

    Key entries are tightened to even values as soon as they are computed,
    checked for integer consistency, then used to strengthen the remaining
    entries.  Equal to ``strengthen(tighten(incr(m, o)))``.
    """
    _require_int(m, "incremental tight closure")
    a, b, na, nb, d = _unpack(m, o)
    keys = [tighten_even(k) for k in _key_entries(m.rows, a, b, na, nb, d)]
    if counter is not None:
        counter.count += 4 * m.dim
    if any(keys[i] + keys[i ^ 1] < 0 for i in range(m.dim)):
        return None
    return _strengthening_pass(m, keys, a, b, na, nb, d, counter)


class TraversalOrder:
    """A bijection from index pairs ``(i, j)`` to ranks ``0 .. 4n^2 - 1``.

    Stored as the sequence of pairs in rank order.
    """

    __slots__ = ("n", "pairs")

    def __init__(self, n: int, pairs: Iterable[tuple[int, int]]):
        pairs = [tuple(p) for p in pairs]
        dim = 2 * n
        if len(pairs) != dim * dim or set(pairs) != {(i, j) for i in range(dim) for j in range(dim)}:
            raise InvalidTraversal(f"not a bijection onto the {dim}x{dim} index pairs")
        self.n = n
        self.pairs = pairs

    @property
    def key_first(self) -> bool:
        """True when the ``2n`` key entries ``(i, bar i)`` occupy ranks ``0 .. 2n-1``."""
        return all(j == i ^ 1 for i, j in self.pairs[: 2 * self.n])

    def rank(self, i: int, j: int) -> int:
        return self.pairs.index((i, j))

    @classmethod
    def row_major(cls, n: int) -> "TraversalOrder":
        dim = 2 * n
        return cls(n, [(i, j) for i in range(dim) for j in range(dim)])

    @classmethod
    def column_major(cls, n: int) -> "TraversalOrder":
        dim = 2 * n
        return cls(n, [(i, j) for j in range(dim) for i in range(dim)])

    @classmethod
    def random(cls, n: int, rng: random.Random, key_first: bool = False) -> "TraversalOrder":
        dim = 2 * n
        keys = [(i, i ^ 1) for i in range(dim)]
        rest = [(i, j) for i in range(dim) for j in range(dim) if j != i ^ 1]
        if key_first:
            rng.shuffle(keys)
            rng.shuffle(rest)
            return cls(n, keys + rest)
        pairs = keys + rest
        rng.shuffle(pairs)
        return cls(n, pairs)

    def keys_first(self) -> "TraversalOrder":
        """Same relative order, with the key entries moved to the front."""
        keys = [p for p in self.pairs if p[1] == p[0] ^ 1]
        rest = [p for p in self.pairs if p[1] != p[0] ^ 1]
        return TraversalOrder(self.n, keys + rest)


def _check_order(m: Dbm, order: TraversalOrder | None, need_key_first: bool) -> TraversalOrder:
    if order is None:
        order = TraversalOrder.row_major(m.n)
        if need_key_first:
            order = order.keys_first()
    if order.n != m.n:
        raise InvalidTraversal(f"order is for n={order.n}, DBM has n={m.n}")
    if need_key_first and not order.key_first:
        raise InvalidTraversal("strong and tight in-place closure need the key entries first")
    return order


def _quintic_here(r, i, j, a, b, na, nb, d):
    ri = r[i]
    return min(
        ri[j],
        ri[a] + d + r[b][j],
        ri[nb] + d + r[na][j],
        ri[nb] + d + r[na][a] + d + r[b][j],
        ri[a] + d + r[b][nb] + d + r[na][j],
    )


def incr_in_situ(m: Dbm, o: DiffConstraint, order: TraversalOrder | None = None) -> Dbm | None:
    """In-place :func:`incr`: each entry is updated once, from the current matrix.

    ``m`` is overwritten (and left partially updated when ``None`` is
    returned).  The result does not depend on the traversal order.
    """
    order = _check_order(m, order, need_key_first=False)
    a, b, na, nb, d = _unpack(m, o)
    r = m.rows
    for i, j in order.pairs:
        v = _quintic_here(r, i, j, a, b, na, nb, d)
        r[i][j] = v
        if i == j and v < 0:
            return None
    return m


def _in_situ_strengthened(m, order, a, b, na, nb, d, tighten_keys):
    r = m.rows
    dim = m.dim
    pairs = order.pairs
    for i, j in pairs[:dim]:
        v = _quintic_here(r, i, j, a, b, na, nb, d)
        r[i][j] = tighten_even(v) if tighten_keys else v
    if tighten_keys and any(r[i][i ^ 1] + r[i ^ 1][i] < 0 for i in range(dim)):
        return None
    for i, j in pairs[dim:]:
        v = min(_quintic_here(r, i, j, a, b, na, nb, d), halve(r[i][i ^ 1] + r[j ^ 1][j]))
        r[i][j] = v
        if i == j and v < 0:
            return None
    return m


def incr_strong_in_situ(m: Dbm, o: DiffConstraint, order: TraversalOrder | None = None) -> Dbm | None:
    """In-place :func:`incr_strong`; the order must visit key entries first."""
    order = _check_order(m, order, need_key_first=True)
    a, b, na, nb, d = _unpack(m, o)
    return _in_situ_strengthened(m, order, a, b, na, nb, d, tighten_keys=False)


def incr_tight_in_situ(m: Dbm, o: DiffConstraint, order: TraversalOrder | None = None) -> Dbm | None:
    """In-place :func:`incr_tight`; the order must visit key entries first."""
    _require_int(m, "incremental tight closure")
    order = _check_order(m, order, need_key_first=True)
    a, b, na, nb, d = _unpack(m, o)
    return _in_situ_strengthened(m, order, a, b, na, nb, d, tighten_keys=True)


ALGORITHMS: dict[str, Callable] = {
    "mine": incr_mine,
    "incr": incr,
    "hoist": incr_hoisted,
    "strong": incr_strong,
    "strong-reduce": incr_strong_reduce,
    "tight": incr_tight,
}

IN_SITU: dict[str, Callable] = {
    "incr": incr_in_situ,
    "strong": incr_strong_in_situ,
    "tight": incr_tight_in_situ,
}


def to_difference(m: Dbm, c: OctConstraint) -> DiffConstraint:
    """One of the (coherent-mirror) difference constraints encoding ``c``."""
    if any(not 0 <= v < m.n for v in c.variables()):
        raise IndexError(f"constraint {c} mentions a variable outside x0..x{m.n - 1}")
    dc = translate(c)[0]
    return DiffConstraint(dc.a, dc.b, m.mode.coerce(dc.d))


def add_octagonal(m: Dbm, c: OctConstraint, algorithm: Callable = incr, **kwargs) -> Dbm | None:
    """Translate an octagonal constraint and add it with ``algorithm``."""
    return algorithm(m, to_difference(m, c), **kwargs)
