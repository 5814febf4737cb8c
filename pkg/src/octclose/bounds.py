"""Extended-number arithmetic for DBM entries.

A bound is either a finite number or ``POS_INF`` (``math.inf``).  Negative
infinity never occurs.  Three numeric modes are supported, each with its own
Python representation of finite values:

* ``NumericMode.RAT``  -- exact rationals: ``int`` for integral values,
  ``fractions.Fraction`` otherwise.
* ``NumericMode.INT``  -- :class:`CheckedInt`, a 64-bit integer that raises
  ``OverflowError`` instead of wrapping.
* ``NumericMode.F64``  -- ``float`` (round to nearest).

All three interoperate with ``math.inf`` through the ordinary operators, so
the closure algorithms are written with plain ``+``, ``min`` and ``<``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

POS_INF = math.inf

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

Number = Union[int, Fraction, float]
Bound = Union[int, Fraction, float]


class OddIntegerHalving(ArithmeticError):
    """Raised when an odd integer bound would have to be halved in CheckedInt mode."""


class CheckedInt(int):
    """64-bit signed integer whose arithmetic refuses to overflow."""

    __slots__ = ()

    def __new__(cls, value=0):
        v = int.__new__(cls, value)
        if not INT64_MIN <= v <= INT64_MAX:
            raise OverflowError(f"value {int(value)} outside the 64-bit range")
        return v

    def __add__(self, other):
        r = int.__add__(self, other)
        if r is NotImplemented:
            return NotImplemented
        if not INT64_MIN <= r <= INT64_MAX:
            raise OverflowError(f"64-bit overflow in {int(self)} + {int(other)}")
        return CheckedInt(r)

    __radd__ = __add__

    def __sub__(self, other):
        r = int.__sub__(self, other)
        if r is NotImplemented:
            return NotImplemented
        if not INT64_MIN <= r <= INT64_MAX:
            raise OverflowError(f"64-bit overflow in {int(self)} - {int(other)}")
        return CheckedInt(r)

    def __neg__(self):
        return CheckedInt(-int(self))

    def __repr__(self):
        return f"CheckedInt({int(self)})"


class NumericMode(enum.Enum):
    RAT = "rat"
    INT = "int"
    F64 = "f64"

    def coerce(self, value) -> Bound:
        """Convert ``value`` (number or literal string) into this mode's representation."""
        if isinstance(value, str):
            return parse_number(value, self)
        if isinstance(value, float) and math.isnan(value):
            raise ValueError("NaN is not a valid bound")
        if value == POS_INF:
            return POS_INF
        if isinstance(value, float) and math.isinf(value):
            raise ValueError("negative infinity is not a valid bound")
        if self is NumericMode.RAT:
            q = Fraction(value)
            return q.numerator if q.denominator == 1 else q
        if self is NumericMode.INT:
            q = Fraction(value)
            if q.denominator != 1:
                raise ValueError(f"{value} is not an integer")
            return CheckedInt(q.numerator)
        return float(value)


_LITERAL = re.compile(r"^\s*([+-]?)(?:(\d+)/(\d+)|(\d+(?:\.\d*)?|\.\d+)|(inf))\s*$")


def parse_number(text: str, mode: NumericMode = NumericMode.RAT) -> Bound:
    """Parse ``-12``, ``7/2``, ``3.5`` or ``inf`` into a bound of ``mode``.

    Decimal literals are read exactly (``Fraction``) before conversion, so
    ``0.1`` in rational mode is ``1/10``.
    """
    m = _LITERAL.match(text)
    if m is None:
        raise ValueError(f"malformed number literal {text!r}")
    sign, num, den, dec, inf = m.groups()
    if inf:
        if sign == "-":
            raise ValueError("negative infinity is not a valid bound")
        return POS_INF
    if num is not None:
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        q = Fraction(int(num), int(den))
    else:
        q = Fraction(dec)
    if sign == "-":
        q = -q
    return mode.coerce(q)


def format_bound(b: Bound) -> str:
    """Inverse of :func:`parse_number` for dumps (exact ``p/q`` for rationals)."""
    if b == POS_INF:
        return "inf"
    if isinstance(b, Fraction):
        return str(b.numerator) if b.denominator == 1 else f"{b.numerator}/{b.denominator}"
    if isinstance(b, float):
        return repr(b)
    return str(int(b))


def is_finite(b: Bound) -> bool:
    return b != POS_INF


@dataclass
class MinCounter:
    """Number of binary ``min`` applications performed by an algorithm run.

    A k-ary min counts as k-1.
    """

    count: int = 0

    def add(self, k: int) -> None:
        self.count += k


def path_sum(terms: Sequence[Bound]) -> Bound:
    """Sum of path segments; ``POS_INF`` is absorbing."""
    if not terms:
        raise ValueError("path_sum needs at least one term")
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def min_counted(counter: MinCounter | None, operands: Iterable[Bound]) -> Bound:
    ops = list(operands)
    if not ops:
        raise ValueError("min of an empty sequence")
    if counter is not None:
        counter.count += len(ops) - 1
    return min(ops)


def halve(b: Bound) -> Bound:
    """Exact division by two."""
    if b == POS_INF:
        return POS_INF
    if isinstance(b, CheckedInt):
        if b & 1:
            raise OddIntegerHalving(f"cannot halve odd integer {int(b)} exactly")
        return CheckedInt(int(b) >> 1)
    if isinstance(b, int):
        return b >> 1 if not b & 1 else Fraction(b, 2)
    if isinstance(b, Fraction):
        h = b / 2
        return h.numerator if h.denominator == 1 else h
    return b / 2


def tighten_even(b: Bound) -> Bound:
    """Round down to the nearest even integer, ``2*floor(b/2)``; ``POS_INF`` is kept."""
    if b == POS_INF:
        return POS_INF
    if isinstance(b, CheckedInt):
        return CheckedInt(int(b) - (int(b) & 1))
    if isinstance(b, float):
        return 2.0 * math.floor(b / 2)
    return 2 * math.floor(Fraction(b) / 2)


def is_even(b: Bound) -> bool:
    """Evenness of an integer bound; ``POS_INF`` counts as even."""
    if b == POS_INF:
        return True
    return int(b) == b and int(b) % 2 == 0
