"""Octagon abstract-domain kernel with incremental closure algorithms."""

from .bounds import POS_INF, CheckedInt, MinCounter, NumericMode, OddIntegerHalving
from .closure import (
    check_consistent,
    check_integer_consistent,
    close,
    floyd_warshall,
    strengthen,
    strong_closure,
    tight_closure,
    tighten,
)
from .codbm import CoDbm, half_index, run_over
from .dbm import (
    Dbm,
    DbmProperties,
    DiffConstraint,
    DimensionMismatch,
    OctConstraint,
    bar,
    classify,
    dbm_equal,
    from_constraints,
    gamma_contains,
    set_coherent,
    top,
    translate,
)
from .incremental import (
    InvalidTraversal,
    TraversalOrder,
    add_octagonal,
    consistent_after,
    fast_unsat,
    incr,
    incr_hoisted,
    incr_in_situ,
    incr_mine,
    incr_strong,
    incr_strong_in_situ,
    incr_strong_reduce,
    incr_tight,
    incr_tight_in_situ,
)

__version__ = "0.1.0"
