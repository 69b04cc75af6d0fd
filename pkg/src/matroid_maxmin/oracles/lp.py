"""Exact feasibility tests for the two LP relaxations.

``lp_feasible_compact`` decides the compact Santa Claus LP over variables
``z[i, j]`` (child ``i`` eligible for gift ``j``).  ``lp_feasible_Q`` decides
the matroid allocation LP with the base polytope written out by subset
enumeration.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..errors import UnsupportedScaleError
from ..matroids import Matroid
from ..model import AllocationInstance
from ..polytope import rank_table
from .simplex import EQ, GE, LE, feasible

MAX_COMPACT_VARS = 400
MAX_Q_ELEMENTS = 10


def _compact_classes(inst, T, delta1, delta2, partition):
    if partition is not None:
        return tuple(partition.large), tuple(partition.small), partition.capped
    capped = tuple(min(p, T) for p in inst.values)
    large = tuple(j for j, p in enumerate(capped) if p > delta2 * T)
    small = tuple(j for j, p in enumerate(capped) if p <= delta1 * T)
    return large, small, capped


def compact_lp_rows(inst, T: int, delta1=Fraction(1, 4), delta2=Fraction(1, 4), partition=None):
    """Variables, rows, senses and right-hand sides of the compact LP.

    Returns ``(variables, rows, senses, rhs)`` where ``variables`` lists the
    ``(child, gift)`` pairs in column order.  Gifts that are neither large
    nor small get no variables.
    """
    large, small, capped = _compact_classes(inst, T, Fraction(delta1), Fraction(delta2), partition)
    large_set, small_set = set(large), set(small)
    variables = [
        (i, j)
        for j in range(len(inst.values))
        if j in large_set or j in small_set
        for i in sorted(inst.eligible[j])
    ]
    col = {v: k for k, v in enumerate(variables)}
    rows, senses, rhs = [], [], []
    for i in range(inst.n_children):
        row = {}
        for j in small:
            if i in inst.eligible[j]:
                row[col[i, j]] = capped[j]
        for j in large:
            if i in inst.eligible[j]:
                row[col[i, j]] = T
        rows.append(row)
        senses.append(GE)
        rhs.append(T)
    for j in range(len(inst.values)):
        if j in large_set or j in small_set:
            rows.append({col[i, j]: 1 for i in inst.eligible[j]})
            senses.append(LE)
            rhs.append(1)
    for j in small:
        for i in sorted(inst.eligible[j]):
            row = {col[i, j]: 1}
            for jl in large:
                if i in inst.eligible[jl]:
                    row[col[i, jl]] = 1
            rows.append(row)
            senses.append(LE)
            rhs.append(1)
    return variables, rows, senses, rhs


def lp_feasible_compact(
    inst, T: int, delta1=Fraction(1, 4), delta2=Fraction(1, 4), *, partition=None, witness: bool = False
):
    """Is the compact LP at target ``T`` non-empty?

    With ``witness=True`` returns ``(feasible, z)`` where ``z`` maps
    ``(child, gift)`` to its value in a feasible point (or ``None``).
    """
    if T <= 0:
        return (True, {}) if witness else True
    variables, rows, senses, rhs = compact_lp_rows(inst, T, delta1, delta2, partition)
    if len(variables) > MAX_COMPACT_VARS:
        raise UnsupportedScaleError(f"compact LP has {len(variables)} > {MAX_COMPACT_VARS} variables")
    result = feasible(len(variables), rows, senses, rhs)
    if not witness:
        return result.feasible
    z = dict(zip(variables, result.point)) if result.feasible else None
    return result.feasible, z


def _q_layout(alloc: AllocationInstance):
    n = alloc.n_elements
    edges = [(i, w) for i in range(n) for w in sorted(alloc.neighbors[i])]
    return n, edges, {e: n + k for k, e in enumerate(edges)}


def q_lp_rows(matroid: Matroid, alloc: AllocationInstance, T=None):
    if alloc.n_elements > MAX_Q_ELEMENTS:
        raise UnsupportedScaleError(f"Q(T) enumeration supports <= {MAX_Q_ELEMENTS} elements")
    T = alloc.target if T is None else T
    n, edges, col = _q_layout(alloc)
    ranks = rank_table(matroid)
    rows, senses, rhs = [], [], []
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        size = mask.bit_count()
        if mask == full:
            continue
        if size == 1 or ranks[mask] < size:
            rows.append({i: 1 for i in range(n) if mask >> i & 1})
            senses.append(LE)
            rhs.append(ranks[mask])
    if n:
        rows.append({i: 1 for i in range(n)})
        senses.append(EQ)
        rhs.append(ranks[full])
    for i in range(n):
        row = {i: T}
        for w in alloc.neighbors[i]:
            row[col[i, w]] = -alloc.values[w]
        rows.append(row)
        senses.append(LE)
        rhs.append(0)
    for w in sorted(alloc.values):
        owners = [i for i in range(n) if w in alloc.neighbors[i]]
        if owners:
            rows.append({col[i, w]: 1 for i in owners})
            senses.append(LE)
            rhs.append(1)
    for i, w in edges:
        rows.append({col[i, w]: 1, i: -1})
        senses.append(LE)
        rhs.append(0)
    return n + len(edges), rows, senses, rhs, edges


def lp_feasible_Q(matroid: Matroid, alloc: AllocationInstance, T=None, *, witness: bool = False):
    """Is the matroid allocation LP at target ``T`` (default: the instance target) non-empty?

    With ``witness=True`` returns ``(feasible, (x, y))`` with ``x`` a list and
    ``y`` a dict keyed by ``(element, resource)``.
    """
    n_vars, rows, senses, rhs, edges = q_lp_rows(matroid, alloc, T)
    result = feasible(n_vars, rows, senses, rhs)
    if not witness:
        return result.feasible
    if not result.feasible:
        return False, None
    n = alloc.n_elements
    x = result.point[:n]
    y = {e: result.point[n + k] for k, e in enumerate(edges)}
    return True, (x, y)


def q_contains(matroid: Matroid, alloc: AllocationInstance, x, y: Mapping, T=None) -> bool:
    """Direct membership test of ``(x, y)`` in Q(T) without solving an LP."""
    from ..polytope import base_polytope_contains

    T = alloc.target if T is None else T
    n = alloc.n_elements
    if not base_polytope_contains(matroid, x):
        return False
    for (i, w), v in y.items():
        if v < 0 or w not in alloc.neighbors[i] or v > x[i]:
            return False
    for i in range(n):
        if sum(alloc.values[w] * y.get((i, w), 0) for w in alloc.neighbors[i]) < T * x[i]:
            return False
    for w in alloc.values:
        if sum(y.get((i, w), 0) for i in range(n)) > 1:
            return False
    return True
