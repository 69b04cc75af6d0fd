"""Base-polytope utilities for small ground sets, by subset enumeration.

Vectors are sequences indexed by element id; all arithmetic is exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Sequence

from .errors import InvalidInputError, UnsupportedScaleError
from .matroids import Matroid

MAX_GROUND = 16


def _guard(matroid: Matroid) -> None:
    if matroid.ground_size > MAX_GROUND:
        raise UnsupportedScaleError(
            f"polytope enumeration supports ground sets of size <= {MAX_GROUND}, got {matroid.ground_size}"
        )


def rank_table(matroid: Matroid) -> list[int]:
    """``table[mask]`` is the rank of the subset encoded by ``mask``."""
    _guard(matroid)
    n = matroid.ground_size
    ranks = [0] * (1 << n)
    indep = [False] * (1 << n)
    indep[0] = True
    for mask in range(1, 1 << n):
        subs = [mask ^ (1 << i) for i in range(n) if mask >> i & 1]
        if all(indep[s] for s in subs) and matroid._independent(
            frozenset(i for i in range(n) if mask >> i & 1)
        ):
            indep[mask] = True
            ranks[mask] = len(subs)
        else:
            ranks[mask] = max(ranks[s] for s in subs)
    return ranks


def _subset_sums(x: Sequence[Fraction]) -> list[Fraction]:
    n = len(x)
    sums = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        sums[mask] = sums[mask & (mask - 1)] + x[low]
    return sums


def _as_vector(matroid: Matroid, x) -> list[Fraction]:
    if len(x) != matroid.ground_size:
        raise InvalidInputError(f"vector has length {len(x)}, ground set has {matroid.ground_size}")
    return [Fraction(v) for v in x]


def in_matroid_polytope(matroid: Matroid, x, ranks: list[int] | None = None) -> bool:
    x = _as_vector(matroid, x)
    if any(v < 0 for v in x):
        return False
    ranks = rank_table(matroid) if ranks is None else ranks
    sums = _subset_sums(x)
    return all(s <= r for s, r in zip(sums, ranks))


def base_polytope_contains(matroid: Matroid, x, ranks: list[int] | None = None) -> bool:
    ranks = rank_table(matroid) if ranks is None else ranks
    x = _as_vector(matroid, x)
    return sum(x) == ranks[-1] and in_matroid_polytope(matroid, x, ranks)


def lift_to_base_polytope(matroid: Matroid, x) -> list[Fraction]:
    """Raise coordinates of a matroid-polytope point until it lies in the base polytope.

    Repeatedly takes the lowest index ``i`` with positive slack
    ``min_{A containing i} rank(A) - x(A)`` and adds that slack to ``x_i``.
    Once raised, ``i`` sits in a tight set and never moves again, so there
    are at most ``ground_size`` steps.
    """
    ranks = rank_table(matroid)
    x = _as_vector(matroid, x)
    if not in_matroid_polytope(matroid, x, ranks):
        raise InvalidInputError("vector is not in the matroid polytope")
    n = matroid.ground_size
    full = (1 << n) - 1
    while sum(x) < ranks[full]:
        sums = _subset_sums(x)
        for i in range(n):
            bit = 1 << i
            slack = min(ranks[m] - sums[m] for m in range(1, 1 << n) if m & bit)
            if slack > 0:
                x[i] += slack
                break
        else:  # pragma: no cover - contradicts matroid polytope theory
            raise InvalidInputError("no coordinate can be raised; rank function is not a matroid rank")
    return x


def bases(matroid: Matroid) -> Iterator[frozenset]:
    """All bases, in increasing bitmask order."""
    ranks = rank_table(matroid)
    n = matroid.ground_size
    r = ranks[-1]
    for mask in range(1 << n):
        if mask.bit_count() == r and ranks[mask] == r:
            yield frozenset(i for i in range(n) if mask >> i & 1)


def characteristic_vector(matroid: Matroid, S) -> list[Fraction]:
    S = set(S)
    return [Fraction(1 if i in S else 0) for i in range(matroid.ground_size)]
