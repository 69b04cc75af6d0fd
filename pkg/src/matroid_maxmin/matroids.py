"""Matroid independence oracles and oracle-only set manipulations.

Ground sets are ``range(ground_size)``; element sets are any iterable of
ints and are normalised to frozensets.  Every scan over a pool of elements
runs in ascending id order unless stated otherwise, so all results are
reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AugmentationFailed, InvalidInputError, InvalidStateError
from .matching import hopcroft_karp, matching_size


class Matroid:
    """Base class: subclasses implement ``_independent`` on validated frozensets."""

    ground_size: int

    def __init__(self, ground_size: int):
        if ground_size < 0:
            raise InvalidInputError("ground_size must be non-negative")
        self.ground_size = ground_size
        self._full_rank: int | None = None

    @property
    def ground(self) -> frozenset:
        return frozenset(range(self.ground_size))

    def _check(self, S: Iterable[int]) -> frozenset:
        S = frozenset(S)
        for e in S:
            if not isinstance(e, int) or not 0 <= e < self.ground_size:
                raise InvalidInputError(f"element {e!r} is outside the ground set of size {self.ground_size}")
        return S

    def _independent(self, S: frozenset) -> bool:
        raise NotImplementedError

    def is_independent(self, S: Iterable[int]) -> bool:
        return self._independent(self._check(S))

    def _rank(self, S: frozenset) -> int:
        chosen: set = set()
        for e in sorted(S):
            if self._independent(frozenset(chosen | {e})):
                chosen.add(e)
        return len(chosen)

    def rank(self, S: Iterable[int] | None = None) -> int:
        """Size of a largest independent subset of ``S`` (the whole ground set by default)."""
        if S is None:
            if self._full_rank is None:
                self._full_rank = self._rank(self.ground)
            return self._full_rank
        return self._rank(self._check(S))

    def dual(self) -> "DualMatroid":
        return DualMatroid(self)


class UniformMatroid(Matroid):
    def __init__(self, ground_size: int, k: int):
        super().__init__(ground_size)
        if not 0 <= k <= ground_size:
            raise InvalidInputError(f"uniform matroid rank must lie in [0, {ground_size}], got {k}")
        self.k = k

    def _independent(self, S):
        return len(S) <= self.k

    def _rank(self, S):
        return min(len(S), self.k)

    def __repr__(self):
        return f"UniformMatroid({self.ground_size}, {self.k})"


class FreeMatroid(UniformMatroid):
    """Every subset is independent."""

    def __init__(self, ground_size: int):
        super().__init__(ground_size, ground_size)

    def __repr__(self):
        return f"FreeMatroid({self.ground_size})"


class PartitionMatroid(Matroid):
    """At most ``capacities[b]`` elements from block ``b``; blocks must cover the ground set."""

    def __init__(self, ground_size: int, blocks: Sequence[Iterable[int]], capacities: Sequence[int]):
        super().__init__(ground_size)
        if len(blocks) != len(capacities):
            raise InvalidInputError("one capacity per block is required")
        self.block_of: dict[int, int] = {}
        for b, block in enumerate(blocks):
            for e in block:
                if not 0 <= e < ground_size:
                    raise InvalidInputError(f"block element {e!r} outside ground set")
                if e in self.block_of:
                    raise InvalidInputError(f"element {e} appears in two blocks")
                self.block_of[e] = b
        if len(self.block_of) != ground_size:
            raise InvalidInputError("partition blocks must cover the ground set")
        if any(c < 0 for c in capacities):
            raise InvalidInputError("capacities must be non-negative")
        self.blocks = tuple(tuple(sorted(b)) for b in blocks)
        self.capacities = tuple(capacities)

    def _independent(self, S):
        counts = [0] * len(self.capacities)
        for e in S:
            b = self.block_of[e]
            counts[b] += 1
            if counts[b] > self.capacities[b]:
                return False
        return True

    def _rank(self, S):
        counts = [0] * len(self.capacities)
        for e in S:
            counts[self.block_of[e]] += 1
        return sum(min(c, cap) for c, cap in zip(counts, self.capacities))

    def __repr__(self):
        return f"PartitionMatroid({self.ground_size}, {self.blocks}, {self.capacities})"


class TransversalMatroid(Matroid):
    """Matchable-set matroid of a bipartite graph.

    ``neighbors[i]`` lists the right-hand vertices element ``i`` may be matched
    to.  A set is independent iff some matching saturates it.
    """

    def __init__(self, ground_size: int, neighbors: Sequence[Iterable]):
        super().__init__(ground_size)
        if len(neighbors) != ground_size:
            raise InvalidInputError("need one neighbor list per ground element")
        self.neighbors = tuple(tuple(sorted(set(n))) for n in neighbors)
        self._cache: dict[frozenset, int] = {}

    @classmethod
    def from_sets(cls, ground_size: int, sets: Sequence[Iterable[int]]) -> "TransversalMatroid":
        """Build from a set family: element ``i`` may represent set ``k`` iff ``i in sets[k]``."""
        neighbors: list[list[int]] = [[] for _ in range(ground_size)]
        for k, members in enumerate(sets):
            for i in members:
                if not 0 <= i < ground_size:
                    raise InvalidInputError(f"set member {i!r} outside ground set")
                neighbors[i].append(k)
        return cls(ground_size, neighbors)

    def _rank(self, S):
        r = self._cache.get(S)
        if r is None:
            order = sorted(S)
            r = matching_size({i: self.neighbors[i] for i in order}, order)
            self._cache[S] = r
        return r

    def _independent(self, S):
        return self._rank(S) == len(S)

    def matching(self, S: Iterable[int]) -> dict:
        """A maximum matching of ``S`` into the right-hand side, as ``{element: right}``."""
        order = sorted(self._check(S))
        return hopcroft_karp({i: self.neighbors[i] for i in order}, order)

    def __repr__(self):
        return f"TransversalMatroid({self.ground_size}, {self.neighbors})"


class DualMatroid(Matroid):
    """Co-matroid: ``S`` is independent iff ``X \\ S`` still spans the primal."""

    def __init__(self, primal: Matroid):
        super().__init__(primal.ground_size)
        self.primal = primal
        self.primal_rank = primal.rank()

    def _independent(self, S):
        return self.primal._rank(self.ground - S) == self.primal_rank

    def _rank(self, S):
        return len(S) + self.primal._rank(self.ground - S) - self.primal_rank

    def dual(self) -> Matroid:
        return DualMatroid(self)

    def __repr__(self):
        return f"DualMatroid({self.primal!r})"


class TabulatedMatroid(Matroid):
    """Independence answered from a precomputed bitmask table (small ground sets)."""

    def __init__(self, inner: Matroid):
        if inner.ground_size > 20:
            raise InvalidInputError("tabulation is limited to ground sets of size <= 20")
        super().__init__(inner.ground_size)
        self.inner = inner
        n = inner.ground_size
        table = [False] * (1 << n)
        table[0] = inner._independent(frozenset())
        for mask in range(1, 1 << n):
            low = mask & -mask
            if table[mask ^ low]:
                table[mask] = inner._independent(frozenset(i for i in range(n) if mask >> i & 1))
        self.table = table

    def _independent(self, S):
        mask = 0
        for e in S:
            mask |= 1 << e
        return self.table[mask]

    def __repr__(self):
        return f"TabulatedMatroid({self.inner!r})"


def is_independent(matroid: Matroid, S: Iterable[int]) -> bool:
    return matroid.is_independent(S)


def rank(matroid: Matroid, S: Iterable[int] | None = None) -> int:
    return matroid.rank(S)


def dual_is_independent(dual: DualMatroid, S: Iterable[int]) -> bool:
    return dual.is_independent(S)


def augment_to_size(
    matroid: Matroid,
    base: Iterable[int],
    pool: Iterable[int],
    target: int,
    *,
    descending: bool = False,
) -> frozenset:
    """Grow independent ``base`` with elements of ``pool`` until it has ``target`` elements.

    Raises AugmentationFailed when the pool cannot supply enough elements,
    which means ``target > rank(base | pool)`` or the oracle is not a matroid.
    """
    base = matroid._check(base)
    pool = matroid._check(pool)
    if not matroid._independent(base):
        raise InvalidStateError("augmentation base is not independent")
    if len(base) > target:
        raise InvalidStateError(f"base already has {len(base)} > {target} elements")
    result = set(base)
    for e in sorted(pool - base, reverse=descending):
        if len(result) == target:
            break
        if matroid._independent(frozenset(result | {e})):
            result.add(e)
    if len(result) < target:
        raise AugmentationFailed(f"could only reach size {len(result)} of {target}")
    return frozenset(result)


def find_swap_out(matroid: Matroid, S: Iterable[int], C: Iterable[int], D: Iterable[int]) -> frozenset:
    """Pick ``C' <= C`` with ``|C'| = |D|`` such that ``(S - C') | D`` is independent.

    Elements of ``D`` that already lie in ``C`` are always part of ``C'``
    (they leave and re-enter).  The remaining slots are refilled from
    ``C - D`` scanning high ids first, so ``C'`` prefers low ids.
    """
    S = matroid._check(S)
    C = matroid._check(C)
    D = matroid._check(D)
    if not C <= S:
        raise InvalidStateError("C must be a subset of S")
    if not D <= (matroid.ground - S) | C:
        raise InvalidStateError("D must avoid S \\ C")
    if not matroid._independent(S):
        raise InvalidStateError("S is not independent")
    start = (S - C) | D
    if not matroid._independent(start):
        raise InvalidStateError("(S \\ C) | D is not independent")
    if len(D) > len(C):
        raise InvalidStateError("D is larger than C")
    try:
        full = augment_to_size(matroid, start, C - D, len(S), descending=True)
    except AugmentationFailed as exc:  # pragma: no cover - impossible for a matroid
        raise InvalidStateError(str(exc)) from exc
    kept = full - start
    return C - kept


@dataclass
class ExchangeGraph:
    """Bipartite exchange graph between independent sets ``Y`` (left) and ``Z`` (right).

    Left and right vertices are element ids; an element of ``Y & Z`` appears
    once on each side and its two copies are joined by their only edge.
    """

    left: tuple
    right: tuple
    edges: dict = field(default_factory=dict)

    def left_perfect_matching(self) -> dict | None:
        m = hopcroft_karp(self.edges, self.left)
        return m if len(m) == len(self.left) else None


def build_exchange_graph(matroid: Matroid, Y: Iterable[int], Z: Iterable[int]) -> ExchangeGraph:
    Y = matroid._check(Y)
    Z = matroid._check(Z)
    if not (matroid._independent(Y) and matroid._independent(Z)):
        raise InvalidInputError("exchange graph needs two independent sets")
    only_z = sorted(Z - Y)
    edges: dict = {}
    for i in sorted(Y):
        if i in Z:
            edges[i] = [i]
        else:
            rest = Y - {i}
            edges[i] = [j for j in only_z if matroid._independent(rest | {j})]
    return ExchangeGraph(left=tuple(sorted(Y)), right=tuple(sorted(Z)), edges=edges)
