"""Matroid Max-Min Allocation instances, solver parameters and minimal hyperedges."""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidInstanceError, ParameterError


@dataclass(frozen=True, eq=True)
class AllocationInstance:
    """Bipartite graph between elements ``0..n_elements-1`` and valued resources.

    ``values`` maps resource id to a positive integer; zero-valued resources
    are dropped at construction together with their edges.
    """

    n_elements: int
    values: Mapping[int, int]
    neighbors: tuple
    target: int

    def __post_init__(self):
        if self.n_elements < 0:
            raise InvalidInstanceError("n_elements must be non-negative")
        if len(self.neighbors) != self.n_elements:
            raise InvalidInstanceError("need one neighborhood per element")
        for w, p in self.values.items():
            if not isinstance(p, int) or p < 0:
                raise InvalidInstanceError(f"resource {w!r} has invalid value {p!r}")
        values = {w: p for w, p in sorted(self.values.items()) if p > 0}
        nbrs = []
        for i, nb in enumerate(self.neighbors):
            nb = frozenset(nb)
            unknown = nb - self.values.keys()
            if unknown:
                raise InvalidInstanceError(f"element {i} is adjacent to unknown resources {sorted(unknown)}")
            nbrs.append(frozenset(w for w in nb if w in values))
        if not isinstance(self.target, int):
            raise InvalidInstanceError("target must be an integer")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "neighbors", tuple(nbrs))

    @property
    def resources(self) -> frozenset:
        return frozenset(self.values)

    @property
    def max_value(self) -> int:
        return max(self.values.values(), default=0)

    def value(self, resources: Iterable[int]) -> int:
        return sum(self.values[w] for w in resources)

    def with_target(self, target: int) -> "AllocationInstance":
        return AllocationInstance(self.n_elements, self.values, self.neighbors, target)

    @classmethod
    def from_edges(cls, n_elements: int, values: Mapping[int, int], edges: Iterable[tuple[int, int]], target: int):
        nbrs: list[set] = [set() for _ in range(n_elements)]
        for i, w in edges:
            if not 0 <= i < n_elements:
                raise InvalidInstanceError(f"edge endpoint {i!r} is not an element")
            nbrs[i].add(w)
        return cls(n_elements, dict(values), tuple(frozenset(n) for n in nbrs), target)


@dataclass(frozen=True)
class SolverParams:
    target: int
    epsilon: Fraction
    delta: Fraction
    alpha: Fraction
    beta: Fraction
    expansion_ratio: Fraction
    case1_ratio: Fraction
    layer_growth: Fraction
    collapse_k: int
    gamma: Fraction
    sig_base: Fraction

    @property
    def alpha_threshold(self) -> Fraction:
        return self.alpha * self.target

    @property
    def beta_threshold(self) -> Fraction:
        return self.beta * self.target


@lru_cache(maxsize=None)
def _collapse_k(c: Fraction) -> int:
    """Smallest ``k >= 0`` with ``(1+c)**k >= 2/c``, i.e. ceil(log(2/c)/log(1+c))."""
    goal = 2 / c
    k = max(0, math.ceil(math.log(float(goal)) / math.log1p(float(c))))
    growth = 1 + c
    while growth**k < goal:
        k += 1
    while k > 0 and growth ** (k - 1) >= goal:
        k -= 1
    return k


def derive_params(instance: AllocationInstance, epsilon, delta=None) -> SolverParams:
    """Compute the thresholds used by the augmenting-tree solver.

    ``delta`` defaults to ``max p_w / T``; callers that know a better bound on
    resource values (the Santa Claus reduction) may pass it explicitly.
    """
    T = instance.target
    if T <= 0:
        raise InvalidInstanceError(f"target must be positive, got {T}")
    eps = Fraction(epsilon)
    if delta is None:
        if not instance.values:
            raise InvalidInstanceError("instance has no resource with positive value")
        delta = Fraction(instance.max_value, T)
    delta = Fraction(delta)
    if delta < 0:
        raise ParameterError("delta must be non-negative")
    upper = (1 - delta) / 3
    if not 0 < eps < upper:
        raise ParameterError(
            f"epsilon={eps} outside admissible interval (0, {max(upper, Fraction(0))}) for delta={delta}"
        )
    third = Fraction(1, 3)
    beta = third - delta / 3 - eps
    alpha = third - delta / 3 - eps / 2
    c = eps * eps / 4
    k = _collapse_k(c)
    gamma = Fraction(1, 2 * (k + 1))
    return SolverParams(
        target=T,
        epsilon=eps,
        delta=delta,
        alpha=alpha,
        beta=beta,
        expansion_ratio=eps,
        case1_ratio=eps / 4,
        layer_growth=c,
        collapse_k=k,
        gamma=gamma,
        sig_base=1 / (1 - c * gamma),
    )


@dataclass(frozen=True)
class HyperEdge:
    owner: int
    resources: frozenset
    value: int

    def to_dict(self) -> dict:
        return {"owner": self.owner, "resources": sorted(self.resources), "value": self.value}


def edge_value(e: HyperEdge) -> int:
    return e.value


def _minimal_subset(values: Mapping[int, int], pool: Iterable[int], threshold) -> list[int] | None:
    order = sorted(pool, key=lambda w: (-values[w], w))
    chosen: list[int] = []
    total = 0
    for w in order:
        if total >= threshold:
            break
        chosen.append(w)
        total += values[w]
    if total < threshold:
        return None
    for w in reversed(list(chosen)):
        if total - values[w] >= threshold:
            chosen.remove(w)
            total -= values[w]
    return chosen


def build_minimal_edge(
    instance: AllocationInstance, i: int, threshold, forbidden: Iterable[int] = frozenset()
) -> HyperEdge | None:
    """An inclusion-minimal edge of value >= ``threshold`` inside ``N(i) - forbidden``.

    Greedy by decreasing value (ties by id), followed by one reverse pass that
    drops every resource not needed to stay above the threshold.
    """
    if not 0 <= i < instance.n_elements:
        raise InvalidInstanceError(f"unknown element {i!r}")
    pool = instance.neighbors[i] - frozenset(forbidden)
    chosen = _minimal_subset(instance.values, pool, threshold)
    if chosen is None:
        return None
    return HyperEdge(i, frozenset(chosen), instance.value(chosen))


def shrink_to_beta_edge(
    instance: AllocationInstance, params: SolverParams, e: HyperEdge, occupied: Iterable[int]
) -> HyperEdge | None:
    """Minimal beta-edge inside ``e`` that avoids ``occupied``."""
    pool = e.resources - frozenset(occupied)
    chosen = _minimal_subset(instance.values, pool, params.beta_threshold)
    if chosen is None:
        return None
    return HyperEdge(e.owner, frozenset(chosen), instance.value(chosen))
