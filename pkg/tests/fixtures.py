"""Random small matroids and allocation instances shared by the tests."""
from __future__ import annotations

import random
from fractions import Fraction

from matroid_maxmin.matroids import (
    DualMatroid,
    FreeMatroid,
    PartitionMatroid,
    TransversalMatroid,
    UniformMatroid,
)
from matroid_maxmin.model import AllocationInstance
from matroid_maxmin.santa import SantaInstance

EPS = Fraction(1, 20)


def random_matroid(rng: random.Random, n: int):
    kind = rng.choice(["uniform", "free", "partition", "transversal", "dual"])
    if kind == "uniform":
        return UniformMatroid(n, rng.randint(1, n))
    if kind == "free":
        return FreeMatroid(n)
    if kind == "partition":
        nb = rng.randint(1, n)
        labels = [rng.randrange(nb) for _ in range(n)]
        blocks = [[i for i in range(n) if labels[i] == b] for b in range(nb)]
        blocks = [b for b in blocks if b]
        return PartitionMatroid(n, blocks, [rng.randint(1, len(b)) for b in blocks])
    k = rng.randint(1, n + 1)
    sets = [[i for i in range(n) if rng.random() < 0.5] for _ in range(k)]
    primal = TransversalMatroid.from_sets(n, sets)
    if kind == "dual":
        return DualMatroid(primal)
    if primal.rank() == 0:
        return UniformMatroid(n, 1)
    return primal


def random_allocation(rng: random.Random, n: int, m: int, vmax: int = 6, density: float = 0.45, target: int = 1):
    values = {w: rng.randint(1, vmax) for w in range(m)}
    neighbors = tuple(frozenset(w for w in range(m) if rng.random() < density) for _ in range(n))
    return AllocationInstance(n, values, neighbors, target)


def admissible_targets(alloc: AllocationInstance, eps=EPS):
    """Targets T for which the default delta = max p / T leaves eps admissible."""
    p = alloc.max_value
    # eps < (1 - p/T)/3  <=>  T > p / (1 - 3 eps)
    lo = int(p / (1 - 3 * eps)) + 1
    return lo


def random_santa(rng: random.Random, n_children: int, n_gifts: int, vmax: int = 20, density: float = 0.5):
    values = tuple(rng.randint(1, vmax) for _ in range(n_gifts))
    eligible = tuple(frozenset(i for i in range(n_children) if rng.random() < density) for _ in range(n_gifts))
    return SantaInstance(n_children, values, eligible)
