"""Exhaustive optima for desk-scale instances."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import UnsupportedScaleError
from ..matroids import Matroid
from ..model import AllocationInstance
from ..polytope import bases

MAX_GIFTS = 14
MAX_CHILDREN = 8
MAX_ELEMENTS = 6
MAX_RESOURCES = 12


@dataclass(frozen=True)
class BruteResult:
    opt: int
    witness: tuple  # item index -> agent or None
    basis: frozenset | None = None


def _reach(agents: Sequence[int], values: Sequence[int], eligible: Sequence[frozenset], t: int):
    """Assignment giving every agent at least ``t``, or ``None``.

    Items are tried in decreasing value; an agent already at ``t`` takes
    nothing more, and states that failed before are remembered.
    """
    order = sorted(range(len(values)), key=lambda j: (-values[j], j))
    slot = {a: k for k, a in enumerate(agents)}
    # remaining eligible mass per agent after position k
    suffix = [[0] * len(agents) for _ in range(len(order) + 1)]
    for pos in range(len(order) - 1, -1, -1):
        row = list(suffix[pos + 1])
        j = order[pos]
        for a in eligible[j]:
            if a in slot:
                row[slot[a]] += values[j]
        suffix[pos] = row
    failed: set = set()
    choice: list = [None] * len(values)

    def dfs(pos: int, loads: tuple) -> bool:
        if all(x >= t for x in loads):
            return True
        if pos == len(order):
            return False
        rest = suffix[pos]
        if any(loads[k] + rest[k] < t for k in range(len(loads))):
            return False
        if (pos, loads) in failed:
            return False
        j = order[pos]
        options = [slot[a] for a in sorted(eligible[j]) if a in slot and loads[slot[a]] < t]
        for k in options:
            nxt = list(loads)
            nxt[k] = min(t, nxt[k] + values[j])
            choice[j] = agents[k]
            if dfs(pos + 1, tuple(nxt)):
                return True
        choice[j] = None
        if not options and dfs(pos + 1, loads):
            return True
        failed.add((pos, loads))
        return False

    if dfs(0, (0,) * len(agents)):
        return tuple(choice)
    return None


def _maxmin(agents: Sequence[int], values: Sequence[int], eligible: Sequence[frozenset]):
    if not agents:
        return 0, (None,) * len(values)
    mass = {a: 0 for a in agents}
    for j, elig in enumerate(eligible):
        for a in elig:
            if a in mass:
                mass[a] += values[j]
    lo, hi = 0, min(mass.values())
    witness = (None,) * len(values)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        w = _reach(agents, values, eligible, mid)
        if w is None:
            hi = mid - 1
        else:
            lo, witness = mid, w
    return lo, witness


def brute_force_santa_opt(inst) -> BruteResult:
    """Exact max-min value of a Santa Claus instance."""
    if inst.n_gifts > MAX_GIFTS or inst.n_children > MAX_CHILDREN:
        raise UnsupportedScaleError(
            f"brute force supports <= {MAX_CHILDREN} children and <= {MAX_GIFTS} gifts"
        )
    opt, witness = _maxmin(range(inst.n_children), inst.values, inst.eligible)
    return BruteResult(opt, witness)


def brute_force_matroid_maxmin(matroid: Matroid, instance: AllocationInstance) -> BruteResult:
    """Best basis and resource assignment; ``witness`` is keyed by sorted resource order."""
    if instance.n_elements > MAX_ELEMENTS or len(instance.values) > MAX_RESOURCES:
        raise UnsupportedScaleError(
            f"brute force supports <= {MAX_ELEMENTS} elements and <= {MAX_RESOURCES} resources"
        )
    res = sorted(instance.values)
    values = [instance.values[w] for w in res]
    eligible = [frozenset(i for i in range(instance.n_elements) if w in instance.neighbors[i]) for w in res]
    best = None
    for B in bases(matroid):
        opt, witness = _maxmin(sorted(B), values, eligible)
        if best is None or opt > best.opt:
            best = BruteResult(opt, witness, B)
    return best
