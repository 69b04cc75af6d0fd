"""Santa Claus front end: reduce a gift instance to a matroid max-min allocation.

Gifts are split into large and small ones relative to a target ``T``.
Children that can be matched to large gifts form a transversal matroid;
the solver runs on its dual so that the returned basis is the set of
children that must live on small gifts, and everybody else receives one
large gift through a bipartite matching.  ``T`` itself is found by binary
search.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InternalError, InvalidInstanceError
from .matching import hopcroft_karp
from .matroids import DualMatroid, TransversalMatroid
from .model import AllocationInstance
from .solver import SolveStats, Stuck, Tracer, run

log = logging.getLogger(__name__)

QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class SantaInstance:
    """Children ``0..n_children-1``; gift ``j`` has value ``values[j]`` for children in ``eligible[j]``."""

    n_children: int
    values: tuple
    eligible: tuple
    child_ids: tuple | None = None
    gift_ids: tuple | None = None

    def __post_init__(self):
        if self.n_children < 0:
            raise InvalidInstanceError("n_children must be non-negative")
        if len(self.values) != len(self.eligible):
            raise InvalidInstanceError("need one eligibility set per gift")
        for j, p in enumerate(self.values):
            if not isinstance(p, int) or p <= 0:
                raise InvalidInstanceError(f"gift {j} must have a positive integer value, got {p!r}")
        elig = []
        for j, a in enumerate(self.eligible):
            a = frozenset(a)
            bad = [i for i in a if not (isinstance(i, int) and 0 <= i < self.n_children)]
            if bad:
                raise InvalidInstanceError(f"gift {j} lists unknown children {bad}")
            elig.append(a)
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "eligible", tuple(elig))
        if self.child_ids is None:
            object.__setattr__(self, "child_ids", tuple(range(self.n_children)))
        if self.gift_ids is None:
            object.__setattr__(self, "gift_ids", tuple(range(len(self.values))))
        if len(self.child_ids) != self.n_children or len(set(self.child_ids)) != self.n_children:
            raise InvalidInstanceError("child ids must be unique, one per child")
        if len(self.gift_ids) != len(self.values) or len(set(self.gift_ids)) != len(self.values):
            raise InvalidInstanceError("gift ids must be unique, one per gift")

    @property
    def n_gifts(self) -> int:
        return len(self.values)

    def gifts_of(self, i: int) -> list:
        return [j for j, a in enumerate(self.eligible) if i in a]

    def child_mass(self, i: int) -> int:
        return sum(self.values[j] for j in self.gifts_of(i))


@dataclass(frozen=True)
class GiftPartition:
    """Large gifts have capped value ``>= delta2*T`` (strictly above in default mode); small ones ``<= delta1*T``."""

    T: int
    delta1: Fraction
    delta2: Fraction
    large: tuple
    small: tuple
    capped: tuple


@dataclass
class SantaSolution:
    assignment: tuple  # gift index -> child index or None
    objective: int
    T: int
    partition: GiftPartition | None
    epsilon: Fraction
    small_children: frozenset = frozenset()
    stats: SolveStats = field(default_factory=SolveStats)


def partition_gifts(inst: SantaInstance, T: int, mode: str = "default") -> GiftPartition:
    if T <= 0:
        raise InvalidInstanceError("partitioning needs a positive target")
    capped = tuple(min(p, T) for p in inst.values)
    if mode == "default":
        d1 = d2 = QUARTER
        large = tuple(j for j, p in enumerate(capped) if p > QUARTER * T)
    elif mode == "adaptive":
        lows = [p for p in capped if p <= QUARTER * T]
        highs = [p for p in capped if p > QUARTER * T]
        d1 = Fraction(max(lows, default=0), T)
        d2 = Fraction(min(highs), T) if highs else Fraction(1)
        large = tuple(j for j, p in enumerate(capped) if p > QUARTER * T)
    else:
        raise ValueError(f"unknown partition mode {mode!r}")
    small = tuple(j for j, p in enumerate(capped) if p <= QUARTER * T)
    return GiftPartition(T, d1, d2, large, small, capped)


def build_matroids(inst: SantaInstance, partition: GiftPartition):
    """Matchable-set matroid of children into large gifts, and its dual."""
    neighbors = [[j for j in partition.large if i in inst.eligible[j]] for i in range(inst.n_children)]
    primal = TransversalMatroid(inst.n_children, neighbors)
    return primal, DualMatroid(primal)


def reduce_to_allocation(inst: SantaInstance, partition: GiftPartition, T: int) -> AllocationInstance:
    values = {j: inst.values[j] for j in partition.small}
    neighbors = tuple(
        frozenset(j for j in partition.small if i in inst.eligible[j]) for i in range(inst.n_children)
    )
    return AllocationInstance(inst.n_children, values, neighbors, T)


def assign_large_gifts(inst: SantaInstance, partition: GiftPartition, children: Iterable[int]) -> dict:
    """Match every child in ``children`` to its own large gift; returns ``{gift: child}``."""
    children = sorted(children)
    adjacency = {i: [j for j in partition.large if i in inst.eligible[j]] for i in children}
    matching = hopcroft_karp(adjacency, children)
    if len(matching) != len(children):
        raise InternalError("children outside the small-gift basis cannot all receive a large gift")
    return {j: i for i, j in matching.items()}


def child_values(inst: SantaInstance, assignment: Sequence) -> list:
    values = [0] * inst.n_children
    for j, i in enumerate(assignment):
        if i is not None:
            values[i] += inst.values[j]
    return values


def _objective(inst: SantaInstance, assignment) -> int:
    return min(child_values(inst, assignment), default=0)


def _greedy_topup(inst: SantaInstance, assignment: list) -> None:
    values = child_values(inst, assignment)
    leftovers = sorted((j for j, i in enumerate(assignment) if i is None and inst.eligible[j]),
                       key=lambda j: (-inst.values[j], j))
    for j in leftovers:
        i = min(inst.eligible[j], key=lambda c: (values[c], c))
        assignment[j] = i
        values[i] += inst.values[j]


def solve_at(
    inst: SantaInstance,
    T: int,
    epsilon=Fraction(1, 20),
    *,
    mode: str = "default",
    tracer: Tracer | None = None,
    debug: bool = True,
):
    """Run the reduction at a fixed target; returns a SantaSolution or Stuck."""
    epsilon = Fraction(epsilon)
    if T <= 0:
        return SantaSolution((None,) * inst.n_gifts, _objective(inst, [None] * inst.n_gifts), 0, None, epsilon)
    partition = partition_gifts(inst, T, mode)
    _, dual = build_matroids(inst, partition)
    alloc = reduce_to_allocation(inst, partition, T)
    outcome = run(dual, alloc, epsilon, delta=partition.delta1, tracer=tracer, debug=debug)
    if isinstance(outcome, Stuck):
        return outcome
    assignment: list = [None] * inst.n_gifts
    for e in outcome.matching.values():
        for j in e.resources:
            assignment[j] = e.owner
    large_children = set(range(inst.n_children)) - outcome.basis
    for j, i in assign_large_gifts(inst, partition, large_children).items():
        assignment[j] = i
    return SantaSolution(
        tuple(assignment),
        _objective(inst, assignment),
        T,
        partition,
        epsilon,
        small_children=outcome.basis,
        stats=outcome.stats,
    )


def binary_search(predicate: Callable[[int], object], lo: int, hi: int):
    """Largest ``T`` in ``[lo, hi)`` with a truthy ``predicate(T)``, assuming ``predicate(lo)``.

    Returns ``(T, predicate(T))``; ``hi`` is treated as infeasible without probing.
    """
    best = predicate(lo)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        res = predicate(mid)
        if res:
            lo, best = mid, res
        else:
            hi = mid
    return lo, best


def solve(
    inst: SantaInstance,
    epsilon=Fraction(1, 20),
    *,
    mode: str = "default",
    search: str = "solver",
    greedy_topup: bool = False,
    tracer: Tracer | None = None,
    debug: bool = True,
) -> SantaSolution:
    """Approximate the max-min assignment.

    ``search="solver"`` binary-searches ``T`` on solver success,
    ``search="lp"`` on feasibility of the compact LP and then solves once.
    """
    from .oracles.lp import lp_feasible_compact

    epsilon = Fraction(epsilon)
    for i in range(inst.n_children):
        if not inst.gifts_of(i):
            log.warning("child %s values no gift; the objective is 0", inst.child_ids[i])
    hi = sum(inst.values) + 1

    if search == "solver":
        def probe(T):
            res = solve_at(inst, T, epsilon, mode=mode, debug=debug)
            return None if isinstance(res, Stuck) else res

        T, sol = binary_search(probe, 0, hi)
    elif search == "lp":
        def lp_probe(T):
            return lp_feasible_compact(inst, T, partition=partition_gifts(inst, T, mode)) if T else True

        T, _ = binary_search(lp_probe, 0, hi)
        sol = solve_at(inst, T, epsilon, mode=mode, debug=debug)
        if isinstance(sol, Stuck):
            raise InternalError(f"solver stuck at LP-feasible target {T}: {sol.describe()}")
    else:
        raise ValueError(f"unknown search mode {search!r}")

    if tracer is not None and T > 0:
        solve_at(inst, T, epsilon, mode=mode, tracer=tracer, debug=debug)
    if greedy_topup:
        apply_greedy_topup(inst, sol)
    return sol


def apply_greedy_topup(inst: SantaInstance, sol: SantaSolution) -> SantaSolution:
    """Give each unassigned gift (largest first) to its poorest eligible child."""
    assignment = list(sol.assignment)
    _greedy_topup(inst, assignment)
    sol.assignment = tuple(assignment)
    sol.objective = _objective(inst, assignment)
    return sol


@dataclass
class EvaluationReport:
    objective: int
    per_child: list
    valid: bool
    violations: list


def evaluate_solution(inst: SantaInstance, sol) -> EvaluationReport:
    """Recompute child values from the assignment and check it against the instance."""
    assignment = sol.assignment if hasattr(sol, "assignment") else sol
    violations = []
    if len(assignment) != inst.n_gifts:
        violations.append(f"assignment has {len(assignment)} entries for {inst.n_gifts} gifts")
        assignment = list(assignment)[: inst.n_gifts] + [None] * max(0, inst.n_gifts - len(assignment))
    clean = []
    for j, i in enumerate(assignment):
        if i is None:
            clean.append(None)
        elif not isinstance(i, int) or not 0 <= i < inst.n_children:
            violations.append(f"gift {inst.gift_ids[j]} assigned to unknown child {i!r}")
            clean.append(None)
        elif i not in inst.eligible[j]:
            violations.append(f"gift {inst.gift_ids[j]} assigned to ineligible child {inst.child_ids[i]}")
            clean.append(None)
        else:
            clean.append(i)
    per_child = child_values(inst, clean)
    objective = min(per_child, default=0)
    if hasattr(sol, "objective") and sol.objective != objective:
        violations.append(f"stated objective {sol.objective} differs from recomputed {objective}")
    return EvaluationReport(objective, per_child, not violations, violations)
