"""Independent checker for solver output."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..matroids import Matroid
from ..model import AllocationInstance


@dataclass
class VerificationReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_solution(
    matroid: Matroid, instance: AllocationInstance, S: Iterable[int], M: Mapping, threshold
) -> VerificationReport:
    """Check that ``S`` is a basis covered exactly by the matching ``M``.

    ``M`` maps an owner to a hyperedge (anything with ``owner``,
    ``resources`` and ``value``) or directly to a resource collection.
    """
    S = frozenset(S)
    problems = []
    try:
        independent = matroid.is_independent(S)
    except Exception as exc:  # malformed S, e.g. foreign elements
        independent = False
        problems.append(f"basis check failed: {exc}")
    if independent and len(S) != matroid.rank():
        problems.append(f"S has {len(S)} elements but the rank is {matroid.rank()}")
    elif not independent and not problems:
        problems.append("S is not independent")

    owners = set(M)
    if owners != S:
        if S - owners:
            problems.append(f"elements {sorted(S - owners)} are not covered")
        if owners - S:
            problems.append(f"matching covers {sorted(owners - S, key=repr)} outside S")
    seen: dict = {}
    for owner in sorted(M, key=repr):
        e = M[owner]
        resources = frozenset(getattr(e, "resources", e))
        if getattr(e, "owner", owner) != owner:
            problems.append(f"edge stored under {owner} belongs to {e.owner}")
        if not isinstance(owner, int) or not 0 <= owner < instance.n_elements:
            problems.append(f"unknown owner {owner!r}")
            continue
        outside = resources - instance.neighbors[owner]
        if outside:
            problems.append(f"edge of {owner} uses non-adjacent resources {sorted(outside)}")
        for w in sorted(resources & instance.neighbors[owner]):
            if w in seen:
                problems.append(f"resource {w} used by both {seen[w]} and {owner}")
            seen[w] = owner
        value = sum(instance.values.get(w, 0) for w in resources)
        stated = getattr(e, "value", value)
        if stated != value:
            problems.append(f"edge of {owner} states value {stated} but is worth {value}")
        if value < threshold:
            problems.append(f"edge of {owner} has value {value} below threshold {threshold}")
    return VerificationReport(not problems, problems)
