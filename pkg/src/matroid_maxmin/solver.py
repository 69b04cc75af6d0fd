"""Augmenting-tree solver for Matroid Max-Min Allocation.

The driver grows an independent set one element per phase.  Each phase
starts with one exposed element ``i0`` and alternates an expansion step
(greedy disjoint alpha-edges) with either building a new layer of blocking
edges or swapping a batch of elements from one layer and collapsing the
tree above it.  A phase ends when ``i0`` (or an exchange partner of it)
receives a beta-edge that is disjoint from the current matching.

Layers are numbered from 1; layer 0 of the textbook description is always
empty and is not stored.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterable

from .errors import InternalError
from .matroids import Matroid, augment_to_size, find_swap_out
from .model import (
    AllocationInstance,
    HyperEdge,
    SolverParams,
    build_minimal_edge,
    derive_params,
    shrink_to_beta_edge,
)

STRATEGIES = ("smallest", "largest")


@dataclass(frozen=True)
class TraceEvent:
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, **self.payload}, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "TraceEvent":
        data = json.loads(line)
        kind = data.pop("kind")
        return cls(kind, data)


Tracer = Callable[[TraceEvent], None]


@dataclass
class CollapseRecord:
    layer: int
    blockers_before: int
    blockers_after: int
    required: int


@dataclass
class SolveStats:
    phases: int = 0
    iterations: int = 0
    max_layers: int = 0
    layers_built: int = 0
    collapses: int = 0
    signature_checks: int = 0
    collapse_records: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "phases": self.phases,
            "iterations": self.iterations,
            "max_layers": self.max_layers,
            "collapses": self.collapses,
        }


@dataclass
class Layer:
    adding: list
    blocking: dict  # owner -> HyperEdge, ascending owners
    chosen_for: dict = field(default_factory=dict)  # blocking owner -> its adding edge

    def prune(self) -> None:
        """Drop adding edges whose blocking edges have all left the layer."""
        self.chosen_for = {o: h for o, h in self.chosen_for.items() if o in self.blocking}
        live = set(self.chosen_for.values())
        self.adding = [h for h in self.adding if h in live]


@dataclass
class SolverState:
    matroid: Matroid
    instance: AllocationInstance
    params: SolverParams
    S: set
    i0: int
    M: dict  # owner -> HyperEdge
    layers: list = field(default_factory=list)
    strategy: str = "smallest"

    def discovered(self) -> set:
        C = {self.i0}
        for layer in self.layers:
            C.update(layer.blocking)
        return C

    def matched_owner(self) -> dict:
        return {w: e.owner for e in self.M.values() for w in e.resources}

    def tree_resources(self) -> set:
        used: set = set()
        for layer in self.layers:
            for e in layer.adding:
                used |= e.resources
            for e in layer.blocking.values():
                used |= e.resources
        return used

    def blocker_prefix_sizes(self) -> list:
        sizes, total = [], 0
        for layer in self.layers:
            total += len(layer.blocking)
            sizes.append(total)
        return sizes


@dataclass(frozen=True)
class Stuck:
    step: str
    phase: int
    discovered: int
    reached: int
    needed: int

    def describe(self) -> str:
        return (
            f"stuck in {self.step} during phase {self.phase}: "
            f"|C|={self.discovered}, found {self.reached} of {self.needed}"
        )


@dataclass(frozen=True)
class Completed:
    S: frozenset
    M: dict


@dataclass(frozen=True)
class LayerBuilt:
    layer: int
    blocking: int
    adding: int


@dataclass(frozen=True)
class Collapsed:
    layer: int
    swapped_out: tuple
    swapped_in: tuple


@dataclass
class Solution:
    basis: frozenset
    matching: dict
    params: SolverParams
    stats: SolveStats

    @property
    def edges(self) -> list:
        return [self.matching[i] for i in sorted(self.matching)]


def floor_log(n: int, base: Fraction) -> int:
    """``floor(log_base n)`` for ``base > 1``; ``-1`` encodes an empty count."""
    if n <= 0:
        return -1
    if n == 1:
        return 0
    num, den = base.numerator, base.denominator
    # base**s == n is impossible for s >= 1 unless den == 1, so the quotient
    # of logarithms is never an integer and a guard band suffices.
    for prec in (60, 200, 1000):
        with localcontext() as ctx:
            ctx.prec = prec
            est = Decimal(n).ln() / (Decimal(num).ln() - Decimal(den).ln())
            s = int(est)
            if est - s > Decimal(10) ** (-(prec // 2)) and (s + 1) - est > Decimal(10) ** (-(prec // 2)):
                break
    if s * num.bit_length() <= 1 << 16:
        while base ** (s + 1) <= n:
            s += 1
        while s > 0 and base**s > n:
            s -= 1
    return s


def signature(state: SolverState) -> tuple:
    base = state.params.sig_base
    n = state.instance.n_elements
    sentinel = 1 if n <= 1 else floor_log(n, base) + 2
    return tuple(floor_log(size, base) for size in state.blocker_prefix_sizes()) + (sentinel,)


def _ceil_at_least_one(x: Fraction) -> int:
    return max(1, math.ceil(x))


def expansion_step(state: SolverState, phase: int = 0):
    """Greedy family of disjoint alpha-edges on swappable elements.

    Returns ``(H, D)`` with ``H`` in ascending owner order, or ``Stuck``.
    """
    matroid, inst, params = state.matroid, state.instance, state.params
    C = state.discovered()
    needed = _ceil_at_least_one(params.expansion_ratio * len(C))
    forbidden = state.tree_resources()
    kept = frozenset(state.S - C)
    candidates = sorted((set(range(inst.n_elements)) - state.S) | C)
    H: list = []
    D: list = []
    for i in candidates:
        if len(D) == needed:
            break
        e = build_minimal_edge(inst, i, params.alpha_threshold, forbidden)
        if e is None:
            continue
        if not matroid._independent(kept | frozenset(D) | {i}):
            continue
        H.append(e)
        D.append(i)
        forbidden |= e.resources
    if len(D) < needed:
        return Stuck("expansion", phase, len(C), len(D), needed)
    return H, D


def find_collapsible_layer(state: SolverState, C_prime: Iterable[int]) -> int:
    """Layer (1-based) holding at least a ``gamma`` share of ``C_prime``."""
    C_prime = set(C_prime)
    need = _ceil_at_least_one(state.params.gamma * len(C_prime))
    overlaps = [len(C_prime & layer.blocking.keys()) for layer in state.layers]
    if state.strategy == "largest":
        best = max(range(len(overlaps)), key=lambda j: (overlaps[j], -j), default=None)
        if best is not None and overlaps[best] >= need:
            return best + 1
    else:
        for j, size in enumerate(overlaps):
            if size >= need:
                return j + 1
    raise InternalError(f"no layer holds {need} of the {len(C_prime)} swappable elements: {overlaps}")


def classify_and_advance(state: SolverState, H: list, D: list, stats: SolveStats | None = None):
    """Build a layer, collapse the tree, or finish the phase (mutates ``state``)."""
    params, inst, matroid = state.params, state.instance, state.matroid
    stats = stats if stats is not None else SolveStats()
    owner_of = state.matched_owner()
    C = state.discovered()
    quota = _ceil_at_least_one(params.case1_ratio * len(H))

    hit = sorted({owner_of[w] for h in H for w in h.resources if w in owner_of})
    if len(hit) >= quota:
        blocking = {o: state.M[o] for o in hit}
        adding: list = []
        chosen_for = {}
        for o in hit:
            h = next(h for h in H if h.resources & blocking[o].resources)
            chosen_for[o] = h
            if h not in adding:
                adding.append(h)
        growth = _ceil_at_least_one(params.layer_growth * len(C))
        if len(blocking) < growth or len(adding) > len(blocking):
            raise InternalError("new layer violates its size guarantees")
        state.layers.append(Layer(adding, blocking, chosen_for))
        stats.layers_built += 1
        stats.max_layers = max(stats.max_layers, len(state.layers))
        return LayerBuilt(len(state.layers), len(blocking), len(adding))

    occupied = set(owner_of)
    shrunk = {}
    for h in H:
        if inst.value(h.resources - occupied) >= params.beta_threshold:
            shrunk[h.owner] = shrink_to_beta_edge(inst, params, h, occupied)
    if len(shrunk) < quota:
        raise InternalError(
            f"neither case applies: {len(hit)} blocked matches and {len(shrunk)} free edges for |H|={len(H)}"
        )
    D_prime = sorted(shrunk)
    C_prime = find_swap_out(matroid, state.S, C, D_prime)

    if state.i0 in C_prime:
        rest = frozenset(state.S - {state.i0})
        for i1 in D_prime:
            if i1 not in rest and matroid._independent(rest | {i1}):
                break
        else:
            raise InternalError("no exchange partner for the exposed element")
        state.S = set(rest | {i1})
        state.M[i1] = shrunk[i1]
        return Completed(frozenset(state.S), dict(state.M))

    lt = find_collapsible_layer(state, C_prime)
    layer = state.layers[lt - 1]
    size = _ceil_at_least_one(params.gamma * len(C_prime))
    C_tilde = sorted(C_prime & layer.blocking.keys())[:size]
    kept = frozenset(state.S) - frozenset(C_tilde)
    grown = augment_to_size(matroid, kept, frozenset(D_prime) - kept, len(state.S))
    D_tilde = sorted(grown - kept)

    before = state.blocker_prefix_sizes()[lt - 1]
    for c in C_tilde:
        del state.M[c]
    for d in D_tilde:
        state.M[d] = shrunk[d]
    state.S = set(grown)
    del state.layers[lt:]
    for c in C_tilde:
        del layer.blocking[c]
    layer.prune()
    after = state.blocker_prefix_sizes()[lt - 1]
    required = _ceil_at_least_one(params.layer_growth * params.gamma * before)
    stats.collapses += 1
    stats.collapse_records.append(CollapseRecord(lt, before, after, required))
    if before - after < required:
        raise InternalError(f"collapse at layer {lt} removed {before - after} < {required} blockers")
    return Collapsed(lt, tuple(C_tilde), tuple(D_tilde))


def check_invariants(state: SolverState) -> None:
    """Raise InternalError if the solver state is inconsistent."""
    problems = []
    seen: dict = {}
    for o, e in state.M.items():
        if e.owner != o:
            problems.append(f"matching edge keyed {o} is owned by {e.owner}")
        for w in e.resources:
            if w in seen:
                problems.append(f"resource {w} used by {seen[w]} and {o}")
            seen[w] = o
    if set(state.M) != state.S - {state.i0}:
        problems.append("matched elements differ from S minus the exposed element")
    if state.i0 not in state.S:
        problems.append("exposed element is not in S")
    if not state.matroid.is_independent(state.S):
        problems.append("S is not independent")
    adding_owner: dict = {}
    for j, layer in enumerate(state.layers):
        if len(layer.adding) > len(layer.blocking):
            problems.append(f"layer {j + 1} has more adding than blocking edges")
        for o, e in layer.blocking.items():
            if state.M.get(o) != e:
                problems.append(f"blocking edge of {o} is not in the matching")
        for e in layer.adding:
            for w in e.resources:
                if w in adding_owner:
                    problems.append(f"adding edges share resource {w}")
                adding_owner[w] = j
                owner = seen.get(w)
                if owner is not None and owner not in layer.blocking:
                    problems.append(f"adding edge in layer {j + 1} meets a matching edge outside its layer")
    if problems:
        raise InternalError("; ".join(problems))


def run_phase(
    state: SolverState,
    *,
    phase: int = 0,
    stats: SolveStats | None = None,
    tracer: Tracer | None = None,
    debug: bool = True,
):
    """Run one phase; returns ``Completed`` or ``Stuck``."""
    stats = stats if stats is not None else SolveStats()
    emit = tracer or (lambda event: None)
    emit(TraceEvent("phase_start", {"phase": phase, "i0": state.i0, "S": len(state.S), "M": len(state.M)}))
    sig = signature(state)
    emit(TraceEvent("signature", {"phase": phase, "coords": list(sig)}))
    while True:
        stats.iterations += 1
        found = expansion_step(state, phase)
        if isinstance(found, Stuck):
            return found
        H, D = found
        emit(
            TraceEvent(
                "expansion",
                {"phase": phase, "layers": len(state.layers), "C": len(state.discovered()), "H": len(H), "D": len(D)},
            )
        )
        outcome = classify_and_advance(state, H, D, stats)
        if isinstance(outcome, Completed):
            emit(TraceEvent("phase_done", {"phase": phase, "S": len(outcome.S), "M": len(outcome.M)}))
            return outcome
        if isinstance(outcome, LayerBuilt):
            emit(TraceEvent("layer_built", {"phase": phase, "layer": outcome.layer,
                                            "B": outcome.blocking, "A": outcome.adding}))
        else:
            rec = stats.collapse_records[-1]
            emit(TraceEvent("collapse", {"phase": phase, "layer": outcome.layer,
                                         "out": len(outcome.swapped_out), "in": len(outcome.swapped_in),
                                         "B_before": rec.blockers_before, "B_after": rec.blockers_after}))
        new_sig = signature(state)
        stats.signature_checks += 1
        if not new_sig < sig:
            raise InternalError(f"signature did not decrease: {sig} -> {new_sig}")
        sig = new_sig
        emit(TraceEvent("signature", {"phase": phase, "coords": list(sig)}))
        if debug:
            check_invariants(state)


def run(
    matroid: Matroid,
    instance: AllocationInstance,
    epsilon=Fraction(1, 20),
    *,
    delta=None,
    strategy: str = "smallest",
    tracer: Tracer | None = None,
    debug: bool = True,
):
    """Find a basis and a disjoint family of beta-edges covering it.

    Returns a ``Solution`` or a ``Stuck`` diagnostic.  A ``Stuck`` result
    certifies that the LP relaxation at the instance's target is empty.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if matroid.ground_size != instance.n_elements:
        raise InternalError("matroid and instance disagree on the ground set")
    params = derive_params(instance, epsilon, delta)
    stats = SolveStats()
    S: set = set()
    M: dict = {}
    for phase in range(matroid.rank()):
        i0 = next(i for i in range(instance.n_elements) if i not in S and matroid._independent(frozenset(S | {i})))
        state = SolverState(matroid, instance, params, S | {i0}, i0, dict(M), strategy=strategy)
        stats.phases += 1
        outcome = run_phase(state, phase=phase, stats=stats, tracer=tracer, debug=debug)
        if isinstance(outcome, Stuck):
            return outcome
        S, M = set(outcome.S), dict(outcome.M)
    return Solution(frozenset(S), M, params, stats)


def layer_bound(n_elements: int, epsilon) -> int:
    """Upper bound on the number of simultaneous layers: ceil(log n / log(1 + eps^2/4))."""
    if n_elements <= 1:
        return 0
    c = Fraction(epsilon) ** 2 / 4
    with localcontext() as ctx:
        ctx.prec = 50
        q = Decimal(n_elements).ln() / (Decimal(c.numerator + c.denominator).ln() - Decimal(c.denominator).ln())
    return math.ceil(q)
