"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The shared fixtures build the run corpus once per module: seeded Santa
instances solved end to end, and a sweep of random matroid instances run at
their LP threshold and at random targets.  Every solver run is traced, so
the progress, layer and collapse criteria are checked on the recorded
events rather than on the solver's own bookkeeping.
"""
import itertools
import math
import os
import random
import subprocess
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction as F

import pytest

from matroid_maxmin import formats
from matroid_maxmin.errors import InternalError
from matroid_maxmin.matroids import (
    DualMatroid,
    FreeMatroid,
    PartitionMatroid,
    TabulatedMatroid,
    TransversalMatroid,
    UniformMatroid,
    build_exchange_graph,
)
from matroid_maxmin.model import AllocationInstance, build_minimal_edge, derive_params
from matroid_maxmin.oracles import brute_force_santa_opt, lp_feasible_Q, verify_solution
from matroid_maxmin.santa import (
    SantaInstance,
    build_matroids,
    evaluate_solution,
    partition_gifts,
    reduce_to_allocation,
    solve,
    solve_at,
)
from matroid_maxmin.solver import Solution, Stuck, run

from fixtures import admissible_targets, random_allocation, random_matroid

EPS = F(1, 20)


@dataclass
class TracedRun:
    label: str
    matroid: object
    alloc: AllocationInstance
    delta: F | None
    outcome: object = None
    events: list = field(default_factory=list)
    error: str | None = None


def traced_run(label, matroid, alloc, delta=None) -> TracedRun:
    r = TracedRun(label, matroid, alloc, delta)
    try:
        r.outcome = run(matroid, alloc, EPS, delta=delta, tracer=r.events.append)
    except InternalError as exc:
        r.error = str(exc)
    return r


# -- corpora ---------------------------------------------------------------


def santa_case(seed: int) -> SantaInstance:
    """2..8 children, up to 14 gifts; every child has at least one eligible gift."""
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    m = rng.randint(n, 14)
    kind = seed % 3
    values = []
    for _ in range(m):
        if kind == 0:
            values.append(rng.randint(1, 100))
        elif kind == 1:
            values.append(rng.choice([rng.randint(1, 10), rng.randint(40, 100)]))
        else:
            values.append(rng.randint(1, 12))
    eligible = []
    for j in range(m):
        a = {i for i in range(n) if rng.random() < 0.4}
        a.add(j % n)
        eligible.append(frozenset(a))
    return SantaInstance(n, tuple(values), tuple(eligible))


@pytest.fixture(scope="module")
def santa_corpus():
    cases = []
    solve_time = brute_time = 0.0
    for seed in range(200):
        inst = santa_case(seed)
        t = time.perf_counter()
        opt = brute_force_santa_opt(inst).opt
        brute_time += time.perf_counter() - t
        t = time.perf_counter()
        sol = solve(inst, EPS)
        solve_time += time.perf_counter() - t
        cases.append((seed, inst, opt, sol))
    return cases, solve_time, brute_time


@pytest.fixture(scope="module")
def santa_runs(santa_corpus):
    """The reduced matroid instance of every Santa case, rerun at its final target."""
    runs = []
    for seed, inst, _, sol in santa_corpus[0]:
        if sol.T == 0:
            continue
        part = partition_gifts(inst, sol.T)
        _, dual = build_matroids(inst, part)
        runs.append(traced_run(f"santa seed {seed}", dual, reduce_to_allocation(inst, part, sol.T), part.delta1))
    return runs


def lp_threshold(matroid, alloc) -> int:
    """Largest T with a non-empty Q(T); Q(0) is never empty."""
    lo, hi = 0, sum(alloc.values.values()) + 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if lp_feasible_Q(matroid, alloc, mid):
            lo = mid
        else:
            hi = mid
    return lo


@pytest.fixture(scope="module")
def matroid_sweep():
    """100 instances with |X| <= 6, |W| <= 12, each at up to four targets."""
    records = []  # (instance number, T, lp feasible, TracedRun)
    for k in range(100):
        rng = random.Random(1000 + k)
        n, m = rng.randint(1, 6), rng.randint(1, 12)
        matroid = random_matroid(rng, n)
        alloc = random_allocation(rng, n, m, vmax=8, density=0.5)
        if not alloc.values:
            alloc = AllocationInstance(n, {0: 1}, alloc.neighbors, 1)
        lo = admissible_targets(alloc)
        t_star = lp_threshold(matroid, alloc)
        targets = {t_star, t_star + 1, rng.randint(lo, lo + 12), rng.randint(lo, lo + 40)}
        for T in sorted(t for t in targets if t >= lo):
            inst = alloc.with_target(T)
            feasible = lp_feasible_Q(matroid, inst)
            records.append((k, T, feasible, traced_run(f"matroid #{k} T={T}", matroid, inst)))
    return records


def all_runs(santa_runs, matroid_sweep):
    return list(santa_runs) + [r for *_, r in matroid_sweep]


# -- criteria --------------------------------------------------------------


def test_criterion_01_approximation(report, santa_corpus):
    cases, solve_time, brute_time = santa_corpus
    bad = []
    for seed, inst, opt, sol in cases:
        rep = evaluate_solution(inst, sol)
        if not rep.valid or sol.objective < F(1, 5) * opt:
            bad.append(seed)
    worst = min((F(sol.objective, opt) for _, _, opt, sol in cases if opt), default=None)
    ok = not bad and solve_time + brute_time < 60
    report(
        1,
        ok,
        f"{len(cases)} instances, violations={bad}, worst ratio={worst} (needs >= 1/5), "
        f"solve {solve_time:.1f}s + brute force {brute_time:.1f}s",
    )
    assert ok


def test_criterion_02_completeness(report, matroid_sweep):
    violations = []
    errors = []
    for k, T, feasible, r in matroid_sweep:
        if r.error:
            errors.append(r.label)
        elif feasible and isinstance(r.outcome, Stuck):
            violations.append(r.label)
    instances = len({k for k, *_ in matroid_sweep})
    at_threshold = sum(1 for *_, f, r in matroid_sweep if f)
    ok = not violations and not errors and instances == 100
    report(
        2,
        ok,
        f"{instances} instances, {len(matroid_sweep)} runs ({at_threshold} LP-feasible), "
        f"violations={violations}, internal errors={errors}",
    )
    assert ok


def _edge_floor(r: TracedRun):
    """(1/3 - eps)T - max p / 3, with max p replaced by delta*T when the run was given a delta."""
    pmax = max(r.alloc.values.values(), default=0)
    if r.delta is not None:
        # the Santa reduction bounds small gifts by delta1*T >= max p
        pmax = max(pmax, r.delta * r.alloc.target)
    return (F(1, 3) - EPS) * r.alloc.target - F(pmax, 3)


def test_criterion_03_output_contract(report, santa_runs, matroid_sweep):
    runs = all_runs(santa_runs, matroid_sweep)
    bad = []
    solved = literal = 0
    for r in runs:
        if not isinstance(r.outcome, Solution):
            continue
        solved += 1
        literal += r.delta is None
        floor = _edge_floor(r)
        if any(e.value < floor for e in r.outcome.matching.values()):
            bad.append(f"{r.label}: edge below floor")
        thr = r.outcome.params.beta_threshold
        rep = verify_solution(r.matroid, r.alloc, r.outcome.basis, r.outcome.matching, thr)
        if not rep.ok:
            bad.append(f"{r.label}: {rep.violations}")
    ok = not bad and solved > 0
    report(3, ok, f"{solved} solutions checked ({literal} at delta = max p/T), failures={bad}")
    assert ok


def test_criterion_04_signature_decreases(report, santa_runs, matroid_sweep):
    runs = all_runs(santa_runs, matroid_sweep)
    failures = [f"{r.label}: {r.error}" for r in runs if r.error]
    steps = 0
    for r in runs:
        by_phase: dict = {}
        for e in r.events:
            if e.kind == "signature":
                by_phase.setdefault(e.payload["phase"], []).append(tuple(e.payload["coords"]))
        for sigs in by_phase.values():
            for a, b in zip(sigs, sigs[1:]):
                steps += 1
                if not b < a:
                    failures.append(f"{r.label}: {a} -> {b}")
    ok = not failures and steps > 0
    report(4, ok, f"{steps} iterations across {len(runs)} runs, assertion failures={len(failures)}")
    assert ok, failures[:5]


def bound(n: int) -> int:
    if n <= 1:
        return 0
    return math.ceil(math.log(n) / math.log1p(float(EPS**2 / 4)))


def test_criterion_05_layer_bound(report, santa_runs, matroid_sweep):
    runs = all_runs(santa_runs, matroid_sweep)
    bad = []
    deepest = 0
    for r in runs:
        layers = [e.payload["layer"] for e in r.events if e.kind == "layer_built"]
        seen = max(layers, default=0)
        deepest = max(deepest, seen)
        if seen > bound(r.alloc.n_elements):
            bad.append((r.label, seen))
    ok = not bad
    report(5, ok, f"{len(runs)} runs, deepest tree {deepest} layers, bound(6)={bound(6)}, violations={bad}")
    assert ok


def _gamma() -> F:
    c = EPS**2 / 4
    # smallest k with (1 + c)^k >= 2/c, in integers: 1601^k >= 3200 * 1600^k
    k, num, den = 0, 1, 1
    while num * c.numerator < 2 * c.denominator * den:
        k, num, den = k + 1, num * (c.denominator + c.numerator), den * c.denominator
    assert k == 12918
    return F(1, 2 * (k + 1))


def test_criterion_06_collapse_shrinkage(report, santa_runs, matroid_sweep):
    runs = all_runs(santa_runs, matroid_sweep)
    c, gamma = EPS**2 / 4, _gamma()
    bad = []
    collapses = 0
    for r in runs:
        for e in r.events:
            if e.kind != "collapse":
                continue
            collapses += 1
            before, after = e.payload["B_before"], e.payload["B_after"]
            need = max(1, math.ceil(c * gamma * before))
            if before - after < need:
                bad.append((r.label, before, after, need))
    ok = not bad and collapses > 0
    report(6, ok, f"{collapses} collapses observed, violations={bad}")
    assert ok


def small_matroid_family():
    """Small matroids of every kind in the package, ground sizes 0..7."""
    for n in range(8):
        for k in range(n + 1):
            yield UniformMatroid(n, k)
        yield FreeMatroid(n)
        if n == 0:
            continue
        yield PartitionMatroid(n, [list(range(0, n, 2)), list(range(1, n, 2))], [1, min(2, n // 2)])
        for seed in range(2):
            rng = random.Random(100 * n + seed)
            sets = [[i for i in range(n) if rng.random() < 0.45] for _ in range(rng.randint(1, n))]
            t = TransversalMatroid.from_sets(n, sets)
            yield t
            yield DualMatroid(t)
        rng = random.Random(7 * n)
        gifts = SantaInstance(n, tuple(rng.randint(1, 9) for _ in range(n)),
                              tuple(frozenset(i for i in range(n) if rng.random() < 0.5) for _ in range(n)))
        for m in build_matroids(gifts, partition_gifts(gifts, 12)):
            yield m


def _exchange_counterexamples(matroid):
    n = matroid.ground_size
    tab = TabulatedMatroid(matroid)
    full = (1 << n) - 1
    members = lambda mask: frozenset(i for i in range(n) if mask >> i & 1)  # noqa: E731
    indep = [mask for mask in range(1 << n) if tab.is_independent(members(mask))]
    indep_set = set(indep)
    r = max(bin(m).count("1") for m in indep)
    bases_ = [m for m in indep if bin(m).count("1") == r]
    pop = lambda m: bin(m).count("1")  # noqa: E731
    bad = []

    # exchange graph between any Y, Z with |Y| <= |Z|
    for Y in indep:
        for Z in indep:
            if pop(Y) <= pop(Z):
                g = build_exchange_graph(tab, members(Y), members(Z))
                if g.left_perfect_matching() is None:
                    bad.append(("exchange", Y, Z))

    # swapping: sum over U of any base-polytope vertex is >= |C| - |D|
    min_hit: dict = {}

    def least(U):
        if U not in min_hit:
            min_hit[U] = min(pop(U & B) for B in bases_)
        return min_hit[U]

    checked = 0
    for S in indep:
        C = S
        while True:
            pool = (full & ~S) | C
            D = pool
            while True:
                if pop(D) <= pop(C) and ((S & ~C) | D) in indep_set:
                    base = (S & ~C) | D
                    U = 0
                    rest = pool & ~D
                    for i in range(n):
                        if rest >> i & 1 and (base | 1 << i) in indep_set:
                            U |= 1 << i
                    checked += 1
                    if least(U) < pop(C) - pop(D):
                        bad.append(("swap", S, C, D))
                if D == 0:
                    break
                D = (D - 1) & pool
            if C == 0:
                break
            C = (C - 1) & S
    return bad, checked


def test_criterion_07_exchange_and_swapping(report):
    family = list(small_matroid_family())
    bad = []
    checked = 0
    for m in family:
        found, k = _exchange_counterexamples(m)
        checked += k
        bad.extend((repr(m), *f) for f in found)
    ok = not bad
    report(7, ok, f"{len(family)} matroids, {checked} swap configurations x all bases, counterexamples={bad[:3]}")
    assert ok


def mixed_case(seed: int):
    """Values in {1, T}: each child owns T ones, large gifts are shared at random."""
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    T = rng.randint(8, 40)
    values, eligible = [], []
    for i in range(n):
        for _ in range(T):
            values.append(1)
            eligible.append(frozenset({i}))
    for _ in range(rng.randint(0, n + 1)):
        values.append(T)
        eligible.append(frozenset(i for i in range(n) if rng.random() < 0.5))
    order = list(range(len(values)))
    rng.shuffle(order)
    return SantaInstance(n, tuple(values[j] for j in order), tuple(eligible[j] for j in order)), T


def test_criterion_08_mixed_values(report):
    bad = []
    small_children = 0
    for seed in range(50):
        inst, T = mixed_case(seed)
        sol = solve_at(inst, T, EPS, mode="adaptive")
        if isinstance(sol, Stuck):
            bad.append((seed, "stuck"))
            continue
        if sol.partition.delta1 != F(1, T):
            bad.append((seed, f"delta1={sol.partition.delta1}"))
        need = (F(1, 3) - F(1, 3 * T) - EPS) * T
        small = set(sol.partition.small)
        for i in sol.small_children:
            small_children += 1
            got = sum(inst.values[j] for j, c in enumerate(sol.assignment) if c == i and j in small)
            if got < need:
                bad.append((seed, i, got, need))
    ok = not bad and small_children > 0
    report(8, ok, f"50 instances, {small_children} small-gift children, violations={bad}")
    assert ok


def minimal_subsets(values, pool, threshold):
    pool = sorted(pool)
    out = set()
    for k in range(len(pool) + 1):
        for U in itertools.combinations(pool, k):
            total = sum(values[w] for w in U)
            if total >= threshold and all(total - values[w] < threshold for w in U):
                out.add(frozenset(U))
    return out


def test_criterion_09_minimal_edges(report, matroid_sweep):
    bad = []
    checks = 0
    seen = set()
    for k, T, _, r in matroid_sweep:
        alloc = r.alloc
        params = derive_params(alloc, EPS)
        rng = random.Random(k * 1000 + T)
        for i in range(alloc.n_elements):
            nbrs = sorted(alloc.neighbors[i] & alloc.resources)
            forbidden = frozenset(w for w in nbrs if rng.random() < 0.25)
            for thr in (params.alpha_threshold, params.beta_threshold):
                for banned in (frozenset(), forbidden):
                    key = (tuple(sorted(alloc.values.items())), tuple(nbrs), thr, banned)
                    if key in seen:
                        continue
                    seen.add(key)
                    checks += 1
                    pool = set(nbrs) - banned
                    family = minimal_subsets(alloc.values, pool, thr)
                    e = build_minimal_edge(alloc, i, thr, banned)
                    if (e is None) != (not family):
                        bad.append((r.label, i, thr, "existence"))
                    elif e is not None:
                        pmax = max(alloc.values[w] for w in pool)
                        if e.resources not in family or not e.value < thr + pmax:
                            bad.append((r.label, i, thr, sorted(e.resources)))
    ok = not bad and checks > 0
    report(9, ok, f"{checks} neighbourhoods with <= 12 resources, disagreements={bad[:3]}")
    assert ok


MATROID_DOC = {
    "kind": "matroid-maxmin",
    "ground": ["x", "y", "z", "u"],
    "resources": [{"id": f"r{w}", "value": v, "eligible": e} for w, (v, e) in enumerate(
        [(3, ["x", "y", "u"]), (3, ["x", "z"]), (2, ["z", "u"]), (6, ["x", "z"]), (6, ["u"])])],
    "matroid": {"type": "uniform", "rank": 3},
    "target_T": 13,
}


def test_criterion_10_determinism(report, tmp_path):
    def cli(*args, hashseed):
        env = dict(os.environ, PYTHONHASHSEED=str(hashseed), MAXMIN_TRACE="0")
        proc = subprocess.run([sys.executable, "-m", "matroid_maxmin", *args], capture_output=True, env=env)
        return proc.returncode, proc.stdout

    suite = tmp_path / "suite"
    suite.mkdir()
    gen = ["generate", "--seed", "11", "--children", "4", "--gifts", "9", "--values", "twovalue:3:40:1/3"]
    code, text = cli(*gen, hashseed=0)
    (suite / "santa.json").write_bytes(text)
    (suite / "matroid.json").write_text(formats.dumps(MATROID_DOC))
    santa, matroid = str(suite / "santa.json"), str(suite / "matroid.json")
    sol = tmp_path / "sol.json"
    code, text = cli("solve", "--in", santa, hashseed=0)
    sol.write_bytes(text)

    commands = [
        gen,
        ["solve", "--in", santa, "--seed", "5"],
        ["solve", "--in", santa, "--partition", "adaptive", "--search", "lp", "--greedy-topup"],
        ["solve", "--in", matroid],
        ["trace", "--in", matroid],
        ["trace", "--in", santa],
        ["brute", "--in", santa],
        ["brute", "--in", matroid],
        ["verify", "--in", santa, "--solution", str(sol)],
        ["bench", str(suite)],
        ["bench", str(suite), "--jobs", "2"],
    ]
    differing = []
    for args in commands:
        a, b = cli(*args, hashseed=1), cli(*args, hashseed=2)
        if a != b or a[0] != 0 or not a[1]:
            differing.append(" ".join(args[:3]))
    ok = not differing
    report(10, ok, f"{len(commands)} commands run twice under different hash seeds, differing={differing}")
    assert ok
