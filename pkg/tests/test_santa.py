import logging
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroid_maxmin.errors import InternalError, InvalidInstanceError
from matroid_maxmin.model import derive_params
from matroid_maxmin.oracles import brute_force_santa_opt, lp_feasible_compact
from matroid_maxmin.oracles.lp import compact_lp_rows, q_contains
from matroid_maxmin.oracles.simplex import EQ, GE, LE
from matroid_maxmin.polytope import bases, lift_to_base_polytope
from matroid_maxmin.santa import (
    SantaInstance,
    assign_large_gifts,
    binary_search,
    build_matroids,
    evaluate_solution,
    partition_gifts,
    reduce_to_allocation,
    solve,
    solve_at,
)

from fixtures import EPS, random_santa


def point_in(rows, senses, rhs, point):
    for row, sense, b in zip(rows, senses, rhs):
        lhs = sum(F(v) * point[k] for k, v in row.items())
        if sense == LE and lhs > b or sense == GE and lhs < b or sense == EQ and lhs != b:
            return False
    return all(v >= 0 for v in point)


# -- partition and reduction -----------------------------------------------


def test_partition_default():
    inst = SantaInstance(1, (30, 25, 26), ({0}, {0}, {0}))
    part = partition_gifts(inst, 100)
    assert part.large == (0, 2) and part.small == (1,)
    assert part.delta1 == part.delta2 == F(1, 4)


def test_partition_adaptive_and_capping():
    inst = SantaInstance(1, (100, 1), ({0}, {0}))
    part = partition_gifts(inst, 100, "adaptive")
    assert part.delta1 == F(1, 100) and part.delta2 == 1
    capped = partition_gifts(SantaInstance(1, (150,), ({0},)), 100)
    assert capped.capped == (100,) and capped.large == (0,)
    none_small = partition_gifts(SantaInstance(1, (80,), ({0},)), 100, "adaptive")
    assert none_small.delta1 == 0 and none_small.delta2 == F(4, 5)
    with pytest.raises(InvalidInstanceError):
        partition_gifts(inst, 0)
    with pytest.raises(ValueError):
        partition_gifts(inst, 10, "weird")


def test_instance_validation():
    with pytest.raises(InvalidInstanceError):
        SantaInstance(1, (0,), ({0},))
    with pytest.raises(InvalidInstanceError):
        SantaInstance(1, (3,), ({1},))
    with pytest.raises(InvalidInstanceError):
        SantaInstance(1, (3, 4), ({0},))


def test_build_matroids():
    no_large = SantaInstance(2, (1,), ({0, 1},))
    primal, dual = build_matroids(no_large, partition_gifts(no_large, 100))
    assert primal.rank() == 0 and dual.rank() == 2
    shared = SantaInstance(2, (100,), ({0, 1},))
    _, dual = build_matroids(shared, partition_gifts(shared, 100))
    assert sorted(map(sorted, bases(dual))) == [[0], [1]]
    own = SantaInstance(2, (100, 100), ({0}, {1}))
    _, dual = build_matroids(own, partition_gifts(own, 100))
    assert list(bases(dual)) == [frozenset()]


def test_reduce_to_allocation():
    inst = SantaInstance(2, (100, 5, 7), ({0, 1}, {0}, {0, 1}))
    alloc = reduce_to_allocation(inst, partition_gifts(inst, 100), 100)
    assert alloc.values == {1: 5, 2: 7}
    assert alloc.neighbors == (frozenset({1, 2}), frozenset({2}))
    big = SantaInstance(1, (100,), ({0},))
    assert reduce_to_allocation(big, partition_gifts(big, 100), 100).values == {}


def test_assign_large_gifts():
    inst = SantaInstance(3, (50, 50, 50), ({0, 1}, {1, 2}, {2}))
    part = partition_gifts(inst, 100)
    assert assign_large_gifts(inst, part, []) == {}
    # the only perfect matching: 2 <- gift 2, 1 <- gift 1, 0 <- gift 0
    assert assign_large_gifts(inst, part, [0, 1, 2]) == {0: 0, 1: 1, 2: 2}
    with pytest.raises(InternalError):
        shared = SantaInstance(2, (50,), ({0, 1},))
        assign_large_gifts(shared, partition_gifts(shared, 100), [0, 1])


def test_binary_search():
    assert binary_search(lambda t: t <= 17, 0, 100) == (17, True)
    assert binary_search(lambda t: t == 0, 0, 1) == (0, True)


# -- end to end ------------------------------------------------------------


def test_solve_examples():
    two = SantaInstance(2, (100, 100), ({0}, {1}))
    sol = solve(two, EPS)
    assert sol.objective == 100 and sol.assignment == (0, 1)
    one = SantaInstance(1, (60, 60), ({0}, {0}))
    assert solve(one, EPS).objective >= F(1, 5) * 120
    assert solve(SantaInstance(0, (), ())).objective == 0


def test_child_without_gifts(caplog):
    inst = SantaInstance(2, (10,), ({0},), child_ids=("ann", "bob"))
    with caplog.at_level(logging.WARNING):
        sol = solve(inst, EPS)
    assert sol.objective == 0
    assert "bob" in caplog.text


def test_solve_at_nonpositive_target():
    sol = solve_at(SantaInstance(1, (3,), ({0},)), 0)
    assert sol.T == 0 and sol.assignment == (None,)


def test_greedy_topup_never_hurts():
    inst = SantaInstance(2, (10, 10, 1, 1), ({0}, {1}, {0, 1}, {0, 1}))
    plain = solve(inst, EPS)
    topped = solve(inst, EPS, greedy_topup=True)
    assert topped.objective >= plain.objective
    assert None not in topped.assignment
    assert evaluate_solution(inst, topped).valid


def test_evaluate_solution():
    inst = SantaInstance(2, (4, 6), ({0}, {0, 1}))
    assert evaluate_solution(inst, (None, None)).objective == 0
    rep = evaluate_solution(inst, (0, 1))
    assert rep.valid and rep.per_child == [4, 6] and rep.objective == 4
    bad = evaluate_solution(inst, (1, 1))
    assert not bad.valid and "ineligible" in bad.violations[0]
    assert not evaluate_solution(inst, (0,)).valid
    assert not evaluate_solution(inst, (0, 7)).valid
    sol = solve(inst, EPS)
    sol.objective += 1
    assert not evaluate_solution(inst, sol).valid


@pytest.mark.parametrize("mode", ["default", "adaptive"])
@pytest.mark.parametrize("search", ["solver", "lp"])
def test_random_solutions_meet_guarantee(mode, search):
    for seed in range(25):
        rng = random.Random(seed)
        inst = random_santa(rng, rng.randint(1, 4), rng.randint(1, 8), vmax=20)
        opt = brute_force_santa_opt(inst).opt
        sol = solve(inst, EPS, mode=mode, search=search)
        rep = evaluate_solution(inst, sol)
        assert rep.valid, rep.violations
        assert sol.objective >= F(1, 5) * opt


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["default", "adaptive"]))
def test_children_receive_their_share(seed, mode):
    rng = random.Random(seed)
    inst = random_santa(rng, rng.randint(1, 4), rng.randint(1, 8), vmax=20)
    sol = solve(inst, EPS, mode=mode)
    if sol.T == 0:
        return
    part = sol.partition
    small, large = set(part.small), set(part.large)
    beta = derive_params(reduce_to_allocation(inst, part, sol.T), EPS, delta=part.delta1).beta
    for i in range(inst.n_children):
        mine = [j for j, c in enumerate(sol.assignment) if c == i]
        if i in sol.small_children:
            assert sum(inst.values[j] for j in mine if j in small) >= beta * sol.T
        else:
            assert len([j for j in mine if j in large]) == 1
            assert all(part.capped[j] >= part.delta2 * sol.T for j in mine if j in large)


# -- relaxations -----------------------------------------------------------


def _z_from_assignment(inst, part, assignment):
    """Integral compact-LP point: one large gift for children that have one, small gifts otherwise."""
    large, small = set(part.large), set(part.small)
    z = {}
    for i in range(inst.n_children):
        mine = [j for j, c in enumerate(assignment) if c == i]
        big = [j for j in mine if j in large]
        for j in big[:1] or [j for j in mine if j in small]:
            z[i, j] = 1
    return z


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["default", "adaptive"]))
def test_optimal_assignment_is_lp_feasible(seed, mode):
    rng = random.Random(seed)
    inst = random_santa(rng, rng.randint(1, 4), rng.randint(1, 8), vmax=20)
    res = brute_force_santa_opt(inst)
    if res.opt == 0:
        return
    part = partition_gifts(inst, res.opt, mode)
    z = _z_from_assignment(inst, part, res.witness)
    variables, rows, senses, rhs = compact_lp_rows(inst, res.opt, partition=part)
    assert point_in(rows, senses, rhs, [F(z.get(v, 0)) for v in variables])
    assert lp_feasible_compact(inst, res.opt, partition=part)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_compact_point_lifts_into_q(seed):
    rng = random.Random(seed)
    inst = random_santa(rng, rng.randint(1, 4), rng.randint(1, 7), vmax=20)
    T = rng.randint(1, sum(inst.values) + 1)
    part = partition_gifts(inst, T)
    ok, z = lp_feasible_compact(inst, T, partition=part, witness=True)
    if not ok:
        return
    primal, dual = build_matroids(inst, part)
    alloc = reduce_to_allocation(inst, part, T)
    x = [sum(z.get((i, j), 0) for j in part.large) for i in range(inst.n_children)]
    lifted = lift_to_base_polytope(primal, x)
    assert all(a >= b for a, b in zip(lifted, x))
    x_star = [1 - v for v in lifted]
    y_star = {}
    for i in range(inst.n_children):
        for j in part.small:
            if (i, j) in z and z[i, j]:
                y_star[i, j] = z[i, j] * (1 - lifted[i]) / (1 - x[i])
    assert q_contains(dual, alloc, x_star, y_star, T)
