import math
from fractions import Fraction

import pytest

from gridroots.domain import (
    GridSpec,
    SignOracle,
    enumerate_roots,
    iter_grid_points,
    sign_oracle_from_table,
    to_coords,
    unit_box,
)
from gridroots.errors import HypothesisViolation
from gridroots.instances import make_instance, make_separable
from gridroots.rootnd import (
    LatticeMap,
    check_lattice_claims,
    find_root_recursive,
    find_tarski_fixed_point,
    tarski_map,
)


def sgn(t):
    return -1 if t < 0 else (1 if t > 0 else 0)


def midpoint_oracle(n, d=3):
    half = n // 2
    return SignOracle(lambda p: tuple(sgn(p[j] - half) for j in range(d)), d)


def cube_grid(n, d=3):
    return GridSpec.regular(unit_box(d), Fraction(1, n))


def test_recursive_midpoint_instance():
    n = 8
    g = cube_grid(n)
    assert enumerate_roots(midpoint_oracle(n), g) == [(4, 4, 4)]
    assert find_root_recursive(midpoint_oracle(n), g) == (4, 4, 4)


def test_recursive_all_zero_any_dimension():
    for d in (1, 2, 3, 4):
        o = SignOracle(lambda p: (0,) * d, d)
        g = cube_grid(8, d)
        root = find_root_recursive(o, g)
        assert o.evaluate(root) == (0,) * d


def test_recursive_delegates_to_low_dimensional_bases():
    p1 = make_separable(3, 16, d=1)
    r1 = find_root_recursive(p1.sign, p1.grid)
    assert p1.sign.evaluate(r1) == (0,)
    p2 = make_separable(3, 16, d=2)
    r2 = find_root_recursive(p2.sign, p2.grid)
    assert p2.sign.evaluate(r2) == (0, 0)


def test_recursive_matches_brute_force_on_exdiag_suite():
    for seed in range(40):
        n = 2 ** (3 + seed % 3)
        prob = make_instance("recursive-3d", seed=seed, n=n)
        root = find_root_recursive(prob.sign, prob.grid)
        fresh = make_instance("recursive-3d", seed=seed, n=n)
        assert root in set(enumerate_roots(fresh.sign, fresh.grid)), (seed, n)


def test_recursive_pure_1d_base_flag():
    for seed in range(10):
        prob = make_instance("recursive-3d", seed=seed, n=16)
        root = find_root_recursive(prob.sign, prob.grid, use_2d_base=False)
        assert prob.sign.evaluate(root) == (0, 0, 0)


def test_recursive_debug_face_checks_pass_on_valid_instances():
    for seed in range(10):
        prob = make_instance("recursive-3d", seed=seed, n=16)
        root = find_root_recursive(prob.sign, prob.grid, debug_checks=True)
        assert prob.sign.evaluate(root) == (0, 0, 0)


def test_recursive_evaluation_bound():
    for seed in range(20):
        n = 2 ** (3 + seed % 3)
        prob = make_instance("recursive-3d", seed=seed, n=n)
        before = prob.sign.count
        find_root_recursive(prob.sign, prob.grid)
        evals = prob.sign.count - before
        assert evals <= 8 * (math.log2(n) + 2) ** 3, (seed, n, evals)


def test_recursive_evaluation_growth_is_at_most_cubic():
    # least-squares slope of log evals against log log N stays below 3.3
    xs, ys = [], []
    for k in range(4, 11):
        n = 2 ** k
        evals = 0
        for seed in range(3):
            prob = make_instance("recursive-3d", seed=seed, n=n)
            before = prob.sign.count
            find_root_recursive(prob.sign, prob.grid)
            evals += prob.sign.count - before
        xs.append(math.log(k))
        ys.append(math.log(evals / 3))
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sum(
        (x - xbar) ** 2 for x in xs)
    assert slope <= 3.3, slope


def test_recursive_on_degenerate_lifted_construction():
    # the planted 3D lift with a zero seed: every point of the middle
    # hyperplane family solves the analytic equations, and the solver's
    # output must be an epsilon-root of the real construction
    from gridroots.reductions import make_dd_insufficient_instance
    from gridroots.domain import RealOracle

    zero_seed = RealOracle(lambda x: (Fraction(0), Fraction(0)), 2)
    inst = make_dd_insufficient_instance(zero_seed)
    grid = cube_grid_sym(32)
    from gridroots.discretize import DiscretizationParams, discretize

    params = DiscretizationParams(Fraction(8) * grid.delta, Fraction(8), grid.delta)
    sign = discretize(inst.oracle, params, grid)
    root = find_root_recursive(sign, grid)
    x = to_coords(root, grid)
    v = inst.oracle.evaluate(x)
    assert max(abs(c) for c in v) <= params.epsilon


def cube_grid_sym(n, d=3):
    from gridroots.domain import sym_box

    return GridSpec.regular(sym_box(d), Fraction(2, n))


def test_recursive_raises_on_broken_switching():
    n = 8
    o = SignOracle(lambda p: (sgn(p[0] - 4), sgn(p[1] - 4), 1), 3)
    with pytest.raises(HypothesisViolation):
        find_root_recursive(o, cube_grid(n))


def test_tarski_map_arithmetic():
    n = 8
    g = cube_grid(n)
    zero = tarski_map(SignOracle(lambda p: (0, 0, 0), 3), g)
    assert zero.apply((3, 5, 7)) == (3, 5, 7)
    o = SignOracle(lambda p: (-1, 1, 0), 3)
    m = tarski_map(o, g)
    assert m.apply((3, 3, 3)) == (4, 2, 3)


def test_lattice_claims_hold_for_qualifying_instances():
    for seed in range(6):
        prob = make_instance("recursive-3d", seed=seed, n=8)
        rep = check_lattice_claims(tarski_map(prob.sign, prob.grid))
        assert rep.ok, (seed, rep.violations[:2])
    prob2 = make_separable(4, 16, d=2)
    assert check_lattice_claims(tarski_map(prob2.sign, prob2.grid)).ok
    const = SignOracle(lambda p: (0, 0), 2)
    assert check_lattice_claims(tarski_map(const, cube_grid(8, 2))).ok


def test_lattice_claims_catch_increasing_cross_dependence():
    # component 0 increases along axis 1: the map stops being
    # order-preserving on the offending pair
    table = {
        (0, 0): (-1, -1), (0, 1): (0, -1),
        (1, 0): (0, 0), (1, 1): (0, 0),
    }
    o = sign_oracle_from_table(table, 2)
    g = GridSpec.regular(unit_box(2), Fraction(1, 1))
    rep = check_lattice_claims(tarski_map(o, g))
    assert any(v["kind"] == "order" for v in rep.violations)


def test_fixed_points_are_exactly_roots():
    for seed in range(4):
        for d, n in ((2, 16), (3, 8)):
            prob = make_instance("recursive-3d", seed=seed, n=n) if d == 3 else \
                make_separable(seed, n, d=2)
            m = tarski_map(prob.sign, prob.grid)
            roots = set(enumerate_roots(prob.sign, prob.grid))
            fixed = {p for p in iter_grid_points(prob.grid) if m.apply(p) == p}
            assert roots == fixed


def test_find_tarski_fixed_point():
    n = 8
    g = cube_grid(n)
    ident = tarski_map(SignOracle(lambda p: (0, 0, 0), 3), g)
    p = find_tarski_fixed_point(ident)
    assert ident.apply(p) == p
    mid = tarski_map(midpoint_oracle(n), g)
    assert find_tarski_fixed_point(mid) == (4, 4, 4)
