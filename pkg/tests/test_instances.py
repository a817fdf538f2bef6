from fractions import Fraction

import pytest

from gridroots.discretize import (
    check_delta_continuity,
    check_monotonicity,
    check_positive_switching,
    check_sum_switching,
    discretize,
)
from gridroots.domain import iter_grid_points
from gridroots.errors import InputError
from gridroots.instances import FAMILIES, make_cake_random, make_instance


SOLVABLE = ["separable", "random-monotone-2d", "random-exdiag-2d",
            "random-sum-2d", "staircase-2d", "recursive-3d"]


@pytest.mark.parametrize("family", SOLVABLE)
def test_families_satisfy_their_declared_structure(family):
    for seed in (0, 1, 5):
        prob = make_instance(family, seed=seed, n=16)
        assert check_delta_continuity(prob.sign, prob.grid).ok, (family, seed)
        if prob.profile is not None:
            assert check_monotonicity(prob.sign, prob.profile, prob.grid).ok, (family, seed)
        if prob.mode == "sum":
            assert check_sum_switching(prob.sign, prob.grid).ok, (family, seed)
        else:
            assert check_positive_switching(prob.sign, prob.grid).ok, (family, seed)


@pytest.mark.parametrize("family", ["random-monotone-2d", "random-exdiag-2d",
                                    "random-sum-2d", "recursive-3d"])
def test_linear_families_match_their_rational_facade(family):
    for seed in (0, 3):
        prob = make_instance(family, seed=seed, n=8)
        so = discretize(prob.real, prob.params, prob.grid)
        for p in iter_grid_points(prob.grid):
            assert tuple(so.evaluate(p)) == tuple(prob.sign.evaluate(p)), (family, seed, p)


def test_instances_are_seed_deterministic():
    for family in SOLVABLE:
        a = make_instance(family, seed=7, n=16)
        b = make_instance(family, seed=7, n=16)
        pts = list(iter_grid_points(a.grid))[:50]
        assert [a.sign.evaluate(p) for p in pts] == [b.sign.evaluate(p) for p in pts]


def test_make_instance_validates():
    with pytest.raises(InputError):
        make_instance("no-such-family", seed=0, n=8)
    with pytest.raises(InputError):
        make_instance("separable", seed=0, n=12)  # not a power of two


def test_cake_random_instances_are_valid():
    for seed in range(5):
        inst = make_cake_random(seed, n=6, r=Fraction(1, 64))
        assert sum(inst.groups) == 6
        assert all(k >= 1 for k in inst.groups)
        assert all(a.value(0, 1) > 0 for a in inst.agents)


def test_registry_lists_every_family():
    assert set(SOLVABLE) <= set(FAMILIES)
    assert "walk-1d" in FAMILIES and "dd-insufficient" in FAMILIES
