"""Root/fixed-point duality, symmetry transforms, and the two explicit
hardness constructions packaged as verified instance generators.

The constructions' internal claims (which monotonicity and switching
conditions hold, and that approximate roots of the built function
recover approximate roots of the seed function) are enforced at runtime
rather than trusted: a failure raises, because it would mean either an
implementation bug or a counterexample.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .discretize import CheckReport
from .domain import (
    DECREASING,
    INCREASING,
    BoxDomain,
    GridSpec,
    MonotoneProfile,
    RealOracle,
    SignOracle,
    as_fraction,
    sym_box,
)
from .errors import InputError, ReductionViolation


def dual(o: RealOracle) -> RealOracle:
    """x - f(x): exchanges roots with fixed points, involutive."""
    def fn(x):
        v = o.evaluate(x)
        return tuple(as_fraction(x[j]) - v[j] for j in range(o.dim))
    return RealOracle(fn, o.dim, label=f"dual({o.label})")


def flip_variable(o: RealOracle, j: int, box: BoxDomain) -> RealOracle:
    """Replace variable x_j by (a_j + b_j) - x_j; an exact involution."""
    if not 0 <= j < box.dim:
        raise InputError(f"axis {j} out of range")
    s = box.lower[j] + box.upper[j]

    def fn(x):
        y = tuple(s - as_fraction(x[k]) if k == j else x[k] for k in range(o.dim))
        return o.evaluate(y)

    return RealOracle(fn, o.dim, label=f"flip{j}({o.label})")


def negate_component(o: RealOracle, i: int) -> RealOracle:
    """Replace component f_i by -f_i; an exact involution."""
    if not 0 <= i < o.dim:
        raise InputError(f"component {i} out of range")

    def fn(x):
        v = o.evaluate(x)
        return tuple(-v[k] if k == i else v[k] for k in range(o.dim))

    return RealOracle(fn, o.dim, label=f"neg{i}({o.label})")


def flip_variable_sign(o: SignOracle, j: int, g: GridSpec) -> SignOracle:
    """Index-space variable flip for sign oracles: index_j -> N_j - index_j."""
    n = g.cells[j]

    def fn(p):
        q = tuple(n - p[k] if k == j else p[k] for k in range(o.dim))
        return o.evaluate(q)

    return SignOracle(fn, o.dim, label=f"flip{j}({o.label})")


def negate_component_sign(o: SignOracle, i: int) -> SignOracle:
    def fn(p):
        v = o.evaluate(p)
        return tuple(-v[k] if k == i else v[k] for k in range(o.dim))

    return SignOracle(fn, o.dim, label=f"neg{i}({o.label})")


def check_brouwer_to_miranda(
    o: RealOracle,
    box: BoxDomain,
    lipschitz=None,
    samples: int = 400,
    seed: int = 7,
) -> CheckReport:
    """For a self-map of the box, the dual must be positive-switching.

    Samples every face of the box densely and checks the sign of the
    dual's own component there; when a Lipschitz constant for the
    original map is supplied, spot-checks that the dual's constant is
    at most L + 1 (relative slack 1e-6).
    """
    d = box.dim
    dualo = dual(o)
    report = CheckReport("brouwer-to-miranda", "sampled")
    rng = random.Random(seed)

    def sample_face(i, upper):
        x = [box.lower[j] + Fraction(rng.randrange(0, 257), 256) * box.side(j) for j in range(d)]
        x[i] = box.upper[i] if upper else box.lower[i]
        return tuple(x)

    for i in range(d):
        for upper in (False, True):
            for _ in range(max(1, samples // (2 * d))):
                x = sample_face(i, upper)
                v = dualo.evaluate(x)[i]
                if (not upper and v > 0) or (upper and v < 0):
                    report.violations.append(
                        {"component": i, "face": "upper" if upper else "lower",
                         "point": [str(c) for c in x], "value": str(v)})

    if lipschitz is not None:
        bound = (as_fraction(lipschitz) + 1) * (1 + Fraction(1, 10**6))
        for _ in range(samples // 4 or 1):
            x = tuple(box.lower[j] + Fraction(rng.randrange(0, 257), 256) * box.side(j)
                      for j in range(d))
            j = rng.randrange(d)
            step = box.side(j) / 256
            y = list(x)
            y[j] = min(x[j] + step, box.upper[j])
            y = tuple(y)
            if y == x:
                continue
            vx, vy = dualo.evaluate(x), dualo.evaluate(y)
            diff = max(abs(as_fraction(vx[c]) - as_fraction(vy[c])) for c in range(d))
            if diff > bound * abs(y[j] - x[j]):
                report.violations.append(
                    {"kind": "lipschitz", "pair": [[str(c) for c in x], [str(c) for c in y]],
                     "slope": str(diff / abs(y[j] - x[j]))})
    report.details["samples"] = samples
    return report


def _trunc(v):
    """Truncation to [-1, 1]."""
    return min(1, max(-1, v))


@dataclass
class PlantedReduction:
    """A constructed oracle together with everything needed to audit it."""

    oracle: RealOracle
    inner: RealOracle
    box: BoxDomain
    profile: MonotoneProfile
    epsilon_factor: int  # an eps-root of oracle recovers a (factor*eps)-root of inner


def make_dd_insufficient_instance(g2: RealOracle, d: int = 3) -> PlantedReduction:
    """Lift a 2D positive-switching 1-Lipschitz seed on [-1,1]^2 to a
    d >= 3 dimensional instance that satisfies all diagonal conditions
    and all but two ex-diagonal conditions, yet inherits the seed's
    hardness.

    Components 0 and 2 add twice the gap between their own variable and
    a truncated linear form of the others to the seed's components;
    component 1 is the plain linear form; components beyond the third
    are identically zero.
    """
    if g2.dim != 2:
        raise InputError("seed oracle must be two-dimensional")
    if d < 3:
        raise InputError("construction needs d >= 3")

    def fn(x):
        x1, x2, x3 = (as_fraction(x[0]), as_fraction(x[1]), as_fraction(x[2]))
        gv = g2.evaluate((x1, x3))
        f1 = gv[0] + 2 * (x1 - _trunc(2 * x2 - x3))
        f2 = 2 * x2 - x1 - x3
        f3 = gv[1] + 2 * (x3 - _trunc(2 * x2 - x1))
        return (f1, f2, f3) + (Fraction(0),) * (d - 3)

    profile = MonotoneProfile.none(d).with_entries(
        {(0, 0): INCREASING, (1, 1): INCREASING, (2, 2): INCREASING,
         (0, 1): DECREASING, (2, 1): DECREASING,
         (1, 0): DECREASING, (1, 2): DECREASING}
    )
    if d > 3:
        # identically-zero extra components and unused extra variables are
        # weakly monotone everywhere; declare them increasing
        updates = {}
        for i in range(d):
            for j in range(d):
                if i >= 3 or j >= 3:
                    updates[(i, j)] = INCREASING
        profile = profile.with_entries(updates)

    oracle = RealOracle(fn, d, label=f"dd3({g2.label})")
    return PlantedReduction(oracle, g2, sym_box(d), profile, epsilon_factor=3)


def recover_2d_root(inst: PlantedReduction, x, epsilon) -> tuple:
    """Project an eps-root of the 3D construction to (x_1, x_3) and verify
    the seed's value there is within 3*eps."""
    epsilon = as_fraction(epsilon)
    v = inst.oracle.evaluate(x)
    if max(abs(as_fraction(c)) for c in v) > epsilon:
        raise InputError(f"{tuple(x)} is not an epsilon-root of the construction")
    point = (as_fraction(x[0]), as_fraction(x[2]))
    gv = inst.inner.evaluate(point)
    bound = inst.epsilon_factor * epsilon
    if max(abs(as_fraction(c)) for c in gv) > bound:
        raise ReductionViolation(
            "approximate-root recovery",
            "projected point is not a 3*eps root of the seed",
            point=[str(c) for c in point], epsilon=str(epsilon))
    return point


def make_switching_necessary_instance(g1: RealOracle) -> PlantedReduction:
    """Lift a 1D 1-Lipschitz seed with a root to a 2D instance that has an
    exact root and all four monotonicity conditions, but only the second
    component's switching condition."""
    if g1.dim != 1:
        raise InputError("seed oracle must be one-dimensional")

    def fn(x):
        x1, x2 = as_fraction(x[0]), as_fraction(x[1])
        gv = g1.evaluate((x1,))[0]
        return (gv + 2 * (x1 - x2), x2 - x1)

    profile = MonotoneProfile(
        ((INCREASING, DECREASING), (DECREASING, INCREASING)))
    oracle = RealOracle(fn, 2, label=f"sw2({g1.label})")
    return PlantedReduction(oracle, g1, sym_box(2), profile, epsilon_factor=3)


def recover_1d_root(inst: PlantedReduction, x, epsilon) -> Fraction:
    """Project an eps-root of the 2D construction to x_1 and verify the
    seed's value there is within 3*eps."""
    epsilon = as_fraction(epsilon)
    v = inst.oracle.evaluate(x)
    if max(abs(as_fraction(c)) for c in v) > epsilon:
        raise InputError(f"{tuple(x)} is not an epsilon-root of the construction")
    x1 = as_fraction(x[0])
    gv = as_fraction(inst.inner.evaluate((x1,))[0])
    if abs(gv) > inst.epsilon_factor * epsilon:
        raise ReductionViolation(
            "approximate-root recovery",
            "first coordinate is not a 3*eps root of the seed",
            point=str(x1), epsilon=str(epsilon))
    return x1
