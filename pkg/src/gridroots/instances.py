"""Seeded random instance families.

Every family is fully determined by (seed, grid size); sign values are
computed in exact integer index arithmetic so instances are cheap to
evaluate and identical across platforms.  Linear families also carry an
exact rational real-oracle facade plus the discretization parameters
that reproduce the same signs, which the tests use to cross-check the
discretization path.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cake import CakeInstance, piecewise_constant_agent
from .discretize import DiscretizationParams, discretize
from .domain import (
    DECREASING,
    INCREASING,
    GridSpec,
    MonotoneProfile,
    RealOracle,
    SignOracle,
    sym_box,
    unit_box,
)
from .errors import InputError
from .reductions import make_dd_insufficient_instance, make_switching_necessary_instance

_CENTER_SCALE = 16  # centers live on a sixteenth lattice so index math stays integral


@dataclass
class Problem:
    """A ready-to-solve instance: sign oracle, grid, and metadata."""

    family: str
    seed: int
    d: int
    mode: str  # bisect | diag | exdiag | sum | recursive
    sign: SignOracle
    grid: GridSpec
    profile: MonotoneProfile | None = None
    real: RealOracle | None = None
    params: DiscretizationParams | None = None
    extra: dict = field(default_factory=dict)


def _require_pow2(n):
    if n < 1 or n & (n - 1):
        raise InputError(f"grid size {n} must be a power of two")


def _sign3(t):
    return -1 if t < 0 else (1 if t > 0 else 0)


def make_walk_1d(seed: int, n: int) -> Problem:
    """A sign random walk from a non-positive start to a non-negative end;
    steps never exceed 1, so the walk is discretely continuous and
    switching, and a zero is guaranteed."""
    _require_pow2(n)
    rng = random.Random(seed)
    v = rng.choice((-1, 0))
    values = [v]
    for s in rng.choices((-1, 0, 1), k=n):
        v += s
        if v > 1:
            v = 1
        elif v < -1:
            v = -1
        values.append(v)
    values[-1] = max(values[-1], 0)
    grid = GridSpec.regular(unit_box(1), Fraction(1, n))
    sign = SignOracle(lambda p: (values[p[0]],), 1, label="walk-1d")
    return Problem("walk-1d", seed, 1, "bisect", sign, grid, extra={"values": values})


def make_separable(seed: int, n: int, d: int = 2) -> Problem:
    """Component i depends only on index i: -1/0/+1 around a planted level."""
    _require_pow2(n)
    rng = random.Random(seed)
    gamma = [rng.randint(0, n) for _ in range(d)]
    sign = SignOracle(lambda p: tuple(_sign3(p[j] - gamma[j]) for j in range(d)),
                      d, label="separable")
    grid = GridSpec.regular(unit_box(d), Fraction(1, n))
    profile = MonotoneProfile.diagonal_increasing(d).with_entries(
        {(i, j): DECREASING for i in range(d) for j in range(d) if i != j})
    mode = "bisect" if d == 1 else ("diag" if d == 2 else "recursive")
    return Problem("separable", seed, d, mode, sign, grid, profile=profile,
                   extra={"levels": gamma})


def _linear_problem(family, seed, n, d, mode, matrix, centers16, profile, switching="positive"):
    """Shared assembly for planted linear forms f = A (x - c) on [0,1]^d.

    Signs use the exact band |f_i| <= L*delta with L the largest row sum
    of |A|, which both guarantees discrete continuity and matches the
    rational discretization facade bit for bit.
    """
    lip = max(sum(abs(a) for a in row) for row in matrix)
    scale = _CENTER_SCALE
    threshold = scale * lip  # |F_i| <= scale*N*(L*delta) with delta = 1/N

    def fn(p):
        out = []
        for row in matrix:
            acc = 0
            for j in range(d):
                acc += row[j] * (scale * p[j] - centers16[j] * n)
            out.append(-1 if acc < -threshold else (1 if acc > threshold else 0))
        return tuple(out)

    # weak switching must hold exactly on the real form; linearity means
    # checking the face corners suffices
    from itertools import product as _product
    for i in range(d):
        for pin, upper in ((0, False), (n, True)):
            for corner in _product((0, n), repeat=d - 1):
                p = corner[:i] + (pin,) + corner[i:]

                def row_val(r):
                    return sum(matrix[r][j] * (scale * p[j] - centers16[j] * n)
                               for j in range(d))

                if not upper:
                    bad = row_val(i) > 0
                elif switching == "positive":
                    bad = row_val(i) < 0
                else:
                    bad = sum(row_val(r) for r in range(i + 1)) < 0
                if bad:
                    raise InputError(f"{family} seed {seed}: planted form is not switching")

    cfr = [Fraction(c, scale) for c in centers16]
    real = RealOracle(
        lambda x: tuple(sum(row[j] * (Fraction(x[j]) - cfr[j]) for j in range(d))
                        for row in matrix),
        d, label=family)
    delta = Fraction(1, n)
    params = DiscretizationParams(lip * delta, Fraction(lip), delta)
    grid = GridSpec.regular(unit_box(d), delta)
    sign = SignOracle(fn, d, label=family)
    return Problem(family, seed, d, mode, sign, grid, profile=profile, real=real,
                   params=params, extra={"matrix": matrix, "centers16": centers16})


def make_random_monotone_2d(seed: int, n: int) -> Problem:
    """Rotated linear forms with a dominant first diagonal entry; the
    diagonal-condition solver's reference family."""
    _require_pow2(n)
    rng = random.Random(seed)
    s = 16
    matrix = [
        [rng.randint(s, 2 * s), rng.randint(-s // 4, s // 4)],
        [rng.randint(-s // 4, s // 4), rng.randint(s, 2 * s)],
    ]
    centers16 = [rng.randint(4, 12), rng.randint(4, 12)]
    profile = MonotoneProfile.none(2).with_entries({(0, 0): INCREASING, (1, 1): INCREASING})
    return _linear_problem("random-monotone-2d", seed, n, 2, "diag",
                           matrix, centers16, profile)


def make_random_exdiag_2d(seed: int, n: int) -> Problem:
    """Linear forms with component 0 weakly decreasing along axis 1."""
    _require_pow2(n)
    rng = random.Random(seed)
    s = 16
    matrix = [
        [rng.randint(s, 2 * s), rng.randint(-s // 4, 0)],
        [rng.randint(-s // 4, s // 4), rng.randint(s, 2 * s)],
    ]
    centers16 = [rng.randint(4, 12), rng.randint(4, 12)]
    profile = MonotoneProfile.none(2).with_entries({(0, 1): DECREASING})
    return _linear_problem("random-exdiag-2d", seed, n, 2, "exdiag",
                           matrix, centers16, profile)


def make_random_sum_2d(seed: int, n: int) -> Problem:
    """Prefix-sum switching linear forms; component 1 may carry a large
    negative multiple of (x_0 - c_0), so its own upper-face switching can
    fail while the prefix sum stays non-negative."""
    _require_pow2(n)
    rng = random.Random(seed)
    s = 16
    for _ in range(1000):
        a11 = rng.randint(2 * s, 3 * s)
        if rng.random() < 0.5:
            # aggressive flavor: the largest feasible cross term and a high
            # second center push component 1 negative on its own upper face
            # while the prefix sum stays non-negative
            a00, b = s, a11 // 4
            centers16 = [4, 15]
        else:
            a00 = rng.randint(s, a11 // 2)
            b_lo, b_hi = max(0, a00 - a11 // 4), a11 // 4
            if b_lo > b_hi:
                continue
            b = rng.randint(b_lo, b_hi)
            centers16 = [rng.randint(4, 12), rng.randint(4, 12)]
        matrix = [[a00, 0], [-b, a11]]
        if _sum_switching_corners_ok(matrix, centers16, n):
            break
    else:
        raise InputError(f"random-sum-2d seed {seed}: no valid draw found")
    profile = MonotoneProfile.none(2).with_entries(
        {(0, 0): INCREASING, (1, 1): INCREASING, (1, 0): DECREASING})
    return _linear_problem("random-sum-2d", seed, n, 2, "sum", matrix, centers16, profile,
                           switching="sum")


def _sum_switching_corners_ok(matrix, centers16, n):
    from itertools import product as _product
    scale = _CENTER_SCALE
    d = 2

    def val(i, p):
        return sum(matrix[i][j] * (scale * p[j] - centers16[j] * n) for j in range(d))

    for i in range(d):
        for corner in _product((0, n), repeat=d - 1):
            lo = corner[:i] + (0,) + corner[i:]
            if val(i, lo) > 0:
                return False
            hi = corner[:i] + (n,) + corner[i:]
            if sum(val(k, hi) for k in range(i + 1)) < 0:
                return False
    return True


def make_staircase_2d(seed: int, n: int, monotone_rows: bool = False) -> Problem:
    """Component 0's zero set is a staircase band (its sign still increases
    along each row); component 1 switches across a wandering two-cell band.

    Most seeds plant an abrupt band relocation: the per-row root that the
    inner bisection selects then moves a long way between two adjacent
    rows, the outer sign jumps -1/+1 without touching zero, and the
    zipper walk is forced.  Remaining seeds use a gentle random walk.
    Discrete continuity needs only that consecutive bands overlap within
    one cell; the edges themselves may jump.

    ``monotone_rows=True`` restricts bands to drift rightward, which
    additionally makes component 0 weakly decreasing along axis 1 (the
    ex-diagonal hypothesis).
    """
    _require_pow2(n)
    if n < 8:
        raise InputError("staircase needs n >= 8")
    rng = random.Random(seed)
    if rng.random() < 0.6 and n >= 16:
        pivot = rng.randint(3, n - 3)
        lo_l = rng.randint(1, max(1, n // 4))
        if monotone_rows:
            # band jumps rightward at the pivot row; consecutive bands must
            # still share a column or the zero path disconnects
            l1, r1 = lo_l, rng.randint(lo_l, n // 3)
            l2 = rng.randint(l1, r1)
            r2 = rng.randint(max(l2 + 1, 2 * n // 3), n - 1)
            near, far = r1, r2  # selected roots below/above the pivot
        else:
            # wide high band collapses to a narrow low band at the pivot
            l1, r1 = lo_l, rng.randint(2 * n // 3, n - 1)
            l2, r2 = lo_l, rng.randint(lo_l, n // 3)
            near, far = r1, r2
        left = [l1 if j < pivot else l2 for j in range(n + 1)]
        right = [r1 if j < pivot else r2 for j in range(n + 1)]
        # component 1's band ramps so its sign at the selected roots is
        # -1 just below the pivot and +1 just above it
        span = abs(far - near)
        band = []
        for i in range(n + 1):
            t = min(max((i - min(near, far)), 0), span)
            frac = t if near > far else span - t
            level = pivot - 2 + (2 * frac) // max(1, span)
            band.append(min(max(level, 1), n - 2))
    else:
        left = [rng.randint(1, n // 2)]
        width = 1 + rng.randint(0, 2)
        right = [min(left[0] + width, n - 1)]
        steps = (0, 1) if monotone_rows else (-1, 0, 1)
        for _ in range(n):
            l_next = min(max(left[-1] + rng.choice(steps), 1), n - 2)
            r_next = max(min(right[-1] + rng.choice(steps), n - 1), l_next + 1)
            left.append(l_next)
            right.append(r_next)
        band = [max(1, min(n - 2, rng.randint(1, n - 2)))]
        for _ in range(n):
            band.append(min(max(band[-1] + rng.choice((-1, 0, 1)), 1), n - 2))

    def fn(p):
        i, j = p
        f1 = -1 if i < left[j] else (0 if i <= right[j] else 1)
        f2 = -1 if j < band[i] else (0 if j <= band[i] + 1 else 1)
        return (f1, f2)

    entries = {(0, 0): INCREASING}
    if monotone_rows:
        entries[(0, 1)] = DECREASING
    profile = MonotoneProfile.none(2).with_entries(entries)
    grid = GridSpec.regular(unit_box(2), Fraction(1, n))
    sign = SignOracle(fn, 2, label="staircase-2d")
    return Problem("staircase-2d", seed, 2, "exdiag" if monotone_rows else "diag",
                   sign, grid, profile=profile,
                   extra={"left": left, "right": right, "band": band})


def make_recursive_3d(seed: int, n: int) -> Problem:
    """Linear forms with all six ex-diagonal entries non-positive; the
    recursive d-dimensional solver's reference family."""
    _require_pow2(n)
    rng = random.Random(seed)
    s = 32
    matrix = [
        [rng.randint(s, 2 * s) if i == j else rng.randint(-s // 8, 0) for j in range(3)]
        for i in range(3)
    ]
    centers16 = [rng.randint(4, 12) for _ in range(3)]
    profile = MonotoneProfile.ex_diagonal_decreasing(3)
    return _linear_problem("recursive-3d", seed, n, 3, "recursive",
                           matrix, centers16, profile)


def make_cake_random(seed: int, n: int = 3, r=Fraction(1, 1024)) -> CakeInstance:
    """Seeded piecewise-constant agents and a random composition of n
    into three positive group sizes."""
    rng = random.Random(seed)
    agents = []
    for idx in range(n):
        nseg = rng.randint(1, 4)
        cuts = sorted(rng.sample(range(1, 64), nseg - 1)) if nseg > 1 else []
        breaks = [Fraction(0)] + [Fraction(c, 64) for c in cuts] + [Fraction(1)]
        densities = [rng.randint(0, 8) for _ in range(nseg)]
        if not any(densities):
            densities[rng.randrange(nseg)] = rng.randint(1, 8)
        agents.append(piecewise_constant_agent(breaks, densities, label=f"agent{idx}"))
    if n < 3:
        raise InputError("cake instances need n >= 3")
    k1 = rng.randint(1, n - 2)
    k2 = rng.randint(1, n - 1 - k1)
    groups = (k1, k2, n - k1 - k2)
    return CakeInstance(agents, groups, r)


def make_dd_planted(seed: int, n: int) -> Problem:
    """The 3D lift of a planted linear 2D seed, discretized on [-1,1]^3.

    Satisfies all three diagonal conditions and four of six ex-diagonal
    conditions; the two missing pairs genuinely fail for these seeds.
    """
    _require_pow2(n)
    inst = make_dd_insufficient_instance(planted_seed_2d(seed))
    delta = Fraction(2, n)
    grid = GridSpec.regular(sym_box(3), delta)
    lip = Fraction(9)  # max-norm slope bound of the lift with a 1-Lipschitz seed
    params = DiscretizationParams(lip * delta, lip, delta)
    sign = discretize(inst.oracle, params, grid)
    return Problem("dd-insufficient", seed, 3, "recursive", sign, grid,
                   profile=inst.profile, real=inst.oracle, params=params,
                   extra={"reduction": inst})


def make_dd_canonical(n: int) -> Problem:
    """The 3D lift of the antisymmetric seed g = ((x1-x3)/2, (x3-x1)/2).

    This seed's cross slopes are strictly negative, so the two
    undeclared monotonicity pairs of the lift genuinely fail in both
    directions at this resolution while the declared seven hold.  All
    quantities are dyadic, so float evaluation is exact.
    """
    _require_pow2(n)

    def fn(x):
        x1, x2, x3 = float(x[0]), float(x[1]), float(x[2])
        g1, g2 = (x1 - x3) / 2, (x3 - x1) / 2
        t = min(1.0, max(-1.0, 2 * x2 - x3))
        u = min(1.0, max(-1.0, 2 * x2 - x1))
        return (g1 + 2 * (x1 - t), 2 * x2 - x1 - x3, g2 + 2 * (x3 - u))

    oracle = RealOracle(fn, 3, label="dd-canonical")
    delta = Fraction(2, n)
    lip = Fraction(9)
    params = DiscretizationParams(lip * delta, lip, delta)
    grid = GridSpec.regular(sym_box(3), delta)
    sign = discretize(oracle, params, grid)
    profile = MonotoneProfile.none(3).with_entries(
        {(0, 0): INCREASING, (1, 1): INCREASING, (2, 2): INCREASING,
         (0, 1): DECREASING, (2, 1): DECREASING,
         (1, 0): DECREASING, (1, 2): DECREASING})
    return Problem("dd-insufficient", 0, 3, "recursive", sign, grid,
                   profile=profile, real=oracle, params=params)


def planted_seed_2d(seed: int) -> RealOracle:
    """1-Lipschitz positive-switching seeds on [-1,1]^2 with a planted
    root; dyadic coefficients keep evaluation exact."""
    rng = random.Random(seed)
    root = (Fraction(rng.randint(-4, 4), 16), Fraction(rng.randint(-4, 4), 16))
    alphas = (Fraction(rng.randint(11, 14), 16), Fraction(rng.randint(11, 14), 16))
    betas = (Fraction(rng.randint(-2, 2), 16), Fraction(rng.randint(-2, 2), 16))

    def fn(x):
        x1, x3 = Fraction(x[0]), Fraction(x[1])
        return (
            alphas[0] * (x1 - root[0]) + betas[0] * (x3 - root[1]),
            alphas[1] * (x3 - root[1]) + betas[1] * (x1 - root[0]),
        )

    o = RealOracle(fn, 2, label="seed2d")
    o.planted_root = root
    return o


def make_switching_necessary(seed: int, n: int) -> Problem:
    """The 2D lift of g(t) = 1/2 - t: all four monotonicity conditions,
    an exact root at (1/2, 1/2), and only the second switching condition."""
    _require_pow2(n)
    g1 = RealOracle(lambda x: (Fraction(1, 2) - Fraction(x[0]),), 1, label="line")
    inst = make_switching_necessary_instance(g1)
    delta = Fraction(2, n)
    lip = Fraction(5)  # max-norm slope bound of the lift with a 1-Lipschitz seed
    params = DiscretizationParams(lip * delta, lip, delta)
    grid = GridSpec.regular(sym_box(2), delta)
    sign = discretize(inst.oracle, params, grid)
    return Problem("switching-necessary", seed, 2, "diag", sign, grid,
                   profile=inst.profile, real=inst.oracle, params=params,
                   extra={"reduction": inst})


# family -> (builder, dimension or None for a --dim parameter, box side)
FAMILIES = {
    "walk-1d": (make_walk_1d, 1, 1),
    "separable": (make_separable, None, 1),
    "random-monotone-2d": (make_random_monotone_2d, 2, 1),
    "random-exdiag-2d": (make_random_exdiag_2d, 2, 1),
    "random-sum-2d": (make_random_sum_2d, 2, 1),
    "staircase-2d": (make_staircase_2d, 2, 1),
    "recursive-3d": (make_recursive_3d, 3, 1),
    "dd-insufficient": (make_dd_planted, 3, 2),
    "switching-necessary": (make_switching_necessary, 2, 2),
}


def make_instance(family: str, seed: int, n: int, **kwargs) -> Problem:
    try:
        builder, _, _ = FAMILIES[family]
    except KeyError:
        raise InputError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    return builder(seed, n, **kwargs)


def cells_for_delta(family: str, delta) -> int:
    """Grid size so that the family's box side divides into delta cells."""
    try:
        _, _, side = FAMILIES[family]
    except KeyError:
        raise InputError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    n = Fraction(side) / Fraction(delta)
    if n.denominator != 1 or n < 1:
        raise InputError(f"delta {delta} does not divide the side of {family}")
    return int(n)
