"""Real-to-sign discretization and verifiers for the structural hypotheses.

A real vector function is collapsed to signs with a dead band of width
epsilon: any exact root of the sign oracle is an epsilon-root of the
real function.  The check_* routines verify switching, discrete
continuity, and declared monotonicity on concrete oracles, exhaustively
below a configurable point cap and by deterministic sampling above it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

from .domain import (
    DECREASING,
    DEFAULT_POINT_CAP,
    INCREASING,
    GridSpec,
    MonotoneProfile,
    RealOracle,
    SignOracle,
    as_fraction,
    is_power_of_two,
    iter_face_points,
    iter_grid_points,
    pow2_floor,
)
from .errors import InputError

DEFAULT_SAMPLE_BUDGET = 100_000
_SAMPLER_SEED = 0x5EED5


@dataclass(frozen=True)
class DiscretizationParams:
    """epsilon, a Lipschitz constant, and the grid spacing they induce."""

    epsilon: Fraction
    lipschitz: Fraction
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        object.__setattr__(self, "lipschitz", as_fraction(self.lipschitz))
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.epsilon <= 0 or self.lipschitz <= 0:
            raise InputError("epsilon and lipschitz must be positive")
        if self.delta > self.epsilon / self.lipschitz:
            raise InputError("delta must satisfy delta <= epsilon / lipschitz")
        if not is_power_of_two(self.delta):
            raise InputError("delta must be a power of two")

    @classmethod
    def derive(cls, box, epsilon, lipschitz) -> "DiscretizationParams":
        """Round epsilon/L down to a power of two dividing the box sides."""
        epsilon = as_fraction(epsilon)
        lipschitz = as_fraction(lipschitz)
        delta = pow2_floor(epsilon / lipschitz)
        min_side = min(box.side(j) for j in range(box.dim))
        if delta > min_side:
            delta = pow2_floor(min_side)
        return cls(epsilon, lipschitz, delta)


def sign_with_band(value, epsilon) -> int:
    """-1 below -epsilon, +1 above +epsilon, 0 inside (band inclusive)."""
    if value < -epsilon:
        return -1
    if value > epsilon:
        return 1
    return 0


def discretize(o: RealOracle, params: DiscretizationParams, g: GridSpec) -> SignOracle:
    """Sign oracle at grid resolution; one real evaluation per sign query."""
    if g.delta != params.delta:
        raise InputError("grid spacing disagrees with discretization delta")
    if g.dim != o.dim:
        raise InputError("oracle and grid dimension disagree")
    coords = [g.axis_coords(j) for j in range(g.dim)]
    eps = params.epsilon
    # when epsilon is itself a binary float, float-valued outputs can be
    # compared in float arithmetic without losing exactness
    eps_float = float(eps)
    float_ok = Fraction(eps_float) == eps

    def fn(p):
        x = tuple(coords[j][p[j]] for j in range(g.dim))
        out = []
        for v in o.evaluate(x):
            e = eps_float if float_ok and type(v) is float else eps
            out.append(-1 if v < -e else (1 if v > e else 0))
        return out

    return SignOracle(fn, g.dim, label=f"disc({o.label})")


@dataclass
class CheckReport:
    """Outcome of a structural check; serializes to the report JSON."""

    prop: str
    mode: str  # "exhaustive" | "sampled"
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "property": self.prop,
            "mode": self.mode,
            "ok": self.ok,
            "violations": [_plain(v) for v in self.violations],
            "details": _plain(self.details),
        }


def _plain(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _half_neighborhood(d: int):
    """Max-norm offsets covering each unordered adjacent pair once."""
    return [off for off in product((-1, 0, 1), repeat=d) if off > (0,) * d]


def check_delta_continuity(
    o: SignOracle,
    g: GridSpec,
    cap: int = DEFAULT_POINT_CAP,
    samples: int = DEFAULT_SAMPLE_BUDGET,
) -> CheckReport:
    """No component may differ by more than 1 across max-norm-adjacent points."""
    offsets = _half_neighborhood(g.dim)
    exhaustive = g.npoints <= cap
    report = CheckReport("delta-continuity", "exhaustive" if exhaustive else "sampled")

    def check_pair(p, q):
        vp, vq = o.evaluate(p), o.evaluate(q)
        for c in range(o.dim):
            if abs(vp[c] - vq[c]) > 1:
                report.violations.append(
                    {"pair": [list(p), list(q)], "component": c, "signs": [vp[c], vq[c]]})

    if exhaustive:
        for p in iter_grid_points(g):
            for off in offsets:
                q = tuple(p[j] + off[j] for j in range(g.dim))
                if g.point_valid(q):
                    check_pair(p, q)
    else:
        rng = random.Random(_SAMPLER_SEED)
        n = 0
        while n < samples:
            p = tuple(rng.randint(0, g.cells[j]) for j in range(g.dim))
            off = offsets[rng.randrange(len(offsets))]
            q = tuple(p[j] + off[j] for j in range(g.dim))
            if g.point_valid(q):
                check_pair(p, q)
                n += 1
        report.details["samples"] = samples
    return report


def _face_count(g: GridSpec, axis: int) -> int:
    total = 1
    for j, n in enumerate(g.cells):
        if j != axis:
            total *= n + 1
    return total


def check_positive_switching(
    o: SignOracle,
    g: GridSpec,
    strict: bool = False,
    cap: int = DEFAULT_POINT_CAP,
    samples: int = DEFAULT_SAMPLE_BUDGET,
) -> CheckReport:
    """Component i must be <= 0 on face x_i = a_i and >= 0 on x_i = b_i.

    ``strict=True`` demands strict inequalities (the padded form some
    solvers need).
    """
    name = "strict-positive-switching" if strict else "positive-switching"
    exhaustive = all(_face_count(g, i) <= cap for i in range(g.dim))
    report = CheckReport(name, "exhaustive" if exhaustive else "sampled")
    rng = random.Random(_SAMPLER_SEED + 1)

    for i in range(g.dim):
        for upper in (False, True):
            if exhaustive:
                points = iter_face_points(g, i, upper)
            else:
                pin = g.cells[i] if upper else 0
                points = (
                    tuple(rng.randint(0, g.cells[j]) if j != i else pin for j in range(g.dim))
                    for _ in range(max(1, samples // (2 * g.dim)))
                )
            for p in points:
                s = o.evaluate(p)[i]
                bad = (s > 0 or (strict and s == 0)) if not upper else (s < 0 or (strict and s == 0))
                if bad:
                    report.violations.append(
                        {"component": i, "face": "upper" if upper else "lower",
                         "point": list(p), "sign": s})
    if not exhaustive:
        report.details["samples_per_face"] = max(1, samples // (2 * g.dim))
    return report


def check_sum_switching(
    o: SignOracle,
    g: GridSpec,
    cap: int = DEFAULT_POINT_CAP,
    samples: int = DEFAULT_SAMPLE_BUDGET,
) -> CheckReport:
    """Lower faces as in positive switching; on x_i = b_i the prefix sum
    of sign components up to i must be >= 0."""
    exhaustive = all(_face_count(g, i) <= cap for i in range(g.dim))
    report = CheckReport("sum-switching", "exhaustive" if exhaustive else "sampled")
    rng = random.Random(_SAMPLER_SEED + 2)

    for i in range(g.dim):
        for upper in (False, True):
            if exhaustive:
                points = iter_face_points(g, i, upper)
            else:
                pin = g.cells[i] if upper else 0
                points = (
                    tuple(rng.randint(0, g.cells[j]) if j != i else pin for j in range(g.dim))
                    for _ in range(max(1, samples // (2 * g.dim)))
                )
            for p in points:
                v = o.evaluate(p)
                if not upper:
                    if v[i] > 0:
                        report.violations.append(
                            {"component": i, "face": "lower", "point": list(p), "sign": v[i]})
                else:
                    prefix = sum(v[: i + 1])
                    if prefix < 0:
                        report.violations.append(
                            {"component": i, "face": "upper", "point": list(p),
                             "prefix_sum": prefix})
    if not exhaustive:
        report.details["samples_per_face"] = max(1, samples // (2 * g.dim))
    return report


def check_monotonicity(
    o: SignOracle,
    profile: MonotoneProfile,
    g: GridSpec,
    cap: int = DEFAULT_POINT_CAP,
    samples: int = DEFAULT_SAMPLE_BUDGET,
) -> CheckReport:
    """Weak monotonicity of component i along every grid line in direction j,
    for each condition the profile declares."""
    if profile.dim != g.dim:
        raise InputError("profile and grid dimension disagree")
    exhaustive = g.npoints <= cap
    report = CheckReport("monotone-profile", "exhaustive" if exhaustive else "sampled")
    declared = profile.declared()
    report.details["declared"] = [[i, j, kind] for i, j, kind in declared]
    rng = random.Random(_SAMPLER_SEED + 3)

    for i, j, kind in declared:
        want = 1 if kind == INCREASING else -1
        if exhaustive:
            bases = product(*(range(n + 1) if a != j else (0,) for a, n in enumerate(g.cells)))
        else:
            lines = max(1, samples // max(1, (g.cells[j] + 1)) // max(1, len(declared)))
            bases = (
                tuple(rng.randint(0, g.cells[a]) if a != j else 0 for a in range(g.dim))
                for _ in range(lines)
            )
        for base in bases:
            prev = None
            for t in range(g.cells[j] + 1):
                p = base[:j] + (t,) + base[j + 1:]
                s = o.evaluate(p)[i]
                if prev is not None and (s - prev) * want < 0:
                    report.violations.append(
                        {"component": i, "variable": j, "kind": kind,
                         "line_base": list(base), "index": t, "signs": [prev, s]})
                    break
                prev = s
    if not exhaustive:
        report.details["sampled_lines_per_condition"] = True
    return report


def pad_strict(o: SignOracle, g: GridSpec):
    """Extend the grid by one delta layer per face to force strict switching.

    On the new face x_i = a_i - delta, component i is -1; on
    x_i = b_i + delta it is +1.  Components not forced on a padding
    point copy the value at the nearest original grid point, which
    preserves discrete continuity and every declared monotonicity
    condition.  Requires the input to be (weakly) positive-switching.
    """
    d = g.dim
    cells = tuple(n + 2 for n in g.cells)
    box = type(g.box)(
        tuple(a - g.delta for a in g.box.lower),
        tuple(b + g.delta for b in g.box.upper),
    )
    padded_grid = GridSpec.relaxed(box, g.delta, cells)

    def fn(p):
        forced = {}
        inner = []
        for j in range(d):
            i = p[j] - 1
            if i < 0:
                forced[j] = -1
                inner.append(0)
            elif i > g.cells[j]:
                forced[j] = 1
                inner.append(g.cells[j])
            else:
                inner.append(i)
        if len(forced) == d:
            return tuple(forced[j] for j in range(d))
        base = o.evaluate(tuple(inner))
        return tuple(forced.get(j, base[j]) for j in range(d))

    return SignOracle(fn, d, label=f"pad({o.label})"), padded_grid
