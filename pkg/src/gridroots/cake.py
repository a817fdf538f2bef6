"""Near envy-free division of [0,1] among three groups of agents.

A point x in the unit square encodes a partition of the cake into three
intervals (cut i sits at the running maximum of the first i
coordinates).  Counting which piece each agent prefers gives an integer
vector field on the r-grid; extending it affinely over the standard
simplicial subdivision of each grid cell and subtracting the target
group sizes yields a vector function that is prefix-sum switching,
alternating-monotone and (n/r)-Lipschitz.  Any 1/8-root of it admits an
assignment of agents to pieces (via Hall's theorem on the corners of
the containing simplex) that is envy-free after moving each cut by at
most r.

All cake arithmetic is exact: valuations of the built-in agent kinds
are rational, grid coordinates and barycentric weights dyadic.
"""
from __future__ import annotations

import bisect as _stdbisect
from dataclasses import dataclass, field
from fractions import Fraction

from .discretize import DiscretizationParams, discretize
from .domain import (
    GridPoint,
    GridSpec,
    RealOracle,
    as_fraction,
    ceil_log2,
    format_pow2,
    is_power_of_two,
    pow2_floor,
    to_coords,
    unit_box,
)
from .errors import InputError, ReductionViolation
from .root2d import Root2DTrace, find_root_sum


class CakeAgent:
    """Counted valuation oracle v(a, b) over subintervals of [0, 1].

    Assumed monotone with v(a, a) == 0; the built-in constructors below
    guarantee both.
    """

    def __init__(self, value_fn, label: str = "agent"):
        self._fn = value_fn
        self.label = label
        self.queries = 0

    def value(self, a, b):
        a, b = as_fraction(a), as_fraction(b)
        if not 0 <= a <= b <= 1:
            raise InputError(f"bad piece [{a}, {b}]")
        self.queries += 1
        return self._fn(a, b)


def piecewise_constant_agent(breakpoints, densities, label="pc") -> CakeAgent:
    """Exact rational valuation with constant density per segment."""
    ts = [as_fraction(t) for t in breakpoints]
    ds = [as_fraction(v) for v in densities]
    _validate_breaks(ts, len(ds))
    if any(v < 0 for v in ds):
        raise InputError("densities must be non-negative")
    prefix = [Fraction(0)]
    for k, dval in enumerate(ds):
        prefix.append(prefix[-1] + dval * (ts[k + 1] - ts[k]))

    def cum(x):
        k = min(_stdbisect.bisect_right(ts, x) - 1, len(ds) - 1)
        return prefix[k] + ds[k] * (x - ts[k])

    return CakeAgent(lambda a, b: cum(b) - cum(a), label)


def piecewise_linear_agent(breakpoints, values, label="pl") -> CakeAgent:
    """Exact rational valuation whose density interpolates the given
    non-negative values linearly between breakpoints."""
    ts = [as_fraction(t) for t in breakpoints]
    vs = [as_fraction(v) for v in values]
    _validate_breaks(ts, len(vs) - 1)
    if any(v < 0 for v in vs):
        raise InputError("density values must be non-negative")
    prefix = [Fraction(0)]
    for k in range(len(ts) - 1):
        w = ts[k + 1] - ts[k]
        prefix.append(prefix[-1] + (vs[k] + vs[k + 1]) * w / 2)

    def cum(x):
        k = min(_stdbisect.bisect_right(ts, x) - 1, len(ts) - 2)
        w = ts[k + 1] - ts[k]
        u = x - ts[k]
        slope = (vs[k + 1] - vs[k]) / w
        return prefix[k] + vs[k] * u + slope * u * u / 2

    return CakeAgent(lambda a, b: cum(b) - cum(a), label)


def uniform_agent(label="uniform") -> CakeAgent:
    return piecewise_constant_agent((0, 1), (1,), label)


def _validate_breaks(ts, nsegments):
    if len(ts) != nsegments + 1:
        raise InputError("need one more breakpoint than segments")
    if ts[0] != 0 or ts[-1] != 1:
        raise InputError("breakpoints must start at 0 and end at 1")
    if any(ts[k] >= ts[k + 1] for k in range(len(ts) - 1)):
        raise InputError("breakpoints must be strictly increasing")


@dataclass
class CakeInstance:
    """n agents, target group sizes, and the nearness parameter r."""

    agents: list
    groups: tuple
    r: Fraction

    def __post_init__(self):
        self.groups = tuple(int(k) for k in self.groups)
        r = as_fraction(self.r)
        if not 0 < r < 1:
            raise InputError("r must lie strictly between 0 and 1")
        if not is_power_of_two(r):
            r = pow2_floor(r)  # explicit normalization to a dyadic grid
        self.r = r
        if any(k < 1 for k in self.groups):
            raise InputError("every group size must be at least 1")
        if sum(self.groups) != len(self.agents):
            raise InputError("group sizes must sum to the number of agents")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def total_queries(self) -> int:
        return sum(a.queries for a in self.agents)


def partition_from_point(x) -> list:
    """Pieces induced by x: cut i at the running maximum of x_1..x_i."""
    xs = [as_fraction(v) for v in x]
    cuts = []
    run = Fraction(0)
    for v in xs:
        run = max(run, v)
        cuts.append(run)
    edges = [Fraction(0)] + cuts + [Fraction(1)]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def preferred_piece(agent: CakeAgent, pieces) -> int:
    """Lowest-index non-empty piece of maximum value; m valuation queries."""
    values = [agent.value(lo, hi) for lo, hi in pieces]
    best = None
    best_value = None
    for idx, ((lo, hi), v) in enumerate(zip(pieces, values)):
        if lo == hi:
            continue
        if best is None or v > best_value:
            best, best_value = idx, v
    if best is None:
        raise InputError("all pieces empty; the cuts do not cover the cake")
    return best


def preferences_at(x, instance: CakeInstance) -> tuple:
    """Preferred piece of every agent at the partition encoded by x."""
    pieces = partition_from_point(x)
    return tuple(preferred_piece(a, pieces) for a in instance.agents)


def g_on_grid(x, instance: CakeInstance) -> tuple:
    """Number of agents preferring each piece; x must sit on the r-grid."""
    r = instance.r
    for v in x:
        if (as_fraction(v) / r).denominator != 1:
            raise InputError(f"{tuple(x)} is not on the r-grid")
    return _tally(preferences_at(x, instance), instance.m)


def _tally(prefs, m):
    counts = [0] * m
    for p in prefs:
        counts[p] += 1
    return tuple(counts)


def simplex_decomposition(x, r):
    """Corners (as r-grid index tuples) and barycentric weights of the
    canonical simplex containing x.

    Each grid cell splits into d! simplices indexed by coordinate
    orderings; ties and cell boundaries are resolved by sorting the
    fractional parts descending with the axis index as tie-break, which
    makes the choice deterministic while the interpolated value stays
    independent of it (differing corners get weight zero).
    """
    r = as_fraction(r)
    d = len(x)
    cells = int(1 / r)
    base = []
    t = []
    for v in x:
        s = as_fraction(v) / r
        b = min(int(s), cells - 1)
        base.append(b)
        t.append(s - b)
    order = sorted(range(d), key=lambda j: (-t[j], j))
    weights = [Fraction(1) - t[order[0]]]
    for k in range(1, d):
        weights.append(t[order[k - 1]] - t[order[k]])
    weights.append(t[order[d - 1]])
    corners = [tuple(base)]
    cur = list(base)
    for j in order:
        cur[j] += 1
        corners.append(tuple(cur))
    return corners, weights


def interpolate_g(x, instance: CakeInstance, _cache=None) -> tuple:
    """Affine extension of the preference counts over the simplicial
    subdivision; exact, and the component sum stays n everywhere.

    Corners with weight zero are skipped, so a grid point costs exactly
    n*(d+1) valuation queries and an interior point at most (d+1)^2 * n.
    """
    corners, weights = simplex_decomposition(x, instance.r)
    total = [Fraction(0)] * instance.m
    for corner, w in zip(corners, weights):
        if w == 0:
            continue
        counts = _corner_prefs(corner, instance, _cache)[1]
        for i in range(instance.m):
            total[i] += w * counts[i]
    return tuple(total)


def _corner_prefs(corner, instance, cache):
    """(preferences, counts) at an r-grid corner given by its index tuple."""
    if cache is not None:
        hit = cache.get(corner)
        if hit is not None:
            return hit
    x = tuple(idx * instance.r for idx in corner)
    prefs = preferences_at(x, instance)
    entry = (prefs, _tally(prefs, instance.m))
    if cache is not None:
        cache[corner] = entry
    return entry


def f_from_g(gv, groups) -> tuple:
    """Drop the last component and recenter: component i is g_i - k_i."""
    return tuple(as_fraction(gv[i]) - groups[i] for i in range(len(groups) - 1))


def build_root_oracle(instance: CakeInstance, cache=None) -> RealOracle:
    """The recentred preference-count field as a counted real oracle.

    With ``cache`` supplied, repeated corner evaluations inside one
    solve are deduplicated; agents' query counters then count distinct
    questions (cache misses), matching the counted-oracle model.
    """
    d = instance.m - 1

    def fn(x):
        return f_from_g(interpolate_g(x, instance, _cache=cache), instance.groups)

    return RealOracle(fn, d, label="cake")


@dataclass
class Allocation:
    """Cuts, an agent-to-piece assignment meeting the group sizes, and a
    witnessing r-grid corner per agent."""

    cuts: tuple
    assignment: tuple
    certificates: tuple
    root: tuple
    meta: dict = field(default_factory=dict)

    def pieces(self):
        edges = (Fraction(0),) + tuple(self.cuts) + (Fraction(1),)
        return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]

    def to_json(self) -> dict:
        return {
            "cuts": [str(c) for c in self.cuts],
            "assignment": list(self.assignment),
            "certificates": [[str(c) for c in corner] for corner in self.certificates],
            "root": [str(c) for c in self.root],
            "meta": self.meta,
        }


def hall_assignment(root: GridPoint, grid: GridSpec, instance: CakeInstance, cache=None):
    """Assign exactly k_i agents to piece i along preference edges.

    The bipartite graph joins an agent to a piece when the agent
    prefers that piece at some corner of the simplex containing the
    root; the counting claims guaranteed by an 1/(2d^2)-root make a
    capacity-respecting matching exist, so failure raises.
    Returns (assignment, certificates) with the witnessing corner's
    coordinates per agent.
    """
    x = to_coords(root, grid)
    corners, _ = simplex_decomposition(x, instance.r)
    prefs_by_corner = [_corner_prefs(c, instance, cache)[0] for c in corners]
    counts_by_corner = [_tally(p, instance.m) for p in prefs_by_corner]

    for i in range(instance.m):
        if max(c[i] for c in counts_by_corner) < instance.groups[i]:
            raise ReductionViolation(
                "corner-count claim",
                f"no simplex corner supports k_{i} agents on piece {i}",
                piece=i, counts=[c[i] for c in counts_by_corner])

    # adjacency[a] = pieces agent a prefers at some corner of the simplex
    adjacency = [sorted({pc[a] for pc in prefs_by_corner}) for a in range(instance.n)]

    assignment = _match_with_capacities(adjacency, instance.groups)
    if assignment is None:
        raise ReductionViolation(
            "capacity matching",
            "no assignment meets the group sizes along preference edges")

    certificates = []
    for a, piece in enumerate(assignment):
        k = next(k for k, pc in enumerate(prefs_by_corner) if pc[a] == piece)
        certificates.append(tuple(idx * instance.r for idx in corners[k]))
    return tuple(assignment), tuple(certificates)


def _match_with_capacities(adjacency, caps):
    """Augmenting-path matching of agents to piece slots (caps copies)."""
    slots = [p for p in range(len(caps)) for _ in range(caps[p])]
    owner = [None] * len(slots)

    def augment(a, seen):
        for s, piece in enumerate(slots):
            if piece in adjacency[a] and s not in seen:
                seen.add(s)
                if owner[s] is None or augment(owner[s], seen):
                    owner[s] = a
                    return True
        return False

    for a in range(len(adjacency)):
        if not augment(a, set()):
            return None
    assignment = [None] * len(adjacency)
    for s, a in enumerate(owner):
        assignment[a] = slots[s]
    return tuple(assignment)


def verify_near_envy_free(alloc: Allocation, instance: CakeInstance):
    """Certificate check: each agent's witnessing corner moves every cut
    by at most r (inclusive) and makes the assigned piece weakly best.

    Returns (ok, per-agent reports).
    """
    reports = []
    ok = True
    base_cuts = alloc.cuts
    for a, agent in enumerate(instance.agents):
        corner = alloc.certificates[a]
        pieces = partition_from_point(corner)
        corner_cuts = [max(as_fraction(c) for c in corner[: i + 1]) for i in range(len(corner))]
        movement = max(abs(cc - bc) for cc, bc in zip(corner_cuts, base_cuts))
        values = [agent.value(lo, hi) for lo, hi in pieces]
        assigned = alloc.assignment[a]
        margin_ok = all(values[assigned] >= v for v in values)
        within = movement <= instance.r
        entry = {
            "agent": a,
            "assigned": assigned,
            "movement": str(movement),
            "within_r": within,
            "assigned_is_best": margin_ok,
        }
        if not (within and margin_ok):
            ok = False
            entry["values"] = [str(v) for v in values]
        reports.append(entry)
    return ok, reports


def solve_three_groups(instance: CakeInstance, trace: Root2DTrace | None = None) -> Allocation:
    """End-to-end solve for m == 3 groups.

    Builds the recentred count field, discretizes at epsilon = 1/8 with
    spacing the largest power-of-two fraction of r below r/(2 d^2 n)
    (so the solver grid nests inside the r-grid), finds a root with the
    prefix-sum 2D solver, and certifies the resulting allocation.
    """
    if instance.m != 3:
        raise InputError("exactly three groups are supported")
    d = instance.m - 1
    n = instance.n
    for a in instance.agents:
        if a.value(0, 1) <= 0:
            raise InputError(f"agent {a.label} values the whole cake at zero (not hungry)")

    eps = Fraction(1, 2 * d * d)
    lipschitz = Fraction(n) / instance.r
    delta = instance.r / (1 << ceil_log2(2 * d * d * n))
    grid = GridSpec.regular(unit_box(d), delta)
    cache = {}
    oracle = build_root_oracle(instance, cache)
    sign = discretize(oracle, DiscretizationParams(eps, lipschitz, delta), grid)

    queries_before = instance.total_queries
    root = find_root_sum(sign, grid, trace)
    x = to_coords(root, grid)
    assignment, certificates = hall_assignment(root, grid, instance, cache=cache)

    cuts = []
    run = Fraction(0)
    for v in x:
        run = max(run, v)
        cuts.append(run)

    alloc = Allocation(
        cuts=tuple(cuts),
        assignment=assignment,
        certificates=certificates,
        root=x,
        meta={
            "delta": format_pow2(delta),
            "epsilon": str(eps),
            "oracle_evaluations": oracle.count,
            "sign_evaluations": sign.count,
            "valuation_queries": instance.total_queries - queries_before,
        },
    )
    counts = _tally(assignment, instance.m)
    if counts != instance.groups:
        raise ReductionViolation("group sizes", "assignment does not meet the group sizes",
                                 counts=counts)
    ok, reports = verify_near_envy_free(alloc, instance)
    if not ok:
        raise ReductionViolation("near envy-freeness", "certificate failed verification",
                                 reports=reports)
    return alloc


def instance_from_json(doc: dict) -> CakeInstance:
    """Instance schema: {"agents": [...], "groups": [k1,k2,k3], "r": "2^-10"}.

    Agent entries: {"type": "piecewise_constant", "breakpoints": [...],
    "densities": [...]} or {"type": "piecewise_linear", "breakpoints":
    [...], "values": [...]}.  Numbers may be strings ("1/3") for
    exactness.
    """
    try:
        agents = [_agent_from_json(a, idx) for idx, a in enumerate(doc["agents"])]
        groups = tuple(doc["groups"])
        r = as_fraction(doc["r"])
    except KeyError as e:
        raise InputError(f"instance JSON missing key {e}") from e
    return CakeInstance(agents, groups, r)


def _agent_from_json(doc, idx):
    kind = doc.get("type", "piecewise_constant")
    label = doc.get("label", f"agent{idx}")
    if kind == "piecewise_constant":
        return piecewise_constant_agent(doc["breakpoints"], doc["densities"], label)
    if kind == "piecewise_linear":
        return piecewise_linear_agent(doc["breakpoints"], doc["values"], label)
    raise InputError(f"unknown agent type {kind!r}")
