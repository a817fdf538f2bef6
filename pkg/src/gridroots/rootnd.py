"""d-dimensional solving under all ex-diagonal decreasing conditions.

Two routes to the same point:

* the lattice map h(x) = x - f(x)*delta, whose fixed points are exactly
  the roots of f and which is order-preserving on the componentwise
  lattice when every ex-diagonal condition decreases
  (:func:`tarski_map`, :func:`check_lattice_claims`);
* a direct recursive algorithm (:func:`find_root_recursive`) that pins
  the last axis at its midpoint, solves the (d-1)-dimensional
  restriction, and recurses into the sub-box the leftover component's
  sign selects.  O(log^d N) evaluations; the d=2 base delegates to the
  ex-diagonal 2D solver unless ``use_2d_base=False`` forces the pure
  1D base for bound-validation runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bisection import bisect_root_1d
from .discretize import CheckReport
from .domain import (
    DEFAULT_POINT_CAP,
    GridPoint,
    GridSpec,
    SignOracle,
    iter_grid_points,
)
from .errors import GridTooLargeError, HypothesisViolation, InputError
from .root2d import find_root_exdiag


@dataclass(frozen=True)
class LatticeMap:
    """The index-space form of x - f(x)*delta: index minus sign."""

    oracle: SignOracle
    grid: GridSpec

    def apply(self, p: GridPoint) -> GridPoint:
        v = self.oracle.evaluate(p)
        return tuple(p[j] - v[j] for j in range(self.grid.dim))


def tarski_map(o: SignOracle, g: GridSpec) -> LatticeMap:
    """Total construction; the order/range claims are checked separately."""
    if o.dim != g.dim:
        raise InputError("oracle and grid dimension disagree")
    return LatticeMap(o, g)


def check_lattice_claims(m: LatticeMap, cap: int = DEFAULT_POINT_CAP) -> CheckReport:
    """Exhaustively verify the two lattice claims on adjacent grid points:
    the map is componentwise order-preserving, and it never leaves the grid."""
    g = m.grid
    if g.npoints > cap:
        raise GridTooLargeError(f"grid has {g.npoints} points, above cap {cap}")
    report = CheckReport("lattice-claims", "exhaustive")
    images = {}
    for p in iter_grid_points(g):
        hp = m.apply(p)
        images[p] = hp
        if not g.point_valid(hp):
            report.violations.append({"kind": "range", "point": list(p), "image": list(hp)})
    for p, hp in images.items():
        for j in range(g.dim):
            q = p[:j] + (p[j] + 1,) + p[j + 1:]
            hq = images.get(q)
            if hq is None:
                continue
            if any(hq[c] < hp[c] for c in range(g.dim)):
                report.violations.append(
                    {"kind": "order", "pair": [list(p), list(q)],
                     "images": [list(hp), list(hq)]})
    report.details["points"] = g.npoints
    return report


def find_tarski_fixed_point(m: LatticeMap) -> GridPoint:
    """A point with h(p) == p.

    Fixed points of the lattice map and roots of the underlying oracle
    coincide exactly, so this delegates to the recursive solver.
    """
    return find_root_recursive(m.oracle, m.grid)


def find_root_recursive(o: SignOracle, g: GridSpec, *, use_2d_base: bool = True,
                        debug_checks: bool = False) -> GridPoint:
    """Root of a positive-switching oracle with every ex-diagonal
    condition weakly decreasing.  Evaluations are O(log^d N).

    ``debug_checks`` spot-asserts, at every sub-box recursion, that the
    shrunk box still switches on its probed faces; the extra evaluations
    make counts incomparable with the plain mode, so leave it off for
    benchmarking.
    """
    if o.dim != g.dim:
        raise InputError("oracle and grid dimension disagree")
    box = [(0, n) for n in g.cells]
    point, _ = _solve_box(o, g, box, g.dim, use_2d_base, debug_checks)
    return point


def _check_subbox_faces(o, box, k, y, case_sign):
    """Debug probe: on the new sub-box every already-solved component must
    keep the switching sign on its pinned face's far corner."""
    for j in range(k - 1):
        corner = []
        for a in range(len(box)):
            if a == j:
                corner.append(y[j])
            elif a < k:
                corner.append(box[a][1] if case_sign < 0 else box[a][0])
            else:
                corner.append(box[a][0])
        s = o.evaluate(tuple(corner))[j]
        if (case_sign < 0 and s > 0) or (case_sign > 0 and s < 0):
            raise HypothesisViolation(
                "sub-box switching",
                "shrunk box loses a switching condition at a probed face corner",
                component=j, corner=corner, sign=s)


def _solve_box(o, g, box, k, use_2d_base, debug_checks=False):
    """Find a point in ``box`` where components 0..k-1 all vanish.

    Axes >= k are pinned (box[j] = (c, c)).  Returns the point together
    with its full sign vector so callers read component k without an
    extra evaluation where the final probe already produced it.
    """
    if k == 1:
        lo, hi = box[0]
        stash = {}

        def f0(i):
            p = _point(box, 0, i)
            v = stash.get(i)
            if v is None:
                v = o.evaluate(p)
                stash[i] = v
            return v[0]

        z = bisect_root_1d(f0, lo, hi)
        return _point(box, 0, z), stash[z]

    if k == 2 and use_2d_base and box[0][0] < box[0][1] and box[1][0] < box[1][1]:
        view, vgrid, lift = _plane_view(o, g, box)
        q = find_root_exdiag(view, vgrid)
        p = lift(q)
        return p, o.evaluate(p)

    axis = k - 1
    lo, hi = box[axis]
    cur = list(box)
    while True:
        pinned = lo == hi
        mid = lo if pinned else (lo + hi) // 2
        cur[axis] = (mid, mid)
        y, v = _solve_box(o, g, cur, k - 1, use_2d_base, debug_checks)
        s = v[axis]
        if s == 0:
            return y, v
        if pinned:
            raise HypothesisViolation(
                "sub-box switching",
                "leftover component is nonzero on a fully pinned axis",
                axis=axis, point=list(y), sign=s)
        if s < 0:
            # root lies in the upper sub-box [y, b]
            for j in range(axis):
                cur[j] = (y[j], cur[j][1])
            lo = hi if hi - lo == 1 else mid
        else:
            if hi - lo == 1:
                # probing the lower plane of a unit extent must not see +1:
                # the maintained switching invariant puts f_axis <= 0 there
                raise HypothesisViolation(
                    "sub-box switching",
                    "positive leftover sign on the lower face of a unit extent",
                    axis=axis, point=list(y), sign=s)
            for j in range(axis):
                cur[j] = (cur[j][0], y[j])
            hi = mid
        cur[axis] = (lo, hi)
        if debug_checks:
            _check_subbox_faces(o, cur, k, y, s)


def _point(box, free_axis, idx):
    return tuple(idx if j == free_axis else box[j][0] for j in range(len(box)))


def _plane_view(o, g, box):
    """A 2D oracle/grid over axes 0 and 1 of a sub-box, other axes pinned.

    One view evaluation costs exactly one underlying evaluation.
    """
    lo0, hi0 = box[0]
    lo1, hi1 = box[1]
    pins = tuple(b[0] for b in box)

    def lift(q):
        return (lo0 + q[0], lo1 + q[1]) + pins[2:]

    view = SignOracle(lambda q: o.evaluate(lift(q))[:2], 2, label=f"{o.label}|plane")
    vbox = type(g.box)(
        (g.box.lower[0] + lo0 * g.delta, g.box.lower[1] + lo1 * g.delta),
        (g.box.lower[0] + hi0 * g.delta, g.box.lower[1] + hi1 * g.delta),
    )
    vgrid = GridSpec.relaxed(vbox, g.delta, (hi0 - lo0, hi1 - lo1))
    return view, vgrid, lift
