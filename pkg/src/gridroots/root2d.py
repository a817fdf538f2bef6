"""Two-dimensional solvers.

Three entry points, one per hypothesis set:

* :func:`find_root_diag` -- positive-switching, component 0 weakly
  increasing along axis 0.
* :func:`find_root_exdiag` -- positive-switching (padded to strict
  internally), component 0 weakly decreasing along axis 1.
* :func:`find_root_sum` -- prefix-sum switching with component 0
  increasing along axis 0; identical machinery to the diagonal solver,
  only the argument for the outer endpoint signs differs.

All run in O(log^2 N) oracle evaluations via an outer bracket search
over an auxiliary sign function whose probes are inner bisections.
When the outer bracket pins a -1/+1 pair, a zipper search walks the
zero set of the monotone component with two-row probes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .bisection import bisect_bracket_1d, bisect_root_1d
from .discretize import pad_strict
from .domain import GridPoint, GridSpec, SignOracle
from .errors import ContinuityViolation, HypothesisViolation, InputError, SwitchingViolation


@dataclass
class Root2DTrace:
    """Observable record of one 2D solve; serializes for the CLI."""

    mode: str = ""
    outer: list = field(default_factory=list)
    case: str = ""
    zipper_probes: int = 0
    evaluations: int = 0

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "outer": self.outer,
            "case": self.case,
            "zipper_probes": self.zipper_probes,
            "evaluations": self.evaluations,
        }


def _ev(o, stash, p):
    v = stash.get(p)
    if v is None:
        v = o.evaluate(p)
        stash[p] = v
    return v


def _require_2d(o, g):
    if g.dim != 2 or o.dim != 2:
        raise InputError("two-dimensional oracle and grid required")


def find_root_diag(o: SignOracle, g: GridSpec, trace: Root2DTrace | None = None) -> GridPoint:
    """Root of a positive-switching oracle with component 0 increasing
    along axis 0.  Evaluations are O(log^2 N)."""
    return _solve_outer_rows(o, g, "diag", trace)


def find_root_sum(o: SignOracle, g: GridSpec, trace: Root2DTrace | None = None) -> GridPoint:
    """Root of (the discretization of) a prefix-sum switching oracle with
    component 0 increasing along axis 0.

    The machinery is the diagonal solver's; the sum hypothesis is what
    guarantees the outer bracket's upper endpoint sign, because
    component 0 vanishes at the inner root so the prefix sum there is
    carried by component 1 alone.
    """
    return _solve_outer_rows(o, g, "sum", trace)


def _solve_outer_rows(o, g, mode, trace):
    _require_2d(o, g)
    start = o.count
    if trace is not None:
        trace.mode = mode
    n1, n2 = g.cells
    records = {}

    def h(j):
        stash = {}

        def f1(i):
            return _ev(o, stash, (i, j))[0]

        try:
            i_root = bisect_root_1d(f1, 0, n1)
        except SwitchingViolation as e:
            raise SwitchingViolation(
                "component-0 switching along axis 0",
                f"inner bisection failed on row {j}",
                row=j, inner=str(e)) from e
        s2 = stash[(i_root, j)][1]
        records[j] = (i_root, s2)
        if trace is not None:
            trace.outer.append({"row": j, "inner_root": i_root, "sign": s2})
        return s2

    try:
        lo, hi, s_lo, s_hi = bisect_bracket_1d(h, 0, n2)
    except SwitchingViolation as e:
        name = ("prefix-sum switching" if mode == "sum" else "component-1 switching") + " along axis 1"
        raise SwitchingViolation(name, "outer bracket endpoint has the wrong sign",
                                 inner=str(e)) from e

    y1, s2_lo = records[lo]
    z1, s2_hi = records[hi]
    if s2_lo == 0:
        root, case = (y1, lo), "direct"
    elif s2_hi == 0:
        root, case = (z1, hi), "direct"
    else:
        if z1 == y1:
            raise ContinuityViolation(
                "delta-continuity of component 1",
                "opposite nonzero signs at vertically adjacent points",
                column=y1, rows=(lo, hi))
        root = _zipper_core(o, axis=0, lines=(lo, hi), neg=(y1, lo), pos=(z1, hi), trace=trace)
        case = "zipper"
    if trace is not None:
        trace.case = case
        trace.evaluations = o.count - start
    return root


def zipper_search(o: SignOracle, g: GridSpec, y1: int, z1: int, y2: int,
                  trace: Root2DTrace | None = None) -> GridPoint:
    """Walk the zero set of component 0 between rows y2 and y2+1.

    Preconditions (validated here with two evaluations): component 0 is
    zero at (y1, y2) and (z1, y2+1), component 1 is -1 at the former and
    +1 at the latter, and z1 != y1.  Component 0 must be weakly
    monotone along axis 0 and the oracle discretely continuous; a root
    then exists in the probed column range and is found in O(log N)
    evaluations.
    """
    _require_2d(o, g)
    if z1 == y1:
        raise InputError("zipper requires distinct columns (z1 != y1)")
    p_neg, p_pos = (y1, y2), (z1, y2 + 1)
    v_neg, v_pos = o.evaluate(p_neg), o.evaluate(p_pos)
    if v_neg != (0, -1) or v_pos != (0, 1):
        raise HypothesisViolation(
            "zipper-endpoints",
            "expected sign vectors (0,-1) and (0,+1) at the bracket endpoints",
            neg=(p_neg, v_neg), pos=(p_pos, v_pos))
    return _zipper_core(o, axis=0, lines=(y2, y2 + 1), neg=(y1, y2), pos=(z1, y2 + 1),
                        trace=trace)


def _zipper_core(o, axis, lines, neg, pos, trace=None):
    """Binary search along ``axis`` between two parallel lines.

    ``neg``/``pos`` are (position-along-axis, line-index) pairs at which
    component 0 is zero and component 1 is -1/+1 respectively.  At each
    probed position, monotonicity of component 0 along the axis forces
    a zero on at least one of the two lines; the sign of component 1 at
    a zero directs the search.  Loop invariant: the tracked points keep
    component 0 == 0 and component 1 strictly negative / positive.
    """
    l0, l1 = lines

    def mk(m, line):
        return (m, line) if axis == 0 else (line, m)

    stash = {}
    # positions along the search axis and the line each endpoint sits on
    m_neg, line_neg = neg
    m_pos, line_pos = pos

    while abs(m_neg - m_pos) > 1:
        m = (m_neg + m_pos) // 2
        if trace is not None:
            trace.zipper_probes += 1
        zeros = []
        for line in (l0, l1):
            v = _ev(o, stash, mk(m, line))
            if v[0] == 0:
                zeros.append((line, v[1]))
        if not zeros:
            raise ContinuityViolation(
                "delta-continuity / monotonicity of component 0",
                "no zero of component 0 on either line at a probed position",
                position=m, lines=(l0, l1))
        for line, s in zeros:
            if s == 0:
                return mk(m, line)
        if len(zeros) == 2 and zeros[0][1] != zeros[1][1]:
            raise ContinuityViolation(
                "delta-continuity of component 1",
                "opposite nonzero signs at adjacent points",
                position=m)
        line, s = zeros[0]
        if s < 0:
            m_neg, line_neg = m, line
        else:
            m_pos, line_pos = m, line

    if line_neg == line_pos:
        raise ContinuityViolation(
            "delta-continuity of component 1",
            "opposite nonzero signs at adjacent positions on one line",
            positions=(m_neg, m_pos), line=line_neg)
    # Adjacent positions on different lines: both crossing corners have
    # component 1 forced to zero, and component 0 cannot be nonzero with
    # opposite signs on the two corners, so one corner is a root.
    corners = sorted((mk(m_neg, line_pos), mk(m_pos, line_neg)))
    for p in corners:
        v = _ev(o, stash, p)
        if v == (0, 0):
            return p
    raise ContinuityViolation(
        "delta-continuity",
        "neither forced corner is a root",
        corners=[list(c) for c in corners])


def find_root_exdiag(o: SignOracle, g: GridSpec, trace: Root2DTrace | None = None) -> GridPoint:
    """Root of a positive-switching oracle with component 0 decreasing
    along axis 1.

    The grid is padded by one strict layer per face internally, which
    makes the strict-switching hypothesis structural; returned points
    always lie on the caller's grid.  Evaluations are O(log^2 N).
    """
    _require_2d(o, g)
    start = o.count
    if trace is not None:
        trace.mode = "exdiag"
    po, pg = pad_strict(o, g)
    n1, n2 = pg.cells
    records = {}

    def column_root(i):
        """The three-branch auxiliary map: bisect the (decreasing)
        component 0 along column i, or clamp to the face that already
        has the wrong strict sign."""
        stash = {}
        v_bot = _ev(po, stash, (i, 0))
        if v_bot[0] < 0:
            return 0, "clamp-low", v_bot[1], stash
        v_top = _ev(po, stash, (i, n2))
        if v_top[0] > 0:
            return n2, "clamp-high", v_top[1], stash

        def f1(j):
            return _ev(po, stash, (i, j))[0]

        try:
            j_root = bisect_root_1d(f1, 0, n2, orientation=-1,
                                    lo_sign=v_bot[0], hi_sign=v_top[0])
        except SwitchingViolation as e:
            raise SwitchingViolation(
                "component-0 monotone decrease along axis 1",
                f"column bisection failed on column {i}", column=i, inner=str(e)) from e
        return j_root, "bisect", stash[(i, j_root)][1], stash

    def h(i):
        j_root, branch, s2, _ = column_root(i)
        records[i] = (j_root, branch, s2)
        if trace is not None:
            trace.outer.append({"column": i, "row": j_root, "branch": branch, "sign": s2})
        return s2

    try:
        lo, hi, s_lo, s_hi = bisect_bracket_1d(h, 0, n1)
    except SwitchingViolation as e:
        raise SwitchingViolation(
            "strict positive switching",
            "outer bracket endpoint has the wrong sign on the padded grid",
            inner=str(e)) from e

    r_lo, b_lo, s2_lo = records[lo]
    r_hi, b_hi, s2_hi = records[hi]

    if s2_lo == 0:
        if b_lo != "bisect":
            raise SwitchingViolation(
                "strict positive switching",
                "zero guide sign at a clamped column endpoint", column=lo, branch=b_lo)
        root, case = (lo, r_lo), "direct"
    elif s2_hi == 0:
        if b_hi != "bisect":
            raise SwitchingViolation(
                "strict positive switching",
                "zero guide sign at a clamped column endpoint", column=hi, branch=b_hi)
        root, case = (hi, r_hi), "direct"
    elif b_lo == "bisect" and b_hi == "bisect":
        if r_lo == r_hi:
            raise ContinuityViolation(
                "delta-continuity of component 1",
                "opposite nonzero signs at horizontally adjacent points",
                row=r_lo, columns=(lo, hi))
        root = _zipper_core(po, axis=1, lines=(lo, hi), neg=(r_lo, lo), pos=(r_hi, hi),
                            trace=trace)
        case = "case1"
    elif b_lo == "clamp-low" and b_hi == "bisect":
        root = _segment_root(po, column=hi, j_lo=0, j_hi=r_hi, hi_sign=s2_hi)
        case = "case2"
    elif b_lo == "bisect" and b_hi == "clamp-high":
        root = _segment_root(po, column=lo, j_lo=r_lo, j_hi=n2, lo_sign=s2_lo)
        case = "case3"
    else:
        # Both columns clamped in opposite directions would mean component 0
        # is everywhere -1 on one column and +1 on the adjacent one.
        raise ContinuityViolation(
            "delta-continuity of component 0",
            "adjacent columns clamp in opposite directions (the impossible case)",
            columns=(lo, hi), branches=(b_lo, b_hi))

    result = _snap_root_to_grid(o, g, root)
    if trace is not None:
        trace.case = case
        trace.evaluations = o.count - start
    return result


def _segment_root(po, column, j_lo, j_hi, lo_sign=None, hi_sign=None):
    """Bisect component 1 along a column segment on which component 0 is
    forced to vanish; verify the forcing on the returned point."""
    stash = {}

    def f2(j):
        return _ev(po, stash, (column, j))[1]

    j = bisect_root_1d(f2, j_lo, j_hi, lo_sign=lo_sign, hi_sign=hi_sign)
    v = _ev(po, stash, (column, j))
    if v[0] != 0:
        raise HypothesisViolation(
            "component-0 zero segment",
            "component 0 is nonzero where the case analysis forces a zero",
            point=(column, j), vector=v)
    return (column, j)


def _snap_root_to_grid(o: SignOracle, g: GridSpec, padded_root) -> GridPoint:
    """Map a padded-grid root back to the caller's grid.

    Verified roots never sit on a padding layer (the forced component
    would be nonzero), so this is an index shift; the defensive branch
    scans the corners of the nearest original cell.
    """
    p = tuple(i - 1 for i in padded_root)
    if g.point_valid(p):
        return p
    base = tuple(min(max(p[j], 0), g.cells[j] - 1) for j in range(g.dim))
    zero = (0,) * g.dim
    for off in sorted(_corner_offsets(g.dim)):
        q = tuple(base[j] + off[j] for j in range(g.dim))
        if g.point_valid(q) and o.evaluate(q) == zero:
            return q
    raise ContinuityViolation(
        "padded-root remap", "no root in the cell adjacent to a padded root",
        padded_root=list(padded_root))


def _corner_offsets(d):
    from itertools import product as _product
    return list(_product((0, 1), repeat=d))
