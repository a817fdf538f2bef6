"""Grid geometry and counted evaluation oracles shared by every solver.

Grid coordinates, spacings and thresholds are dyadic rationals held
exactly as ``Fraction``s; floating point only appears inside
user-supplied real evaluators.  Solvers never touch coordinates at all:
they work in integer index space and convert with :func:`to_coords`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, Sequence

from .errors import EvaluationError, GridTooLargeError, InputError

# A grid point is a plain tuple of integer indices, one per axis, with
# index j in [0, cells[j]].  A sign vector is a tuple over {-1, 0, +1}.
GridPoint = tuple
SignVector = tuple

INCREASING = "increasing"
DECREASING = "decreasing"
NONE = "none"

DEFAULT_POINT_CAP = 1 << 24


def as_fraction(value) -> Fraction:
    """Coerce ints, strings ("3/4", "2^-10") and floats to exact Fractions."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_dyadic(value) if "^" in value else Fraction(value)
    # floats convert exactly (binary expansion); ints trivially
    return Fraction(value)


def parse_dyadic(text: str) -> Fraction:
    """Parse the "2^-k" notation used in all external interfaces."""
    t = text.strip()
    if not t.startswith("2^"):
        raise InputError(f"expected a power of two like '2^-10', got {text!r}")
    try:
        k = int(t[2:])
    except ValueError as e:
        raise InputError(f"bad exponent in {text!r}") from e
    return Fraction(2) ** k


def format_pow2(q: Fraction) -> str:
    if not is_power_of_two(q):
        raise InputError(f"{q} is not a power of two")
    k = q.numerator.bit_length() - q.denominator.bit_length()
    return f"2^{k}"


def is_power_of_two(q: Fraction) -> bool:
    """True iff q == 2**k for some integer k (possibly negative)."""
    q = as_fraction(q)
    if q <= 0:
        return False
    n, d = q.numerator, q.denominator
    return (n == 1 or d == 1) and n & (n - 1) == 0 and d & (d - 1) == 0


def pow2_floor(q: Fraction) -> Fraction:
    """Largest power of two <= q (q > 0)."""
    q = as_fraction(q)
    if q <= 0:
        raise InputError("pow2_floor needs a positive value")
    k = q.numerator.bit_length() - q.denominator.bit_length()
    cand = Fraction(2) ** k
    while cand > q:
        cand /= 2
    while cand * 2 <= q:
        cand *= 2
    return cand


def ceil_log2(n: int) -> int:
    if n < 1:
        raise InputError("ceil_log2 needs n >= 1")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class BoxDomain:
    """An axis-aligned d-box given by opposite corners, lower < upper."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(as_fraction(v) for v in self.lower)
        hi = tuple(as_fraction(v) for v in self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if len(lo) != len(hi) or not lo:
            raise InputError("box corners must be non-empty vectors of equal length")
        if not all(a < b for a, b in zip(lo, hi)):
            raise InputError("box requires lower < upper componentwise")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def side(self, j: int) -> Fraction:
        return self.upper[j] - self.lower[j]

    def contains(self, x: Sequence) -> bool:
        return all(a <= as_fraction(v) <= b for a, v, b in zip(self.lower, x, self.upper))


def unit_box(d: int) -> BoxDomain:
    return BoxDomain((Fraction(0),) * d, (Fraction(1),) * d)


def sym_box(d: int) -> BoxDomain:
    return BoxDomain((Fraction(-1),) * d, (Fraction(1),) * d)


@dataclass(frozen=True)
class GridSpec:
    """A box partitioned into cells of uniform spacing ``delta``.

    Regular grids enforce the dyadic shape every solver assumes: delta
    and all box sides are powers of two, hence so is every cell count.
    Padded and sub-box grids produced internally relax the
    power-of-two cell counts (``dyadic=False``) but keep exactness:
    ``delta * cells[j] == side(j)`` always holds exactly.
    """

    box: BoxDomain
    delta: Fraction
    cells: tuple
    dyadic: bool = True

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        if self.delta <= 0:
            raise InputError("delta must be positive")
        if len(self.cells) != self.box.dim:
            raise InputError("cells must have one entry per axis")
        if any(n < 1 for n in self.cells):
            raise InputError("every axis needs at least one cell")
        for j, n in enumerate(self.cells):
            if self.delta * n != self.box.side(j):
                raise InputError(f"delta*cells != side on axis {j}")
        if self.dyadic:
            if not is_power_of_two(self.delta):
                raise InputError("delta must be a power of two")
            for j, n in enumerate(self.cells):
                if n & (n - 1) != 0:
                    raise InputError(f"cell count {n} on axis {j} is not a power of two")

    @classmethod
    def regular(cls, box: BoxDomain, delta) -> "GridSpec":
        delta = as_fraction(delta)
        cells = []
        for j in range(box.dim):
            n = box.side(j) / delta
            if n.denominator != 1:
                raise InputError(f"delta does not divide side of axis {j}")
            cells.append(int(n))
        return cls(box, delta, tuple(cells))

    @classmethod
    def relaxed(cls, box: BoxDomain, delta, cells) -> "GridSpec":
        return cls(box, as_fraction(delta), tuple(cells), dyadic=False)

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def npoints(self) -> int:
        total = 1
        for n in self.cells:
            total *= n + 1
        return total

    def point_valid(self, p: GridPoint) -> bool:
        return len(p) == self.dim and all(0 <= p[j] <= self.cells[j] for j in range(self.dim))

    def require_point(self, p: GridPoint) -> None:
        if not self.point_valid(p):
            raise InputError(f"grid point {p} out of range for cells {self.cells}")

    def axis_coords(self, j: int) -> list:
        a, d = self.box.lower[j], self.delta
        return [a + i * d for i in range(self.cells[j] + 1)]


def to_coords(p: GridPoint, g: GridSpec) -> tuple:
    """Exact coordinates of a grid point: a[j] + index[j]*delta."""
    g.require_point(p)
    return tuple(g.box.lower[j] + p[j] * g.delta for j in range(g.dim))


def iter_grid_points(g: GridSpec) -> Iterator[GridPoint]:
    """All grid points in lexicographic index order."""
    return product(*(range(n + 1) for n in g.cells))


def iter_face_points(g: GridSpec, axis: int, upper: bool) -> Iterator[GridPoint]:
    """Grid points on the face where axis is pinned to its lower/upper end."""
    pin = g.cells[axis] if upper else 0
    ranges = [range(n + 1) if j != axis else (pin,) for j, n in enumerate(g.cells)]
    return product(*ranges)


class RealOracle:
    """Counted evaluation oracle for a real vector function.

    ``fn`` receives a coordinate tuple (exact Fractions when called by
    the library) and returns a length-``dim`` sequence of numbers.  The
    counter increments by exactly one per evaluation.
    """

    def __init__(self, fn: Callable, dim: int, label: str = "f"):
        self.fn = fn
        self.dim = dim
        self.label = label
        self.count = 0

    def evaluate(self, x: Sequence) -> tuple:
        self.count += 1
        out = tuple(self.fn(x))
        if len(out) != self.dim:
            raise EvaluationError(f"{self.label} returned {len(out)} components, expected {self.dim}")
        for v in out:
            if isinstance(v, float) and not math.isfinite(v):
                raise EvaluationError(f"{self.label} returned a non-finite value at {x}")
        return out


class SignOracle:
    """Counted evaluation oracle mapping grid points to sign vectors."""

    def __init__(self, fn: Callable, dim: int, label: str = "f"):
        self.fn = fn
        self.dim = dim
        self.label = label
        self.count = 0

    def evaluate(self, p: GridPoint) -> SignVector:
        self.count += 1
        out = tuple(self.fn(p))
        if len(out) != self.dim:
            raise EvaluationError(f"{self.label} returned {len(out)} components, expected {self.dim}")
        for s in out:
            if s != 0 and s != 1 and s != -1:
                raise EvaluationError(f"{self.label} returned non-sign entry {s!r} at {p}")
        return out


def sign_oracle_from_table(table: dict, dim: int, label: str = "table") -> SignOracle:
    """Sign oracle backed by an explicit {point: sign-vector} mapping."""
    def fn(p):
        try:
            return table[tuple(p)]
        except KeyError:
            raise InputError(f"{label} has no value at {p}")
    return SignOracle(fn, dim, label)


class MemoizedSignOracle(SignOracle):
    """Optional caching wrapper; the count tracks cache misses only.

    Off by default everywhere so query counts match the plain
    evaluation model; wrap explicitly when re-evaluation is known to be
    wasteful and determinism makes it sound.
    """

    def __init__(self, inner: SignOracle):
        self._inner = inner
        self._cache = {}
        super().__init__(inner.fn, inner.dim, inner.label)

    def evaluate(self, p: GridPoint) -> SignVector:
        p = tuple(p)
        hit = self._cache.get(p)
        if hit is None:
            hit = self._inner.evaluate(p)
            self._cache[p] = hit
        return hit

    @property
    def count(self):  # type: ignore[override]
        return self._inner.count

    @count.setter
    def count(self, value):
        self._inner.count = value


def memoized(o: SignOracle) -> MemoizedSignOracle:
    return MemoizedSignOracle(o)


def restrict_component(o: SignOracle, i: int, j: int, base: GridPoint) -> Callable[[int], int]:
    """Component i of the oracle as a 1D function of the index along axis j.

    Every call of the returned function costs one oracle evaluation.
    """
    if not 0 <= i < o.dim:
        raise InputError(f"component {i} out of range")
    if not 0 <= j < len(base):
        raise InputError(f"axis {j} out of range")
    base = tuple(base)

    def f(idx: int) -> int:
        p = base[:j] + (idx,) + base[j + 1:]
        return o.evaluate(p)[i]

    return f


def enumerate_roots(o: SignOracle, g: GridSpec, cap: int = DEFAULT_POINT_CAP) -> list:
    """Brute-force scan for every grid point whose sign vector is all zero.

    The independent test oracle for every solver; refuses above ``cap``.
    """
    if g.npoints > cap:
        raise GridTooLargeError(f"grid has {g.npoints} points, above cap {cap}")
    zero = (0,) * o.dim
    return [p for p in iter_grid_points(g) if o.evaluate(p) == zero]


@dataclass(frozen=True)
class MonotoneProfile:
    """A d x d matrix declaring which monotonicity conditions hold.

    Entry (i, j) describes component i as a function of variable j;
    diagonal entries are the diagonal conditions, off-diagonal entries
    the ex-diagonal ones.
    """

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        d = len(rows)
        for r in rows:
            if len(r) != d:
                raise InputError("profile must be square")
            for e in r:
                if e not in (INCREASING, DECREASING, NONE):
                    raise InputError(f"bad profile entry {e!r}")

    @property
    def dim(self) -> int:
        return len(self.entries)

    @classmethod
    def none(cls, d: int) -> "MonotoneProfile":
        return cls(tuple((NONE,) * d for _ in range(d)))

    @classmethod
    def diagonal_increasing(cls, d: int) -> "MonotoneProfile":
        return cls.none(d).with_entries({(i, i): INCREASING for i in range(d)})

    @classmethod
    def ex_diagonal_decreasing(cls, d: int) -> "MonotoneProfile":
        e = {(i, j): DECREASING for i in range(d) for j in range(d) if i != j}
        return cls.none(d).with_entries(e)

    @classmethod
    def alternating(cls, d: int) -> "MonotoneProfile":
        """All d diagonal increasing plus component i decreasing in x_{i-1}."""
        e = {(i, i): INCREASING for i in range(d)}
        e.update({(i, i - 1): DECREASING for i in range(1, d)})
        return cls.none(d).with_entries(e)

    def with_entries(self, updates: dict) -> "MonotoneProfile":
        rows = [list(r) for r in self.entries]
        for (i, j), kind in updates.items():
            rows[i][j] = kind
        return MonotoneProfile(tuple(tuple(r) for r in rows))

    def declared(self) -> list:
        """All (i, j, kind) with kind != none."""
        return [
            (i, j, e)
            for i, row in enumerate(self.entries)
            for j, e in enumerate(row)
            if e != NONE
        ]

    def entry(self, i: int, j: int) -> str:
        return self.entries[i][j]


def rescale_to_unit_box(o: RealOracle, box: BoxDomain):
    """Explicit normalization for boxes whose sides are not powers of two.

    Returns (oracle on [0,1]^d, map from unit coords back to original
    coords).  Component values are untouched, so switching and
    monotonicity survive; the Lipschitz constant scales by the largest
    side.
    """
    lo, sides = box.lower, [box.side(j) for j in range(box.dim)]

    def to_original(u):
        return tuple(lo[j] + as_fraction(u[j]) * sides[j] for j in range(box.dim))

    rescaled = RealOracle(lambda u: o.evaluate(to_original(u)), o.dim, label=f"{o.label}|unit")
    return rescaled, to_original
