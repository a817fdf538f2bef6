"""Binary search for roots of 1D sign functions over integer indices.

The primitive every higher-dimensional solver calls.  Functions here
take a plain ``int -> {-1,0,+1}`` callable so callers control exactly
what one "evaluation" means (and therefore what the counters count).

Contract for ``orientation=+1``: f(lo) <= 0 <= f(hi), and f never jumps
from -1 to +1 between adjacent indices (the discrete continuity
property).  ``orientation=-1`` mirrors the comparisons for functions
switching from non-negative to non-positive; the function itself is
never wrapped, so evaluation counts stay exact.
"""
from __future__ import annotations

from typing import Callable, Optional

from .errors import ContinuityViolation, SwitchingViolation

SignFn = Callable[[int], int]


def _descend(f, lo, hi, orientation, lo_sign, hi_sign, on_step):
    """Shrink [lo, hi] to a unit interval maintaining the sign bracket.

    Loop invariant: orientation*f(lo) <= 0 <= orientation*f(hi), taking
    unprobed endpoints on trust.  Returns (lo, hi, lo_sign, hi_sign)
    where a sign is None iff that endpoint was never evaluated.
    """
    while hi - lo > 1:
        mid = (lo + hi) // 2
        s = f(mid)
        if on_step is not None:
            on_step(lo, hi, mid, s)
        if s * orientation <= 0:
            lo, lo_sign = mid, s
        else:
            hi, hi_sign = mid, s
    return lo, hi, lo_sign, hi_sign


def bisect_root_1d(
    f: SignFn,
    lo: int,
    hi: int,
    *,
    orientation: int = 1,
    lo_sign: Optional[int] = None,
    hi_sign: Optional[int] = None,
    on_step=None,
) -> int:
    """Return an index z in [lo, hi] with f(z) == 0.

    Endpoint signs are probed lazily (only when the search terminates on
    an endpoint whose sign is still unknown); callers that already know
    them pass ``lo_sign``/``hi_sign`` to save those evaluations.  At
    most ceil(log2(hi-lo)) + 2 evaluations.  Deterministic: identical
    value traces produce identical probe sequences and results.

    Tie rule at the terminal unit interval [z, z+1]: z if f(z) == 0,
    else z+1 (whose value must then be 0 by discrete continuity).
    """
    if lo > hi:
        raise ValueError("empty index range")
    if lo == hi:
        s = lo_sign if lo_sign is not None else (hi_sign if hi_sign is not None else f(lo))
        if s == 0:
            return lo
        raise SwitchingViolation(
            "endpoint-switching", "single-index range forces a zero sign",
            index=lo, sign=s)
    lo, hi, lo_sign, hi_sign = _descend(f, lo, hi, orientation, lo_sign, hi_sign, on_step)
    if lo_sign is None:
        lo_sign = f(lo)
    if lo_sign == 0:
        return lo
    if lo_sign * orientation > 0:
        raise SwitchingViolation(
            "endpoint-switching", "lower bracket endpoint has the wrong sign",
            index=lo, sign=lo_sign, orientation=orientation)
    if hi_sign is None:
        hi_sign = f(hi)
    if hi_sign == 0:
        return hi
    if hi_sign * orientation < 0:
        raise SwitchingViolation(
            "endpoint-switching", "upper bracket endpoint has the wrong sign",
            index=hi, sign=hi_sign, orientation=orientation)
    raise ContinuityViolation(
        "delta-continuity", "adjacent indices carry opposite nonzero signs",
        interval=(lo, hi), signs=(lo_sign, hi_sign))


def bisect_bracket_1d(
    f: SignFn,
    lo: int,
    hi: int,
    *,
    orientation: int = 1,
    lo_sign: Optional[int] = None,
    hi_sign: Optional[int] = None,
    on_step=None,
) -> tuple:
    """Like :func:`bisect_root_1d` but for functions that may have no zero.

    Shrinks to a unit interval and returns (lo, hi, f(lo), f(hi)) with
    orientation*f(lo) <= 0 <= orientation*f(hi); both endpoint signs are
    resolved.  Used for outer searches whose objective is not
    continuous (only its endpoint signs matter).
    """
    if lo > hi:
        raise ValueError("empty index range")
    if lo == hi:
        s = lo_sign if lo_sign is not None else f(lo)
        if s != 0:
            raise SwitchingViolation(
                "endpoint-switching", "single-index range forces a zero sign",
                index=lo, sign=s)
        return lo, hi, s, s
    lo, hi, lo_sign, hi_sign = _descend(f, lo, hi, orientation, lo_sign, hi_sign, on_step)
    if lo_sign is None:
        lo_sign = f(lo)
    if hi_sign is None:
        hi_sign = f(hi)
    if lo_sign * orientation > 0:
        raise SwitchingViolation(
            "endpoint-switching", "lower bracket endpoint has the wrong sign",
            index=lo, sign=lo_sign, orientation=orientation)
    if hi_sign * orientation < 0:
        raise SwitchingViolation(
            "endpoint-switching", "upper bracket endpoint has the wrong sign",
            index=hi, sign=hi_sign, orientation=orientation)
    return lo, hi, lo_sign, hi_sign
