"""Exception hierarchy.

Solvers raise ``HypothesisViolation`` subclasses when the structural
assumptions they rely on are observably false for the supplied oracle;
the exception names the violated hypothesis so callers (and the CLI)
can report it without guessing.
"""
from __future__ import annotations


class GridrootsError(Exception):
    """Base class for all library errors."""


class InputError(GridrootsError, ValueError):
    """Malformed or out-of-contract input (bad grids, indices, JSON)."""


class GridTooLargeError(InputError):
    """A brute-force operation refused to run above its point cap."""


class EvaluationError(GridrootsError):
    """An oracle produced an unusable value (non-finite, wrong arity)."""


class HypothesisViolation(GridrootsError):
    """A structural hypothesis required by a solver failed on this oracle."""

    def __init__(self, hypothesis: str, message: str, **details):
        self.hypothesis = hypothesis
        self.details = details
        super().__init__(f"{hypothesis}: {message}" + (f" {details}" if details else ""))


class SwitchingViolation(HypothesisViolation):
    """A sign-switching condition failed at a boundary face or endpoint."""


class ContinuityViolation(HypothesisViolation):
    """Adjacent grid points carry opposite nonzero signs."""


class ReductionViolation(HypothesisViolation):
    """A claim guaranteed by a reduction failed; either the input broke the
    reduction's preconditions or the implementation is wrong."""
