"""Exception hierarchy shared by all flatchains modules.

Every domain failure maps to one subclass of :class:`FlatChainError` so the
CLI can translate exceptions into machine-readable error reports without
string matching.
"""

from __future__ import annotations


class FlatChainError(Exception):
    """Base class for all domain errors raised by this package."""

    kind = "error"


class EmptyGroup(FlatChainError):
    kind = "empty_group"


class TrivialGroup(FlatChainError):
    kind = "trivial_group"


class NormAxiomViolation(FlatChainError):
    """A norm table breaks one of the axioms.

    ``axiom`` is one of ``positivity``, ``symmetry``, ``triangle``;
    ``witness`` is the element or pair exhibiting the violation.
    """

    kind = "norm_axiom_violation"

    def __init__(self, axiom, witness, message=None):
        self.axiom = axiom
        self.witness = witness
        super().__init__(message or f"norm axiom {axiom!r} violated at {witness!r}")


class CoefficientOverflow(FlatChainError):
    """A bounded-integer coefficient left the configured range.

    Signals that the model bound must be raised; never silently wraps.
    """

    kind = "coefficient_overflow"


class ZeroElement(FlatChainError):
    kind = "zero_element"


class DimensionZero(FlatChainError):
    kind = "dimension_zero"


class WindowTooSmall(FlatChainError):
    kind = "window_too_small"


class SearchSpaceExceeded(FlatChainError):
    kind = "search_space_exceeded"


class LevelFunctionNotLipschitz(FlatChainError):
    kind = "level_function_not_lipschitz"


class Infeasible(FlatChainError):
    kind = "infeasible"


class ProjectionMismatch(FlatChainError):
    kind = "projection_mismatch"


class IoFailure(FlatChainError):
    kind = "io_failure"


class InvalidInput(FlatChainError):
    kind = "invalid_input"
