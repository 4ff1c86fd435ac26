"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class NHomogError(Exception):
    """Base class for all library errors."""


class NotHermitian(NHomogError):
    pass


class NotSquare(NHomogError):
    pass


class DimensionMismatch(NHomogError):
    pass


class DomainError(NHomogError):
    """A scalar function was applied outside its domain, or an input
    carries non-finite entries."""


class NumericalFailure(NHomogError):
    """A rank decision was ambiguous, an eigensolver failed, or an
    internal cross-check that must hold mathematically was violated."""


class NotIrreducible(NHomogError):
    pass


class NotNHomogeneous(NHomogError):
    pass


class ArityMismatch(NHomogError):
    pass


class TableMismatch(NHomogError):
    pass


class IndexOutOfRange(NHomogError):
    pass


class MCBudgetTooSmall(NHomogError):
    pass


class SpaceMismatch(NHomogError):
    pass


class NotAStarHom(NHomogError):
    pass


class SamePoint(NHomogError):
    pass


class SpectraNotDisjoint(NHomogError):
    pass


class PreconditionFailed(NHomogError):
    pass


class HypothesisViolated(NHomogError):
    pass


class ParseError(NHomogError):
    pass


class SchemaError(NHomogError):
    pass
