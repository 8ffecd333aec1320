"""Exception hierarchy shared across the package."""


class MotunError(Exception):
    """Base class for all package errors."""


class NonFiniteEvaluation(MotunError):
    """An evaluator returned NaN or Inf (usually a domain violation)."""


class SubproblemFailure(MotunError):
    """The simplex QP solver ran out of iterations before meeting its tolerance."""


class PoleViolation(MotunError):
    """A tunneling function was evaluated too close to its pole."""


class PerturbationFailure(MotunError):
    """No admissible restart point could be drawn around the pole."""


class UnknownProblem(MotunError, KeyError):
    """Requested problem name is not registered."""

    __str__ = Exception.__str__  # KeyError would quote the message


class UnsupportedProblem(MotunError):
    """The problem lacks a feature the operation requires (e.g. a box)."""


class DimensionMismatch(MotunError, ValueError):
    """Vectors of incompatible length were combined."""
