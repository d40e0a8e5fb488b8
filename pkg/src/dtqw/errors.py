"""Exception hierarchy shared by all dtqw modules."""


class DTQWError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(DTQWError, ValueError):
    """An argument violates an operation's precondition."""


class DomainError(DTQWError, ArithmeticError):
    """A quantity is requested where it is mathematically undefined."""


class NumericalDomainError(DomainError):
    """A closed-form right-hand side left its admissible range (an implementation bug)."""


class GaplessPointError(DomainError):
    """The quasi-energy gap closes where a band quantity is required."""


class ChiralSymmetryError(DomainError):
    """No common axis orthogonal to the Bloch-vector loop was found."""


class DivisionDomainError(DomainError):
    """A closed-form ratio has a vanishing denominator."""


class ResolutionExceededError(DomainError):
    """The requested state needs more modes than the modulator can resolve."""


class AliasingError(DomainError):
    """The diffraction-order window overlaps a neighbouring order."""


class ScheduleIncompleteError(DTQWError, KeyError):
    """A rotation schedule does not cover every occupied site."""


class EmptySuperpositionError(DomainError):
    """No power reached the filtered diffraction order."""


class ConvergenceError(DTQWError, RuntimeError):
    """An iterative refinement did not reach its tolerance."""
