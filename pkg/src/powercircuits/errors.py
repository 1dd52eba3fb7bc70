"""Exception types shared across the package."""


class PowerCircuitError(Exception):
    """Base class for all errors raised by this library."""


class InvalidBase(PowerCircuitError):
    """The base q must be an integer >= 2."""


class UnknownNode(PowerCircuitError):
    """A node id does not exist in the circuit (or was deleted)."""


class CircuitMismatch(PowerCircuitError):
    """An operation mixed markings that belong to different circuits."""


class ConsumedMarking(PowerCircuitError):
    """A marking was used after being consumed by add/mult."""


class Overflow(PowerCircuitError):
    """Evaluation would exceed the configured bit budget."""


class NotAPowerCircuit(PowerCircuitError):
    """The graph violates the power circuit condition e(L_u) >= 0."""


class NotReduced(PowerCircuitError):
    """The operation requires a reduced circuit."""


class RuleNotApplicable(PowerCircuitError):
    """A rewriting rule's side condition does not hold at the given position."""


class NotCompact(PowerCircuitError):
    """The operation requires a compact power sum / marking."""


class DuplicateValue(PowerCircuitError):
    """Node insertion would duplicate an existing node value."""


class FactorMismatch(PowerCircuitError):
    """Group elements from different factors cannot be combined directly."""


class NotInSubgroup(PowerCircuitError):
    """The element is not in the subgroup required by the operation."""


class MalformedWord(PowerCircuitError):
    """A group word contains an out-of-range index or a zero exponent."""


class ParseError(PowerCircuitError):
    """Syntactic error in a circuit file or word string."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class ValidationError(PowerCircuitError):
    """A parsed circuit file violates a structural invariant."""
