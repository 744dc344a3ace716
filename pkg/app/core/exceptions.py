"""Error types raised by the simulator.

All of them derive from ``ValueError`` so callers that already guard input
validation with ``except ValueError`` keep working. A failed eavesdropping
check is not an error: it is reported as an ``Aborted`` outcome.
"""


class MQPCError(ValueError):
    """Base class for simulator errors."""


class InvalidDimensionError(MQPCError):
    """Dimension outside the supported range."""


class InvalidDigitError(MQPCError):
    """Digit outside ``[0, d)``."""


class NormalizationError(MQPCError):
    """State vector does not have unit norm."""


class InvalidAttackError(MQPCError):
    """Eavesdropper model is malformed (e.g. a non-unitary attack operator)."""


class ProtocolDesyncError(MQPCError):
    """Messages or qudits arrived out of step with the protocol."""


class OutOfDomainError(MQPCError):
    """A private input lies outside its admissible range."""


class NoClosedFormError(MQPCError):
    """No closed-form detection probability exists for the model."""


class IncompleteRunError(MQPCError):
    """The transcript belongs to a run that did not complete."""


class EnumerationBudgetError(MQPCError):
    """A brute-force enumeration would exceed the configured budget."""
