"""Exception types shared across the package.

Every error raised on a user-reachable path derives from AnchorSchedError so
callers (and the CLI) can distinguish domain failures from programming bugs.
"""


class AnchorSchedError(Exception):
    """Base class for all package-specific errors."""


class CycleDetected(AnchorSchedError):
    """The arc set contains a directed cycle, so no schedule exists."""


class DeadlineInfeasible(AnchorSchedError):
    """The deadline is below the minimum makespan of any schedule."""


class NotASchedule(AnchorSchedError):
    """A start-time vector violates x_s = 0 or a precedence constraint."""


class BudgetOutOfRange(AnchorSchedError):
    """A deviation budget lies outside the admissible range 1..n (per group)."""


class EmptyScenarioList(AnchorSchedError):
    """A scenario uncertainty set needs at least one scenario."""


class EnumerationTooLarge(AnchorSchedError):
    """Vertex / subset enumeration was requested beyond the guard size."""


class InstanceTooLarge(AnchorSchedError):
    """Brute-force optimization was requested beyond the guard size."""


class InfeasibleAnchoredSet(AnchorSchedError):
    """The requested job set cannot be anchored under the deadline."""


class UnsupportedUncertainty(AnchorSchedError):
    """The operation does not apply to this uncertainty-set type."""


class UnsupportedInstance(AnchorSchedError):
    """The instance violates a precondition of a special-case solver."""


class NotCritical(AnchorSchedError):
    """The reduction requires a critical nominal graph."""


class NonIntegralVertex(AnchorSchedError):
    """An LP vertex expected to be integral came back fractional."""


class MissingCompanionDeviation(AnchorSchedError):
    """Zero-processing-time deviations need the companion instance's values."""


class NumericalFailure(AnchorSchedError):
    """The simplex engine exhausted its pivot budget without converging."""


class ParseError(AnchorSchedError):
    """An instance / solution / label string failed validation.

    The message carries the offending field or line so users can fix the input.
    """
