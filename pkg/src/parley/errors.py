"""Exception types shared across the package."""


class NegotiationError(Exception):
    """Base class for all parley errors."""


class EvaluationError(NegotiationError):
    """A utility or gradient was requested outside its domain."""


class ShapeError(NegotiationError):
    """An operation needs the perfect-competition coefficient shape."""


class DegenerateGradientError(NegotiationError):
    """A zero-norm gradient where a direction is required."""


class RecoveryError(NegotiationError):
    """Opponent-parameter recovery is unresolvable at this point."""


class ScenarioError(NegotiationError):
    """A scenario file or preset name could not be parsed or validated."""


class NonConvergenceError(NegotiationError):
    """An iteration hit its round budget before converging."""
