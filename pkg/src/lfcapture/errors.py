"""Exception types shared across the toolkit."""


class InvariantViolation(ValueError):
    """A domain-type invariant does not hold (bad rotation, negative density, ...)."""


class DimensionMismatchError(ValueError):
    """Arrays that must share a resolution do not."""


class EmptySessionError(ValueError):
    """An operation needs at least one registered volume and none exist."""


class ScaleUndefinedError(ValueError):
    """Metric-scale estimation had zero valid pixels to work with."""


class InvalidScaleError(ValueError):
    """A scale factor must be strictly positive."""


class LoadError(RuntimeError):
    """Persisted data is malformed; the message names the violated invariant."""


class LifecycleError(RuntimeError):
    """A session command is illegal in the session's current state."""
