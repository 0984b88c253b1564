"""Exception types raised by the numerical engine."""


class DreadlockError(Exception):
    """Base class for all engine errors."""


class PreconditionViolated(DreadlockError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class BranchAmbiguity(DreadlockError, ValueError):
    """A point lies within tolerance of a branch cut."""


class NormalizationError(DreadlockError, RuntimeError):
    """No disc radius satisfying the expansion normalization was found."""


class NotComparable(DreadlockError, ValueError):
    """Two points cannot be lifted into one logarithmic window."""


class OrbitEntersDisc(DreadlockError):
    """A forward orbit left the base domain before the requested horizon."""

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"orbit leaves W0 at step {step}")


class PullbackError(DreadlockError):
    """A branch error raised at a given depth of an inverse-branch composition."""

    def __init__(self, depth, cause, sample=None):
        self.depth = depth
        self.sample = sample
        self.cause = cause
        where = f"depth {depth}" if sample is None else f"depth {depth}, sample {sample}"
        super().__init__(f"{type(cause).__name__} at {where}: {cause}")


class ArcLeavesW0(DreadlockError, ValueError):
    """The straight base arc of a ray trace is not contained in W0."""


class NoConvergence(DreadlockError, ArithmeticError):
    """Newton iteration failed to reach the residual tolerance."""


class DerivativeBlowup(DreadlockError, ArithmeticError):
    """An orbit left the overflow-safe region during a derivative computation."""


class NotExpanding(DreadlockError, ValueError):
    """The candidate hyperbolic set is not expanding for the requested iterate."""


class EmptyLevel(DreadlockError):
    """A level of the candidate tree has no surviving addresses."""

    def __init__(self, depth):
        self.depth = depth
        super().__init__(f"no surviving candidate at depth {depth}")


class ResolutionCapExceeded(DreadlockError, ValueError):
    """Requested raster is larger than the configured cap."""
