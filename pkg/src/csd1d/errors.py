"""Exception types shared across the package."""


class DomainOverflowError(RuntimeError):
    """Support would be transported off the grid; the zero-extension
    boundary would then silently corrupt the answer."""


class ConvergenceFailureError(RuntimeError):
    """Successive-approximation loop did not reach tolerance.

    Carries the iterate-difference history so callers can report it.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history if history is not None else []


class SlabUnderflowError(RuntimeError):
    """Automatic slab shrinking hit the single-step floor."""

    def __init__(self, message, slab_start=0.0, norms=None):
        super().__init__(message)
        self.slab_start = slab_start
        self.norms = norms or {}
