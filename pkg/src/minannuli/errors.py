"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """Input outside the domain where an operation is defined."""


class NumericsError(RuntimeError):
    """A numerical procedure failed to reach its requested accuracy.

    ``estimate`` carries the achieved error estimate or residual when known.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class NonConvergence(NumericsError):
    """Newton iteration stagnated; ``history`` holds the residual norms."""

    def __init__(self, message, history=()):
        super().__init__(message, estimate=history[-1] if history else None)
        self.history = list(history)


class SingularLinearization(NumericsError):
    """The linearized operator has a near-kernel and cannot be inverted."""

    def __init__(self, message, singular_values=()):
        super().__init__(message)
        self.singular_values = list(singular_values)


class IndeterminateError(NumericsError):
    """Refinement data does not decide between zero and nonzero."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class NoWitness(NumericsError):
    """No certified witness was found within the configured search caps."""
