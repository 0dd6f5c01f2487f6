"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceError(RuntimeError):
    """A configured size or work cap would be exceeded.

    ``bound`` carries the best partial result when the caller can use one
    (e.g. a girth lower bound from an interrupted BFS).
    """

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class NonConvergenceError(RuntimeError):
    """Power iteration hit ``max_iter`` before the stopping rule fired."""

    def __init__(self, message, estimate, residual, iterations):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations
