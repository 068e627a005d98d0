"""Exception types shared across the package."""


class StructuralError(ValueError):
    """A polynomial lacks a structural property an operation requires
    (homogeneity, translation invariance, balanced variable counts, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative procedure hit its iteration cap.

    ``best`` carries whatever partial result the procedure had, and
    ``residual`` the error it achieved.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class PoleError(ZeroDivisionError):
    """A Moebius map was evaluated at (or numerically at) its pole."""


class GraphParseError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
