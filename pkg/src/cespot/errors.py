"""Exception hierarchy shared by every module."""


class CesError(Exception):
    """Base class for all errors raised by this package."""


class ParameterPoleError(CesError, ValueError):
    """A special function was requested at a pole of its parameters."""


class ConvergenceError(CesError, ArithmeticError):
    """A series did not reach the requested tolerance within its term budget."""


class DivergenceError(CesError, ArithmeticError):
    """The requested value is infinite (e.g. 2F1 at z=1 with c-a-b <= 0)."""


class SingularityError(CesError, ValueError):
    """A sampled field is not finite at some interior position."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class GridMismatchError(CesError, ValueError):
    """Two fields that must share a grid do not."""


class BrokenSusyError(CesError, ValueError):
    """A zero mode was requested for a superpotential without one."""


class ClassificationError(CesError, RuntimeError):
    """Normalizability tests could not decide the SUSY type."""


class InadmissibleError(CesError, ValueError):
    """Deformation parameters violate an admissibility condition."""

    def __init__(self, message, violated=()):
        super().__init__(message)
        self.violated = list(violated)


class BoundStateError(CesError, IndexError):
    """A level index beyond the number of bound states was requested."""
