"""Exception types raised by the solver library."""


class LevySpecError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(LevySpecError, ValueError):
    """A scalar argument violates its precondition (sign, range, ...)."""


class IncompatibleGridsError(LevySpecError, ValueError):
    """Two grid functions do not live on the same lattice."""


class SingularPointError(LevySpecError, ValueError):
    """A jump density was evaluated at its singular point z = 0."""


class DegenerateVectorError(LevySpecError, ValueError):
    """Normalization of a (numerically) zero vector was requested."""


class DomainTooSmallError(LevySpecError, ValueError):
    """The lattice does not cover the support of the trial functions."""


class RankDeficientError(LevySpecError, RuntimeError):
    """Orthogonalization hit a numerically dependent vector.

    ``index`` is the position of the offending vector in the input set.
    """

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"vector {index} is numerically dependent on its predecessors")


class SpectralBreakdownError(LevySpecError, RuntimeError):
    """A shift expectation value <phi|S(h)|phi> became non-positive.

    Signals that the time step h is too large for the operator content of
    the state, or that the state has not separated from high modes yet.
    ``state`` is the 1-based state label, ``iteration`` the step at which
    the breakdown occurred (0 when raised outside the iteration loop).
    """

    def __init__(self, state: int, iteration: int = 0, value: float = 0.0):
        self.state = state
        self.iteration = iteration
        self.value = value
        super().__init__(
            f"non-positive shift expectation {value:.3e} for state {state}"
            + (f" at iteration {iteration}" if iteration else "")
        )


class MatrixTooLargeError(LevySpecError, ValueError):
    """Dense assembly was requested beyond the dimension guard."""


class InvalidMatrixError(LevySpecError, ValueError):
    """A dense operator is asymmetric beyond tolerance."""
