"""Exception types raised across the package."""


class StructNegError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(StructNegError, ValueError):
    pass


class NoConvergence(StructNegError, ArithmeticError):
    pass


class IndexOutOfRange(StructNegError, IndexError):
    pass


class ParameterOutOfRange(StructNegError, ValueError):
    pass


class NotNormalized(StructNegError, ValueError):
    pass


class DimensionMismatch(StructNegError, ValueError):
    pass


class StateValidationError(StructNegError, ValueError):
    """A matrix failed one of the density-operator invariants.

    The name of the failed invariant (``"shape"``, ``"finite"``,
    ``"hermitian"``, ``"trace"`` or ``"psd"``) is kept on ``invariant`` and
    leads the message.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)
