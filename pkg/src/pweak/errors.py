"""Exception types shared across the package."""


class PweakError(Exception):
    """Base class for all package errors."""


class UnsupportedExponentPair(PweakError):
    """Crossings requested for two arcs with distinct positive exponents."""


class PreconditionViolated(PweakError):
    pass


class ZeroAtCenter(PweakError):
    """The previous level vanishes at the requested bump center."""


class InvalidExponent(PweakError, ValueError):
    pass


class DegenerateInterval(PweakError, ValueError):
    pass


class EmptyFamily(PweakError, ValueError):
    pass


class NotConverged(PweakError):
    """Solver stopped before reaching the duality-gap tolerance.

    The best iterate is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NotDifferentiable(PweakError):
    pass
