"""Exception hierarchy shared by all bscc modules."""


class BSCCError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(BSCCError, ValueError):
    """Argument fails a documented precondition."""


class InvalidNodes(InvalidInput):
    """Nodes are not strictly increasing, or contain duplicates."""


class TooFewNodes(InvalidInput):
    """Not enough distinct nodes for the requested degree."""


class InvalidCount(InvalidInput):
    pass


class InvalidRange(InvalidInput):
    pass


class DomainError(InvalidInput):
    """Query point lies outside the knot span."""


class DegreeError(InvalidInput):
    pass


class ShapeError(InvalidInput):
    pass


class MissingInput(InvalidInput):
    """An optional quantity required by the chosen bound was not supplied."""


class InvalidStragglerCount(InvalidInput):
    pass


class SingularMatrix(BSCCError, ArithmeticError):
    pass


class ReconstructionInfeasible(BSCCError):
    """Fewer than four surviving workers: no cubic fit is possible."""


class ExtrapolationError(BSCCError):
    """An encoding point lies outside the span of the surviving evaluation points."""


class NumericalOverflow(BSCCError, ArithmeticError):
    pass


class DegenerateReference(BSCCError, ZeroDivisionError):
    """Reference output is identically zero, so a relative error is undefined."""


class IoError(BSCCError, OSError):
    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
