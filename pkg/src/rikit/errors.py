"""Exception hierarchy for rikit."""


class RiKitError(Exception):
    """Base class for every error raised by this package."""


class NotQuasiConcave(RiKitError):
    """A monotonicity requirement failed on the sampled grid.

    ``pair`` holds the offending consecutive nodes when known.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NonPositive(NotQuasiConcave):
    pass


class GridTooCoarse(RiKitError):
    pass


class GridExhausted(RiKitError):
    pass


class Condition3Violated(RiKitError):
    pass


class DivergentIntegral(RiKitError):
    pass


class UnboundedSupport(RiKitError):
    pass


class NotInDomain(RiKitError):
    pass


class NonzeroLinearPart(RiKitError):
    pass


class PostconditionFailed(RiKitError):
    pass


class DimensionMismatch(RiKitError):
    pass


class IterationLimit(RiKitError):
    pass


class Infeasible(RiKitError):
    pass


class UnknownScenario(RiKitError):
    pass


class ParseError(RiKitError, SyntaxError):
    """Malformed function expression; ``position`` is a 0-based offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifier(ParseError):
    pass
