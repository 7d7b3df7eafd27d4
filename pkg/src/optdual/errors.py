"""Exception types raised across the package."""


class OptDualError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(OptDualError, ValueError):
    pass


class BadShape(OptDualError, ValueError):
    pass


class NotPositiveDefinite(OptDualError, ValueError):
    pass


class NonHermitian(OptDualError, ValueError):
    pass


class RankDeficient(OptDualError, ValueError):
    pass


class BadLattice(OptDualError, ValueError):
    pass


class DegenerateFrame(OptDualError, ValueError):
    pass


class ZeroSignal(OptDualError, ValueError):
    pass


class SingularSystem(OptDualError, ValueError):
    pass


class NonFinite(OptDualError, ArithmeticError):
    """An iterate picked up inf/nan, usually from a bad (mu, lambda) pair."""


class NoProgress(OptDualError, RuntimeError):
    pass


class NotSorted(OptDualError, ValueError):
    pass


class BadBlockSizes(OptDualError, ValueError):
    pass


class TooLarge(OptDualError, ValueError):
    """Brute-force enumeration would exceed the subset guard."""


class BadParams(OptDualError, ValueError):
    pass


class RhoTooLarge(BadParams):
    pass


class NegativeBracket(BadParams):
    pass


class ConditionFails(OptDualError, ValueError):
    pass


class ConfigError(OptDualError, ValueError):
    pass
