"""Exception hierarchy shared by every module."""


class SymplectaError(ValueError):
    pass


# symplectic core
class OddDimension(SymplectaError):
    pass


class NotAntisymmetric(SymplectaError):
    pass


class Degenerate(SymplectaError):
    pass


class NotPositiveDefinite(SymplectaError):
    pass


class DimensionMismatch(SymplectaError):
    pass


class NumericalFailure(SymplectaError):
    pass


class NegativeExponent(SymplectaError):
    pass


class SingularResult(SymplectaError):
    """A fractional power of |R| was requested on a (numerically) non-injective |R|."""


class NonPrimaryInput(SymplectaError):
    pass


class DominationFails(SymplectaError):
    pass


# adjoint continuity
class InvalidPair(SymplectaError):
    pass


class SingularOperator(SymplectaError):
    pass


# counterexamples
class GridTooCoarse(SymplectaError):
    pass


class BumpLeavesDomain(SymplectaError):
    pass


# lattice
class NonPositivePotential(SymplectaError):
    pass


class PotentialUndefined(SymplectaError):
    pass


class EmptyRegion(SymplectaError):
    pass


class FullRegion(SymplectaError):
    pass


# quasifree states
class StepOutOfRange(SymplectaError):
    pass


class NotPure(SymplectaError):
    pass


# configuration / reporting
class ConfigError(SymplectaError):
    pass


class ParseError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class InvalidValue(ConfigError):
    pass


class UnsupportedFormat(SymplectaError):
    pass
