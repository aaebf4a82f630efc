"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OutOfRangeError(DomainError):
    """An argument is valid mathematically but outside the supported range."""


class ConvergenceError(ArithmeticError):
    """A series or iteration failed to converge within its budget."""


class BracketError(RuntimeError):
    """A root scan found no sign change where one was expected."""


class BasisDegeneracyError(RuntimeError):
    """The Ritz mass matrix is numerically singular."""


class ZeroMeanGroundState(RuntimeError):
    """The ground state integrates to zero, so no translation is needed or defined."""
