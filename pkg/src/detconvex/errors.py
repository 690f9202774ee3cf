"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Matrix shapes or dimensions are incompatible with the operation."""


class ParameterError(ValueError):
    """A parameter violates a documented precondition."""


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain (s <= 0, ln/sqrt
    of a non-positive argument, division by zero, 0 raised to a negative
    power)."""


class NonFiniteError(ArithmeticError):
    """Evaluation produced an overflow, NaN or infinity."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap before converging."""


class NotPositiveDefiniteError(ValueError):
    """A matrix required to be positive definite is not."""


class DegenerateDirectionError(RuntimeError):
    """No admissible finite-difference step could be found for a direction."""


class ParseError(ValueError):
    """Syntax error in a function expression.

    ``offset`` is the byte offset into the source text where the error was
    detected.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    """An identifier other than ``s`` / ``ln`` / ``exp`` / ``sqrt``."""
