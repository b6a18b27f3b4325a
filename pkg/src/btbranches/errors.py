"""Exception types shared across the package."""


class PrecisionError(ArithmeticError):
    """Not enough p-adic digits to resolve a valuation or a square class."""


class PreconditionError(ValueError):
    """An input violates the documented precondition of an operation."""


class DegenerateError(PreconditionError):
    """The relation lambda^2 = alpha*beta holds; the pair does not span a quaternion algebra."""


class NonexistenceError(PreconditionError):
    """No optimal embedding exists for the requested parameters."""


class NoWitnessError(RuntimeError):
    """The bounded witness search found nothing; enlarge the bound."""
