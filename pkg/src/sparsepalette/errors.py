"""Exception types shared across the package."""


class MalformedInputError(ValueError):
    """Input graph or file violates the format contract."""


class ParameterError(ValueError):
    """A parameter is outside its supported range."""


class BudgetError(RuntimeError):
    """An exhaustive operation was asked to run on too large an instance."""


class PreconditionError(ValueError):
    """A pipeline precondition (e.g. triangle-freeness) does not hold."""
