class ShofaError(Exception):
    pass


class InvalidArgument(ShofaError, ValueError):
    pass


class InfeasibleEnumeration(ShofaError):
    """Raised when an exhaustive search would exceed its combinatorial budget."""


class EnsembleTooSmall(ShofaError):
    """Not enough distinct coprime vectors for the requested ensemble."""


class UndefinedRatio(ShofaError, ArithmeticError):
    pass
