"""Exception hierarchy shared by all numeric modules."""


class ErdosSumError(Exception):
    """Base class for library errors."""


class DomainError(ErdosSumError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested too close to the pole at s = 1."""


class CapacityError(ErdosSumError):
    """Requested order exceeds what an evaluator or table was built for."""


class CancellationError(ErdosSumError, ArithmeticError):
    """A quantity known to be positive came out non-positive beyond its error bar."""


class PrecisionNotAchieved(ErdosSumError):
    """A certified bracket is wider than the requested accuracy."""


class ConsistencyError(ErdosSumError):
    """Two independent computations of the same quantity disagree."""


class MemoryBudgetError(ErdosSumError):
    """A sieve segment would exceed the configured memory budget."""
