"""Exception hierarchy shared by all modules."""


class BorweinError(Exception):
    """Base class for package errors."""


class DomainError(BorweinError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ContractError(BorweinError, ValueError):
    """A caller broke an operation's precondition."""


class InvalidSpecError(BorweinError, ValueError):
    """A product description or parameter set cannot be evaluated."""


class UnsupportedCaseError(BorweinError, ValueError):
    """The case is recognised but deliberately not handled."""


class PreconditionError(BorweinError, ValueError):
    """Inputs to an analytic lemma violate its hypotheses."""


class SingularityError(BorweinError, ZeroDivisionError):
    """Evaluation hit a pole."""


class ResourceError(BorweinError, MemoryError):
    """A computation would exceed the configured memory budget."""
