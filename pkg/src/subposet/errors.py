"""Exception hierarchy shared by the library and the CLI."""


class DomainError(Exception):
    """Base class for errors the CLI reports with exit code 1."""

    kind = "domain_error"


class FamilyFormatError(DomainError, ValueError):
    kind = "family_format"


class PosetSpecError(DomainError, ValueError):
    kind = "poset_spec"


class ParameterError(DomainError, ValueError):
    kind = "parameter"


class PreconditionError(DomainError, ValueError):
    kind = "precondition"


class CapExceeded(DomainError):
    kind = "cap_exceeded"


class BudgetExceeded(DomainError):
    """Raised when a copy search visits more nodes than allowed.

    ``partial`` holds the number of distinct copies seen before aborting;
    it is a lower bound, never the answer.
    """

    kind = "budget_exceeded"

    def __init__(self, budget, partial):
        super().__init__(f"search budget of {budget} nodes exceeded (partial count {partial})")
        self.budget = budget
        self.partial = partial
