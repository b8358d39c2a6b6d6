"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 2, budget
overruns exit 3 and solver failures exit 4.
"""


class FodistError(Exception):
    kind = "error"


class ValidationError(FodistError, ValueError):
    kind = "validation"


class InvalidSelectionError(ValidationError):
    kind = "invalid_selection"


class SizeLimitError(ValidationError):
    kind = "size_limit"


class DimensionMismatchError(ValidationError):
    kind = "dimension_mismatch"


class EmptyFamilyError(ValidationError):
    kind = "empty_family"


class NoAsymmetricGraphError(ValidationError):
    kind = "no_asymmetric_graph"


class DomainError(ValidationError):
    kind = "domain"


class FormulaError(ValidationError):
    kind = "formula"


class ParseError(FormulaError):
    kind = "syntax"

    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class FreeVariableError(FormulaError):
    kind = "free_variable"


class BudgetExceededError(FodistError):
    kind = "budget_exceeded"

    def __init__(self, message, cost=None, budget=None):
        super().__init__(message)
        self.cost = cost
        self.budget = budget


class SolverError(FodistError):
    kind = "solver"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
