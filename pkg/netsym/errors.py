# ================================================
# File: netsym/errors.py
# ================================================
from typing import Any, Dict, Optional

from .config import EXIT_CODES, HTTP_STATUS


class NetsymError(Exception):
    """Base error. Carries a stable code and a details payload for reports."""

    code = "netsym_error"
    category = "computation"

    def __init__(self, message: str, details: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.category]

    @property
    def status_code(self) -> int:
        return HTTP_STATUS[self.category]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": self.message,
            "code": self.code,
            "details": self.details if self.details is not None else "No details",
            "status_code": self.status_code,
        }


# --- Validation errors (exit 2 / HTTP 400) ---

class InvalidNetwork(NetsymError):
    code = "invalid_network"
    category = "validation"


class BoundExceeded(NetsymError):
    code = "bound_exceeded"
    category = "validation"


class DslSyntaxError(NetsymError):
    code = "syntax_error"
    category = "validation"

    def __init__(self, message: str, line: int, column: int, text: str = ""):
        super().__init__(f"{message} (line {line}, column {column})",
                         {"line": line, "column": column, "text": text})
        self.line = line
        self.column = column


class UnknownVariable(NetsymError):
    code = "unknown_variable"
    category = "validation"


class InvalidConfig(NetsymError):
    code = "invalid_config"
    category = "validation"


# --- Computation errors (exit 3 / HTTP 422) ---

class NotAMonoid(NetsymError):
    code = "not_a_monoid"


class SplitFailure(NetsymError):
    code = "split_failure"


class NotIndecomposable(NetsymError):
    code = "not_indecomposable"


class NonFinite(NetsymError):
    code = "non_finite"


class IllConditioned(NetsymError):
    code = "ill_conditioned"


class NotEquilibrium(NetsymError):
    code = "not_equilibrium"


class NotSymmetricPoint(NetsymError):
    code = "not_symmetric_point"


class NewtonDivergence(NetsymError):
    code = "newton_divergence"


class NoConvergence(NetsymError):
    code = "no_convergence"


class StepUnderflow(NetsymError):
    code = "step_underflow"
