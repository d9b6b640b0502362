"""Weight distributions of a family of cyclic codes over odd prime fields,
built from the quadratic forms Tr(gamma x^(p^k+1) + delta x^(p^3k+1))."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import BudgetError, ParameterError, VerificationError, WdistError  # noqa: E402
from .field import CodeParams, FieldCtx, make_field, validate_params  # noqa: E402

__all__ = [
    "__version__",
    "BudgetError",
    "CodeParams",
    "FieldCtx",
    "ParameterError",
    "VerificationError",
    "WdistError",
    "make_field",
    "validate_params",
]
