"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to:
2 for bad parameters or input, 3 for budget limits, 1 for a failed check.
"""

from __future__ import annotations


class WdistError(Exception):
    exit_code = 1


class ParameterError(WdistError, ValueError):
    exit_code = 2


class BudgetError(WdistError):
    exit_code = 3


class VerificationError(WdistError):
    exit_code = 1


# parameters / inputs
class NotPrime(ParameterError):
    pass


class EvenCharacteristic(ParameterError):
    pass


class NTooSmall(ParameterError):
    pass


class EvenS(ParameterError):
    pass


class ReduciblePolynomial(ParameterError):
    pass


class NotPrimitive(ParameterError):
    pass


class NotADivisor(ParameterError):
    pass


class InvalidForm(ParameterError):
    pass


class DivisionByZero(WdistError, ZeroDivisionError):
    exit_code = 2


# budgets
class TableLimitExceeded(BudgetError):
    pass


class MemoryCapExceeded(BudgetError):
    pass


class BudgetExceeded(BudgetError):
    pass


# internal consistency; these flag a bug or a violated theorem
class NonDivisibleKernel(VerificationError):
    pass


class ClassificationMismatch(VerificationError):
    pass


class UnclassifiableCounts(VerificationError):
    pass


class NonRationalNorm(VerificationError):
    pass


class NonIntegralCount(VerificationError):
    pass


class NonIntegralFrequency(VerificationError):
    pass


class NegativeFrequency(VerificationError):
    pass


class MomentMismatch(VerificationError):
    pass


class DistributionMismatch(VerificationError):
    pass
