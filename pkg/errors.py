"""
Exception hierarchy
Иерархия исключений

Library code raises these; the command line maps them to exit codes.
"""

from typing import Optional, Sequence


class ChartkitError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 2


class ChartFormatError(ChartkitError):
    """Malformed file or structurally broken map (opposite / rotation)"""


class ChartValidationError(ChartkitError):
    """A valid chart was required but the axioms fail"""

    exit_code = 1

    def __init__(self, message: str, violations: Optional[Sequence] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class MoveNotApplicable(ChartkitError):
    """The move instance does not satisfy its precondition"""

    exit_code = 1

    def __init__(self, message: str, check: str = ''):
        super().__init__(message)
        self.check = check


class ContractViolation(ChartkitError):
    """A move produced an invalid chart or broke its measure contract"""

    exit_code = 1


class SequenceAborted(ChartkitError):
    """A step of a move sequence could not be applied"""

    exit_code = 1

    def __init__(self, message: str, index: int, cause: Optional[Exception] = None):
        super().__init__(message)
        self.index = index
        self.cause = cause


class DomainPreconditionError(ChartkitError):
    """The domain boundary meets a label outside {k-1, k, k+1}"""

    exit_code = 1

    def __init__(self, message: str, label: int):
        super().__init__(message)
        self.label = label


class BudgetError(ChartkitError):
    """Non-positive search budget or enumeration above the limit"""


class ScenarioError(ChartkitError):
    """A scenario selector cannot be resolved against its chart"""
