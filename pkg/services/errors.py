"""
Errors - exception hierarchy shared by every service
Each error maps onto one CLI exit code
"""

import time
from typing import Any, Dict, Optional


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_BUDGET = 3


class DavenportError(Exception):
    """Custom exception for all lab errors"""

    exit_code = EXIT_CHECK_FAILED

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context = dict(context or {})
        self.timestamp = time.time()


class InvalidInputError(DavenportError):
    """Custom exception for arguments outside an operation's domain"""

    exit_code = EXIT_INVALID_INPUT


class NonUnitError(InvalidInputError):
    """Custom exception for a residue symbol requested on a non-unit"""

    def __init__(self, value: int, modulus: int):
        super().__init__(f"{value} is not a unit modulo {modulus}",
                         {'value': value, 'modulus': modulus})
        self.value = value
        self.modulus = modulus


class WeightSpecError(InvalidInputError):
    """Custom exception for weight spec strings that do not parse"""

    def __init__(self, spec: str, reason: str):
        super().__init__(f"Invalid weight spec '{spec}': {reason}", {'spec': spec})
        self.spec = spec


class BudgetExceededError(DavenportError):
    """Custom exception for searches that ran out of nodes, time or a size guard"""

    exit_code = EXIT_BUDGET

    def __init__(self, message: str, partial: Any = None, context: Optional[Dict[str, Any]] = None):
        super().__init__(message, context)
        self.partial = partial


class InvariantBreachError(DavenportError):
    """Custom exception for internal invariant violations (a bug, never user input)"""

    exit_code = EXIT_CHECK_FAILED
