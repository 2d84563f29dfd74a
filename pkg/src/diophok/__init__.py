"""Exact algebraic number theory tools for diophantine definitions of rings of integers."""

import sys

from .errors import DiophokError, DomainError, ResourceBudgetExceeded

__version__ = "0.1.0"

# exact coordinates routinely exceed the default 4300-digit str() limit;
# the curve code enforces its own digit budget instead
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

__all__ = ["DiophokError", "DomainError", "ResourceBudgetExceeded", "__version__"]
