"""ordcalc: a symbolic calculator for four ordinal notation systems.

Systems: `buchholz` (stratified indexed cardinals), `poly` (one polymorphic
cardinal with de Bruijn-style levels), `xi` (a function-sorted polymorphic
cardinal), and `mixed` (a two-tier cardinal ladder with the function-sorted
cardinal caught in the polymorphic loop).

The text grammar lives in `ordcalc.syntax`; per-system operations in modules
of the same names; enumeration and verification in `ordcalc.harness`.
"""

from .core import Outcome, Term, TermError, PreconditionError, ShiftError, InvariantError
from .syntax import ParseError, parse, render

__all__ = [
    "Outcome",
    "Term",
    "TermError",
    "PreconditionError",
    "ShiftError",
    "InvariantError",
    "ParseError",
    "parse",
    "render",
]
