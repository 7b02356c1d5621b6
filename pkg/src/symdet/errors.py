"""Exception types shared across the package."""

from __future__ import annotations


class SymdetError(Exception):
    """Base class for all package errors."""


class ParseError(SymdetError):
    """Raised on malformed polynomial/matrix text; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class RingMismatchError(SymdetError):
    """Operands live in different rings."""


class NotDivisibleError(SymdetError):
    """Exact division failed; ``remainder`` is the nonzero witness."""

    def __init__(self, remainder):
        super().__init__(f"not divisible, remainder {remainder}")
        self.remainder = remainder


class MissingAssignmentError(SymdetError):
    """A substitution omitted a variable that occurs in the polynomial."""


class NonHomogeneousError(SymdetError):
    """An operation required homogeneous input."""


class BudgetExceededError(SymdetError):
    """A configured resource cap (steps, degree, wall clock) was hit."""

    def __init__(self, what: str):
        super().__init__(f"budget exceeded: {what}")
        self.what = what


class MembershipError(SymdetError):
    """Lift failed: the element is not in the requested ideal power."""

    def __init__(self, remainder):
        super().__init__(f"membership failed, remainder {remainder}")
        self.remainder = remainder


class GenericityError(SymdetError):
    """A random matrix failed its genericity certificate past the retry cap."""


class ShapeError(SymdetError):
    """Matrix shape does not fit the requested construction."""


class InversionFailure(SymdetError):
    """The inversion-factor pipeline hit an inconsistency.

    ``reason`` is a short machine-readable tag such as ``"codim"`` or
    ``"cross-check"``; failures of this kind flag a non-general matrix.
    """

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"inversion data build failed [{reason}] {detail}".rstrip())
        self.reason = reason
        self.detail = detail
