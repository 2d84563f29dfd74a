"""Exception hierarchy.

Every error raised on purpose by the package derives from ``DiophokError``.
The CLI maps ``DomainError`` to exit code 1 and ``ResourceBudgetExceeded``
to exit code 3.
"""


class DiophokError(Exception):
    pass


class DomainError(DiophokError, ValueError):
    """A mathematical precondition was violated."""


class ReduciblePolynomialError(DomainError):
    pass


class BasisError(DomainError):
    """A supplied or looked-up integral basis failed verification."""


class UnknownFieldError(DomainError):
    pass


class FieldMismatchError(DomainError):
    pass


class ZeroIdealError(DomainError):
    pass


class NotCoprimeError(DomainError):
    pass


class UnsupportedPrimeError(DomainError):
    """Kummer-Dedekind cannot be applied at this rational prime."""

    def __init__(self, p, msg=None):
        self.p = p
        super().__init__(msg or f"unsupported prime {p}: divides the index of every tried order")


class BadReductionError(DomainError):
    pass


class NotGaloisError(DomainError):
    pass


class ResourceBudgetExceeded(DiophokError):
    """A configured size or search budget ran out before an answer was certified."""
