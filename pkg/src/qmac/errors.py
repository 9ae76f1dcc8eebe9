"""Exception hierarchy shared by all qmac modules."""


class QmacError(Exception):
    """Base class for library errors (mapped to CLI exit code 1)."""


class ValidationError(QmacError, ValueError):
    """Input violates a structural invariant (shape, normalisation, hermiticity...)."""


class DomainError(QmacError, ValueError):
    """Argument outside the domain where the operation is defined."""


class InfeasibleError(DomainError):
    """Parameters violate an energy or power constraint."""


class SizeError(QmacError, ValueError):
    """Problem exceeds the dense/exhaustive size caps."""


class QubitIndexError(QmacError, IndexError):
    """Qubit or sender index out of range."""
