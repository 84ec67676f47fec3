"""Exception hierarchy shared by every module."""


class QhofaError(Exception):
    """Base class for all library errors."""


class DimensionError(QhofaError, ValueError):
    """Operands live on different (d, n) systems or have the wrong shape."""


class DomainError(QhofaError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class EnumerationTooLarge(QhofaError):
    """An exact enumeration would exceed the configured point cap."""

    def __init__(self, needed, cap, hint=None):
        self.needed = needed
        self.cap = cap
        msg = f"exact enumeration needs {needed} points, above the cap of {cap}"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class CapabilityError(QhofaError):
    """The request is well formed but not supported by this library."""


class PreconditionError(QhofaError, ValueError):
    """An input violates a documented precondition (e.g. purity, unitarity)."""


class SpecError(QhofaError, ValueError):
    """A gate or function specification is inconsistent with its parameters."""


class DegenerateInput(QhofaError, ValueError):
    """An input is degenerate for the requested operation (e.g. a zero reference)."""
