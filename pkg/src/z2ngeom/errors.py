"""Exception hierarchy shared by all modules."""


class Z2nError(Exception):
    """Base class for every error raised by the kernel."""


class SignatureError(Z2nError):
    """Lengths, generator counts or ambient n do not match."""


class TruncationError(Z2nError):
    """Truncation orders are incompatible, or information was already lost."""


class GradingError(Z2nError):
    """An element or image does not have the required Z_2^n-degree."""


class RangeError(Z2nError):
    """A base point lies outside the region where it is required to be."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ClassificationError(Z2nError):
    """A Berezin vector does not satisfy the propagation relation."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NoWitnessError(Z2nError):
    """Two morphisms are equal, so no separating point exists."""


class ValidationError(Z2nError):
    """Generic structural validation failure (e.g. non-orthogonal block)."""


class GluingError(Z2nError):
    """Transition data violates the cocycle condition."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class StructureError(Z2nError):
    """Atlas data is malformed (e.g. a transition without its inverse)."""


class ParseError(Z2nError):
    """Syntax error in a series or polynomial literal."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class SpecError(Z2nError):
    """Malformed spec document or unresolved reference."""
