"""Exception hierarchy shared by every hitfam module."""


class HitfamError(Exception):
    """Base class for all library errors."""


class InvalidSizeError(HitfamError, ValueError):
    pass


class InvalidDepthError(HitfamError, ValueError):
    pass


class UnsupportedDepthError(InvalidDepthError):
    pass


class MissingEventError(HitfamError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidTupleError(HitfamError, ValueError):
    pass


class InadmissibleError(HitfamError, ValueError):
    pass


class ShapeError(HitfamError, ValueError):
    """The poset does not have the shape an operation needs (e.g. not a tree)."""


class CollisionError(HitfamError, ValueError):
    pass


class CycleError(HitfamError, ValueError):
    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class HasseError(HitfamError, ValueError):
    """A cover edge is implied by other edges."""

    def __init__(self, message, edges=()):
        super().__init__(message)
        self.edges = tuple(edges)


class InvalidFamilyError(HitfamError, ValueError):
    pass


class InfeasibleError(HitfamError, RuntimeError):
    """An enumeration or search would exceed its budget."""


class GenerationFailedError(HitfamError, RuntimeError):
    def __init__(self, message, missed=None):
        super().__init__(message)
        self.missed = missed


class PoolExhaustedError(HitfamError, RuntimeError):
    def __init__(self, message, missed=None):
        super().__init__(message)
        self.missed = missed


class AddressingError(HitfamError, ValueError):
    pass


class InvalidPatternError(HitfamError, ValueError):
    pass


class ParseError(HitfamError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownEventError(ParseError):
    """An edge or race line names an event that was not declared."""
