"""Exception types raised by cotanlift."""


class CotanliftError(Exception):
    """Base class for all library errors."""


class DomainError(CotanliftError, ValueError):
    """A point lies outside a field's declared domain, or a field degenerates there."""


class ShapeError(CotanliftError, ValueError):
    """Dimensions or index layouts do not agree."""


class ParameterError(CotanliftError, ValueError):
    """An argument is outside its admissible range."""


class StructureError(CotanliftError, ValueError):
    """A tensor field fails to be an almost complex structure."""


class ConstructionError(CotanliftError, RuntimeError):
    """A constructor failed its own postcondition check.

    This indicates an internal convention bug rather than bad user input.
    """


class CapabilityError(CotanliftError, TypeError):
    """An object lacks an ingredient an operation needs (an inverse, second derivatives)."""


class PreconditionError(CotanliftError, ValueError):
    """An audit was requested on inputs that make it vacuous."""


class FrameError(CotanliftError, ValueError):
    """A tangent frame is rank deficient."""
