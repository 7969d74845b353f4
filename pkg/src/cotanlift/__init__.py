"""Lifts of almost complex structures to the cotangent bundle, checked numerically.

The modules build on one another: :mod:`fields` (polynomial and rational
fields with exact derivatives), :mod:`structure` (J, connections, torsion,
Nijenhuis tensor), :mod:`cotangent` (canonical forms and the four lifts),
:mod:`maps` (holomorphic maps, cotangent lifts, fiber multiplication) and
:mod:`hypersurface` (Levi form, conormal bundles, compatibility audits).
"""

__version__ = "0.1.0"

from .cotangent import (  # noqa: E402
    LiftedStructure,
    TwoFormField,
    complete_lift_raw,
    gamma,
    generalized_lift,
    horizontal_lift,
    lift,
    omega_st,
    sato_lift,
)
from .errors import CotanliftError  # noqa: E402
from .fields import Box, CotangentPoint, Polynomial, Rational, TensorField  # noqa: E402
from .structure import (  # noqa: E402
    AlmostComplexStructure,
    Connection,
    conjugated_structure,
    minimal_complex_connection,
    nijenhuis,
    standard_structure,
)

__all__ = [
    "__version__",
    "AlmostComplexStructure",
    "Box",
    "Connection",
    "CotangentPoint",
    "CotanliftError",
    "LiftedStructure",
    "Polynomial",
    "Rational",
    "TensorField",
    "TwoFormField",
    "complete_lift_raw",
    "conjugated_structure",
    "gamma",
    "generalized_lift",
    "horizontal_lift",
    "lift",
    "minimal_complex_connection",
    "nijenhuis",
    "omega_st",
    "sato_lift",
    "standard_structure",
]
