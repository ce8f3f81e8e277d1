"""Exact laboratory for convolution powers of signed measures and cone supports."""

from .cones import Cone, ConeSupportValue, Surd, cone_member, hull_support_function, radical_compare, supp_c, t_functional
from .convolution import PowerCache, convolve, mixed_power_sum, power, telescoping_difference
from .errors import (
    ConelabError,
    DegenerateMeasure,
    DimensionMismatch,
    GridOverflow,
    MeasureFormatError,
    ModeMismatch,
    ZeroDirection,
)
from .measure import (
    EXACT,
    FLOAT,
    AtomicMeasure,
    ConeComplement,
    ConeShell,
    Everywhere,
    LeftHalfSpace,
    NumericMode,
    RightHalfSpace,
    add,
    dirac,
    equal_on,
    new_measure,
    restrict,
    scale,
    total_variation,
    zero_measure,
)

__version__ = "0.1.0"
