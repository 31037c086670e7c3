"""Arithmetic census of systoles on principal congruence surfaces.

Computes the exact invariants of the level-N congruence surfaces (index,
genus, cusps, class numbers, L-values, fundamental units), the pairwise
intersection numbers of the modular geodesics of discriminant N^2 - 4,
and assembles them into systole counts and crossing-number bounds with
growth-exponent trend tables.
"""

from .congruence_surface import (
    SurfaceInvariants,
    cusps,
    genus,
    index,
    index_exponent_check,
    schmutz_schaller_lift,
    surface_invariants,
    systole_count,
    systole_length,
    systole_trace,
)
from .crossing_census import (
    CurveSystemMatrix,
    ExponentRow,
    crossing_bound,
    exponent_table,
    find_subfamily,
    proposition_lower_bound,
    section4_scaling_check,
    subfamily_average,
)
from .dirichlet import (
    LValueEstimate,
    char_partial_sum,
    l_value,
    verify_class_number_formula,
)
from .errors import DomainError, IncompleteEnumerationError, ResourceLimitError
from .geodesic_intersections import (
    GeodesicAxis,
    IntersectionMatrix,
    axis,
    class_orbit,
    interlace,
    intersection_matrix,
    intersection_number,
    total_intersections,
    unfolding_intersection_number,
)
from .integer_arith import (
    Factorization,
    factorize,
    is_squarefree,
    kronecker,
    omega,
)
from .quad_forms import (
    FormClassCycle,
    FundamentalUnit,
    Mat2,
    QuadForm,
    automorph,
    class_cycles,
    class_number,
    discriminant,
    fundamental_unit,
    is_reduced,
    reduction_step,
)

__version__ = "0.1.0"
