"""Coexistence of effects in regular-polygon and related probability theories."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    ConvexPolygon2D,
    HalfPlane2D,
    HalfSpace,
    Vec2,
    clip_halfplane,
    contains_point,
    enumerate_polytope_vertices,
    intersect_halfplanes,
    minkowski_sum,
    polygon_area,
    regular_constraint_polygon,
)
from .simplex import FeasibilityProblem, lp_feasible  # noqa: E402
from .theory import (  # noqa: E402
    Theory,
    build_classical_theory,
    build_displaced_hexagon,
    build_regular_polygon_theory,
    build_square_bit,
    effect_complement,
    extremal_effects,
    find_reflecting_hyperplane,
    is_edge,
    is_effect,
    is_state_space_point_symmetric,
    probability,
    unbiased_cross_section,
)
from .coexistence import (  # noqa: E402
    BuschEffectPair,
    CoexistenceVerdict,
    busch_coexistent,
    busch_planar_region_membership,
    coexist_criterion_even_polygon,
    coexist_oracle,
    coexistence_region,
    coexistence_volume_fraction,
    extremal_coexistence_set,
    lower_set_slice,
    quantum_limit_gap,
)
