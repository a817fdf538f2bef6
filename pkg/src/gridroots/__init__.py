"""Roots of switching/monotone vector sign oracles on dyadic grids."""

from .bisection import bisect_bracket_1d, bisect_root_1d
from .cake import (
    Allocation,
    CakeAgent,
    CakeInstance,
    g_on_grid,
    hall_assignment,
    interpolate_g,
    partition_from_point,
    piecewise_constant_agent,
    piecewise_linear_agent,
    preferred_piece,
    solve_three_groups,
    uniform_agent,
    verify_near_envy_free,
)
from .discretize import (
    CheckReport,
    DiscretizationParams,
    check_delta_continuity,
    check_monotonicity,
    check_positive_switching,
    check_sum_switching,
    discretize,
    pad_strict,
)
from .domain import (
    BoxDomain,
    GridSpec,
    MonotoneProfile,
    RealOracle,
    SignOracle,
    enumerate_roots,
    memoized,
    restrict_component,
    to_coords,
    unit_box,
)
from .errors import (
    ContinuityViolation,
    GridrootsError,
    HypothesisViolation,
    InputError,
    ReductionViolation,
    SwitchingViolation,
)
from .reductions import (
    dual,
    flip_variable,
    make_dd_insufficient_instance,
    make_switching_necessary_instance,
    negate_component,
    recover_1d_root,
    recover_2d_root,
)
from .root2d import Root2DTrace, find_root_diag, find_root_exdiag, find_root_sum, zipper_search
from .rootnd import LatticeMap, check_lattice_claims, find_root_recursive, find_tarski_fixed_point, tarski_map

__version__ = "0.1.0"
