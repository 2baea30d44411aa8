"""Exact parametric geometry of numbers: n-templates, exponents, dimension bounds."""
from __future__ import annotations

from .constructions import (
    PreconditionError,
    build_dual,
    build_dual_extended,
    build_simultaneous,
    build_simultaneous_extended,
    dual_params,
    g,
    mu0,
    nu0,
    rho,
    sim_params,
    tau,
    trivial_template,
)
from .dimension import crosscheck_rates, dual_dimension_bounds, sim_dimension_bounds
from .exactnum import INF, NEG_INF, QuadExt, qx_arith, qx_normalize, qx_sign, qx_sqrt
from .exponents import (
    Status,
    check_BL1,
    check_BL2,
    check_chain,
    check_khintchine,
    check_splitting,
    check_SS1,
    check_SS2,
    classical_from_template,
    equality_surface_BL1,
    equality_surface_BL2,
    to_classical,
)
from .template import (
    Template,
    contraction_profile,
    contraction_rates,
    evaluate,
    intermediate_exponent,
    phi_limits,
    validate,
)

__version__ = "0.1.0"
