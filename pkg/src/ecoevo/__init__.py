"""Eco-evolutionary game dynamics with self-renewing or externally supplied resources."""

__version__ = "0.1.0"

from ecoevo.model import (  # noqa: E402
    Ecology,
    ModelParams,
    PayoffDeltas,
    RawPayoffs,
    State,
    SystemKind,
    benchmark_params,
    vector_field,
)
from ecoevo.equilibria import boundary_stability, equilibria, interior_quadratic, solve_interior  # noqa: E402
from ecoevo.linearize import classify, jacobian, trace_det  # noqa: E402
from ecoevo.hopf import first_lyapunov, hopf_curve, hopf_epsilon, hopf_point, locate_gh  # noqa: E402
from ecoevo.simulate import IntegratorOptions, basin_sample, find_limit_cycle, integrate  # noqa: E402
from ecoevo.scan import epsilon_surface, two_param_scan  # noqa: E402

__all__ = [
    "Ecology",
    "IntegratorOptions",
    "ModelParams",
    "PayoffDeltas",
    "RawPayoffs",
    "State",
    "SystemKind",
    "basin_sample",
    "benchmark_params",
    "boundary_stability",
    "classify",
    "epsilon_surface",
    "equilibria",
    "find_limit_cycle",
    "first_lyapunov",
    "hopf_curve",
    "hopf_epsilon",
    "hopf_point",
    "integrate",
    "interior_quadratic",
    "jacobian",
    "locate_gh",
    "solve_interior",
    "trace_det",
    "two_param_scan",
    "vector_field",
]
