"""pvi_rh_lab: a desk-scale verification lab for Painleve VI.

Exact identities are checked over Gaussian rationals, numerical claims
(flows, monodromy) in complex floating point.
"""

from .backlund import (INFINITY, ExtendedState, TimeConfig, random_exact_state,
                       random_numeric_state, s_apply, s_word)
from .experiments import (coalescence_flow, coalescence_suite, isomono_suite, main_suite,
                          takano_suite, verify_isomonodromic, verify_main)
from .fuchsian import apparent_obstruction, build_coeff3, build_coeff4, coalesce, discriminant
from .hamiltonians import H4, flow, h3, hamiltonian, pvi_residual
from .monodromy import TraceCoords, cubic_residual, monodromy_matrices, rh_compute, rh_map
from .scalars import GaussianRational, format_scalar, gq, parse_scalar
from .weyl import GroupWord, Kappa, apply_word, reflect, theta_of_kappa

__version__ = "0.1.0"

__all__ = [
    "INFINITY", "ExtendedState", "TimeConfig", "random_exact_state", "random_numeric_state",
    "s_apply", "s_word",
    "coalescence_flow", "coalescence_suite", "isomono_suite", "main_suite", "takano_suite",
    "verify_isomonodromic", "verify_main",
    "apparent_obstruction", "build_coeff3", "build_coeff4", "coalesce", "discriminant",
    "H4", "flow", "h3", "hamiltonian", "pvi_residual",
    "TraceCoords", "cubic_residual", "monodromy_matrices", "rh_compute", "rh_map",
    "GaussianRational", "format_scalar", "gq", "parse_scalar",
    "GroupWord", "Kappa", "apply_word", "reflect", "theta_of_kappa",
]
