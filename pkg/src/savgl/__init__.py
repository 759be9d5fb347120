"""Linear, modified-energy-stable SAV and G-SAV time steppers for gradient flows
(Allen-Cahn, Cahn-Hilliard, phase-field crystal) on periodic squares.
"""
from .exceptions import NumericalAbort, SavglError, ValidationError
from .gltd import (
    BACKWARD_EULER,
    PRESETS,
    AlgebraicStability,
    GLTDParams,
    SchemeCase,
    a_stability,
    algebraic_stability,
    classify,
    derive,
    resolve,
    stability_verdict,
)
from .identities import energy_weights, identity_residual, solve_coefficients
from .models import ModelKind, build_model
from .spectral import SpectralGrid
from .stability import estimate_for_model, is_stable_point, max_stepsize_closed_form, \
    numeric_max_stepsize
from .steppers import Family, init_state, integrate, run, step


__version__ = "0.1.0"
