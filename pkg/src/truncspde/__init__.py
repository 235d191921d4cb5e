"""Nonlinearity-truncated exponential and linear-implicit Euler schemes for
space-time white noise driven reaction-diffusion equations on (0, 1) with
odd-degree polynomial drift, plus a coupled Monte Carlo strong-error harness.
"""

from .drift import IndicatorVariant, PolynomialDrift, TruncationRule, ginzburg_landau
from .harness import (
    ConfigError,
    ErrorRow,
    ErrorTable,
    ExperimentConfig,
    FitError,
    OrderFit,
    desk_config,
    fit_order,
    strong_error_mc,
)
from .noise import NoiseSource
from .schemes import (
    Discretization,
    PathRecord,
    SchemeKind,
    SchemeState,
    run_path,
    step_crank_nicolson,
    step_exp_euler,
    step_lin_implicit,
)
from .spectral import ModeBasis, TimeGrid, floor_grid, lq_norm_pow
from .verify import lyapunov_audit, verify_inequalities

__version__ = "0.1.0"
