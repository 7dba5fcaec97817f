"""
lrd-prediction

Prediction kernels, prediction errors and the Baxter inequality for
Gaussian processes with stationary increments and long-range dependence.
"""

from .config import (
    config,
    LrdSettings,
    QuadratureConfig,
    ModelKind,
    ArMethod,
    ErrorMode,
    Command,
)
from .errors import (
    LrdError,
    ConfigurationError,
    ModelError,
    UnsupportedDepthError,
    NumericalError,
    QuadratureError,
    InversionError,
    GridCoverageError,
    SeriesConvergenceError,
    FactorizationError,
    NumericalInstabilityError,
)
from .model import (
    LrdModel,
    fbm,
    two_index,
    load_model,
    eval_c,
    eval_g,
    variogram,
    increment_autocov,
)
from .duality import (
    ArCoefficient,
    build_ar,
    alpha_hat,
    eval_a,
    eval_alpha,
    eval_beta,
)
from .kernels import (
    KernelTable,
    eval_b,
    eval_b_n,
    eval_h,
    eval_delta_k,
    eval_B_k,
    eval_k_kernel,
    k_row_sums,
    build_kernel_table,
    extend_kernel_table,
)
from .prediction import (
    PredictionWindow,
    PredictionReport,
    infinite_past_coeff,
    finite_past_coeff,
    eval_Dn,
    error_variance,
    build_report,
    apply_predictor,
)
from .baxter import (
    BaxterSweep,
    baxter_lhs,
    baxter_rhs,
    baxter_sweep,
    limit_constant,
    limit_integral,
    sine_series_check,
    eval_f_m,
)
from .montecarlo import (
    PathSample,
    McReport,
    simulate,
    simulate_many,
    validate_prediction,
)
from .cli import RunConfig, run, main

__version__ = "0.1.0"
__all__ = [
    # Config
    "config",
    "LrdSettings",
    "QuadratureConfig",
    "ModelKind",
    "ArMethod",
    "ErrorMode",
    "Command",
    # Errors
    "LrdError",
    "ConfigurationError",
    "ModelError",
    "UnsupportedDepthError",
    "NumericalError",
    "QuadratureError",
    "InversionError",
    "GridCoverageError",
    "SeriesConvergenceError",
    "FactorizationError",
    "NumericalInstabilityError",
    # Model
    "LrdModel",
    "fbm",
    "two_index",
    "load_model",
    "eval_c",
    "eval_g",
    "variogram",
    "increment_autocov",
    # Duality
    "ArCoefficient",
    "build_ar",
    "alpha_hat",
    "eval_a",
    "eval_alpha",
    "eval_beta",
    # Kernels
    "KernelTable",
    "eval_b",
    "eval_b_n",
    "eval_h",
    "eval_delta_k",
    "eval_B_k",
    "eval_k_kernel",
    "k_row_sums",
    "build_kernel_table",
    "extend_kernel_table",
    # Prediction
    "PredictionWindow",
    "PredictionReport",
    "infinite_past_coeff",
    "finite_past_coeff",
    "eval_Dn",
    "error_variance",
    "build_report",
    "apply_predictor",
    # Baxter
    "BaxterSweep",
    "baxter_lhs",
    "baxter_rhs",
    "baxter_sweep",
    "limit_constant",
    "limit_integral",
    "sine_series_check",
    "eval_f_m",
    # Monte Carlo
    "PathSample",
    "McReport",
    "simulate",
    "simulate_many",
    "validate_prediction",
    # CLI
    "RunConfig",
    "run",
    "main",
]
