#!/usr/bin/env python3
"""
Configuration module for lrd-prediction.

Centralizes numerical tolerances, environment variables, logging and the
validation helpers shared by the library and the command-line front end.

Every tunable reads an ``LRD_*`` environment variable at construction time,
so a run can be reconfigured without touching code:

- LRD_REL_TOL / LRD_ABS_TOL: per-integral tolerances
- LRD_INVERSION_NODES: fixed-Talbot contour size
- LRD_NYSTROM_STEP / LRD_NYSTROM_MARGIN: log-grid used by the iterated kernels
- LRD_THREADS: worker cap (0 means size from the machine load)
"""
import logging
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .errors import ConfigurationError


# =============================================================================
# Logging Setup
# =============================================================================

LOG_LEVEL = os.getenv("LRD_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger("lrd-prediction")


# =============================================================================
# Environment Configuration
# =============================================================================

@dataclass(frozen=True)
class LrdSettings:
    """Numerical defaults from environment variables."""

    # Quadrature
    rel_tol: float = field(default_factory=lambda: float(os.getenv("LRD_REL_TOL", "1e-9")))
    abs_tol: float = field(default_factory=lambda: float(os.getenv("LRD_ABS_TOL", "1e-13")))
    truncation_radius: float = field(default_factory=lambda: float(os.getenv("LRD_TRUNCATION_RADIUS", "1e6")))
    singularity_split: float = field(default_factory=lambda: float(os.getenv("LRD_SINGULARITY_SPLIT", "1e-2")))
    max_subdivisions: int = field(default_factory=lambda: int(os.getenv("LRD_MAX_SUBDIVISIONS", "200")))

    # Laplace inversion
    inversion_nodes: int = field(default_factory=lambda: int(os.getenv("LRD_INVERSION_NODES", "32")))
    stehfest_order: int = field(default_factory=lambda: int(os.getenv("LRD_STEHFEST_ORDER", "14")))
    ar_grid_min: float = field(default_factory=lambda: float(os.getenv("LRD_AR_GRID_MIN", "1e-6")))
    ar_grid_max: float = field(default_factory=lambda: float(os.getenv("LRD_AR_GRID_MAX", "1e6")))
    ar_grid_per_decade: int = field(default_factory=lambda: int(os.getenv("LRD_AR_GRID_PER_DECADE", "64")))

    # Tabulated two-index model
    model_grid_per_decade: int = field(default_factory=lambda: int(os.getenv("LRD_MODEL_GRID_PER_DECADE", "32")))

    # Iterated kernels
    nystrom_step: float = field(default_factory=lambda: float(os.getenv("LRD_NYSTROM_STEP", "0.25")))
    nystrom_margin: float = field(default_factory=lambda: float(os.getenv("LRD_NYSTROM_MARGIN", "40")))
    max_series_terms: int = field(default_factory=lambda: int(os.getenv("LRD_MAX_SERIES_TERMS", "5000")))
    max_delta_depth: int = field(default_factory=lambda: int(os.getenv("LRD_MAX_DELTA_DEPTH", "6")))
    max_fm_depth: int = field(default_factory=lambda: int(os.getenv("LRD_MAX_FM_DEPTH", "8")))
    qmc_log2_points: int = field(default_factory=lambda: int(os.getenv("LRD_QMC_LOG2_POINTS", "16")))
    qmc_replications: int = field(default_factory=lambda: int(os.getenv("LRD_QMC_REPLICATIONS", "8")))

    # Parallelism
    threads: int = field(default_factory=lambda: int(os.getenv("LRD_THREADS", "0")))
    memory_threshold: float = field(default_factory=lambda: float(os.getenv("LRD_MEMORY_THRESHOLD", "90")))


# Global config instance
config = LrdSettings()


# =============================================================================
# Enums
# =============================================================================

class ModelKind(Enum):
    """Process families."""
    FBM = "fbm"
    TWO_INDEX = "two_index"


class ArMethod(Enum):
    """How the AR(infinity) coefficient is obtained."""
    CLOSED_FORM = "closed_form"
    NUMERIC_INVERSION = "numeric_inversion"


class ErrorMode(Enum):
    """Observation window used for the prediction error."""
    INFINITE_PAST = "infinite_past"
    FINITE_PAST = "finite_past"


class Command(Enum):
    """CLI subcommands."""
    KERNEL = "kernel"
    AR = "ar"
    PREDICT = "predict"
    BAXTER = "baxter"
    SIMULATE = "simulate"
    VALIDATE = "validate"
    VERIFY = "verify"


# =============================================================================
# Validation Functions
# =============================================================================

def validate_hurst(value: float, name: str = "H") -> tuple[bool, Optional[str]]:
    """Check that an index lies in the open interval (1/2, 1)."""
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        return False, f"{name} must be a finite real number, got {value!r}"
    if not 0.5 < value < 1.0:
        return False, f"{name} must lie in (1/2, 1), got {value}"
    return True, None


def validate_model_parameters(
    kind: ModelKind,
    H: float,
    H0: float,
    scale_k: Optional[float] = None,
) -> tuple[bool, Optional[str]]:
    """Validate the parameters of a process specification."""
    for name, value in (("H", H), ("H0", H0)):
        ok, error = validate_hurst(value, name)
        if not ok:
            return False, error

    if kind == ModelKind.FBM and H0 != H:
        return False, f"fBm requires H0 == H, got H={H}, H0={H0}"

    if scale_k is not None and not (math.isfinite(scale_k) and scale_k > 0):
        return False, f"scaleK must be positive, got {scale_k}"

    return True, None


def validate_quadrature_config(
    rel_tol: float,
    abs_tol: float,
    truncation_radius: float,
    singularity_split: float,
    max_subdivisions: int,
) -> tuple[bool, Optional[str]]:
    """Validate quadrature tolerances."""
    if not rel_tol > 0:
        return False, f"relTol must be positive, got {rel_tol}"
    if not abs_tol > 0:
        return False, f"absTol must be positive, got {abs_tol}"
    if not singularity_split > 0:
        return False, f"singularitySplit must be positive, got {singularity_split}"
    if not singularity_split < truncation_radius:
        return False, (
            f"singularitySplit ({singularity_split}) must be smaller than "
            f"truncationRadius ({truncation_radius})"
        )
    if int(max_subdivisions) != max_subdivisions or max_subdivisions < 1:
        return False, f"maxSubdivisions must be a positive integer, got {max_subdivisions}"
    return True, None


def validate_window(t0: float, t1: float, T: float) -> tuple[bool, Optional[str]]:
    """Validate a prediction window -t0 <= 0 <= t1 < T with -t0 < t1."""
    for name, value in (("t0", t0), ("t1", t1), ("T", T)):
        if not isinstance(value, (int, float)) or math.isnan(value):
            return False, f"{name} must be a real number, got {value!r}"
    if t0 < 0:
        return False, f"t0 must be nonnegative, got {t0}"
    if t1 < 0:
        return False, f"t1 must be nonnegative, got {t1}"
    if not T > t1:
        return False, f"T must exceed t1, got t1={t1}, T={T}"
    if not t0 + t1 > 0:
        return False, "window must satisfy -t0 < t1"
    return True, None


def validate_depth(depth: int, maximum: int, name: str = "k") -> tuple[bool, Optional[str]]:
    """Validate a nesting depth against its configured maximum."""
    if int(depth) != depth or depth < 1:
        return False, f"{name} must be a positive integer, got {depth}"
    if depth > maximum:
        return False, f"{name}={depth} exceeds the supported depth {maximum}"
    return True, None


# =============================================================================
# Quadrature Configuration
# =============================================================================

@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances governing every integral."""

    rel_tol: float = field(default_factory=lambda: config.rel_tol)
    abs_tol: float = field(default_factory=lambda: config.abs_tol)
    truncation_radius: float = field(default_factory=lambda: config.truncation_radius)
    singularity_split: float = field(default_factory=lambda: config.singularity_split)
    max_subdivisions: int = field(default_factory=lambda: config.max_subdivisions)

    def __post_init__(self):
        ok, error = validate_quadrature_config(
            self.rel_tol,
            self.abs_tol,
            self.truncation_radius,
            self.singularity_split,
            self.max_subdivisions,
        )
        if not ok:
            raise ConfigurationError(error)

    @classmethod
    def default(cls) -> "QuadratureConfig":
        """Build from the environment-backed settings."""
        return cls()

    def with_rel_tol(self, rel_tol: float) -> "QuadratureConfig":
        """Copy with a different relative tolerance."""
        return replace(self, rel_tol=rel_tol)

    def to_dict(self) -> dict:
        return {
            "relTol": self.rel_tol,
            "absTol": self.abs_tol,
            "truncationRadius": self.truncation_radius,
            "singularitySplit": self.singularity_split,
            "maxSubdivisions": self.max_subdivisions,
        }


# =============================================================================
# Exports
# =============================================================================

__all__ = [
    # Logging
    "logger",
    "LOG_LEVEL",
    "LOG_FORMAT",
    # Config
    "LrdSettings",
    "config",
    "QuadratureConfig",
    # Enums
    "ModelKind",
    "ArMethod",
    "ErrorMode",
    "Command",
    # Validation
    "validate_hurst",
    "validate_model_parameters",
    "validate_quadrature_config",
    "validate_window",
    "validate_depth",
]
