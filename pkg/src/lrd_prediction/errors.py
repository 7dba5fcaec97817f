"""Exception hierarchy for lrd-prediction.

Usage-class errors map to CLI exit status 2, numerical failures to 3.
"""
from typing import Any, Dict, List, Optional, Sequence


class LrdError(Exception):
    """Base class for all library errors."""

    exit_code = 3

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def details(self) -> Dict[str, Any]:
        return {}

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable summary used by the CLI error line."""
        return {
            "kind": type(self).__name__,
            "exit": self.exit_code,
            "message": self.message,
            **self.details(),
        }


# =============================================================================
# Usage errors
# =============================================================================

class ConfigurationError(LrdError, ValueError):
    """Invalid configuration, flags or tolerances."""

    exit_code = 2


class ModelError(ConfigurationError):
    """Process specification violates its invariants."""


class UnsupportedDepthError(ConfigurationError):
    """Requested nesting depth beyond the supported maximum."""

    def __init__(self, depth: int, maximum: int, name: str = "k"):
        super().__init__(f"{name}={depth} exceeds the supported depth {maximum}")
        self.depth = depth
        self.maximum = maximum

    def details(self) -> Dict[str, Any]:
        return {"depth": self.depth, "maximum": self.maximum}


# =============================================================================
# Numerical errors
# =============================================================================

class NumericalError(LrdError):
    """A numerical procedure failed to meet its tolerance."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge within maxSubdivisions."""

    def __init__(self, message: str, estimate: float, tolerance: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.tolerance = tolerance

    def details(self) -> Dict[str, Any]:
        return {"estimate": self.estimate, "tolerance": self.tolerance}


class InversionError(NumericalError):
    """Laplace inversion produced a non-monotone or non-positive table."""

    def __init__(self, message: str, nodes: Sequence[float]):
        super().__init__(message)
        self.nodes: List[float] = list(nodes)

    def details(self) -> Dict[str, Any]:
        return {"nodes": self.nodes[:10]}


class GridCoverageError(NumericalError):
    """A kernel table was asked for points outside its grid."""

    def __init__(self, requested: float, covered: tuple):
        lo, hi = covered
        super().__init__(
            f"point {requested:.6g} lies outside the kernel grid [{lo:.6g}, {hi:.6g}]; "
            f"extend the table with extend_kernel_table()"
        )
        self.requested = requested
        self.covered = covered

    def details(self) -> Dict[str, Any]:
        return {"requested": self.requested, "covered": list(self.covered)}


class SeriesConvergenceError(NumericalError):
    """A kernel series did not converge within the configured number of terms."""

    def __init__(self, message: str, last_norm: float, terms: int):
        super().__init__(message)
        self.last_norm = last_norm
        self.terms = terms

    def details(self) -> Dict[str, Any]:
        return {"last_norm": self.last_norm, "terms": self.terms}


class FactorizationError(NumericalError):
    """Covariance matrix could not be factorized even after jitter."""

    def __init__(self, message: str, jitter: float):
        super().__init__(message)
        self.jitter = jitter

    def details(self) -> Dict[str, Any]:
        return {"jitter": self.jitter}


class NumericalInstabilityError(NumericalError):
    """A sequence that must shrink grew instead."""

    def __init__(self, message: str, terms: Sequence[float]):
        super().__init__(message)
        self.terms = list(terms)

    def details(self) -> Dict[str, Any]:
        return {"terms": self.terms[-5:]}


__all__ = [
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
]
