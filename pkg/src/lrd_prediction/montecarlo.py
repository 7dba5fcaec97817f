"""
Exact Gaussian path simulation and Monte Carlo checks of the predictors.

Paths are drawn on a finite grid from the covariance
E[X(t)X(s)] = (sigma^2(|t|) + sigma^2(|s|) - sigma^2(|t-s|)) / 2 by a dense
Cholesky factorization. Every replicate has its own random substream
derived from (seed, replicate index), so results do not depend on how
replicates are scheduled.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .config import ErrorMode, QuadratureConfig
from .duality import ArCoefficient
from .errors import ConfigurationError, FactorizationError
from .kernels import KernelTable, build_kernel_table
from .model import LrdModel, variogram, variogram_constant
from .parallel import ordered_map
from .prediction import PredictionReport, PredictionWindow, build_report, error_variance, predictor_weights

logger = logging.getLogger("lrd-prediction.montecarlo")

# Relative jitter added to the diagonal when the first factorization fails.
JITTER = 1e-12

# Interior observation times checked for residual orthogonality.
ORTHOGONALITY_POINTS = 5

# Grids beyond this size are slow to factorize densely.
LARGE_GRID = 4096


# =============================================================================
# Paths
# =============================================================================

@dataclass(frozen=True)
class PathSample:
    """One simulated path with X(0) = 0."""

    times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    seed: int
    replicate_index: int

    def __post_init__(self):
        ok, error = validate_grid(self.times)
        if not ok:
            raise ConfigurationError(error)
        if self.values.shape != self.times.shape:
            raise ConfigurationError("path values and grid differ in length")

    def value_at(self, t: float) -> float:
        i = np.flatnonzero(np.isclose(self.times, t, rtol=0.0, atol=1e-12 * max(1.0, abs(t))))
        if i.size == 0:
            raise ConfigurationError(f"time {t} is not on the path grid")
        return float(self.values[i[0]])


def validate_grid(times) -> Tuple[bool, Optional[str]]:
    """A simulation grid must be strictly increasing and contain 0."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        return False, "grid must be a non-empty 1-D sequence"
    if not np.all(np.isfinite(times)):
        return False, "grid times must be finite"
    if np.any(np.diff(times) <= 0):
        return False, "grid times must be strictly increasing"
    if not np.any(times == 0.0):
        return False, "grid must contain 0"
    return True, None


def uniform_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Grid start, start + step, ..., stop; both ends must be multiples of step."""
    if not step > 0:
        raise ConfigurationError(f"grid step must be positive, got {step}")
    for name, value in (("start", start), ("stop", stop)):
        k = value / step
        if not math.isclose(k, round(k), abs_tol=1e-9):
            raise ConfigurationError(f"grid step {step} does not divide {name}={value}")
    lo, hi = int(round(start / step)), int(round(stop / step))
    return np.arange(lo, hi + 1) * step


# =============================================================================
# Covariance
# =============================================================================

def covariance(model: LrdModel, t: float, s: float, q: Optional[QuadratureConfig] = None) -> float:
    """E[X(t) X(s)]."""
    q = q or QuadratureConfig()
    return 0.5 * (variogram(model, abs(t), q) + variogram(model, abs(s), q) - variogram(model, abs(t - s), q))


def covariance_matrix(model: LrdModel, times, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Covariance of X on the grid; each distinct lag is evaluated once."""
    q = q or QuadratureConfig()
    times = np.asarray(times, dtype=float)
    lags = np.abs(times[:, None] - times[None, :])
    points = np.concatenate([np.abs(times), lags.ravel()])
    keys = np.round(points, 12)
    unique, inverse = np.unique(keys, return_inverse=True)

    if model.is_fbm:
        values = variogram_constant(model.H) * unique ** (2.0 * model.H)
    else:
        values = np.array([variogram(model, float(x), q) for x in unique])
    sigma2 = values[inverse]
    own = sigma2[: times.size]
    cross = sigma2[times.size:].reshape(lags.shape)
    return 0.5 * (own[:, None] + own[None, :] - cross)


@dataclass(frozen=True, eq=False)
class GridFactor:
    """Lower Cholesky factor of the covariance at the nonzero grid times."""
    times: np.ndarray
    active: np.ndarray
    lower: np.ndarray
    covariance: np.ndarray
    jitter: float


def factorize(model: LrdModel, times, q: Optional[QuadratureConfig] = None) -> GridFactor:
    """Cholesky factor of the grid covariance, retried once with diagonal jitter."""
    q = q or QuadratureConfig()
    return _factorize(model, tuple(np.asarray(times, dtype=float).tolist()), q)


@lru_cache(maxsize=8)
def _factorize(model: LrdModel, times: Tuple[float, ...], q: QuadratureConfig) -> GridFactor:
    grid = np.asarray(times)
    ok, error = validate_grid(grid)
    if not ok:
        raise ConfigurationError(error)
    if grid.size > LARGE_GRID:
        logger.warning(f"Dense factorization of a {grid.size}-point grid")

    cov = covariance_matrix(model, grid, q)
    active = np.flatnonzero(grid != 0.0)
    sub = cov[np.ix_(active, active)]
    jitter = 0.0
    try:
        lower = linalg.cholesky(sub, lower=True)
    except linalg.LinAlgError:
        jitter = JITTER * float(np.max(np.diag(sub))) if sub.size else 0.0
        logger.warning(f"Covariance not positive definite; retrying with jitter {jitter:.3g}")
        try:
            lower = linalg.cholesky(sub + jitter * np.eye(active.size), lower=True)
        except linalg.LinAlgError:
            raise FactorizationError(
                f"grid covariance is not positive definite even with jitter {jitter:.3g}; "
                f"tighten the quadrature tolerance or coarsen the grid",
                jitter=jitter,
            )
    cov.setflags(write=False)
    return GridFactor(times=grid, active=active, lower=lower, covariance=cov, jitter=jitter)


# =============================================================================
# Simulation
# =============================================================================

def replicate_rng(seed: int, replicate_index: int) -> np.random.Generator:
    """Independent generator for one replicate."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(replicate_index),)))


def simulate(
    model: LrdModel,
    times,
    seed: int,
    replicate_index: int = 0,
    q: Optional[QuadratureConfig] = None,
    factor: Optional[GridFactor] = None,
) -> PathSample:
    """Exact Gaussian sample of X on the grid; deterministic in (seed, replicate_index)."""
    times = np.asarray(times, dtype=float)
    factor = factor or factorize(model, times, q)
    values = np.zeros(times.size)
    if factor.active.size:
        z = replicate_rng(seed, replicate_index).standard_normal(factor.active.size)
        values[factor.active] = factor.lower @ z
    return PathSample(times=times, values=values, seed=int(seed), replicate_index=int(replicate_index))


def simulate_many(
    model: LrdModel,
    times,
    seed: int,
    replicates: int,
    q: Optional[QuadratureConfig] = None,
) -> List[PathSample]:
    """Replicates 0..replicates-1 in index order."""
    if int(replicates) != replicates or replicates < 1:
        raise ConfigurationError(f"replicates must be a positive integer, got {replicates}")
    factor = factorize(model, times, q)
    return ordered_map(lambda k: simulate(model, times, seed, k, q, factor), range(int(replicates)))


# =============================================================================
# Validation
# =============================================================================

@dataclass(frozen=True)
class Correlation:
    """Residual correlation with one observation."""
    time: float
    sample: float
    expected: float
    standard_error: float

    @property
    def consistent(self) -> bool:
        return abs(self.sample - self.expected) <= 3.0 * self.standard_error


@dataclass(frozen=True)
class McReport:
    """Monte Carlo statistics of the predictor residual X(T) - prediction."""

    mode: ErrorMode
    replicates: int
    grid_step: float
    seed: int
    empirical_mse: float
    theoretical_var: float
    standard_error: float
    empirical_bias: float
    bias_standard_error: float
    discretized_var: float
    discretization_allowance: float
    trivial_mse: float
    trivial_var: float
    jitter: float
    correlations: List[Correlation] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list, repr=False)

    @property
    def mse_consistent(self) -> bool:
        """Empirical MSE within 3 standard errors plus the discretization allowance."""
        gap = abs(self.empirical_mse - self.theoretical_var)
        return gap <= 3.0 * self.standard_error + self.discretization_allowance

    @property
    def bias_consistent(self) -> bool:
        return abs(self.empirical_bias) <= 3.0 * self.bias_standard_error

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "replicates": self.replicates,
            "gridStep": self.grid_step,
            "seed": self.seed,
            "empiricalMse": self.empirical_mse,
            "theoreticalVar": self.theoretical_var,
            "standardError": self.standard_error,
            "empiricalBias": self.empirical_bias,
            "biasStandardError": self.bias_standard_error,
            "discretizedVar": self.discretized_var,
            "discretizationAllowance": self.discretization_allowance,
            "trivialMse": self.trivial_mse,
            "trivialVar": self.trivial_var,
            "jitter": self.jitter,
        }

    def to_text(self) -> str:
        fmt = lambda x: format(x, ".12g")
        lines = []
        for key, value in self.to_dict().items():
            lines.append(f"{key}: {fmt(value) if isinstance(value, float) else value}")
        lines.append(f"mseConsistent: {str(self.mse_consistent).lower()}")
        lines.append(f"biasConsistent: {str(self.bias_consistent).lower()}")
        lines += ["", "[orthogonality]", "s,sample_corr,expected_corr,standard_error"]
        for c in self.correlations:
            lines.append(f"{fmt(c.time)},{fmt(c.sample)},{fmt(c.expected)},{fmt(c.standard_error)}")
        return "\n".join(lines) + "\n"

    def residual_rows(self) -> List[Tuple[int, float]]:
        return list(enumerate(self.residuals))


def _residual_vector(report: PredictionReport, times: np.ndarray, mode: ErrorMode) -> np.ndarray:
    """Coefficients lambda with residual = lambda . X on the grid."""
    i1, j, coeff = predictor_weights(report, times, mode)
    iT = int(np.argmin(np.abs(times - report.window.T)))
    lam = np.zeros(times.size)
    lam[iT] += 1.0
    lam[i1] -= 1.0
    np.subtract.at(lam, j + 1, coeff)
    np.add.at(lam, j, coeff)
    return lam


def _sample_stats(x: np.ndarray) -> Tuple[float, float]:
    n = x.size
    mean = math.fsum(x) / n
    var = math.fsum((x - mean) ** 2) / (n - 1) if n > 1 else 0.0
    return mean, math.sqrt(var / n)


def validate_prediction(
    model: LrdModel,
    ar: ArCoefficient,
    table: Optional[KernelTable],
    w: PredictionWindow,
    grid_step: float,
    replicates: int,
    seed: int,
    q: Optional[QuadratureConfig] = None,
    mode: ErrorMode = ErrorMode.FINITE_PAST,
    past_horizon: float = 64.0,
    report: Optional[PredictionReport] = None,
) -> McReport:
    """Compare the empirical residual MSE of the discretized predictor with the error formula.

    The finite-past predictor is simulated on [-t0, T]; the infinite-past
    one on [-past_horizon, T]. The exact MSE of the discretized predictor
    on the grid sets the discretization allowance.
    """
    q = q or QuadratureConfig()
    mode = ErrorMode(mode)
    if int(replicates) != replicates or replicates < 2:
        raise ConfigurationError(f"replicates must be an integer >= 2, got {replicates}")
    start = -w.t0 if mode == ErrorMode.FINITE_PAST else -max(past_horizon, w.t0)
    times = uniform_grid(start, w.T, grid_step)
    if not np.any(np.isclose(times, w.t1, rtol=0.0, atol=1e-9)):
        raise ConfigurationError(f"grid step {grid_step} does not divide t1={w.t1}")

    if report is None:
        if table is None:
            table = build_kernel_table(model, ar, w.t2, q=q)
        report = build_report(model, ar, w, q, table=table)
    theoretical = error_variance(model, ar, report.table, w, mode, q)

    factor = factorize(model, times, q)
    lam = _residual_vector(report, times, mode)
    discretized = float(lam @ factor.covariance @ lam)
    allowance = abs(discretized - theoretical)

    paths = simulate_many(model, times, seed, replicates, q)
    X = np.vstack([p.values for p in paths])
    residuals = X @ lam
    bias, bias_se = _sample_stats(residuals)
    mse, mse_se = _sample_stats(residuals ** 2)

    i1 = int(np.argmin(np.abs(times - w.t1)))
    iT = int(np.argmin(np.abs(times - w.T)))
    trivial_mse, _ = _sample_stats((X[:, iT] - X[:, i1]) ** 2)

    correlations = []
    lo = int(np.argmin(np.abs(times - max(start, -w.t0))))
    candidates = np.linspace(lo, i1, ORTHOGONALITY_POINTS + 2).round().astype(int)[1:-1]
    cov_r = factor.covariance @ lam
    for i in candidates:
        if times[i] == 0.0:
            i += 1
        sample = float(np.corrcoef(residuals, X[:, i])[0, 1])
        expected = float(cov_r[i] / math.sqrt(discretized * factor.covariance[i, i]))
        correlations.append(Correlation(
            time=float(times[i]),
            sample=sample,
            expected=expected,
            standard_error=(1.0 - expected ** 2) / math.sqrt(replicates),
        ))

    result = McReport(
        mode=mode,
        replicates=int(replicates),
        grid_step=float(grid_step),
        seed=int(seed),
        empirical_mse=mse,
        theoretical_var=theoretical,
        standard_error=mse_se,
        empirical_bias=bias,
        bias_standard_error=bias_se,
        discretized_var=discretized,
        discretization_allowance=allowance,
        trivial_mse=trivial_mse,
        trivial_var=variogram(model, w.t3, q),
        jitter=factor.jitter,
        correlations=correlations,
        residuals=residuals.tolist(),
    )
    logger.info(
        f"Monte Carlo {mode.value}: mse={mse:.6g} +/- {mse_se:.2g}, theory={theoretical:.6g}, "
        f"discretized={discretized:.6g}"
    )
    return result


__all__ = [
    "PathSample",
    "GridFactor",
    "Correlation",
    "McReport",
    "validate_grid",
    "uniform_grid",
    "covariance",
    "covariance_matrix",
    "factorize",
    "replicate_rng",
    "simulate",
    "simulate_many",
    "validate_prediction",
]
