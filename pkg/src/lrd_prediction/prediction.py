"""
Predictor coefficients and mean-square prediction errors.

For the window -t0 <= 0 <= t1 < T with t2 = t0 + t1 and t3 = T - t1:

- infinite past: coefficient B(t1 - s) with B(t) = int_0^t3 b(t, tau) dtau,
  error int_0^t3 g(s)^2 ds;
- finite past: coefficient int_0^t3 h(s + t0, u) du, error equal to the
  infinite-past error plus the sum over n >= 1 of int_0^inf D_n(s)^2 ds.

B is evaluated in the form int_0^t3 g(t3 - z) a(t + z) dz, which avoids
the inner b-integral.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import numpy as np

from .config import ErrorMode, QuadratureConfig, config, validate_window
from .duality import ArCoefficient, beta_values
from .errors import ConfigurationError, NumericalInstabilityError, SeriesConvergenceError
from .kernels import KernelTable, NystromOperator, alternating_series, build_kernel_table
from .model import (
    LrdModel,
    c_regular_values,
    eval_g,
    g_regular_values,
    infinite_past_error_closed_form,
    variogram,
)
from .parallel import ordered_map
from .quadrature import convolve, integrate_singular

if TYPE_CHECKING:
    from .montecarlo import PathSample

logger = logging.getLogger("lrd-prediction.prediction")

# Samples of each coefficient in a report.
REPORT_SAMPLES = 32

# Relative coefficient change between neighbouring interior cells that
# triggers the coarse-grid warning.
COARSE_GRID_CHANGE = 0.25

# Tolerated relative growth of consecutive D_n contributions.
GROWTH_SLACK = 1e-3


# =============================================================================
# Window
# =============================================================================

@dataclass(frozen=True)
class PredictionWindow:
    """Observation window [-t0, t1] and target time T."""

    t0: float
    t1: float
    T: float

    def __post_init__(self):
        ok, error = validate_window(self.t0, self.t1, self.T)
        if not ok:
            raise ConfigurationError(error)

    @property
    def t2(self) -> float:
        return self.t0 + self.t1

    @property
    def t3(self) -> float:
        return self.T - self.t1

    def to_dict(self) -> Dict[str, float]:
        return {"t0": self.t0, "t1": self.t1, "T": self.T, "t2": self.t2, "t3": self.t3}


# =============================================================================
# Infinite past
# =============================================================================

def integrated_b(model: LrdModel, ar: ArCoefficient, t: float, t3: float, q: Optional[QuadratureConfig] = None) -> float:
    """B(t) = int_0^t3 b(t, tau) dtau for a single t > 0."""
    if t3 <= 0:
        return 0.0
    q = q or QuadratureConfig()
    return integrate_singular(
        lambda z: float(g_regular_values(model, t3 - z, q)) * float(ar.a(t + z)),
        0.0, t3, q, right=model.d0, label=f"B({t:.6g})",
    )


def integrated_b_values(model: LrdModel, ar: ArCoefficient, t, t3: float, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Vectorized B(t)."""
    t = np.asarray(t, dtype=float)
    if t3 <= 0:
        return np.zeros(t.shape)
    q = q or QuadratureConfig()
    return convolve(lambda v: g_regular_values(model, v, q), model.d0, ar.a, x=np.full(t.shape, t3), shift=t)


def infinite_past_coeff(
    model: LrdModel,
    ar: ArCoefficient,
    w: PredictionWindow,
    s: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """Coefficient of dX(s), s < t1, in the infinite-past predictor of X(T)."""
    if not s < w.t1:
        raise ConfigurationError(f"infinite-past coefficient needs s < t1={w.t1}, got s={s}")
    return integrated_b(model, ar, w.t1 - s, w.t3, q)


def coefficient_tail_mass(
    model: LrdModel,
    ar: ArCoefficient,
    t3: float,
    x: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """int_x^inf B(y) dy = int_0^t3 g(t3 - z) alpha(x + z) dz.

    This is the mass of the infinite-past coefficients further than x
    before t1.
    """
    q = q or QuadratureConfig()
    return integrate_singular(
        lambda z: float(g_regular_values(model, t3 - z, q)) * float(ar.alpha(x + z)),
        0.0, t3, q, right=model.d0, label=f"tail mass beyond {x:.6g}",
    )


# =============================================================================
# Finite past
# =============================================================================

def _check_table(table: KernelTable, w: PredictionWindow) -> None:
    if not math.isclose(table.t2, w.t2, rel_tol=1e-12):
        raise ConfigurationError(f"kernel table was built for t2={table.t2}, window has t2={w.t2}")


def finite_past_coeff_values(
    table: KernelTable,
    w: PredictionWindow,
    s,
    q: Optional[QuadratureConfig] = None,
) -> np.ndarray:
    """int_0^t3 h(s + t0, u) du for each s in (-t0, t1)."""
    _check_table(table, w)
    q = q or table.q
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s <= -w.t0) or np.any(s >= w.t1):
        raise ConfigurationError(f"finite-past coefficient needs -t0 < s < t1, window {w.to_dict()}")

    operator = table.operator
    operator.require(float(np.min(w.t1 - s)), float(np.min(s + w.t0)))
    first = integrated_b_values(table.model, table.ar, w.t1 - s, w.t3, q)[:, None]
    columns = integrated_b_values(table.model, table.ar, w.t2 + operator.nodes, w.t3, q)[:, None]
    result = alternating_series(
        operator,
        first,
        rows_odd=operator.rows(w.t1 - s),
        rows_even=operator.rows(s + w.t0),
        columns=columns,
        rel_tol=q.rel_tol,
    )
    return result.total[:, 0]


def finite_past_coeff(
    table: KernelTable,
    w: PredictionWindow,
    s: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """Coefficient of dX(s), -t0 < s < t1, in the finite-past predictor of X(T)."""
    return float(finite_past_coeff_values(table, w, [s], q)[0])


# =============================================================================
# D_n terms
# =============================================================================

def _d1_values(model: LrdModel, ar: ArCoefficient, w: PredictionWindow, s: np.ndarray, q: QuadratureConfig) -> np.ndarray:
    # D_1(s) = int_0^t3 g(t3 - z) beta(t2 + s + z) dz
    return convolve(
        lambda v: g_regular_values(model, v, q),
        model.d0,
        lambda x: beta_values(model, ar, x, q),
        x=np.full(s.shape, w.t3),
        shift=w.t2 + s,
    )


def _kappa(model: LrdModel, ar: ArCoefficient, w: PredictionWindow, s: np.ndarray, x: np.ndarray, q: QuadratureConfig) -> np.ndarray:
    # kappa(s, x) = int_0^x c(x - z) beta(t2 + s + z) dz
    return convolve(
        lambda v: c_regular_values(model, v, q),
        model.H0 - 1.5,
        lambda y: beta_values(model, ar, y, q),
        x=x[None, :],
        shift=w.t2 + s[:, None],
    )


def _iterate_columns(operator: NystromOperator, model: LrdModel, ar: ArCoefficient, w: PredictionWindow, q: QuadratureConfig):
    """Yield V_n(w_j) = int_0^t3 b_n(t2 + w_j, tau) dtau for n = 1, 2, ..."""
    V = integrated_b_values(model, ar, w.t2 + operator.nodes, w.t3, q)
    while True:
        yield V
        V = operator.apply(V)


def eval_Dn(
    model: LrdModel,
    ar: ArCoefficient,
    table: Optional[KernelTable],
    w: PredictionWindow,
    n: int,
    s: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """D_n(s; t2, t3) for n >= 0 and s > 0."""
    if int(n) != n or n < 0:
        raise ConfigurationError(f"n must be a nonnegative integer, got {n}")
    if not (s > 0 or (n == 0 and s == 0)):
        raise ConfigurationError(f"D_n needs s > 0, got {s}")
    q = q or QuadratureConfig()
    if n == 0:
        return eval_g(model, w.t3 - s, q) if s < w.t3 else 0.0
    s_arr = np.array([float(s)])
    if n == 1:
        return float(_d1_values(model, ar, w, s_arr, q)[0])

    if table is None:
        raise ConfigurationError("D_n for n >= 2 needs a kernel table")
    _check_table(table, w)
    operator = table.operator
    operator.require(s)
    columns = _iterate_columns(operator, model, ar, w, q)
    for _ in range(n - 1):
        V = next(columns)
    kappa = _kappa(model, ar, w, s_arr, operator.nodes, q)
    return float(((kappa * operator.weights) @ V)[0])


@dataclass(frozen=True)
class DnSeries:
    """Contributions int_0^inf D_n(s)^2 ds, n = 1, 2, ..."""
    contributions: List[float]
    truncation_estimate: float

    @property
    def total(self) -> float:
        return math.fsum(self.contributions)


def dn_contributions(
    model: LrdModel,
    ar: ArCoefficient,
    table: KernelTable,
    w: PredictionWindow,
    q: Optional[QuadratureConfig] = None,
    max_terms: Optional[int] = None,
) -> DnSeries:
    """Sum int D_n^2 until a term falls below rel_tol times the accumulated error.

    Raises NumericalInstabilityError when the sequence grows from n = 3 on.
    """
    _check_table(table, w)
    q = q or table.q
    max_terms = max_terms or config.max_series_terms
    operator = table.operator
    nodes, weights = operator.nodes, operator.weights

    base = infinite_error_variance(model, w, q)
    d1 = _d1_values(model, ar, w, nodes, q)
    contributions = [float(weights @ d1 ** 2)]
    kappa = _kappa(model, ar, w, nodes, nodes, q) * weights[None, :]

    columns = _iterate_columns(operator, model, ar, w, q)
    for n in range(2, max_terms + 1):
        V = next(columns)
        dn = kappa @ V
        term = float(weights @ dn ** 2)
        contributions.append(term)
        if n >= 3 and term > contributions[-2] * (1.0 + GROWTH_SLACK):
            raise NumericalInstabilityError(
                f"D_n contributions grew at n={n}: {contributions[-2]:.6g} -> {term:.6g}",
                terms=contributions,
            )
        accumulated = base + math.fsum(contributions)
        if term < q.rel_tol * accumulated:
            ratio = term / contributions[-2] if contributions[-2] > 0 else 0.0
            tail = term * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
            logger.info(f"D_n series: {n} terms, tail estimate {tail:.3g}")
            return DnSeries(contributions=contributions, truncation_estimate=tail)

    raise SeriesConvergenceError(
        f"D_n series did not converge within {max_terms} terms",
        last_norm=contributions[-1],
        terms=max_terms,
    )


# =============================================================================
# Error variances
# =============================================================================

def infinite_error_variance(model: LrdModel, w: PredictionWindow, q: Optional[QuadratureConfig] = None) -> float:
    """int_0^t3 g(s)^2 ds."""
    if model.is_fbm:
        return infinite_past_error_closed_form(model.H, w.t3)
    q = q or QuadratureConfig()
    return integrate_singular(
        lambda s: float(g_regular_values(model, s, q)) ** 2,
        0.0, w.t3, q, left=2.0 * model.d0, label="infinite-past error",
    )


def error_variance(
    model: LrdModel,
    ar: ArCoefficient,
    table: Optional[KernelTable],
    w: PredictionWindow,
    mode: ErrorMode,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """Mean-square error of the infinite- or finite-past predictor of X(T)."""
    q = q or QuadratureConfig()
    mode = ErrorMode(mode)
    infinite = infinite_error_variance(model, w, q)
    if mode == ErrorMode.INFINITE_PAST:
        return infinite
    if table is None:
        raise ConfigurationError("finite-past error needs a kernel table")
    return infinite + dn_contributions(model, ar, table, w, q).total


# =============================================================================
# Report
# =============================================================================

@dataclass(frozen=True)
class PredictionReport:
    """Coefficients and errors for one window."""

    window: PredictionWindow
    infinite_coeff_samples: List[Tuple[float, float]]
    finite_coeff_samples: List[Tuple[float, float]]
    infinite_error_var: float
    finite_error_var: float
    dn_term_contributions: List[float]
    series_terms: int
    truncation_estimate: float
    tail_cutoff: float
    tail_mass: float
    trivial_error_var: float
    model: LrdModel = field(repr=False)
    ar: ArCoefficient = field(repr=False)
    table: KernelTable = field(repr=False)
    q: QuadratureConfig = field(repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model.to_dict(),
            "window": self.window.to_dict(),
            "infiniteErrorVar": self.infinite_error_var,
            "finiteErrorVar": self.finite_error_var,
            "trivialErrorVar": self.trivial_error_var,
            "dnTermContributions": list(self.dn_term_contributions),
            "seriesTerms": self.series_terms,
            "truncationEstimate": self.truncation_estimate,
            "tailCutoff": self.tail_cutoff,
            "tailMass": self.tail_mass,
            "infiniteCoeffSamples": [list(p) for p in self.infinite_coeff_samples],
            "finiteCoeffSamples": [list(p) for p in self.finite_coeff_samples],
        }

    def to_text(self) -> str:
        """Key-value scalars followed by CSV blocks of the coefficients."""
        fmt = lambda x: format(x, ".12g")
        w = self.window
        lines = [
            f"model: {self.model.describe()}",
            f"t0: {fmt(w.t0)}",
            f"t1: {fmt(w.t1)}",
            f"T: {fmt(w.T)}",
            f"t2: {fmt(w.t2)}",
            f"t3: {fmt(w.t3)}",
            f"infinite_error_var: {fmt(self.infinite_error_var)}",
            f"finite_error_var: {fmt(self.finite_error_var)}",
            f"trivial_error_var: {fmt(self.trivial_error_var)}",
            f"series_terms: {self.series_terms}",
            f"truncation_estimate: {fmt(self.truncation_estimate)}",
            f"tail_cutoff: {fmt(self.tail_cutoff)}",
            f"tail_mass: {fmt(self.tail_mass)}",
            "",
            "[dn_contributions]",
            "n,contribution",
        ]
        lines += [f"{n},{fmt(v)}" for n, v in enumerate(self.dn_term_contributions, start=1)]
        lines += ["", "[infinite_coeff]", "s,coeff"]
        lines += [f"{fmt(s)},{fmt(v)}" for s, v in self.infinite_coeff_samples]
        lines += ["", "[finite_coeff]", "s,coeff"]
        lines += [f"{fmt(s)},{fmt(v)}" for s, v in self.finite_coeff_samples]
        return "\n".join(lines) + "\n"


def _tail_cutoff(model: LrdModel, ar: ArCoefficient, w: PredictionWindow, q: QuadratureConfig) -> float:
    """Smallest distance x = t1 - s, on a decade grid, with B(x) below abs_tol."""
    x = max(w.t2, w.t3)
    while x < q.truncation_radius:
        if integrated_b(model, ar, x, w.t3, q) < q.abs_tol:
            return x
        x *= 10.0
    return q.truncation_radius


def build_report(
    model: LrdModel,
    ar: ArCoefficient,
    w: PredictionWindow,
    q: Optional[QuadratureConfig] = None,
    table: Optional[KernelTable] = None,
    samples: int = REPORT_SAMPLES,
) -> PredictionReport:
    """Assemble coefficients and error variances for the window."""
    q = q or QuadratureConfig()
    if table is None:
        table = build_kernel_table(model, ar, w.t2, q=q)
    _check_table(table, w)

    cutoff = _tail_cutoff(model, ar, w, q)
    x = np.logspace(math.log10(1e-3 * min(w.t2, w.t3)), math.log10(cutoff), samples)
    infinite = ordered_map(lambda xi: infinite_past_coeff(model, ar, w, w.t1 - xi, q), list(x))
    infinite_samples = sorted(zip((w.t1 - x).tolist(), infinite))

    s = -w.t0 + w.t2 * (np.arange(samples) + 0.5) / samples
    finite = finite_past_coeff_values(table, w, s, q)
    finite_samples = list(zip(s.tolist(), finite.tolist()))

    infinite_var = infinite_error_variance(model, w, q)
    series = dn_contributions(model, ar, table, w, q)
    finite_var = infinite_var + series.total
    trivial = variogram(model, w.t3, q)
    if not infinite_var <= finite_var <= trivial * (1.0 + 1e-6):
        logger.warning(
            f"Error ordering violated: infinite={infinite_var:.6g} finite={finite_var:.6g} trivial={trivial:.6g}"
        )

    return PredictionReport(
        window=w,
        infinite_coeff_samples=infinite_samples,
        finite_coeff_samples=finite_samples,
        infinite_error_var=infinite_var,
        finite_error_var=finite_var,
        dn_term_contributions=series.contributions,
        series_terms=table.series_terms,
        truncation_estimate=max(table.truncation_estimate, series.truncation_estimate),
        tail_cutoff=cutoff,
        tail_mass=coefficient_tail_mass(model, ar, w.t3, cutoff, q),
        trivial_error_var=trivial,
        model=model,
        ar=ar,
        table=table,
        q=q,
    )


# =============================================================================
# Applying the predictor to a path
# =============================================================================

def predictor_weights(
    report: PredictionReport,
    times: np.ndarray,
    mode: ErrorMode = ErrorMode.FINITE_PAST,
) -> Tuple[int, np.ndarray, np.ndarray]:
    """Discretized predictor on a grid.

    Returns (index of t1, indices j of the increments X(s_(j+1)) - X(s_j)
    used, midpoint coefficients of those increments).
    """
    w = report.window
    times = np.asarray(times, dtype=float)
    matches = np.flatnonzero(np.isclose(times, w.t1, rtol=0.0, atol=1e-12 * max(1.0, abs(w.t1))))
    if matches.size == 0:
        raise ConfigurationError(f"path grid does not contain t1={w.t1}")
    i1 = int(matches[0])

    mode = ErrorMode(mode)
    if mode == ErrorMode.FINITE_PAST:
        starts = np.flatnonzero(np.isclose(times, -w.t0, rtol=0.0, atol=1e-12 * max(1.0, w.t0)))
        if starts.size == 0:
            raise ConfigurationError(f"path grid does not contain -t0={-w.t0}")
        i0 = int(starts[0])
    else:
        i0 = 0
    j = np.arange(i0, i1)
    if j.size == 0:
        return i1, j, np.zeros(0)

    mid = 0.5 * (times[j] + times[j + 1])
    if mode == ErrorMode.FINITE_PAST:
        coeff = finite_past_coeff_values(report.table, w, mid, report.q)
    else:
        coeff = integrated_b_values(report.model, report.ar, w.t1 - mid, w.t3, report.q)

    if coeff.size > 3:
        interior = coeff[1:-1]
        change = np.abs(np.diff(interior)) / np.maximum(np.abs(interior[:-1]), 1e-300)
        if np.max(change) > COARSE_GRID_CHANGE:
            logger.warning(
                f"Path grid is coarse relative to the predictor coefficients "
                f"(relative change {np.max(change):.2f} between cells); refine the grid step"
            )
    return i1, j, coeff


def apply_predictor(
    report: PredictionReport,
    path: "PathSample",
    mode: ErrorMode = ErrorMode.FINITE_PAST,
) -> float:
    """X(t1) plus the midpoint Riemann-Stieltjes sum of coefficient times dX."""
    times = np.asarray(path.times, dtype=float)
    values = np.asarray(path.values, dtype=float)
    i1, j, coeff = predictor_weights(report, times, mode)
    if j.size == 0:
        return float(values[i1])
    return float(values[i1] + coeff @ (values[j + 1] - values[j]))


__all__ = [
    "PredictionWindow",
    "PredictionReport",
    "DnSeries",
    "integrated_b",
    "integrated_b_values",
    "infinite_past_coeff",
    "coefficient_tail_mass",
    "finite_past_coeff",
    "finite_past_coeff_values",
    "eval_Dn",
    "dn_contributions",
    "infinite_error_variance",
    "error_variance",
    "build_report",
    "predictor_weights",
    "apply_predictor",
]
