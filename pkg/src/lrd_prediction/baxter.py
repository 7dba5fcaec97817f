"""
Baxter-type inequality for the finite-past predictor.

The left side is the L1 distance between finite- and infinite-past
coefficients, the right side the mass of the infinite-past coefficients
beyond the observation window. Their ratio stays bounded in t0 and tends to
d * int_0^1 s^(-d-1) [(1-s)^-d - 1] ds. The constant is also expanded as a
series in sin(pi d) with coefficients built from the nested integrals f_m.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .config import QuadratureConfig, config, validate_depth
from .duality import ArCoefficient
from .errors import ConfigurationError, SeriesConvergenceError, UnsupportedDepthError
from .kernels import NystromOperator, b_values, build_operator
from .model import LrdModel, g_regular_values
from .parallel import ordered_map
from .prediction import PredictionWindow, coefficient_tail_mass, integrated_b_values
from .quadrature import (
    convolution_rule,
    integrate_singular,
    integrate_tail,
    log_trapezoid,
    qmc_integrate,
)

logger = logging.getLogger("lrd-prediction.baxter")

# Log-grid half-width for the f_m recursion; f_m decays like (log u)^(m-1)/u.
FM_MARGIN = 60.0


# =============================================================================
# Constants
# =============================================================================

def _check_d(d: float) -> None:
    if not 0.0 < d < 0.5:
        raise ConfigurationError(f"d must lie in (0, 1/2), got {d}")


def _power_gap(s: float, d: float) -> float:
    """[1 - (1-s)^d] / s, extended continuously to s = 0 and s = 1."""
    if s <= 0.0:
        return d
    if s >= 1.0:
        return 1.0
    return -math.expm1(d * math.log1p(-s)) / s


def limit_integral(d: float, q: Optional[QuadratureConfig] = None) -> float:
    """int_0^1 s^(-d-1) [(1-s)^-d - 1] ds."""
    _check_d(d)
    q = q or QuadratureConfig()
    # s^(-d-1) [(1-s)^-d - 1] = s^-d (1-s)^-d * [1 - (1-s)^d] / s
    # QUADPACK's algebraic rule samples both endpoints.
    return integrate_singular(
        lambda s: _power_gap(s, d),
        0.0, 1.0, q, left=-d, right=-d, label="limit integral",
    )


def limit_integral_gamma_form(d: float) -> float:
    """Gamma(-d) Gamma(1-d) / Gamma(1-2d) + 1/d, the same integral in closed form."""
    _check_d(d)
    return special.gamma(-d) * special.gamma(1.0 - d) / special.gamma(1.0 - 2.0 * d) + 1.0 / d


def limit_constant(d: float, q: Optional[QuadratureConfig] = None) -> float:
    """Limit of the Baxter ratio as t0 -> inf."""
    return d * limit_integral(d, q)


# =============================================================================
# Left side
# =============================================================================

def _window_mass(operator: NystromOperator, t2: float) -> np.ndarray:
    """rho_j = int_0^t2 b(tau, w_j) dtau on a rule graded toward tau = 0."""
    rule = convolution_rule(0.0)
    tau = t2 * rule.xi
    b = b_values(operator.model, operator.ar, tau[None, :], operator.nodes[:, None], operator.q)
    return t2 * (b @ rule.weights)


def baxter_lhs(
    model: LrdModel,
    ar: ArCoefficient,
    w: PredictionWindow,
    q: Optional[QuadratureConfig] = None,
    operator: Optional[NystromOperator] = None,
    max_terms: Optional[int] = None,
) -> float:
    """int_(-t0)^t1 ds int_0^t3 {h(s + t0, u) - b(t1 - s, u)} du.

    Integrating the rows of the h-series over s turns every iterate into
    rho^T V_n, so the left side is the sum over n >= 1 of
    sum_j omega_j rho_j V_n(w_j).
    """
    q = q or QuadratureConfig()
    max_terms = max_terms or config.max_series_terms
    if operator is None:
        operator = build_operator(model, ar, w.t2, q, lo=min(w.t2, w.t3), hi=max(w.t2, w.t3))
    elif not math.isclose(operator.t2, w.t2, rel_tol=1e-12):
        raise ConfigurationError(f"operator was built for t2={operator.t2}, window has t2={w.t2}")

    mass = _window_mass(operator, w.t2) * operator.weights
    V = integrated_b_values(model, ar, w.t2 + operator.nodes, w.t3, q)
    terms: List[float] = []
    for n in range(1, max_terms + 1):
        terms.append(float(mass @ V))
        total = math.fsum(terms)
        if n >= 2 and terms[-2] > 0:
            ratio = terms[-1] / terms[-2]
            if ratio < 1.0 and terms[-1] * ratio / (1.0 - ratio) < q.rel_tol * total:
                logger.debug(f"Baxter left side t0={w.t0:g}: {n} terms")
                return total
        V = operator.apply(V)
    raise SeriesConvergenceError(
        f"Baxter left side did not converge within {max_terms} terms",
        last_norm=terms[-1],
        terms=max_terms,
    )


def baxter_lhs_closed_form(H: float, w: PredictionWindow, q: Optional[QuadratureConfig] = None) -> float:
    """fBm left side from the closed-form kernels.

    K t2^-d int_0^t3 du u^d int_0^1 ds s^-d t2 / (u + t2 s)
    {(1 + u/t2)^d (1-s)^-d - 1}. The inner integrand is rewritten as
    s^-d (1-s)^-d t2 [(1 + u/t2)^d - (1-s)^d] / (u + t2 s), which stays
    finite at s = 0 for u > 0 and reduces to the limit integral at u = 0.
    """
    q = q or QuadratureConfig()
    d = H - 0.5
    t2, t3 = w.t2, w.t3
    if t3 <= 0:
        return 0.0
    at_zero = limit_integral(d, q)

    def inner(u: float) -> float:
        if u <= 0.0:
            return at_zero
        lift = math.expm1(d * math.log1p(u / t2))
        return integrate_singular(
            lambda s: t2 * (lift + s * _power_gap(s, d)) / (u + t2 * s),
            0.0, 1.0, q, left=-d, right=-d, label="closed-form lhs inner",
        )

    outer = integrate_singular(inner, 0.0, t3, q, left=d, label="closed-form lhs")
    return math.sin(math.pi * d) / math.pi * t2 ** (-d) * outer


def lhs_asymptotic(
    model: LrdModel,
    ar: ArCoefficient,
    w: PredictionWindow,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """t2 a(t2) * int_0^t3 g(s) ds * int_0^1 s^(-d-1) [(1-s)^-d - 1] ds."""
    q = q or QuadratureConfig()
    g_mass = integrate_singular(
        lambda s: float(g_regular_values(model, s, q)),
        0.0, w.t3, q, left=model.d0, label="integral of g",
    )
    return w.t2 * float(ar.a(w.t2)) * g_mass * limit_integral(model.d, q)


# =============================================================================
# Right side
# =============================================================================

def baxter_rhs(
    model: LrdModel,
    ar: ArCoefficient,
    w: PredictionWindow,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """int_(-inf)^(-t0) ds int_0^t3 b(t1 - s, u) du = int_0^t3 g(t3 - z) alpha(t2 + z) dz."""
    if w.t3 <= 0:
        return 0.0
    return coefficient_tail_mass(model, ar, w.t3, w.t2, q)


def baxter_rhs_closed_form(H: float, w: PredictionWindow, q: Optional[QuadratureConfig] = None) -> float:
    """fBm right side: int_0^t3 I_(u/(u+t2))(d, 1-d) du."""
    q = q or QuadratureConfig()
    d = H - 0.5
    t2 = w.t2
    # I_x(d, 1-d) ~ x^d / (d B(d, 1-d)) as x -> 0
    at_zero = t2 ** (-d) / (d * special.beta(d, 1.0 - d))

    def regular(u: float) -> float:
        if u <= 0.0:
            return at_zero
        return float(special.betainc(d, 1.0 - d, u / (u + t2))) * u ** (-d)

    return integrate_singular(regular, 0.0, w.t3, q, left=d, label="closed-form rhs")


# =============================================================================
# f_m
# =============================================================================

def _f1(u):
    return 1.0 / (math.pi * (1.0 + np.asarray(u, dtype=float)))


def _f2(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        value = np.log1p(u) / np.where(u > 0, u, 1.0)
    return np.where(u > 0, value, 1.0) / math.pi ** 2


def _check_fm_depth(m: int) -> None:
    ok, error = validate_depth(m, config.max_fm_depth, "m")
    if not ok:
        if int(m) == m and m > config.max_fm_depth:
            raise UnsupportedDepthError(int(m), config.max_fm_depth, "m")
        raise ConfigurationError(error)


def _fm_quad(m: int, u: float, q: QuadratureConfig) -> float:
    if m == 2:
        return float(_f2(u))
    return integrate_tail(
        lambda s: _fm_quad(m - 1, s, q) / (1.0 + s + u),
        0.0, q, label=f"f_{m}",
    ) / math.pi


def _fm_qmc(m: int, u: float, seed: int = 0) -> Tuple[float, float]:
    # f_m(u) = pi^-(m-2) int f_2(s_(m-2)) prod 1/(1 + s_(l+1) + s_l) 1/(1 + s_1 + u)
    dim = m - 2

    def integrand(points: np.ndarray) -> np.ndarray:
        s = points / (1.0 - points)
        jac = np.prod(1.0 / (1.0 - points) ** 2, axis=1)
        value = _f2(s[:, -1]) / (1.0 + s[:, 0] + u)
        for l in range(dim - 1):
            value = value / (1.0 + s[:, l + 1] + s[:, l])
        return value * jac

    mean, stderr = qmc_integrate(integrand, dim, config.qmc_log2_points, config.qmc_replications, seed)
    return mean / math.pi ** dim, stderr / math.pi ** dim


def eval_f_m(m: int, u: float, q: Optional[QuadratureConfig] = None) -> float:
    """f_m(u): closed form for m <= 2, iterated quadrature for m <= 4, QMC beyond."""
    _check_fm_depth(m)
    if u < 0:
        raise ConfigurationError(f"f_m needs u >= 0, got {u}")
    if m == 1:
        return float(_f1(u))
    if m == 2:
        return float(_f2(u))
    q = q or QuadratureConfig()
    if m <= 4:
        return _fm_quad(m, float(u), q.with_rel_tol(max(q.rel_tol, 1e-8)))
    value, stderr = _fm_qmc(m, float(u))
    logger.debug(f"f_{m}({u:g}) = {value:.6g} +/- {stderr:.2g}")
    return value


def f_m_grid(depth: int, step: Optional[float] = None, margin: float = FM_MARGIN) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray]]:
    """f_1..f_depth on a log grid by f_k(u) = (1/pi) int f_(k-1)(s) / (1 + s + u) ds.

    Returns (nodes, weights, [f_1, ..., f_depth]).
    """
    _check_fm_depth(depth)
    grid = log_trapezoid(1.0, 1.0, step or config.nystrom_step, margin)
    u, omega = grid.nodes, grid.weights
    values = [_f1(u)]
    if depth >= 2:
        values.append(_f2(u))
    if depth >= 3:
        kernel = omega[None, :] / (math.pi * (1.0 + u[None, :] + u[:, None]))
        for _ in range(3, depth + 1):
            values.append(kernel @ values[-1])
    return u, omega, values


def sine_series_terms(d: float, M: int, q: Optional[QuadratureConfig] = None) -> List[float]:
    """sin^m(pi d) int_0^inf f_m(u) int_0^1 (tau + u)^(-d-1) dtau du for m = 1..M."""
    _check_d(d)
    u, omega, values = f_m_grid(M)
    inner = (u ** (-d) - (1.0 + u) ** (-d)) / d
    sine = math.sin(math.pi * d)
    return [float(sine ** m * (omega @ (f * inner))) for m, f in enumerate(values, start=1)]


def sine_series_check(d: float, M: int, q: Optional[QuadratureConfig] = None) -> Tuple[float, float]:
    """(M-term partial sum, target integral)."""
    partial = math.fsum(sine_series_terms(d, M, q))
    return partial, limit_integral(d, q)


# =============================================================================
# Sweep
# =============================================================================

@dataclass(frozen=True)
class BaxterSweep:
    """Both sides of the inequality over increasing past horizons."""

    d: float
    t1: float
    T: float
    t0_values: List[float]
    lhs_values: List[float]
    rhs_values: List[float]
    limit_constant: float

    def __post_init__(self):
        _check_d(self.d)

    @property
    def ratios(self) -> List[float]:
        return [l / r for l, r in zip(self.lhs_values, self.rhs_values)]

    @property
    def empirical_constant(self) -> float:
        """Largest observed ratio."""
        return max(self.ratios)

    def rows(self) -> List[Dict[str, float]]:
        return [
            {"t0": t0, "lhs": l, "rhs": r, "ratio": l / r, "limit_constant": self.limit_constant}
            for t0, l, r in zip(self.t0_values, self.lhs_values, self.rhs_values)
        ]


def baxter_sweep(
    model: LrdModel,
    ar: ArCoefficient,
    t1: float,
    T: float,
    t0_values: Sequence[float],
    q: Optional[QuadratureConfig] = None,
) -> BaxterSweep:
    """Evaluate both sides for every t0 in parallel, results in input order."""
    q = q or QuadratureConfig()
    t0_values = [float(t0) for t0 in t0_values]
    if any(b <= a for a, b in zip(t0_values, t0_values[1:])):
        raise ConfigurationError("t0 values must be increasing")

    def point(t0: float) -> Tuple[float, float]:
        w = PredictionWindow(t0=t0, t1=t1, T=T)
        lhs, rhs = baxter_lhs(model, ar, w, q), baxter_rhs(model, ar, w, q)
        logger.info(f"Baxter t0={t0:g}: lhs={lhs:.6g} rhs={rhs:.6g} ratio={lhs / rhs:.6g}")
        return lhs, rhs

    results = ordered_map(point, t0_values)
    return BaxterSweep(
        d=model.d,
        t1=t1,
        T=T,
        t0_values=t0_values,
        lhs_values=[r[0] for r in results],
        rhs_values=[r[1] for r in results],
        limit_constant=limit_constant(model.d, q),
    )


__all__ = [
    "BaxterSweep",
    "limit_integral",
    "limit_integral_gamma_form",
    "limit_constant",
    "baxter_lhs",
    "baxter_lhs_closed_form",
    "lhs_asymptotic",
    "baxter_rhs",
    "baxter_rhs_closed_form",
    "eval_f_m",
    "f_m_grid",
    "sine_series_terms",
    "sine_series_check",
    "baxter_sweep",
]
