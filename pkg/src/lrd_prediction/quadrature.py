"""
Quadrature primitives.

Scalar integrals go through QUADPACK (``scipy.integrate.quad``) with
algebraic endpoint weights where the integrand is singular. Bulk kernel
evaluations use fixed, vectorized rules: a geometrically graded composite
Gauss rule for singular convolutions, a trapezoid rule in log-coordinates for
half-line integrals, and scrambled Sobol sequences for high-dimensional
nested integrals.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special
from scipy.stats import qmc

from .config import QuadratureConfig
from .errors import QuadratureError

logger = logging.getLogger("lrd-prediction.quadrature")

# QUADPACK warnings are tolerated while the reported error stays below
# this multiple of the requested relative tolerance.
ACCEPTANCE_FACTOR = 1e3

# Rows of (x, shift) pairs evaluated per block by convolve().
CONVOLUTION_CHUNK = 1024


# =============================================================================
# Adaptive quadrature
# =============================================================================

def integrate_interval(
    func: Callable[[float], float],
    a: float,
    b: float,
    q: QuadratureConfig,
    points: Optional[Sequence[float]] = None,
    weight: Optional[str] = None,
    wvar=None,
    label: str = "integral",
    abs_tol: Optional[float] = None,
) -> float:
    """Integrate ``func`` over [a, b] with QUADPACK and check the error estimate.

    Raises QuadratureError when QUADPACK gives up with an error estimate
    above the acceptance threshold.
    """
    if a == b:
        return 0.0

    epsabs = q.abs_tol if abs_tol is None else abs_tol
    kwargs = {
        "epsabs": epsabs,
        "epsrel": q.rel_tol,
        "limit": q.max_subdivisions,
        "full_output": 1,
    }
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar
    elif points is not None and math.isfinite(a) and math.isfinite(b):
        inner = sorted(p for p in points if min(a, b) < p < max(a, b))
        if inner:
            kwargs["points"] = inner

    try:
        result = integrate.quad(func, a, b, **kwargs)
    except ValueError as e:
        raise QuadratureError(f"{label}: invalid quadrature input ({e})", estimate=float("nan"))

    value, estimate = float(result[0]), float(result[1])
    if not math.isfinite(value):
        raise QuadratureError(f"{label} on [{a}, {b}] is not finite", estimate=estimate)

    if len(result) > 3:
        tolerance = max(epsabs, ACCEPTANCE_FACTOR * q.rel_tol * abs(value))
        if estimate > tolerance:
            raise QuadratureError(
                f"{label} on [{a:.6g}, {b:.6g}] did not converge: {result[3].splitlines()[0]}",
                estimate=estimate,
                tolerance=tolerance,
            )
        logger.debug(f"{label}: accepted QUADPACK warning (estimate {estimate:.3g})")

    return value


def integrate_singular(
    func: Callable[[float], float],
    a: float,
    b: float,
    q: QuadratureConfig,
    left: float = 0.0,
    right: float = 0.0,
    label: str = "integral",
    abs_tol: Optional[float] = None,
) -> float:
    """Integrate (x-a)^left (b-x)^right func(x) over the finite interval [a, b]."""
    if left == 0.0 and right == 0.0:
        return integrate_interval(func, a, b, q, label=label, abs_tol=abs_tol)
    return integrate_interval(
        func, a, b, q, weight="alg", wvar=(left, right), label=label, abs_tol=abs_tol
    )


def integrate_tail(
    func: Callable[[float], float],
    a: float,
    q: QuadratureConfig,
    label: str = "tail",
    abs_tol: Optional[float] = None,
) -> float:
    """Integrate ``func`` over [a, inf)."""
    return integrate_interval(func, a, np.inf, q, label=label, abs_tol=abs_tol)


# =============================================================================
# Gauss rules
# =============================================================================

@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = 0.5 * (x + 1.0), 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=64)
def gauss_jacobi(order: int, alpha: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the integral of (1-x)^alpha x^beta f(x) over [0, 1]."""
    x, w = special.roots_jacobi(order, alpha, beta)
    nodes = 0.5 * (x + 1.0)
    weights = w / 2.0 ** (1.0 + alpha + beta)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


# =============================================================================
# Singular convolution rule
# =============================================================================

@dataclass(frozen=True, eq=False)
class ConvolutionRule:
    """Fixed rule for the integral over [0, 1] of eta^exponent Phi(xi), eta = 1 - xi.

    ``weights`` already contain the factor eta^exponent.
    """
    exponent: float
    xi: np.ndarray
    eta: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.xi.size)


@lru_cache(maxsize=32)
def convolution_rule(
    exponent: float,
    left_levels: int = 60,
    right_levels: int = 24,
    order: int = 8,
) -> ConvolutionRule:
    """Composite rule graded geometrically toward both ends of [0, 1].

    Panels shrink by halves toward xi = 0 (where the outer factor may vary on
    a tiny scale) and toward eta = 0 (where the kernel is singular). The last
    panel at eta = 0 is integrated exactly against eta^exponent by
    Gauss-Jacobi.
    """
    gx, gw = gauss_legendre(order)
    xi_parts, eta_parts, w_parts = [], [], []

    # xi in [0, 1/2]
    for j in range(1, left_levels + 1):
        lo, hi = 2.0 ** -(j + 1), 2.0 ** -j
        xi = lo + (hi - lo) * gx
        xi_parts.append(xi)
        eta_parts.append(1.0 - xi)
        w_parts.append((hi - lo) * gw * (1.0 - xi) ** exponent)
    hi = 2.0 ** -(left_levels + 1)
    xi = hi * gx
    xi_parts.append(xi)
    eta_parts.append(1.0 - xi)
    w_parts.append(hi * gw * (1.0 - xi) ** exponent)

    # eta in [0, 1/2]
    for j in range(1, right_levels + 1):
        lo, hi = 2.0 ** -(j + 1), 2.0 ** -j
        eta = lo + (hi - lo) * gx
        xi_parts.append(1.0 - eta)
        eta_parts.append(eta)
        w_parts.append((hi - lo) * gw * eta ** exponent)
    width = 2.0 ** -(right_levels + 1)
    jx, jw = gauss_jacobi(order, 0.0, exponent)
    eta = width * jx
    xi_parts.append(1.0 - eta)
    eta_parts.append(eta)
    w_parts.append(width ** (1.0 + exponent) * jw)

    rule = ConvolutionRule(
        exponent=exponent,
        xi=np.concatenate(xi_parts),
        eta=np.concatenate(eta_parts),
        weights=np.concatenate(w_parts),
    )
    for array in (rule.xi, rule.eta, rule.weights):
        array.setflags(write=False)
    return rule


def convolve(
    regular: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    outer: Callable[[np.ndarray], np.ndarray],
    x,
    shift,
    rule: Optional[ConvolutionRule] = None,
) -> np.ndarray:
    """Evaluate the integral over [0, x] of k(x - z) F(shift + z) dz.

    The kernel is k(v) = v^exponent * regular(v) with ``regular`` smooth up to
    v = 0; ``outer`` is F. Both callables receive 2D arrays. ``x`` and
    ``shift`` broadcast against each other; entries with x <= 0 give 0.
    """
    if rule is None:
        rule = convolution_rule(exponent)
    x, shift = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(shift, dtype=float))
    shape = x.shape
    xf, sf = x.ravel(), shift.ravel()
    out = np.zeros(xf.size)

    for start in range(0, xf.size, CONVOLUTION_CHUNK):
        stop = min(start + CONVOLUTION_CHUNK, xf.size)
        xs = xf[start:stop]
        positive = xs > 0
        if not positive.any():
            continue
        xp = xs[positive][:, None]
        values = regular(xp * rule.eta) * outer(sf[start:stop][positive][:, None] + xp * rule.xi)
        block = np.zeros(stop - start)
        block[positive] = xp[:, 0] ** (1.0 + exponent) * (values @ rule.weights)
        out[start:stop] = block

    return out.reshape(shape)


# =============================================================================
# Half-line trapezoid in log coordinates
# =============================================================================

@dataclass(frozen=True, eq=False)
class LogGrid:
    """Nodes u = exp(y) on a uniform y-grid with trapezoid weights step * u."""
    nodes: np.ndarray
    weights: np.ndarray
    step: float

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def span(self) -> Tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])


def log_trapezoid(lo: float, hi: float, step: float, margin: float) -> LogGrid:
    """Trapezoid grid covering [lo * e^-margin, hi * e^margin] in log-coordinates.

    Exponentially convergent for integrands analytic in a strip around the
    real y-axis that decay exponentially in |y|.
    """
    if not (0 < lo <= hi):
        raise ValueError(f"log grid needs 0 < lo <= hi, got lo={lo}, hi={hi}")
    y = np.arange(math.log(lo) - margin, math.log(hi) + margin + 0.5 * step, step)
    nodes = np.exp(y)
    return LogGrid(nodes=nodes, weights=step * nodes, step=step)


# =============================================================================
# Quasi-Monte Carlo
# =============================================================================

def qmc_integrate(
    func: Callable[[np.ndarray], np.ndarray],
    dim: int,
    log2_points: int,
    replications: int = 8,
    seed: int = 0,
) -> Tuple[float, float]:
    """Integrate ``func`` over the unit cube with scrambled Sobol points.

    The 2^log2_points points are split over independent scramblings; the
    spread of the replicate means gives the standard error.
    """
    per_replication = max(1, (2 ** log2_points) // replications)
    m = max(1, int(math.log2(per_replication)))
    estimates = []
    for r in range(replications):
        sampler = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng([seed, r]))
        points = sampler.random_base2(m)
        estimates.append(float(np.mean(func(points))))
    estimates = np.asarray(estimates)
    mean = float(estimates.mean())
    stderr = float(estimates.std(ddof=1) / math.sqrt(replications)) if replications > 1 else float("nan")
    return mean, stderr


__all__ = [
    "ACCEPTANCE_FACTOR",
    "integrate_interval",
    "integrate_singular",
    "integrate_tail",
    "gauss_legendre",
    "gauss_jacobi",
    "ConvolutionRule",
    "convolution_rule",
    "convolve",
    "LogGrid",
    "log_trapezoid",
    "qmc_integrate",
]
