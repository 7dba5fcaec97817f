"""
AR(inf) side of the model: alpha(t), a(t) = -alpha'(t) and beta(t).

The transforms satisfy p * c_hat(p) * alpha_hat(p) = 1. For fBm everything is
a power law; otherwise alpha and a are recovered on a log grid by
fixed-Talbot inversion of 1/(p c_hat(p)) and -1/c_hat(p) respectively, so a
is obtained from the contour representation rather than by differencing.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Optional

import numpy as np
from scipy import special
from scipy.integrate import simpson
from scipy.interpolate import PchipInterpolator

from .config import ArMethod, QuadratureConfig, config
from .errors import ConfigurationError, InversionError
from .laplace import stehfest, talbot_contour
from .model import LrdModel, c_hat, c_regular_values, c_values
from .quadrature import integrate_interval, integrate_singular, integrate_tail

logger = logging.getLogger("lrd-prediction.duality")

# Node density of the tabulated beta.
BETA_GRID_PER_DECADE = 16


# =============================================================================
# Closed forms and asymptotics
# =============================================================================

def alpha_asymptotic(model: LrdModel, t):
    """t^-d / Gamma(1-d); exact for fBm, large-t form otherwise."""
    d = model.d
    return np.asarray(t, dtype=float) ** (-d) / special.gamma(1.0 - d)


def a_asymptotic(model: LrdModel, t):
    """d t^-(d+1) / Gamma(1-d); exact for fBm, large-t form otherwise."""
    d = model.d
    return d * np.asarray(t, dtype=float) ** (-d - 1.0) / special.gamma(1.0 - d)


def beta_asymptotic(model: LrdModel, t):
    """sin(pi d) / (pi t); exact for fBm, large-t form otherwise."""
    return math.sin(math.pi * model.d) / (math.pi * np.asarray(t, dtype=float))


# =============================================================================
# AR coefficient
# =============================================================================

@dataclass(frozen=True, eq=False)
class ArCoefficient:
    """AR(inf) coefficient of a model, closed-form or tabulated from inversion."""

    model: LrdModel
    method: ArMethod
    inversion_nodes: int
    log_t: Optional[np.ndarray] = None
    log_a: Optional[np.ndarray] = None
    log_alpha: Optional[np.ndarray] = None
    _a_interp: Optional[PchipInterpolator] = field(default=None, init=False, repr=False)
    _alpha_interp: Optional[PchipInterpolator] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.method == ArMethod.NUMERIC_INVERSION:
            if self.log_t is None or self.log_a is None or self.log_alpha is None:
                raise ConfigurationError("numeric AR coefficient needs its tables")
            object.__setattr__(self, "_a_interp", PchipInterpolator(self.log_t, self.log_a))
            object.__setattr__(self, "_alpha_interp", PchipInterpolator(self.log_t, self.log_alpha))

    @property
    def is_closed_form(self) -> bool:
        return self.method == ArMethod.CLOSED_FORM

    @property
    def grid(self) -> Optional[tuple]:
        if self.log_t is None:
            return None
        return float(np.exp(self.log_t[0])), float(np.exp(self.log_t[-1]))

    def _tabulated(self, interp: PchipInterpolator, t: np.ndarray, low_slope: float, high_slope: float) -> np.ndarray:
        y = np.log(t)
        lo, hi = self.log_t[0], self.log_t[-1]
        value = interp(np.clip(y, lo, hi))
        value = np.where(y < lo, value + low_slope * (y - lo), value)
        value = np.where(y > hi, value + high_slope * (y - hi), value)
        return np.exp(value)

    def a(self, t) -> np.ndarray:
        """Vectorized a(t) for t > 0."""
        t = np.asarray(t, dtype=float)
        if self.is_closed_form:
            return a_asymptotic(self.model, t)
        return self._tabulated(self._a_interp, t, -(self.model.H0 + 0.5), -(self.model.H + 0.5))

    def alpha(self, t) -> np.ndarray:
        """Vectorized alpha(t) for t > 0."""
        t = np.asarray(t, dtype=float)
        if self.is_closed_form:
            return alpha_asymptotic(self.model, t)
        return self._tabulated(self._alpha_interp, t, -(self.model.H0 - 0.5), -(self.model.H - 0.5))

    def summary(self) -> Dict[str, Any]:
        return {
            "model": self.model.to_dict(),
            "method": self.method.value,
            "inversionNodes": self.inversion_nodes,
            "grid": self.grid,
        }


def build_ar(
    model: LrdModel,
    q: Optional[QuadratureConfig] = None,
    method: Optional[ArMethod] = None,
    inversion_nodes: Optional[int] = None,
    grid_min: Optional[float] = None,
    grid_max: Optional[float] = None,
    per_decade: Optional[int] = None,
) -> ArCoefficient:
    """Build the AR(inf) coefficient of ``model``.

    fBm defaults to the closed form; NUMERIC_INVERSION may be forced for it
    to validate the inversion against the exact power law.
    """
    nodes = inversion_nodes or config.inversion_nodes
    if method is None:
        method = ArMethod.CLOSED_FORM if model.is_fbm else ArMethod.NUMERIC_INVERSION
    if method == ArMethod.CLOSED_FORM:
        if not model.is_fbm:
            raise ConfigurationError(f"no closed-form AR coefficient for {model.describe()}")
        return ArCoefficient(model=model, method=method, inversion_nodes=nodes)

    lo = grid_min or config.ar_grid_min
    hi = grid_max or config.ar_grid_max
    density = per_decade or config.ar_grid_per_decade
    count = int(round(math.log10(hi / lo) * density)) + 1
    t = np.logspace(math.log10(lo), math.log10(hi), count)
    logger.info(f"Inverting AR coefficient of {model.describe()} on {count} nodes ({nodes} contour points)")

    z, gamma, r = talbot_contour(nodes)
    p = z[None, :] / t[:, None]
    transform = np.asarray(c_hat(model, p), dtype=complex)
    scale = r / (nodes * t)
    alpha = scale * np.real((1.0 / (p * transform)) @ gamma)
    a = -scale * np.real((1.0 / transform) @ gamma)

    _check_table(t, a, alpha)
    return ArCoefficient(
        model=model,
        method=method,
        inversion_nodes=nodes,
        log_t=np.log(t),
        log_a=np.log(a),
        log_alpha=np.log(alpha),
    )


def _check_table(t: np.ndarray, a: np.ndarray, alpha: np.ndarray) -> None:
    bad = np.zeros(t.size, dtype=bool)
    bad |= ~np.isfinite(a) | ~np.isfinite(alpha)
    bad |= (a <= 0) | (alpha <= 0)
    bad[1:] |= np.diff(a) >= 0
    bad[1:] |= np.diff(alpha) >= 0
    if bad.any():
        offending = t[bad]
        raise InversionError(
            f"AR inversion is not positive and decreasing at {offending.size} node(s), "
            f"first at t={offending[0]:.6g}",
            nodes=offending.tolist(),
        )


# =============================================================================
# Evaluators
# =============================================================================

def alpha_hat(model: LrdModel, y: float, q: Optional[QuadratureConfig] = None) -> float:
    """Laplace transform of alpha at y > 0: 1 / (y c_hat(y))."""
    if not y > 0:
        raise ConfigurationError(f"alpha_hat needs y > 0, got {y}")
    return float(1.0 / (y * c_hat(model, float(y))))


def eval_a(ar: ArCoefficient, t: float) -> float:
    """a(t) for t > 0."""
    if not t > 0:
        raise ConfigurationError(f"a(t) needs t > 0, got {t}")
    return float(ar.a(t))


def eval_alpha(ar: ArCoefficient, t: float) -> float:
    """alpha(t) for t > 0."""
    if not t > 0:
        raise ConfigurationError(f"alpha(t) needs t > 0, got {t}")
    return float(ar.alpha(t))


def eval_beta(model: LrdModel, ar: ArCoefficient, t: float, q: Optional[QuadratureConfig] = None) -> float:
    """beta(t), the integral of c(v) a(t+v) over v > 0."""
    if not t > 0:
        raise ConfigurationError(f"beta(t) needs t > 0, got {t}")
    if model.is_fbm and ar.is_closed_form:
        return float(beta_asymptotic(model, t))
    return _beta_quadrature(model, ar, float(t), q or QuadratureConfig())


@lru_cache(maxsize=4096)
def _beta_quadrature(model: LrdModel, ar: ArCoefficient, t: float, q: QuadratureConfig) -> float:
    split = min(t, 1.0)
    head = integrate_singular(
        lambda v: float(c_regular_values(model, v, q)) * float(ar.a(t + v)),
        0.0, split, q, left=model.H0 - 1.5, label=f"beta({t:.6g}) head",
    )

    def integrand(v: float) -> float:
        return float(c_values(model, v, q)) * float(ar.a(t + v))

    # a(t + v) turns over at v ~ t: [split, t] in log-coordinates, [t, inf) rescaled by t.
    upper = max(t, split)
    body = 0.0
    if upper > split:
        body = integrate_interval(
            lambda x: integrand(math.exp(x)) * math.exp(x),
            math.log(split), math.log(upper), q, label=f"beta({t:.6g}) body",
        )
    tail = upper * integrate_tail(
        lambda y: integrand(upper * y),
        1.0, q, label=f"beta({t:.6g}) tail", abs_tol=q.abs_tol / upper,
    )
    return head + body + tail


@lru_cache(maxsize=16)
def _beta_table(model: LrdModel, ar: ArCoefficient, q: QuadratureConfig) -> PchipInterpolator:
    lo, hi = ar.grid or (config.ar_grid_min, config.ar_grid_max)
    count = int(round(math.log10(hi / lo) * BETA_GRID_PER_DECADE)) + 1
    t = np.logspace(math.log10(lo), math.log10(hi), count)
    logger.info(f"Tabulating beta for {model.describe()} on {count} nodes")
    values = np.array([_beta_quadrature(model, ar, float(x), q) for x in t])
    return PchipInterpolator(np.log(t), np.log(values))


def beta_values(model: LrdModel, ar: ArCoefficient, t, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Vectorized beta; tabulated unless both c and a are closed-form.

    Outside the table beta is extended with its 1/t law at both ends.
    """
    t = np.asarray(t, dtype=float)
    if model.is_fbm and ar.is_closed_form:
        return beta_asymptotic(model, t)
    interp = _beta_table(model, ar, q or QuadratureConfig())
    lo, hi = interp.x[0], interp.x[-1]
    y = np.log(t)
    value = interp(np.clip(y, lo, hi))
    value = np.where(y < lo, value - (y - lo), value)
    value = np.where(y > hi, value - (y - hi), value)
    return np.exp(value)


def clear_duality_caches() -> None:
    _beta_quadrature.cache_clear()
    _beta_table.cache_clear()


# =============================================================================
# Oracles and residuals
# =============================================================================

def stehfest_alpha(model: LrdModel, t, order: Optional[int] = None) -> np.ndarray:
    """alpha(t) by Gaver-Stehfest inversion, independent of the Talbot tables."""
    order = order or config.stehfest_order
    return stehfest(lambda p: 1.0 / (p * np.asarray(c_hat(model, p), dtype=float)), t, order)


def alpha_hat_from_table(ar: ArCoefficient, y: float) -> float:
    """Laplace transform of the tabulated alpha at y.

    Simpson's rule on the log grid plus the power-law tails in closed form.
    """
    if ar.is_closed_form:
        d = ar.model.d
        return y ** (d - 1.0)
    t = np.exp(ar.log_t)
    body = simpson(np.exp(-y * t) * ar.alpha(t) * t, x=ar.log_t)

    t_lo, t_hi = t[0], t[-1]
    e_lo, e_hi = ar.model.H0 - 0.5, ar.model.H - 0.5
    A_lo = float(ar.alpha(t_lo)) * t_lo ** e_lo
    A_hi = float(ar.alpha(t_hi)) * t_hi ** e_hi
    head = A_lo * y ** (e_lo - 1.0) * special.gamma(1.0 - e_lo) * special.gammainc(1.0 - e_lo, y * t_lo)
    tail = A_hi * y ** (e_hi - 1.0) * special.gamma(1.0 - e_hi) * special.gammaincc(1.0 - e_hi, y * t_hi)
    return float(head + body + tail)


def duality_residual(model: LrdModel, ar: ArCoefficient, y: float, q: Optional[QuadratureConfig] = None) -> float:
    """y c_hat(y) alpha_hat(y) - 1 with alpha_hat recomputed from the inverted table."""
    return float(y * c_hat(model, float(y)) * alpha_hat_from_table(ar, y) - 1.0)


__all__ = [
    "ArCoefficient",
    "build_ar",
    "alpha_hat",
    "eval_a",
    "eval_alpha",
    "eval_beta",
    "beta_values",
    "alpha_asymptotic",
    "a_asymptotic",
    "beta_asymptotic",
    "stehfest_alpha",
    "alpha_hat_from_table",
    "duality_residual",
    "clear_duality_caches",
]
