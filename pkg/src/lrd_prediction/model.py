"""
Process specifications and their second-order quantities.

An ``LrdModel`` describes a Gaussian process with stationary increments
through the moving-average coefficient

    c(t) = integral of exp(-t s) f(s) ds over (0, inf),   t > 0,

with spectral density f(s) = K s^(1/2-H) (1+s)^(H-H0). The fBm family has
closed forms for everything; the two-index family (local index H0, long-time
index H) is evaluated numerically and tabulated for bulk use.
"""
import json
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

import mpmath
import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .config import ModelKind, QuadratureConfig, config, validate_model_parameters
from .errors import ModelError, QuadratureError
from .quadrature import gauss_legendre, integrate_interval, integrate_singular, integrate_tail

logger = logging.getLogger("lrd-prediction.model")

# Tabulation range of the two-index model.
TABLE_MIN = 1e-8
TABLE_MAX = 1e8


# =============================================================================
# Model specification
# =============================================================================

def default_scale(H: float) -> float:
    """sin(pi (H - 1/2)) / pi, the normalization that makes f match fBm(H) at s -> 0."""
    return math.sin(math.pi * (H - 0.5)) / math.pi


@dataclass(frozen=True)
class LrdModel:
    """A process specification: fBm(H) or the two-index spectral density model."""

    kind: ModelKind
    H: float
    H0: Optional[float] = None
    scale_k: Optional[float] = None

    def __post_init__(self):
        try:
            kind = ModelKind(self.kind)
        except ValueError:
            raise ModelError(f"unknown model kind {self.kind!r}; expected 'fbm' or 'two_index'")
        object.__setattr__(self, "kind", kind)

        if self.H0 is None and kind == ModelKind.TWO_INDEX:
            raise ModelError("two_index model requires H0")
        try:
            H = float(self.H)
            H0 = H if self.H0 is None else float(self.H0)
        except (TypeError, ValueError):
            raise ModelError(f"H and H0 must be numbers, got H={self.H!r}, H0={self.H0!r}")

        ok, error = validate_model_parameters(kind, H, H0, self.scale_k)
        if not ok:
            raise ModelError(error)

        scale = default_scale(H) if self.scale_k is None else float(self.scale_k)
        if kind == ModelKind.FBM and not math.isclose(scale, default_scale(H), rel_tol=1e-12):
            raise ModelError("fBm has a fixed normalization; scaleK is only accepted for two_index")

        object.__setattr__(self, "H", H)
        object.__setattr__(self, "H0", H0)
        object.__setattr__(self, "scale_k", scale)

        if kind == ModelKind.TWO_INDEX:
            _check_integrability(self)

    @property
    def d(self) -> float:
        """Long-memory exponent H - 1/2."""
        return self.H - 0.5

    @property
    def d0(self) -> float:
        """Local exponent H0 - 1/2."""
        return self.H0 - 0.5

    @property
    def is_fbm(self) -> bool:
        return self.kind == ModelKind.FBM

    def density(self, s):
        """Spectral density f(s); zero for s <= 0."""
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = self.scale_k * s ** (0.5 - self.H) * (1.0 + s) ** (self.H - self.H0)
        return np.where(s > 0, value, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        data = {"kind": self.kind.value, "H": self.H, "H0": self.H0}
        if self.kind == ModelKind.TWO_INDEX:
            data["scaleK"] = self.scale_k
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LrdModel":
        if not isinstance(data, dict):
            raise ModelError("model document must be an object")
        unknown = set(data) - {"kind", "H", "H0", "scaleK"}
        if unknown:
            raise ModelError(f"unknown model keys: {', '.join(sorted(unknown))}")
        if "kind" not in data or "H" not in data:
            raise ModelError("model document requires 'kind' and 'H'")
        return cls(
            kind=data["kind"],
            H=data["H"],
            H0=data.get("H0"),
            scale_k=data.get("scaleK"),
        )

    def describe(self) -> str:
        if self.is_fbm:
            return f"fBm(H={self.H:g})"
        return f"two_index(H={self.H:g}, H0={self.H0:g}, K={self.scale_k:.6g})"


def fbm(H: float) -> LrdModel:
    """Shorthand for the fBm model."""
    return LrdModel(ModelKind.FBM, H)


def two_index(H: float, H0: float, scale_k: Optional[float] = None) -> LrdModel:
    """Shorthand for the two-index model."""
    return LrdModel(ModelKind.TWO_INDEX, H, H0, scale_k)


def parse_model_document(text: str) -> LrdModel:
    """Parse a JSON model document such as {"kind": "fbm", "H": 0.75}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"model document is not valid JSON: {e}")
    return LrdModel.from_dict(data)


def load_model(path: Union[str, Path]) -> LrdModel:
    """Read a model document from disk."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ModelError(f"cannot read model file {path}: {e}")
    model = parse_model_document(text)
    logger.info(f"Loaded model {model.describe()} from {path}")
    return model


def spectral_mass(model: LrdModel, q: Optional[QuadratureConfig] = None) -> float:
    """Integral of f(s) / (1 + s) over (0, inf), split at s = 1 with s -> 1/s on the tail."""
    q = q or QuadratureConfig()
    K, H, H0 = model.scale_k, model.H, model.H0
    head = integrate_singular(
        lambda s: K * (1.0 + s) ** (H - H0 - 1.0), 0.0, 1.0, q,
        left=0.5 - H, label="spectral mass head",
    )
    tail = integrate_singular(
        lambda x: K * (1.0 + x) ** (H - H0 - 1.0), 0.0, 1.0, q,
        left=H0 - 1.5, label="spectral mass tail",
    )
    return head + tail


def _check_integrability(model: LrdModel) -> None:
    try:
        mass = spectral_mass(model)
    except QuadratureError as e:
        raise ModelError(f"spectral density of {model.describe()} is not integrable against 1/(1+s): {e}")
    expected = model.scale_k * special.beta(1.5 - model.H, model.H0 - 0.5)
    if not (math.isfinite(mass) and mass > 0 and math.isclose(mass, expected, rel_tol=1e-6)):
        raise ModelError(f"spectral mass check failed for {model.describe()}: {mass} vs {expected}")


# =============================================================================
# Closed forms
# =============================================================================

def variogram_constant(H: float) -> float:
    """v(H) = Gamma(2-2H) cos(pi H) / (pi H (1-2H)), the fBm variogram at lag 1."""
    return special.gamma(2.0 - 2.0 * H) * math.cos(math.pi * H) / (math.pi * H * (1.0 - 2.0 * H))


def infinite_past_error_closed_form(H: float, t3: float) -> float:
    """Integral of g^2 over [0, t3] for fBm: t3^(2H) / (2H Gamma(H+1/2)^2)."""
    return t3 ** (2.0 * H) / (2.0 * H * special.gamma(H + 0.5) ** 2)


def increment_autocov_asymptotic(H: float, t: float, s: float) -> float:
    """Large-lag form t^(2H-2) s^2 Gamma(2-2H) sin((H-1/2) pi) / pi."""
    return t ** (2.0 * H - 2.0) * s ** 2 * special.gamma(2.0 - 2.0 * H) * math.sin((H - 0.5) * math.pi) / math.pi


def _fbm_c(H: float, t):
    d = H - 0.5
    return t ** (d - 1.0) / special.gamma(d)


def _fbm_g(H: float, t):
    d = H - 0.5
    return t ** d / special.gamma(d + 1.0)


# =============================================================================
# Two-index spectral integrals
# =============================================================================

def _c_integrand(H: float, H0: float, t: float) -> Callable[[float], float]:
    # c(t) = K t^(H-3/2) * integral over x of exp((3/2-H) x - e^x) (1 + e^x/t)^(H-H0)
    def integrand(x: float) -> float:
        ex = math.exp(x)
        return math.exp((1.5 - H) * x - ex + (H - H0) * math.log1p(ex / t))
    return integrand


@lru_cache(maxsize=8192)
def _two_index_c(model: LrdModel, t: float, q: QuadratureConfig) -> float:
    H, H0 = model.H, model.H0
    x_lo = -40.0 / (1.5 - H) + min(0.0, math.log(t))
    x_hi = math.log(50.0)
    value = integrate_interval(
        _c_integrand(H, H0, t), x_lo, x_hi, q,
        points=[math.log(t)], label=f"c({t:.6g})",
    )
    return model.scale_k * t ** (H - 1.5) * value


@lru_cache(maxsize=8192)
def _two_index_g(model: LrdModel, t: float, q: QuadratureConfig) -> float:
    H, H0 = model.H, model.H0
    split = 50.0 * max(1.0, t)

    def head(x: float) -> float:
        ex = math.exp(x)
        return -math.expm1(-ex) * math.exp((0.5 - H) * x + (H - H0) * math.log1p(ex / t))

    x_lo = -40.0 / (1.5 - H) + min(0.0, math.log(t))
    body = integrate_interval(
        head, x_lo, math.log(split), q,
        points=[math.log(t)], label=f"g({t:.6g}) body",
    )
    # beyond sigma = split the factor 1 - e^-sigma equals 1 in double precision
    tail = integrate_singular(
        lambda x: (1.0 + t * x / split) ** (H - H0), 0.0, 1.0, q,
        left=H0 - 1.5, label=f"g({t:.6g}) tail",
    )
    tail *= split ** (0.5 - H) * (split / t) ** (H - H0)
    return model.scale_k * t ** (H - 0.5) * (body + tail)


def _c_regular_limit(model: LrdModel) -> float:
    """lim c(v) v^(3/2-H0) as v -> 0+."""
    return model.scale_k * special.gamma(1.5 - model.H0)


# =============================================================================
# Tabulated two-index model
# =============================================================================

@dataclass(frozen=True, eq=False)
class ModelTable:
    """Log-log cubic splines of c(v) v^(3/2-H0) and g(v) v^(1/2-H0).

    Beyond the table the regular parts are extended with the exact
    power laws: constant at v -> 0, slope H - H0 at v -> inf.
    """
    model: LrdModel
    log_t: np.ndarray
    c_spline: CubicSpline
    g_spline: CubicSpline

    def _log_regular(self, spline: CubicSpline, v: np.ndarray) -> np.ndarray:
        lo, hi = self.log_t[0], self.log_t[-1]
        with np.errstate(divide="ignore"):
            y = np.log(np.maximum(v, 0.0))
        y = np.where(np.isfinite(y), y, lo)
        inside = np.clip(y, lo, hi)
        value = spline(inside)
        slope = self.model.H - self.model.H0
        return np.where(y > hi, value + slope * (y - hi), value)

    def c_regular(self, v) -> np.ndarray:
        return np.exp(self._log_regular(self.c_spline, np.asarray(v, dtype=float)))

    def g_regular(self, v) -> np.ndarray:
        return np.exp(self._log_regular(self.g_spline, np.asarray(v, dtype=float)))

    def c(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = self.c_regular(t) * t ** (self.model.H0 - 1.5)
        return np.where(t > 0, value, 0.0)

    def g(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        with np.errstate(invalid="ignore"):
            value = self.g_regular(t) * np.maximum(t, 0.0) ** (self.model.H0 - 0.5)
        return np.where(t > 0, value, 0.0)


@lru_cache(maxsize=8)
def model_table(model: LrdModel, q: QuadratureConfig) -> ModelTable:
    """Tabulate the two-index model on [1e-8, 1e8]."""
    if model.is_fbm:
        raise ModelError("fBm has closed forms; no table is needed")
    per_decade = config.model_grid_per_decade
    decades = math.log10(TABLE_MAX / TABLE_MIN)
    t = np.logspace(math.log10(TABLE_MIN), math.log10(TABLE_MAX), int(round(decades * per_decade)) + 1)
    logger.info(f"Tabulating {model.describe()} on {t.size} nodes")

    c_reg = np.array([_two_index_c(model, float(x), q) * x ** (1.5 - model.H0) for x in t])
    g_reg = np.array([_two_index_g(model, float(x), q) * x ** (0.5 - model.H0) for x in t])
    log_t = np.log(t)
    return ModelTable(
        model=model,
        log_t=log_t,
        c_spline=CubicSpline(log_t, np.log(c_reg)),
        g_spline=CubicSpline(log_t, np.log(g_reg)),
    )


def clear_model_caches() -> None:
    """Drop memoized spectral integrals and tables."""
    _two_index_c.cache_clear()
    _two_index_g.cache_clear()
    model_table.cache_clear()
    _two_index_c_hat.cache_clear()


# =============================================================================
# Public evaluators
# =============================================================================

def eval_c(model: LrdModel, t: float, q: Optional[QuadratureConfig] = None) -> float:
    """MA(inf) coefficient c(t); zero for t <= 0."""
    t = float(t)
    if t <= 0:
        return 0.0
    if model.is_fbm:
        return float(_fbm_c(model.H, t))
    return _two_index_c(model, t, q or QuadratureConfig())


def eval_g(model: LrdModel, t: float, q: Optional[QuadratureConfig] = None) -> float:
    """g(t), the integral of c over [0, t]; zero for t <= 0."""
    t = float(t)
    if t <= 0:
        return 0.0
    if model.is_fbm:
        return float(_fbm_g(model.H, t))
    return _two_index_g(model, t, q or QuadratureConfig())


def c_values(model: LrdModel, t, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Vectorized c; tabulated for the two-index model."""
    t = np.asarray(t, dtype=float)
    if model.is_fbm:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, _fbm_c(model.H, np.where(t > 0, t, 1.0)), 0.0)
    return model_table(model, q or QuadratureConfig()).c(t)


def g_values(model: LrdModel, t, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Vectorized g; tabulated for the two-index model."""
    t = np.asarray(t, dtype=float)
    if model.is_fbm:
        return np.where(t > 0, _fbm_g(model.H, np.maximum(t, 0.0)), 0.0)
    return model_table(model, q or QuadratureConfig()).g(t)


def c_regular_values(model: LrdModel, v, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """c(v) v^(3/2-H0), finite down to v = 0."""
    v = np.asarray(v, dtype=float)
    if model.is_fbm:
        return np.full(v.shape, 1.0 / special.gamma(model.d))
    return model_table(model, q or QuadratureConfig()).c_regular(v)


def g_regular_values(model: LrdModel, v, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """g(v) v^(1/2-H0), finite down to v = 0."""
    v = np.asarray(v, dtype=float)
    if model.is_fbm:
        return np.full(v.shape, 1.0 / special.gamma(model.d + 1.0))
    return model_table(model, q or QuadratureConfig()).g_regular(v)


def g_increment(model: LrdModel, u, t: float, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """g(u + t) - g(u) without cancellation for u >> t."""
    q = q or QuadratureConfig()
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        return g_increment(model, u.reshape(1), t, q)[0]
    direct = g_values(model, u + t, q) - g_values(model, u, q)
    far = u > 4.0 * t
    if not far.any():
        return direct
    nodes, weights = gauss_legendre(16)
    uf = u[far][..., None]
    integral = t * (c_values(model, uf + t * nodes, q) @ weights)
    out = np.array(direct, dtype=float)
    out[far] = integral
    return out


# =============================================================================
# Laplace transform of c
# =============================================================================

@lru_cache(maxsize=65536)
def _two_index_c_hat(H: float, H0: float, K: float, p: complex) -> complex:
    prefactor = K * special.beta(1.5 - H, H0 - 0.5)
    value = mpmath.hyp2f1(H0 - H, 1.5 - H, 1.0 + H0 - H, 1.0 - mpmath.mpc(p))
    return complex(prefactor * mpmath.power(mpmath.mpc(p), 0.5 - H) * value)


def c_hat(model: LrdModel, p):
    """Laplace transform of c, valid for complex p off the negative real axis.

    fBm: p^-(H-1/2). Two-index: K B(3/2-H, H0-1/2) p^(1/2-H)
    2F1(H0-H, 3/2-H; 1+H0-H; 1-p).
    """
    p_arr = np.asarray(p)
    is_complex = np.iscomplexobj(p_arr)
    if model.is_fbm:
        values = np.power(p_arr.astype(complex if is_complex else float), -model.d)
    else:
        flat = [
            _two_index_c_hat(model.H, model.H0, model.scale_k, complex(z))
            for z in p_arr.ravel()
        ]
        values = np.array(flat, dtype=complex).reshape(p_arr.shape)
        if not is_complex:
            values = values.real
    return values if values.ndim else values[()]


# =============================================================================
# Variogram and covariances
# =============================================================================

def variogram(
    model: LrdModel,
    t: float,
    q: Optional[QuadratureConfig] = None,
    closed_form: Optional[bool] = None,
) -> float:
    """sigma^2(t), the integral of {g(t-s) - g(-s)}^2 over the real line.

    fBm uses v(H) t^(2H) unless ``closed_form=False``.
    """
    q = q or QuadratureConfig()
    t = abs(float(t))
    if t == 0:
        return 0.0
    if closed_form is None:
        closed_form = model.is_fbm
    if closed_form:
        if not model.is_fbm:
            raise ModelError("closed-form variogram exists only for fBm")
        return variogram_constant(model.H) * t ** (2.0 * model.H)
    return _numeric_variogram(model, t, q)


@lru_cache(maxsize=4096)
def _numeric_variogram(model: LrdModel, t: float, q: QuadratureConfig) -> float:
    d0 = model.d0

    def increment_sq(u: float) -> float:
        return float(g_increment(model, np.array([u]), t, q)[0]) ** 2

    # integral of g^2 over [0, t]: g ~ u^d0 at 0
    own = integrate_singular(
        lambda u: float(g_regular_values(model, u, q)) ** 2, 0.0, t, q,
        left=2.0 * d0, label=f"variogram({t:.6g}) own",
    )
    near = integrate_interval(increment_sq, 0.0, t, q, label=f"variogram({t:.6g}) near")
    far = integrate_tail(increment_sq, t, q, label=f"variogram({t:.6g}) far")
    logger.debug(f"variogram({t:.6g}): own={own:.6g} near={near:.6g} far={far:.6g}")
    return own + near + far


def increment_autocov(
    model: LrdModel,
    t: float,
    s: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """E[(X(t+s) - X(t)) (X(s) - X(0))], the autocovariance of s-increments at lag t."""
    q = q or QuadratureConfig()
    if not s > 0:
        raise ModelError(f"increment span must be positive, got {s}")
    t = abs(float(t))
    if model.is_fbm:
        H = model.H
        return 0.5 * variogram_constant(H) * (
            (t + s) ** (2 * H) + abs(t - s) ** (2 * H) - 2 * t ** (2 * H)
        )
    if t <= 4.0 * s:
        return 0.5 * (
            variogram(model, t + s, q) + variogram(model, abs(t - s), q) - 2.0 * variogram(model, t, q)
        )
    return increment_autocov_direct(model, t, s, q)


def increment_autocov_direct(model: LrdModel, t: float, s: float, q: Optional[QuadratureConfig] = None) -> float:
    """Same covariance as the integral of D(x) D(x+t) over x > -s, D(x) = g(x+s) - g(x).

    All factors are positive, so large lags carry no cancellation.
    """
    q = q or QuadratureConfig()
    t = abs(float(t))
    d0 = model.d0

    def D(x: float) -> float:
        if x <= 0:
            return float(g_values(model, x + s, q))
        return float(g_increment(model, np.array([x]), s, q)[0])

    if t >= s:
        # D(x) = (x+s)^d0 g_reg(x+s) on (-s, 0]
        head = integrate_singular(
            lambda x: float(g_regular_values(model, x + s, q)) * D(x + t),
            -s, 0.0, q, left=d0, label="increment autocov head",
        )
    else:
        head = integrate_interval(
            lambda x: D(x) * D(x + t), -s, 0.0, q, points=[-t], label="increment autocov head",
        )
    body = integrate_interval(lambda x: D(x) * D(x + t), 0.0, s, q, label="increment autocov body")
    tail = integrate_tail(lambda x: D(x) * D(x + t), s, q, label="increment autocov tail")
    return head + body + tail


# =============================================================================
# Diagnostics
# =============================================================================

def local_exponent(fn: Callable[[float], float], t: float, step: float = 0.05) -> float:
    """Log-log slope of ``fn`` at ``t`` by a symmetric difference."""
    hi, lo = fn(t * math.exp(step)), fn(t * math.exp(-step))
    return (math.log(hi) - math.log(lo)) / (2.0 * step)


def asymptotic_report(model: LrdModel, q: Optional[QuadratureConfig] = None) -> Dict[str, float]:
    """Observed against expected exponents of c at both ends and of the variogram at 0."""
    q = q or QuadratureConfig()
    c_small = local_exponent(lambda x: eval_c(model, x, q), 1e-4)
    c_large = local_exponent(lambda x: eval_c(model, x, q), 1e4)
    sigma_small = 0.5 * local_exponent(lambda x: variogram(model, x, q), 1e-3)
    grid = np.logspace(-6, 4, 41)
    c_grid = np.array([eval_c(model, x, q) for x in grid])
    report = {
        "c_exponent_small": c_small,
        "c_exponent_small_expected": model.H0 - 1.5,
        "c_exponent_large": c_large,
        "c_exponent_large_expected": model.H - 1.5,
        "variogram_index_small": sigma_small,
        "variogram_index_small_expected": model.H0,
        "c_nonincreasing": float(bool(np.all(np.diff(c_grid) <= 0))),
    }
    logger.debug(f"Asymptotic report for {model.describe()}: {report}")
    return report


__all__ = [
    "LrdModel",
    "ModelTable",
    "default_scale",
    "fbm",
    "two_index",
    "parse_model_document",
    "load_model",
    "spectral_mass",
    "variogram_constant",
    "infinite_past_error_closed_form",
    "increment_autocov_asymptotic",
    "model_table",
    "clear_model_caches",
    "eval_c",
    "eval_g",
    "c_values",
    "g_values",
    "c_regular_values",
    "g_regular_values",
    "g_increment",
    "c_hat",
    "variogram",
    "increment_autocov",
    "increment_autocov_direct",
    "local_exponent",
    "asymptotic_report",
]
