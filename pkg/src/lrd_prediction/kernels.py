"""
Predictor kernels.

b(t, s) is the infinite-past kernel; the alternating-projection iterates
b_n(t, s; t2) and the finite-past kernel h(s, u; t2) are obtained from a
Nystrom discretization of

    (K phi)(w) = integral over w' > 0 of b(t2 + w, w') phi(w') dw'

on a trapezoid grid in log-coordinates, so that

    b_n(t, s) = sum_j omega_j b(t, w_j) (K^(n-2) b(t2 + ., s))(w_j).

The delta_k / B_k representation is computed independently and serves as a
cross-check of the iterates.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .config import QuadratureConfig, config, validate_depth
from .duality import ArCoefficient, beta_values
from .errors import (
    ConfigurationError,
    GridCoverageError,
    NumericalInstabilityError,
    SeriesConvergenceError,
    UnsupportedDepthError,
)
from .model import LrdModel, c_regular_values, c_values
from .parallel import ordered_map
from .quadrature import (
    LogGrid,
    convolve,
    gauss_jacobi,
    integrate_interval,
    integrate_singular,
    integrate_tail,
    log_trapezoid,
    qmc_integrate,
)

logger = logging.getLogger("lrd-prediction.kernels")

# Rows per block when tabulating b in parallel.
ROW_BLOCK = 64

# Arguments must stay this many log-units inside the Nystrom grid.
COVERAGE_GUARD = 20.0

# Gauss-Jacobi order for the outer v-integral of B_k.
OUTER_ORDER = 64


# =============================================================================
# b(t, s)
# =============================================================================

def b_closed_form(H: float, t, s):
    """fBm kernel sin(pi d)/pi (s/t)^d / (t + s)."""
    d = H - 0.5
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    return math.sin(math.pi * d) / math.pi * (s / t) ** d / (t + s)


def h_closed_form(H: float, t2: float, s, u):
    """fBm finite-past kernel h(s, u; t2)."""
    d = H - 0.5
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    return (
        math.sin(math.pi * d) / math.pi
        * (t2 - s) ** (-d) * s ** (-d)
        * (u * (u + t2)) ** d / (u + t2 - s)
    )


def _closed(model: LrdModel, ar: ArCoefficient) -> bool:
    return model.is_fbm and ar.is_closed_form


def eval_b(
    model: LrdModel,
    ar: ArCoefficient,
    t: float,
    s: float,
    q: Optional[QuadratureConfig] = None,
    closed_form: bool = False,
) -> float:
    """b(t, s), the integral of c(u) a(t + s - u) over u in [0, s].

    ``closed_form`` short-circuits to the fBm formula when both c and a are
    exact power laws.
    """
    if not (t > 0 and s > 0):
        raise ConfigurationError(f"b(t, s) needs t, s > 0, got t={t}, s={s}")
    if closed_form and _closed(model, ar):
        return float(b_closed_form(model.H, t, s))

    q = q or QuadratureConfig()
    split = min(q.singularity_split, 0.5 * s)
    head = integrate_singular(
        lambda u: float(c_regular_values(model, u, q)) * float(ar.a(t + s - u)),
        0.0, split, q, left=model.H0 - 1.5, label=f"b({t:.6g}, {s:.6g}) head",
    )
    body = integrate_interval(
        lambda u: float(c_values(model, u, q)) * float(ar.a(t + s - u)),
        split, s, q, points=[s - t], label=f"b({t:.6g}, {s:.6g}) body",
    )
    return head + body


def b_values(model: LrdModel, ar: ArCoefficient, t, s, q: Optional[QuadratureConfig] = None) -> np.ndarray:
    """Vectorized b(t, s) over broadcast arrays."""
    t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
    if _closed(model, ar):
        return b_closed_form(model.H, t, s)
    q = q or QuadratureConfig()
    return convolve(
        lambda v: c_regular_values(model, v, q),
        model.H0 - 1.5,
        ar.a,
        x=s,
        shift=t,
    )


def _b_matrix(model: LrdModel, ar: ArCoefficient, t: np.ndarray, s: np.ndarray, q: QuadratureConfig) -> np.ndarray:
    """b(t_i, s_j) as a len(t) x len(s) matrix, tabulated in row blocks."""
    if _closed(model, ar) or t.size <= ROW_BLOCK:
        return b_values(model, ar, t[:, None], s[None, :], q)
    blocks = [t[i:i + ROW_BLOCK] for i in range(0, t.size, ROW_BLOCK)]
    rows = ordered_map(lambda block: b_values(model, ar, block[:, None], s[None, :], q), blocks)
    return np.vstack(rows)


# =============================================================================
# Nystrom operator
# =============================================================================

@dataclass(frozen=True, eq=False)
class NystromOperator:
    """Discretized alternating-projection operator for a window length t2."""

    model: LrdModel
    ar: ArCoefficient
    q: QuadratureConfig
    t2: float
    grid: LogGrid
    matrix: np.ndarray = field(repr=False)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.grid.weights

    @property
    def coverage(self) -> Tuple[float, float]:
        lo, hi = self.grid.span
        return lo * math.exp(COVERAGE_GUARD), hi * math.exp(-COVERAGE_GUARD)

    def covers(self, *values: float) -> bool:
        lo, hi = self.coverage
        return all(lo <= v <= hi for v in values)

    def require(self, *values: float) -> None:
        """Raise GridCoverageError for the first value outside the coverage."""
        lo, hi = self.coverage
        for v in values:
            if not lo <= v <= hi:
                raise GridCoverageError(requested=float(v), covered=(lo, hi))

    def rows(self, t) -> np.ndarray:
        """omega_j b(t_i, w_j); integrating against these rows is the map phi -> int b(t, w) phi(w) dw."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return _b_matrix(self.model, self.ar, t, self.nodes, self.q) * self.weights[None, :]

    def columns(self, s) -> np.ndarray:
        """b(t2 + w_l, s_j) as a nodes x len(s) matrix."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return _b_matrix(self.model, self.ar, self.t2 + self.nodes, s, self.q)

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ values


def build_operator(
    model: LrdModel,
    ar: ArCoefficient,
    t2: float,
    q: Optional[QuadratureConfig] = None,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    step: Optional[float] = None,
    margin: Optional[float] = None,
) -> NystromOperator:
    """Discretize the operator on a log grid around [lo, hi] (default [t2, t2])."""
    if not t2 > 0:
        raise ConfigurationError(f"t2 must be positive, got {t2}")
    q = q or QuadratureConfig()
    grid = log_trapezoid(
        lo or t2,
        hi or t2,
        step or config.nystrom_step,
        margin or config.nystrom_margin,
    )
    logger.info(f"Discretizing operator for t2={t2:g} on {grid.size} nodes")
    b = _b_matrix(model, ar, t2 + grid.nodes, grid.nodes, q)
    matrix = b * grid.weights[None, :]
    matrix.setflags(write=False)
    return NystromOperator(model=model, ar=ar, q=q, t2=float(t2), grid=grid, matrix=matrix)


# =============================================================================
# Alternating series
# =============================================================================

@dataclass(frozen=True)
class SeriesResult:
    """Partial sum of T_1 + T_2 + ... and its convergence record."""
    total: np.ndarray
    terms: int
    truncation_estimate: float
    leading: List[np.ndarray]
    pair_norms: List[float]


def _tail_estimate(pair: np.ndarray, previous: np.ndarray, total: np.ndarray) -> Tuple[float, float]:
    mask = (previous > 0) & (total > 0)
    if not mask.any():
        return 0.0, 0.0
    ratio = float(np.max(pair[mask] / previous[mask]))
    if ratio >= 1.0:
        return ratio, math.inf
    relative = float(np.max(pair[mask] / total[mask]))
    return ratio, relative * ratio / (1.0 - ratio)


def alternating_series(
    operator: NystromOperator,
    first: np.ndarray,
    rows_odd: np.ndarray,
    rows_even: np.ndarray,
    columns: np.ndarray,
    rel_tol: Optional[float] = None,
    max_terms: Optional[int] = None,
    keep: int = 0,
) -> SeriesResult:
    """Sum T_1 + T_2 + ... with T_n = R_n K^(n-2) V for n >= 2.

    R_n is ``rows_even`` for even n and ``rows_odd`` for odd n; V is
    ``columns``. Terms are grouped in pairs T_(2k-1) + T_(2k); summation
    stops once the geometric tail bound of the pair sequence is below
    ``rel_tol`` relative to the partial sum at every entry.
    """
    rel_tol = rel_tol or operator.q.rel_tol
    max_terms = max_terms or config.max_series_terms

    total = np.array(first, dtype=float)
    leading = [np.array(first, dtype=float)] if keep > 0 else []
    pair = np.array(first, dtype=float)
    previous: Optional[np.ndarray] = None
    pair_norms: List[float] = []
    V = np.asarray(columns, dtype=float)

    n = 1
    while True:
        n += 1
        if n > 2:
            V = operator.apply(V)
        rows = rows_even if n % 2 == 0 else rows_odd
        term = rows @ V
        total += term
        if len(leading) < keep:
            leading.append(term)

        if n % 2 == 1:
            pair = term
        else:
            pair = pair + term
            pair_norms.append(float(np.max(pair)))
            if previous is not None:
                ratio, estimate = _tail_estimate(pair, previous, total)
                if estimate < rel_tol:
                    logger.debug(f"Series converged after {n} terms (ratio {ratio:.4f}, tail {estimate:.3g})")
                    return SeriesResult(
                        total=total,
                        terms=n,
                        truncation_estimate=estimate,
                        leading=leading,
                        pair_norms=pair_norms,
                    )
            previous = pair

        if n >= max_terms:
            raise SeriesConvergenceError(
                f"kernel series did not converge within {max_terms} terms",
                last_norm=float(np.max(np.abs(term))),
                terms=n,
            )


# =============================================================================
# Kernel table
# =============================================================================

@dataclass(frozen=True, eq=False)
class KernelTable:
    """b, b_n and h for a window length t2 on an (s, u) grid.

    ``b_grid`` holds b(t2 - s, u); ``bn_grids[n - 1]`` holds the n-th term of
    the h-series, b_n(t2 - s, u) for odd n and b_n(s, u) for even n.
    """

    model: LrdModel
    ar: ArCoefficient
    q: QuadratureConfig
    operator: NystromOperator
    t2: float
    s_values: np.ndarray
    u_values: np.ndarray
    b_grid: np.ndarray
    bn_grids: List[np.ndarray]
    h_grid: np.ndarray
    series_terms: int
    truncation_estimate: float
    pair_norms: List[float] = field(default_factory=list)

    @property
    def coverage(self) -> Tuple[float, float]:
        return self.operator.coverage

    def _locate(self, s: float, u: float) -> Optional[Tuple[int, int]]:
        i = np.flatnonzero(np.isclose(self.s_values, s, rtol=1e-14, atol=0.0))
        j = np.flatnonzero(np.isclose(self.u_values, u, rtol=1e-14, atol=0.0))
        if i.size and j.size:
            return int(i[0]), int(j[0])
        return None


def _default_s(t2: float) -> np.ndarray:
    return t2 * np.linspace(1.0, 8.0, 8) / 9.0


def _default_u() -> np.ndarray:
    return np.logspace(-2.0, 2.0, 9)


def build_kernel_table(
    model: LrdModel,
    ar: ArCoefficient,
    t2: float,
    s_values=None,
    u_values=None,
    q: Optional[QuadratureConfig] = None,
    keep_terms: int = 3,
    operator: Optional[NystromOperator] = None,
) -> KernelTable:
    """Sum the h-series on the (s, u) grid and keep the leading iterates."""
    q = q or QuadratureConfig()
    s = np.asarray(_default_s(t2) if s_values is None else s_values, dtype=float)
    u = np.asarray(_default_u() if u_values is None else u_values, dtype=float)
    if np.any(s <= 0) or np.any(s >= t2):
        raise ConfigurationError(f"s values must lie in (0, {t2})")
    if np.any(u <= 0):
        raise ConfigurationError("u values must be positive")

    if operator is None:
        lo = min(t2, float(u.min()), float(s.min()))
        hi = max(t2, float(u.max()))
        operator = build_operator(model, ar, t2, q, lo=lo, hi=hi)
    operator.require(float(min(u.min(), s.min(), (t2 - s).min())), float(u.max()))

    first = _b_matrix(model, ar, t2 - s, u, q)
    result = alternating_series(
        operator,
        first,
        rows_odd=operator.rows(t2 - s),
        rows_even=operator.rows(s),
        columns=operator.columns(u),
        rel_tol=q.rel_tol,
        keep=keep_terms,
    )

    h = result.total
    if not np.all(first > 0) or not np.all(h > first):
        raise NumericalInstabilityError(
            "kernel table lost positivity: h must exceed b(t2 - s, u) > 0 at every node",
            terms=result.pair_norms,
        )
    logger.info(
        f"Kernel table t2={t2:g}: {result.terms} series terms, "
        f"truncation estimate {result.truncation_estimate:.3g}"
    )
    return KernelTable(
        model=model,
        ar=ar,
        q=q,
        operator=operator,
        t2=float(t2),
        s_values=s,
        u_values=u,
        b_grid=first,
        bn_grids=result.leading,
        h_grid=h,
        series_terms=result.terms,
        truncation_estimate=result.truncation_estimate,
        pair_norms=result.pair_norms,
    )


def extend_kernel_table(table: KernelTable, lo: float, hi: float) -> KernelTable:
    """Rebuild ``table`` on an operator grid that also covers [lo, hi]."""
    grid_lo, grid_hi = table.operator.grid.span
    margin = config.nystrom_margin
    operator = build_operator(
        table.model,
        table.ar,
        table.t2,
        table.q,
        lo=min(lo, grid_lo * math.exp(margin)),
        hi=max(hi, grid_hi * math.exp(-margin)),
        step=table.operator.grid.step,
    )
    return build_kernel_table(
        table.model,
        table.ar,
        table.t2,
        s_values=table.s_values,
        u_values=table.u_values,
        q=table.q,
        keep_terms=len(table.bn_grids),
        operator=operator,
    )


def eval_b_n(table: KernelTable, n: int, t: float, s: float) -> float:
    """n-th alternating-projection iterate b_n(t, s; t2)."""
    if int(n) != n or n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n}")
    if not (t > 0 and s > 0):
        raise ConfigurationError(f"b_n needs t, s > 0, got t={t}, s={s}")
    if n == 1:
        return eval_b(table.model, table.ar, t, s, table.q)

    operator = table.operator
    operator.require(t, s)

    V = operator.columns(s)
    for _ in range(n - 2):
        V = operator.apply(V)
    return float((operator.rows(t) @ V)[0, 0])


def eval_h(table: KernelTable, s: float, u: float) -> float:
    """Finite-past kernel h(s, u; t2)."""
    if not 0 < s < table.t2:
        raise ConfigurationError(f"h needs 0 < s < t2={table.t2}, got s={s}")
    if not u > 0:
        raise ConfigurationError(f"h needs u > 0, got u={u}")
    hit = table._locate(s, u)
    if hit is not None:
        return float(table.h_grid[hit])

    operator = table.operator
    operator.require(s, table.t2 - s, u)
    result = alternating_series(
        operator,
        np.array([[eval_b(table.model, table.ar, table.t2 - s, u, table.q)]]),
        rows_odd=operator.rows(table.t2 - s),
        rows_even=operator.rows(s),
        columns=operator.columns(u),
        rel_tol=table.q.rel_tol,
    )
    return float(result.total[0, 0])


# =============================================================================
# Kernel identities
# =============================================================================

def b_mass(
    model: LrdModel,
    ar: ArCoefficient,
    s: float,
    q: Optional[QuadratureConfig] = None,
    decades: float = 8.0,
    step: float = 0.05,
) -> float:
    """int_0^inf b(t, s) dt, which equals 1.

    Trapezoid rule in log t on [s 10^-decades, t_end]. The head is closed
    with the power law b ~ t^-d0. The tail beyond t_end is exact:
    int_0^s c(u) alpha(t_end + s - u) du, with t_end kept inside the AR table
    so no extrapolated a enters the sum.
    """
    if not s > 0:
        raise ConfigurationError(f"b_mass needs s > 0, got {s}")
    q = q or QuadratureConfig()
    cap = s * 10.0 ** decades
    if ar.grid is not None:
        cap = min(cap, 0.5 * ar.grid[1])
    grid = log_trapezoid(s * 10.0 ** -decades, cap, step, 0.0)
    t = grid.nodes
    b = b_values(model, ar, t, s, q)
    weights = grid.weights.copy()
    weights[[0, -1]] *= 0.5
    head = b[0] * t[0] / (1.0 - model.d0)
    t_end = float(t[-1])
    tail = integrate_singular(
        lambda u: float(c_regular_values(model, u, q)) * float(ar.alpha(t_end + s - u)),
        0.0, s, q, left=model.H0 - 1.5, label=f"b mass tail beyond {t_end:.6g}",
    )
    return float(head + weights @ b + tail)


def reproduction_residual(
    model: LrdModel,
    ar: ArCoefficient,
    t: float,
    s: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """Relative residual of c(t + s) = int_0^t c(t - u) b(u, s) du."""
    if not (t > 0 and s > 0):
        raise ConfigurationError(f"reproduction check needs t, s > 0, got t={t}, s={s}")
    q = q or QuadratureConfig()
    value = convolve(
        lambda v: c_regular_values(model, v, q),
        model.H0 - 1.5,
        lambda u: b_values(model, ar, u, s, q),
        x=t,
        shift=0.0,
    )
    target = float(c_values(model, t + s, q))
    return float(value) / target - 1.0


# =============================================================================
# delta_k and B_k
# =============================================================================

def _check_delta_depth(k: int) -> None:
    ok, error = validate_depth(k, config.max_delta_depth, "k")
    if not ok:
        if int(k) == k and k > config.max_delta_depth:
            raise UnsupportedDepthError(int(k), config.max_delta_depth, "k")
        raise ConfigurationError(error)


def _delta_quad(model: LrdModel, ar: ArCoefficient, k: int, u: float, v: float, t: float, q: QuadratureConfig) -> float:
    beta = lambda x: float(beta_values(model, ar, x, q))
    if k == 1:
        return beta(t + v + u)
    return integrate_tail(
        lambda w: beta(t + v + w) * _delta_quad(model, ar, k - 1, u, w, t, q),
        0.0, q, label=f"delta_{k}",
    )


def delta_k_qmc(
    model: LrdModel,
    ar: ArCoefficient,
    k: int,
    u: float,
    v: float,
    t: float,
    q: Optional[QuadratureConfig] = None,
    seed: int = 0,
) -> Tuple[float, float]:
    """delta_k by scrambled Sobol points; returns (estimate, standard error).

    Each w in (0, inf) is mapped from x in (0, 1) by w = t x / (1 - x).
    """
    q = q or QuadratureConfig()
    dim = k - 1

    def integrand(points: np.ndarray) -> np.ndarray:
        x = points
        w = t * x / (1.0 - x)
        jac = np.prod(t / (1.0 - x) ** 2, axis=1)
        value = beta_values(model, ar, t + v + w[:, -1], q) * beta_values(model, ar, t + w[:, 0] + u, q)
        for l in range(dim - 1):
            value = value * beta_values(model, ar, t + w[:, l + 1] + w[:, l], q)
        return value * jac

    return qmc_integrate(integrand, dim, config.qmc_log2_points, config.qmc_replications, seed)


def eval_delta_k(
    model: LrdModel,
    ar: ArCoefficient,
    k: int,
    u: float,
    v: float,
    t: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """delta_k(u, v; t): the (k-1)-fold chained integral of beta products."""
    _check_delta_depth(k)
    if u < 0 or v < 0 or not t > 0:
        raise ConfigurationError(f"delta_k needs u, v >= 0 and t > 0, got u={u}, v={v}, t={t}")
    q = q or QuadratureConfig()
    if k <= 3:
        return _delta_quad(model, ar, k, float(u), float(v), float(t), q)
    value, stderr = delta_k_qmc(model, ar, k, u, v, t, q)
    logger.debug(f"delta_{k}({u:g}, {v:g}; {t:g}) = {value:.6g} +/- {stderr:.2g}")
    return value


def eval_B_k(
    model: LrdModel,
    ar: ArCoefficient,
    k: int,
    t: float,
    s: float,
    t2: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """B_k(t, s; t2) = int_0^s dv c(s - v) int_0^inf a(t + u) delta_(k-1)(u, v; t2) du.

    The inner delta chain is summed on a log-trapezoid grid and the outer
    v-integral uses Gauss-Jacobi nodes for the c(s - v) singularity.
    """
    if int(k) != k or k < 2:
        raise ConfigurationError(f"B_k needs k >= 2, got {k}")
    _check_delta_depth(k - 1)
    if not (t > 0 and s > 0 and t2 > 0):
        raise ConfigurationError(f"B_k needs t, s, t2 > 0, got t={t}, s={s}, t2={t2}")
    q = q or QuadratureConfig()

    grid = log_trapezoid(min(t, s, t2), max(t, s, t2), config.nystrom_step, config.nystrom_margin)
    w, omega = grid.nodes, grid.weights

    # chain[i, j] = delta_(m)(w_i, w_j; t2)
    step = beta_values(model, ar, t2 + w[:, None] + w[None, :], q) * omega[:, None]
    chain = beta_values(model, ar, t2 + w[None, :] + w[:, None], q)
    for _ in range(k - 3):
        chain = chain @ step

    exponent = model.H0 - 1.5
    x, gw = gauss_jacobi(OUTER_ORDER, exponent, 0.0)
    v = s * x
    if k == 2:
        delta = beta_values(model, ar, t2 + v[None, :] + w[:, None], q)
    else:
        delta = chain @ (beta_values(model, ar, t2 + v[None, :] + w[:, None], q) * omega[:, None])
    inner = (omega * ar.a(t + w)) @ delta
    outer = c_regular_values(model, s - v, q) * inner
    return float(s ** (1.0 + exponent) * (gw @ outer))


# =============================================================================
# k(t, s) and its operator diagnostic
# =============================================================================

def eval_k_kernel(
    model: LrdModel,
    ar: ArCoefficient,
    t: float,
    s: float,
    t2: float,
    q: Optional[QuadratureConfig] = None,
) -> float:
    """k(t, s; t2) = int_0^inf c(t + u) a(t2 + u + s) du."""
    if not (t > 0 and s > 0):
        raise ConfigurationError(f"k(t, s) needs t, s > 0, got t={t}, s={s}")
    q = q or QuadratureConfig()
    return integrate_tail(
        lambda u: float(c_values(model, t + u, q)) * float(ar.a(t2 + u + s)),
        0.0, q, label=f"k({t:.6g}, {s:.6g})",
    )


def k_bound(model: LrdModel, ar: ArCoefficient, t: float, s: float, t2: float, q: Optional[QuadratureConfig] = None) -> float:
    """Upper bound c(t) alpha(t2 + s) of k(t, s; t2)."""
    return float(c_values(model, t, q)) * float(ar.alpha(t2 + s))


def k_row_sums(
    model: LrdModel,
    ar: ArCoefficient,
    t2: float,
    x,
    U: float,
    q: Optional[QuadratureConfig] = None,
) -> np.ndarray:
    """int_0^U k(x, y) sqrt(x / y) dy for each x.

    Bounded row sums under U-refinement indicate a bounded operator.
    """
    q = q or QuadratureConfig()
    loose = q.with_rel_tol(max(q.rel_tol, 1e-7))
    sums = []
    for xi in np.atleast_1d(np.asarray(x, dtype=float)):
        sums.append(integrate_singular(
            lambda y: eval_k_kernel(model, ar, xi, y, t2, loose) * math.sqrt(xi),
            0.0, U, loose, left=-0.5, label=f"k row sum at x={xi:.6g}",
        ))
    return np.asarray(sums)


__all__ = [
    "b_closed_form",
    "h_closed_form",
    "eval_b",
    "b_values",
    "NystromOperator",
    "build_operator",
    "SeriesResult",
    "alternating_series",
    "KernelTable",
    "build_kernel_table",
    "extend_kernel_table",
    "eval_b_n",
    "eval_h",
    "b_mass",
    "reproduction_residual",
    "eval_delta_k",
    "delta_k_qmc",
    "eval_B_k",
    "eval_k_kernel",
    "k_bound",
    "k_row_sums",
]
