"""
Self-check suites run by ``lrd-predict verify``.

Each suite compares a numerical path against an independent closed form or
identity and reports one CheckResult per comparison.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .baxter import (
    baxter_lhs,
    baxter_lhs_closed_form,
    baxter_rhs,
    baxter_rhs_closed_form,
    limit_integral,
    limit_integral_gamma_form,
    sine_series_check,
)
from .config import ArMethod, QuadratureConfig
from .duality import a_asymptotic, build_ar, duality_residual
from .errors import ConfigurationError
from .kernels import (
    b_closed_form,
    b_mass,
    build_kernel_table,
    eval_B_k,
    eval_b,
    eval_b_n,
    h_closed_form,
    reproduction_residual,
)
from .model import LrdModel, fbm, g_regular_values, infinite_past_error_closed_form, two_index
from .prediction import PredictionWindow
from .quadrature import integrate_singular

logger = logging.getLogger("lrd-prediction.verify")

HURST_VALUES = (0.6, 0.75, 0.9)


@dataclass(frozen=True)
class CheckResult:
    """One comparison of a computed value against its reference."""
    suite: str
    name: str
    value: float
    expected: float
    tolerance: float

    @property
    def error(self) -> float:
        """Relative error, absolute when the reference is zero."""
        if self.expected == 0.0:
            return abs(self.value)
        return abs(self.value - self.expected) / abs(self.expected)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.value) and self.error <= self.tolerance

    def row(self) -> Dict[str, object]:
        return {
            "suite": self.suite,
            "check": self.name,
            "value": self.value,
            "expected": self.expected,
            "error": self.error,
            "tolerance": self.tolerance,
            "status": "pass" if self.passed else "fail",
        }


def _worst(suite: str, name: str, values, expected, tolerance: float) -> CheckResult:
    """Collapse a grid comparison to its worst point."""
    values = np.asarray(values, dtype=float).ravel()
    expected = np.asarray(expected, dtype=float).ravel()
    i = int(np.argmax(np.abs(values - expected) / np.abs(expected)))
    return CheckResult(suite, name, float(values[i]), float(expected[i]), tolerance)


# =============================================================================
# Suites
# =============================================================================

def fbm_closed_forms(q: QuadratureConfig) -> List[CheckResult]:
    """Numerical paths for fBm against the exact power-law formulas."""
    suite = "fbm-closed-forms"
    results = []
    grid = np.logspace(-1.0, 1.0, 10)
    for H in HURST_VALUES:
        model = fbm(H)
        ar = build_ar(model, q)

        values = [[eval_b(model, ar, t, s, q) for s in grid] for t in grid]
        results.append(_worst(suite, f"b quadrature H={H}", values, b_closed_form(H, grid[:, None], grid[None, :]), 1e-6))

        t3 = 1.0
        quadrature = integrate_singular(
            lambda s: float(g_regular_values(model, s, q)) ** 2,
            0.0, t3, q, left=2.0 * model.d0, label="infinite-past error",
        )
        results.append(CheckResult(suite, f"infinite-past error H={H}", quadrature,
                                   infinite_past_error_closed_form(H, t3), 1e-6))

        t2 = 2.0
        s = np.array([0.5, 1.0, 1.5])
        u = np.array([0.1, 1.0, 10.0])
        table = build_kernel_table(model, ar, t2, s_values=s, u_values=u, q=q)
        results.append(_worst(suite, f"h series H={H}", table.h_grid, h_closed_form(H, t2, s[:, None], u[None, :]), 1e-4))

        numeric = build_ar(model, q, method=ArMethod.NUMERIC_INVERSION)
        t = np.logspace(-2.0, 2.0, 9)
        results.append(_worst(suite, f"AR inversion H={H}", numeric.a(t), a_asymptotic(model, t), 1e-5))

    results.append(CheckResult(suite, "infinite-past error H=0.75 reference",
                               infinite_past_error_closed_form(0.75, 1.0), 0.81146, 1e-5))
    return results


def kernel_identities(q: QuadratureConfig) -> List[CheckResult]:
    """Normalization, reproduction, duality and cross-representation identities."""
    suite = "kernel-identities"
    results = []
    models: List[LrdModel] = [fbm(0.75), two_index(0.75, 0.6)]
    for model in models:
        ar = build_ar(model, q)
        label = model.describe()
        for s in (0.5, 1.0, 2.0):
            results.append(CheckResult(suite, f"b mass s={s} {label}", b_mass(model, ar, s, q), 1.0, 1e-3))
        residuals = [abs(reproduction_residual(model, ar, t, s, q)) for t in (0.5, 1.0, 2.0) for s in (0.5, 1.0, 2.0)]
        results.append(CheckResult(suite, f"reproduction {label}", max(residuals), 0.0, 1e-5))
        if not ar.is_closed_form:
            worst = max(abs(duality_residual(model, ar, y, q)) for y in (1e-3, 1.0, 1e3))
            results.append(CheckResult(suite, f"duality {label}", worst, 0.0, 1e-5))

    model = fbm(0.75)
    ar = build_ar(model, q)
    table = build_kernel_table(model, ar, 2.0, q=q)
    for k, tolerance in ((2, 1e-5), (3, 1e-4)):
        results.append(CheckResult(
            suite, f"b_{k} vs B_{k}",
            eval_b_n(table, k, 1.0, 1.0), eval_B_k(model, ar, k, 1.0, 1.0, 2.0, q), tolerance,
        ))
    return results


def baxter_constants(q: QuadratureConfig) -> List[CheckResult]:
    """Limit constant, its sine series, and the fBm forms of both sides."""
    suite = "baxter-constants"
    results = []
    for d in (0.1, 0.25, 0.4):
        results.append(CheckResult(suite, f"limit integral d={d}", limit_integral(d, q), limit_integral_gamma_form(d), 1e-6))
    # Convergence slows as d -> 1/2; d = 0.4 needs eight terms to come within 5%.
    for d, M, tolerance in ((0.1, 6, 0.02), (0.25, 6, 0.02), (0.4, 8, 0.05)):
        partial, target = sine_series_check(d, M, q)
        results.append(CheckResult(suite, f"sine series d={d} M={M}", partial, target, tolerance))

    model = fbm(0.75)
    ar = build_ar(model, q)
    w = PredictionWindow(t0=4.0, t1=1.0, T=2.0)
    results.append(CheckResult(suite, "rhs fBm form", baxter_rhs(model, ar, w, q), baxter_rhs_closed_form(0.75, w, q), 1e-6))
    results.append(CheckResult(suite, "lhs fBm form", baxter_lhs(model, ar, w, q), baxter_lhs_closed_form(0.75, w, q), 1e-4))
    return results


SUITES: Dict[str, Callable[[QuadratureConfig], List[CheckResult]]] = {
    "fbm-closed-forms": fbm_closed_forms,
    "kernel-identities": kernel_identities,
    "baxter-constants": baxter_constants,
}


def run_suite(name: str, q: Optional[QuadratureConfig] = None) -> List[CheckResult]:
    """Run one named suite, or every suite for ``all``."""
    q = q or QuadratureConfig()
    if name == "all":
        return [r for suite in SUITES.values() for r in suite(q)]
    if name not in SUITES:
        raise ConfigurationError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)} or all")
    results = SUITES[name](q)
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.warning(f"Suite {name}: {len(failed)} check(s) failed: {', '.join(failed)}")
    else:
        logger.info(f"Suite {name}: all {len(results)} checks passed")
    return results


__all__ = [
    "CheckResult",
    "SUITES",
    "fbm_closed_forms",
    "kernel_identities",
    "baxter_constants",
    "run_suite",
]
