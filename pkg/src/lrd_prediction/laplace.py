"""
Numerical inversion of Laplace transforms.

``talbot`` is the fixed-Talbot contour rule used to build the AR(inf) tables;
``stehfest`` (Gaver-Stehfest with Salzer weights) is an independent
real-axis method kept as a cross-check.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import factorial

logger = logging.getLogger("lrd-prediction.laplace")

Transform = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=16)
def talbot_contour(degree: int, r: Optional[float] = None):
    """Scaled nodes z_k and weights gamma_k of the fixed-Talbot rule.

    For a target time t the abscissae are p_k = z_k / t and
    f(t) ~ (r / (M t)) Re sum_k gamma_k F(p_k).
    """
    M = int(degree)
    r = 0.4 * M if r is None else float(r)
    theta = np.arange(M) * np.pi / M
    cot = np.zeros(M)
    cot[1:] = 1.0 / np.tan(theta[1:])

    z = r * theta * (cot + 1j)
    z[0] = r
    gamma = np.exp(z) * (1.0 + 1j * theta * (1.0 + cot ** 2) - 1j * cot)
    gamma[0] = 0.5 * np.exp(r)
    z.setflags(write=False)
    gamma.setflags(write=False)
    return z, gamma, r


def talbot(transform: Transform, times, degree: int = 32, r: Optional[float] = None) -> np.ndarray:
    """Invert ``transform`` at each positive time with the fixed-Talbot rule.

    ``transform`` must accept a complex array of any shape.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times <= 0):
        raise ValueError("Laplace inversion needs positive times")
    z, gamma, r = talbot_contour(degree, r)
    p = z[None, :] / times[:, None]
    values = np.asarray(transform(p), dtype=complex)
    return (r / (degree * times)) * np.real(values @ gamma)


@lru_cache(maxsize=16)
def stehfest_coefficients(order: int) -> np.ndarray:
    """Salzer summation weights V_k, k = 1..order (order even)."""
    M = order + (order % 2)
    half = M // 2
    V = np.zeros(M)
    for k in range(1, M + 1):
        total = 0.0
        for j in range((k + 1) // 2, min(k, half) + 1):
            total += (
                j ** half * factorial(2 * j, exact=True)
                / (
                    factorial(half - j, exact=True)
                    * factorial(j, exact=True)
                    * factorial(j - 1, exact=True)
                    * factorial(k - j, exact=True)
                    * factorial(2 * j - k, exact=True)
                )
            )
        V[k - 1] = (-1) ** (k + half) * total
    V.setflags(write=False)
    return V


def stehfest(transform: Transform, times, order: int = 14) -> np.ndarray:
    """Invert ``transform`` at positive times with the Gaver-Stehfest rule.

    Only real abscissae are used; ``transform`` receives a real array.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    V = stehfest_coefficients(order)
    k = np.arange(1, V.size + 1)
    p = k[None, :] * math.log(2.0) / times[:, None]
    values = np.asarray(transform(p), dtype=float)
    return (values @ V) * math.log(2.0) / times


__all__ = ["talbot_contour", "talbot", "stehfest_coefficients", "stehfest"]
