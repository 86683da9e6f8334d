"""Laplace transforms of half-line measures on the closed right half-plane.

The density part is integrated exactly against its piecewise-linear
interpolant (a linear Filon rule).  Unlike the plain trapezoid rule this
stays accurate when ``|s| * h`` is not small, which the large-``s`` probes
need; for ``s * h -> 0`` the weights reduce to the trapezoid weights.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, HalfPlaneError
from .measure import HalfLineMeasure, convolve, deform

__all__ = ["HalfPlanePoint", "laplace_eval", "laplace_shift_residual",
           "laplace_product_residual", "rl_limit_probe"]


class HalfPlanePoint(complex):
    """A complex number with nonnegative real part."""

    def __new__(cls, s):
        s = complex(s)
        if not s.real >= 0 or math.isnan(s.imag):
            raise HalfPlaneError(f"Re(s) must be >= 0, got s = {s}")
        return super().__new__(cls, s.real, s.imag)


def _panel_weights(s: complex, h: float) -> tuple[complex, complex]:
    """Weights (left, right) of one linear panel ``[0, h]`` against e^{-su}."""
    z = s * h
    if abs(z) < 1e-2:
        left = 0.5 - z / 6 + z * z / 24 - z ** 3 / 120 + z ** 4 / 720
        right = 0.5 - z / 3 + z * z / 8 - z ** 3 / 30 + z ** 4 / 144
        return h * left, h * right
    ez = cmath.exp(-z)
    first = -np.expm1(-z) / z          # (1 - e^{-z}) / z
    right = (-np.expm1(-z) - z * ez) / (z * z)
    return h * complex(first - right), h * complex(right)


def laplace_eval(mu: HalfLineMeasure, s) -> complex:
    """``integral of e^{-sx} dmu(x)`` for ``Re(s) >= 0``."""
    s = HalfPlanePoint(s)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        total = complex(np.sum(mu.weights * _exp_neg(s, mu.locs)))
        d = mu.density
        if d is not None and d.n > 1:
            e = _exp_neg(s, d.grid()[:-1])
            wl, wr = _panel_weights(s, d.h)
            f = d.values
            total += wl * complex(np.dot(e, f[:-1])) + wr * complex(np.dot(e, f[1:]))
    return total


def _exp_neg(s: complex, x: np.ndarray) -> np.ndarray:
    # huge Re(s) just underflows to 0; the phase factor is bounded
    mag = np.exp(-s.real * x)
    if s.imag == 0:
        return mag.astype(complex)
    return mag * np.exp(-1j * s.imag * x)


def laplace_shift_residual(mu: HalfLineMeasure, t: float, s) -> float:
    """``|L[mu_t](s) - L[mu](s - log(1-t))|`` for ``t`` in ``[0, 1)``."""
    if not 0.0 <= t < 1.0:
        raise DomainError(f"shift identity needs t in [0, 1), got {t}")
    s = HalfPlanePoint(s)
    shifted = s - math.log1p(-t)
    return abs(laplace_eval(deform(mu, t), s) - laplace_eval(mu, shifted))


def laplace_product_residual(mu: HalfLineMeasure, nu: HalfLineMeasure, s) -> float:
    """``|L[mu*nu](s) - L[mu](s) L[nu](s)|``."""
    return abs(laplace_eval(convolve(mu, nu), s)
               - laplace_eval(mu, s) * laplace_eval(nu, s))


def rl_limit_probe(mu: HalfLineMeasure, s_values: Sequence[float]) -> list[complex]:
    """Transform values along an increasing real sequence of ``s``.

    As ``s -> +inf`` these tend to ``mu({0})``; checking the convergence is
    left to the caller.
    """
    s_values = [float(s) for s in s_values]
    if any(b <= a for a, b in zip(s_values, s_values[1:])):
        raise DomainError("probe points must be strictly increasing")
    return [laplace_eval(mu, s) for s in s_values]


def transform_grid(mu: HalfLineMeasure, s_values: Iterable[complex]) -> list[complex]:
    return [laplace_eval(mu, s) for s in s_values]
