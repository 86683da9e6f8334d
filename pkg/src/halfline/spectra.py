"""The measure ``delta + (2x - 3) e^{-x} dx`` and the spectrum of its transform.

Its Laplace transform is ``s(s-1)/(s+1)^2``.  Under ``s = (1+z)/(1-z)``
this becomes ``(z + z^2)/2``, so the spectrum is the image of the closed
unit disc under that quadratic.  The module samples the boundary curve,
rasterizes the region, counts bounded components of its complement, and
evaluates the two-point residuals showing that no polynomial in the
transform can approximate the deformed transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import ndimage

from .errors import DomainError, HalfPlaneError
from .laplace import HalfPlanePoint, laplace_eval
from .measure import DEFAULT_H, DEFAULT_HORIZON, HalfLineMeasure, from_function

__all__ = ["nonexample_measure", "nonexample_transform", "spectrum_curve",
           "region_membership", "complement_components", "rasterize",
           "SpectrumRegion", "spectrum_region", "PropertyPResult",
           "property_p_failure", "property_p_batch", "mobius_halfplane_to_disc",
           "mobius_disc_to_halfplane", "curve_self_intersections",
           "closed_form_errors", "INFINITY", "BOX", "PROBE_POINTS",
           "SHIFT_T", "P_GAP"]

#: sentinel for the point at infinity of the closed half-plane
INFINITY = complex(math.inf, 0.0)
#: raster extent, the same on both axes
BOX = (-1.25, 1.25)
#: real points where the sampled transform is compared with the closed form
PROBE_POINTS = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)
#: deformation parameter moving s = 0, 1 to s = 1, 2
SHIFT_T = 1.0 - math.exp(-1.0)
#: lower bound for residual0 + residual1, whatever the polynomial
P_GAP = 2.0 / 9.0
_SLACK = 1e-12


def nonexample_measure(h: float = DEFAULT_H,
                       horizon: float = DEFAULT_HORIZON) -> HalfLineMeasure:
    """Unit atom at 0 plus the density ``(2x - 3) e^{-x}``."""
    return from_function(lambda x: (2 * x - 3) * np.exp(-x), h, horizon,
                         atoms=[(0.0, 1.0)])


def nonexample_transform(s):
    """Closed form ``s(s-1)/(s+1)^2``; the value at infinity is 1."""
    s = np.asarray(s, dtype=complex)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = s * (s - 1) / (s + 1) ** 2
    out = np.where(np.isinf(s), 1.0 + 0j, out)
    return complex(out) if out.ndim == 0 else out


def closed_form_errors(mu: HalfLineMeasure | None = None,
                       points: Sequence[float] = PROBE_POINTS) -> list[float]:
    """``|laplace_eval(mu, s) - s(s-1)/(s+1)^2|`` at each probe point."""
    mu = nonexample_measure() if mu is None else mu
    return [abs(laplace_eval(mu, s) - nonexample_transform(s)) for s in points]


# -- curve and region -------------------------------------------------------------

def spectrum_curve(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Angles ``2 pi j / k`` and the points ``(e^{i th} + e^{2i th}) / 2``.

    The sampling is periodic (``2 pi`` itself is omitted as it repeats
    ``theta = 0``), so an even ``k`` includes ``theta = pi``.
    """
    if k < 3:
        raise DomainError(f"curve needs at least 3 samples, got {k}")
    theta = 2 * np.pi * np.arange(k) / k
    z = np.exp(1j * theta)
    return theta, (z + z * z) / 2


def region_membership(w) -> np.ndarray | bool:
    """Whether ``w = (z + z^2)/2`` for some ``|z| <= 1``.

    The roots of ``z^2 + z - 2w`` are ``(-1 +- sqrt(1 + 8w)) / 2``; their
    product is ``-2w``, so both roots are tested.
    """
    w = np.asarray(w, dtype=complex)
    root = np.sqrt(1 + 8 * w)
    inside = ((np.abs((-1 + root) / 2) <= 1 + _SLACK)
              | (np.abs((-1 - root) / 2) <= 1 + _SLACK))
    return bool(inside) if inside.ndim == 0 else inside


def _pixel_centers(resolution: int, box=BOX) -> np.ndarray:
    lo, hi = box
    step = (hi - lo) / resolution
    axis = lo + step * (np.arange(resolution) + 0.5)
    re, im = np.meshgrid(axis, axis[::-1])
    return re + 1j * im


def rasterize(membership: Callable, resolution: int, box=BOX,
              curve: np.ndarray | None = None) -> np.ndarray:
    """Boolean bitmap (row 0 at the top) of pixel centers in the region.

    Pixels whose center lies within half a pixel of a curve point are added
    to the region, so a closed region is never thinned into gaps.
    """
    bitmap = np.asarray(membership(_pixel_centers(resolution, box)), dtype=bool)
    if curve is not None:
        lo, hi = box
        step = (hi - lo) / resolution
        col = np.floor((curve.real - lo) / step).astype(int)
        row = resolution - 1 - np.floor((curve.imag - lo) / step).astype(int)
        ok = (col >= 0) & (col < resolution) & (row >= 0) & (row < resolution)
        bitmap[row[ok], col[ok]] = True
    return bitmap


def complement_components(bitmap: np.ndarray) -> int:
    """Number of 4-connected complement components not touching the border."""
    if bitmap.ndim != 2 or min(bitmap.shape) < 64:
        raise DomainError("raster must be 2-D with resolution at least 64")
    labels, count = ndimage.label(~bitmap)
    border = np.unique(np.concatenate([labels[0], labels[-1],
                                       labels[:, 0], labels[:, -1]]))
    return count - int(np.count_nonzero(border))


@dataclass(frozen=True)
class SpectrumRegion:
    theta: np.ndarray
    curve: np.ndarray
    box: tuple[float, float]
    resolution: int
    bitmap: np.ndarray

    @property
    def bounded_components(self) -> int:
        return complement_components(self.bitmap)


def spectrum_region(k: int = 720, resolution: int = 512) -> SpectrumRegion:
    """Curve samples plus the rasterized region at ``resolution**2``."""
    if resolution < 64:
        raise DomainError(f"resolution must be at least 64, got {resolution}")
    theta, curve = spectrum_curve(k)
    # dense resampling so that every boundary pixel is hit
    _, dense = spectrum_curve(max(k, 16 * resolution))
    bitmap = rasterize(region_membership, resolution, BOX, dense)
    return SpectrumRegion(theta, curve, BOX, resolution, bitmap)


def curve_self_intersections(curve: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Crossing points between non-adjacent segments of the closed polyline
    through ``curve`` (the last point is joined back to the first)."""
    curve = np.append(curve, curve[:1])
    p = curve[:-1]
    d = curve[1:] - p
    m = p.size
    i, j = np.triu_indices(m, k=2)
    keep = ~((i == 0) & (j == m - 1))      # first and last segments share a point
    i, j = i[keep], j[keep]
    cross = (d[i].conj() * d[j]).imag
    ok = np.abs(cross) > tol
    i, j, cross = i[ok], j[ok], cross[ok]
    r = p[j] - p[i]
    s = (r.conj() * d[j]).imag / cross
    u = (r.conj() * d[i]).imag / cross
    hit = (s >= 0) & (s <= 1) & (u >= 0) & (u <= 1)
    return p[i[hit]] + s[hit] * d[i[hit]]


# -- approximation obstruction ------------------------------------------------------

class PropertyPResult(NamedTuple):
    residual0: float
    residual1: float
    certificate: bool


def property_p_failure(coeffs: Sequence[complex],
                       transform: Callable = nonexample_transform) -> PropertyPResult:
    """Residuals of ``sum c_k mu^(s)^k`` against the deformed transform.

    At ``t = 1 - 1/e`` the deformed transform is ``mu^(s + 1)``.  Evaluated
    at ``s = 0`` and ``s = 1`` the polynomial sees ``mu^(0) = mu^(1) = 0``
    both times while the targets are ``mu^(1) = 0`` and ``mu^(2) = 2/9``.
    ``certificate`` records ``residual0 + residual1 >= 2/9``.
    """
    r0, r1 = property_p_batch(np.atleast_2d(np.asarray(coeffs, dtype=complex)),
                              transform)
    return PropertyPResult(float(r0[0]), float(r1[0]),
                           bool(r0[0] + r1[0] >= P_GAP - _SLACK))


def property_p_batch(coeffs: np.ndarray, transform: Callable = nonexample_transform):
    """Vectorized residuals for a ``(count, degree + 1)`` coefficient array."""
    coeffs = np.asarray(coeffs, dtype=complex)
    shift = -math.log1p(-SHIFT_T)
    out = []
    for s in (0.0, 1.0):
        x = transform(s)
        target = transform(s + shift)
        powers = x ** np.arange(coeffs.shape[1])
        out.append(np.abs(target - coeffs @ powers))
    return out[0], out[1]


# -- Mobius change of variables ---------------------------------------------------

def mobius_halfplane_to_disc(s) -> complex:
    """``z = (s - 1)/(s + 1)``; ``INFINITY`` maps to 1."""
    s = complex(s)
    if math.isinf(abs(s)):
        return 1 + 0j
    s = HalfPlanePoint(s)
    return (s - 1) / (s + 1)


def mobius_disc_to_halfplane(z) -> complex:
    """``s = (1 + z)/(1 - z)`` for ``|z| <= 1``; ``z = 1`` gives ``INFINITY``."""
    z = complex(z)
    if abs(z) > 1 + _SLACK:
        raise HalfPlaneError(f"|z| = {abs(z):.6g} lies outside the closed disc")
    if z == 1:
        return INFINITY
    return (1 + z) / (1 - z)
