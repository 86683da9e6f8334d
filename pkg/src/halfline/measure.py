"""Complex measures on the half-line ``[0, +inf)`` under convolution.

A :class:`HalfLineMeasure` is a finite list of point masses plus an optional
absolutely continuous part.  The density is stored as samples ``f(k*h)``,
``k = 0..N-1`` on a uniform grid starting at the origin and is interpreted
as the piecewise-linear interpolant of those samples, zero beyond the last
sample.  Every integral against the density (norm, Laplace transform) is
taken of that interpolant, which makes the trapezoid rule exact for the
total mass and keeps all quadrature errors of order ``h``.

Point masses are exact: convolving two atomic measures only adds locations
and multiplies weights.  Values are immutable; every operation returns a
new measure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError, MembershipError

__all__ = [
    "DEFAULT_H", "DEFAULT_HORIZON", "ATOM_DROP", "Density", "HalfLineMeasure",
    "AlgebraKind", "AlgebraClass", "zero", "dirac", "dirac_at",
    "from_function", "add", "sub", "scale", "convolve", "convolve_with_report",
    "tv_norm", "distance", "atom_at_zero", "deform", "project_to_class",
    "lattice_coordinates", "same_location",
]

DEFAULT_H = 2.0 ** -10
DEFAULT_HORIZON = 32.0

#: atoms with |weight| at or below this are dropped on normalization
ATOM_DROP = 2.0 ** -50
#: relative tolerance under which two atom locations are the same point
LOC_MERGE = 2.0 ** -40
#: a shift whose fractional grid offset is below this lands on a grid point
_GRID_SNAP = 1e-9
#: above this many atoms, atom-by-density products go through an FFT comb
_COMB_THRESHOLD = 16


def same_location(a: float, b: float) -> bool:
    return abs(a - b) <= LOC_MERGE * max(1.0, abs(a), abs(b))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _trapezoid_l1(values: np.ndarray, h: float) -> float:
    if values.size < 2:
        return 0.0
    mags = np.abs(values)
    return float(h * (mags.sum() - 0.5 * (mags[0] + mags[-1])))


@dataclass(frozen=True, eq=False)
class Density:
    """Samples of an absolutely continuous part on ``x_k = k*h``."""

    h: float
    values: np.ndarray

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise DomainError(f"density step must be positive, got {self.h}")
        vals = np.array(self.values, dtype=complex).ravel()
        if vals.size < 1:
            raise DomainError("density needs at least one sample")
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def horizon(self) -> float:
        return (self.n - 1) * self.h

    def grid(self) -> np.ndarray:
        return self.h * np.arange(self.n)

    def l1(self) -> float:
        return _trapezoid_l1(self.values, self.h)

    def __call__(self, x):
        """Evaluate the piecewise-linear interpolant (zero outside support)."""
        x = np.asarray(x, dtype=float)
        grid = self.grid()
        re = np.interp(x, grid, self.values.real, left=0.0, right=0.0)
        im = np.interp(x, grid, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im


class HalfLineMeasure:
    """Element of the measure algebra: atoms plus a sampled density.

    Parameters
    ----------
    atoms : iterable of (location, weight)
        Point masses.  Locations must be nonnegative; they are sorted and
        merged, and negligible weights are dropped.
    density : Density, optional
        Absolutely continuous part.  An identically zero density is dropped;
        otherwise the grid is kept as given, so its length sets the horizon.
    """

    __slots__ = ("locs", "weights", "density")

    def __init__(self, atoms: Iterable[tuple[float, complex]] = (),
                 density: Density | None = None):
        atoms = list(atoms)
        locs = np.array([float(a[0]) for a in atoms], dtype=float)
        weights = np.array([complex(a[1]) for a in atoms], dtype=complex)
        self._init_arrays(locs, weights, density)

    @classmethod
    def from_arrays(cls, locs, weights, density: Density | None = None):
        obj = cls.__new__(cls)
        obj._init_arrays(np.asarray(locs, dtype=float).ravel(),
                         np.asarray(weights, dtype=complex).ravel(), density)
        return obj

    def _init_arrays(self, locs, weights, density):
        if locs.shape != weights.shape:
            raise DomainError("atom locations and weights differ in length")
        if locs.size and not np.all(np.isfinite(locs)):
            raise DomainError("atom locations must be finite")
        if locs.size and locs.min() < 0:
            raise DomainError(
                f"atom location {locs.min()} lies outside [0, +inf)")
        locs, weights = _merge_atoms(locs, weights)
        set_ = object.__setattr__
        set_(self, "locs", _readonly(locs))
        set_(self, "weights", _readonly(weights))
        set_(self, "density", _trim_density(density))

    def __setattr__(self, name, value):
        raise AttributeError("HalfLineMeasure is immutable")

    # -- views -----------------------------------------------------------
    @property
    def atoms(self) -> list[tuple[float, complex]]:
        return list(zip(self.locs.tolist(), self.weights.tolist()))

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    @property
    def is_zero(self) -> bool:
        return self.locs.size == 0 and self.density is None

    def __repr__(self):
        parts = ", ".join(f"({l:g}, {w:.6g})" for l, w in self.atoms[:6])
        if len(self.locs) > 6:
            parts += ", ..."
        dens = ("None" if self.density is None else
                f"<{self.density.n} samples, h={self.density.h:g}>")
        return f"HalfLineMeasure(atoms=[{parts}], density={dens})"

    # -- arithmetic sugar --------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, HalfLineMeasure):
            return convolve(self, other)
        return scale(other, self)

    def __rmul__(self, other):
        return scale(other, self)

    def equals(self, other: "HalfLineMeasure", tol: float = 0.0) -> bool:
        """True when ``tv_norm(self - other) <= tol``."""
        return distance(self, other) <= tol


def _merge_atoms(locs: np.ndarray, weights: np.ndarray):
    if locs.size == 0:
        return locs.copy(), weights.copy()
    order = np.argsort(locs, kind="stable")
    locs, weights = locs[order], weights[order]
    if locs.size > 1:
        gaps = np.diff(locs)
        tol = LOC_MERGE * np.maximum(1.0, locs[1:])
        new_group = np.concatenate(([True], gaps > tol))
        if not new_group.all():
            starts = np.flatnonzero(new_group)
            weights = np.add.reduceat(weights, starts)
            locs = locs[starts]
    keep = np.abs(weights) > ATOM_DROP
    return locs[keep].copy(), weights[keep].copy()


def _trim_density(density: Density | None) -> Density | None:
    # trailing zeros are kept: they fix the horizon products are computed on,
    # and the interpolant ramps down to them (cutting them would add a jump)
    if density is None or not np.any(density.values):
        return None
    return density


# -- constructors ----------------------------------------------------------

def zero() -> HalfLineMeasure:
    return HalfLineMeasure()


def dirac() -> HalfLineMeasure:
    """The unit of the algebra: a unit point mass at the origin."""
    return HalfLineMeasure([(0.0, 1.0)])


def dirac_at(loc: float) -> HalfLineMeasure:
    if loc < 0:
        raise DomainError(f"point mass location must be >= 0, got {loc}")
    return HalfLineMeasure([(loc, 1.0)])


def from_function(f, h: float = DEFAULT_H, horizon: float = DEFAULT_HORIZON,
                  atoms: Iterable[tuple[float, complex]] = ()) -> HalfLineMeasure:
    """Sample a vectorized density ``f`` on ``[0, horizon]`` with step ``h``."""
    n = int(round(horizon / h)) + 1
    x = h * np.arange(n)
    return HalfLineMeasure(atoms, Density(h, np.asarray(f(x), dtype=complex)))


# -- linear structure --------------------------------------------------------

def _resample(density: Density, h: float) -> np.ndarray:
    if density.h == h:
        return density.values
    n = int(math.floor(density.horizon / h + 1e-9)) + 1
    return density(h * np.arange(n))


def _common(d1: Density, d2: Density):
    h = min(d1.h, d2.h)
    return h, _resample(d1, h), _resample(d2, h)


def _add_densities(d1, d2, c2=1.0):
    if d1 is None and d2 is None:
        return None
    if d2 is None:
        return d1
    if d1 is None:
        return Density(d2.h, c2 * d2.values) if c2 != 1.0 else d2
    h, v1, v2 = _common(d1, d2)
    out = np.zeros(max(v1.size, v2.size), dtype=complex)
    out[:v1.size] += v1
    out[:v2.size] += c2 * v2
    return Density(h, out)


def add(mu: HalfLineMeasure, nu: HalfLineMeasure) -> HalfLineMeasure:
    return HalfLineMeasure.from_arrays(
        np.concatenate((mu.locs, nu.locs)),
        np.concatenate((mu.weights, nu.weights)),
        _add_densities(mu.density, nu.density))


def sub(mu: HalfLineMeasure, nu: HalfLineMeasure) -> HalfLineMeasure:
    return HalfLineMeasure.from_arrays(
        np.concatenate((mu.locs, nu.locs)),
        np.concatenate((mu.weights, -nu.weights)),
        _add_densities(mu.density, nu.density, -1.0))


def scale(c: complex, mu: HalfLineMeasure) -> HalfLineMeasure:
    dens = None if mu.density is None else Density(mu.density.h,
                                                    c * mu.density.values)
    return HalfLineMeasure.from_arrays(mu.locs, c * mu.weights, dens)


# -- convolution -------------------------------------------------------------

def _shift_atoms_into(out: np.ndarray, locs, weights, f: np.ndarray, h: float):
    """Accumulate ``sum_k w_k f(x - lam_k)`` into ``out``; return lost mass.

    A shift that is not a multiple of ``h`` splits linearly between the two
    neighbouring grid shifts, which is the linear interpolant of the shifted
    samples.  The shifted density jumps at ``lam_k`` (from 0 to ``f[0]``)
    and at ``lam_k + horizon`` (from ``f[-1]`` to 0); a continuous
    interpolant spreads each jump over one extra cell and gains ``O(h)``
    spurious mass.  One node per jump is corrected so that the cell
    integrals match again, which restores ``O(h^2)`` accuracy of moments
    and transforms.
    """
    length = out.size
    n = f.size
    f_l1 = _trapezoid_l1(f, h)
    lost = 0.0
    pos = locs / h
    j = np.floor(pos).astype(np.int64)
    theta = pos - j
    up = theta > 1.0 - _GRID_SNAP
    j[up] += 1
    theta[up] = 0.0
    theta[theta < _GRID_SNAP] = 0.0

    inside = j < length
    lost += float(np.abs(weights[~inside]).sum()) * f_l1
    j, theta, w = j[inside], theta[inside], weights[inside]
    if j.size == 0:
        return lost

    head = np.where(j >= 1, 0.5, theta) * w * f[0]
    tail_at = j + n
    tail = 0.5 * w * f[-1]
    if j.size > _COMB_THRESHOLD:
        comb = np.zeros(length + 1, dtype=complex)
        np.add.at(comb, j, w * (1.0 - theta))
        np.add.at(comb, j + 1, w * theta)
        full = fftconvolve(comb, f)
        out += full[:length]
        _correct_jumps(out, j, head, tail_at, tail)
        return lost + _trapezoid_l1(full[length - 1:], h)

    for jk, tk, wk in zip(j.tolist(), theta.tolist(), w.tolist()):
        for shift, coef in ((jk, wk * (1.0 - tk)), (jk + 1, wk * tk)):
            if coef == 0 or shift >= length:
                continue
            stop = min(length, shift + n)
            out[shift:stop] += coef * f[:stop - shift]
            if shift + n > length:
                lost += abs(coef) * _trapezoid_l1(f[length - 1 - shift:], h)
    _correct_jumps(out, j, head, tail_at, tail)
    return lost


def _correct_jumps(out, head_at, head, tail_at, tail):
    np.add.at(out, head_at, -head)
    keep = tail_at < out.size
    np.add.at(out, tail_at[keep], -tail[keep])


def convolve_with_report(mu: HalfLineMeasure, nu: HalfLineMeasure):
    """Convolution plus the total-variation mass cut off at the horizon.

    The density of the product lives on the finer of the two grids and is
    truncated at the larger of the two input horizons.

    Returns
    -------
    (HalfLineMeasure, float)
    """
    locs = np.add.outer(mu.locs, nu.locs).ravel()
    weights = np.multiply.outer(mu.weights, nu.weights).ravel()
    dm, dn = mu.density, nu.density
    if dm is None and dn is None:
        return HalfLineMeasure.from_arrays(locs, weights), 0.0

    if dm is not None and dn is not None:
        h, f, g = _common(dm, dn)
    elif dm is not None:
        h, f, g = dm.h, dm.values, None
    else:
        h, f, g = dn.h, None, dn.values
    length = max(v.size for v in (f, g) if v is not None)
    out = np.zeros(length, dtype=complex)
    lost = 0.0
    if f is not None and nu.locs.size:
        lost += _shift_atoms_into(out, nu.locs, nu.weights, f, h)
    if g is not None and mu.locs.size:
        lost += _shift_atoms_into(out, mu.locs, mu.weights, g, h)
    if f is not None and g is not None:
        full = h * fftconvolve(f, g)
        # trapezoid: halve the two endpoint terms of each discrete sum
        m = np.arange(full.size)
        gm = np.where(m < g.size, g[np.minimum(m, g.size - 1)], 0)
        fm = np.where(m < f.size, f[np.minimum(m, f.size - 1)], 0)
        full -= 0.5 * h * (f[0] * gm + g[0] * fm)
        out += full[:length]
        lost += _trapezoid_l1(full[length - 1:], h)
    return HalfLineMeasure.from_arrays(locs, weights, Density(h, out)), lost


def convolve(mu: HalfLineMeasure, nu: HalfLineMeasure) -> HalfLineMeasure:
    return convolve_with_report(mu, nu)[0]


# -- norms and evaluation ----------------------------------------------------

def tv_norm(mu: HalfLineMeasure) -> float:
    """Total variation: sum of |atom weights| plus the L1 norm of the density."""
    total = float(np.abs(mu.weights).sum())
    if mu.density is not None:
        total += mu.density.l1()
    return total


def distance(mu: HalfLineMeasure, nu: HalfLineMeasure) -> float:
    return tv_norm(sub(mu, nu))


def atom_at_zero(mu: HalfLineMeasure) -> complex:
    """The mass ``mu({0})``; the density carries no atom."""
    if mu.locs.size and mu.locs[0] <= LOC_MERGE:
        return complex(mu.weights[0])
    return 0j


def deform(mu: HalfLineMeasure, t: float) -> HalfLineMeasure:
    """Reweight by ``(1-t)**x``; at ``t = 1`` only the atom at 0 survives."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"deformation parameter must lie in [0, 1], got {t}")
    if t == 0.0:
        return mu
    if t == 1.0:
        return scale(atom_at_zero(mu), dirac())
    base = 1.0 - t
    with np.errstate(under="ignore"):
        weights = mu.weights * np.power(base, mu.locs)
        dens = None
        if mu.density is not None:
            d = mu.density
            dens = Density(d.h, d.values * np.power(base, d.grid()))
    return HalfLineMeasure.from_arrays(mu.locs, weights, dens)


# -- subalgebra membership -----------------------------------------------------

class AlgebraKind(enum.Enum):
    FULL_MIXED = "full_mixed"
    DIRAC_PLUS_L1 = "dirac_plus_l1"
    ATOMIC = "atomic"
    ATOMIC_LATTICE = "atomic_lattice"


@dataclass(frozen=True)
class AlgebraClass:
    kind: AlgebraKind
    base: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind is AlgebraKind.ATOMIC_LATTICE:
            if not self.base or any(e <= 0 for e in self.base):
                raise DomainError("lattice base frequencies must be positive")

    @classmethod
    def lattice(cls, *base: float) -> "AlgebraClass":
        return cls(AlgebraKind.ATOMIC_LATTICE, tuple(float(e) for e in base))


def lattice_coordinates(loc: float, base: Sequence[float],
                        rel_tol: float = 1e-9) -> tuple[int, ...]:
    """Unique ``n >= 0`` with ``sum n_i e_i == loc`` up to ``rel_tol*max(1,loc)``.

    Raises MembershipError when there is no such vector or more than one
    (the base is then not independent at this precision).
    """
    tol = rel_tol * max(1.0, loc)
    base = [float(e) for e in base]
    found: list[tuple[int, ...]] = []

    def search(i, remaining, prefix):
        e = base[i]
        if i == len(base) - 1:
            k = round(remaining / e)
            if k >= 0 and abs(remaining - k * e) <= tol:
                found.append(prefix + (int(k),))
            return
        for k in range(int(math.floor((remaining + tol) / e)) + 1):
            search(i + 1, remaining - k * e, prefix + (k,))
            if len(found) > 1:
                return

    search(0, float(loc), ())
    if not found:
        raise MembershipError(f"location {loc!r} is not on the lattice "
                              f"generated by {tuple(base)}")
    if len(found) > 1:
        raise MembershipError(f"location {loc!r} decomposes ambiguously over "
                              f"{tuple(base)}: {found[0]} and {found[1]}")
    return found[0]


def project_to_class(mu: HalfLineMeasure, cls: AlgebraClass) -> HalfLineMeasure:
    """Return ``mu`` unchanged if it lies in ``cls``, else raise."""
    kind = cls.kind
    if kind is AlgebraKind.FULL_MIXED:
        return mu
    if kind is AlgebraKind.DIRAC_PLUS_L1:
        bad = [l for l in mu.locs.tolist() if l > LOC_MERGE]
        if bad:
            raise MembershipError(
                f"point mass at {bad[0]!r} not allowed in delta*C + L1")
        return mu
    if mu.density is not None:
        raise MembershipError(
            "absolutely continuous part not allowed in an atomic algebra")
    if kind is AlgebraKind.ATOMIC_LATTICE:
        for loc in mu.locs.tolist():
            lattice_coordinates(loc, cls.base)
    return mu
