"""Explicit null-homotopies in SL_n over the measure algebra.

Two constructions are provided.  :func:`null_homotopy` contracts a matrix
``M`` with ``det M = delta`` by first deforming every entry down to its atom
at the origin and then shrinking the remaining constant matrix along its
shear factorization.  :func:`approx_path` joins an invertible matrix to a
nearby approximant whose first column has been renormalized to restore
determinant one.

Paths are always oriented so that the first sample is the input and the last
one is the target (the identity, or ``f`` for :func:`approx_path`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matrix as mr
from . import measure as m
from .elementary import DET_TOL, ElementaryFactor, factor_complex
from .errors import CertificateError, DeterminantError, DomainError
from .matrix import MeasureMatrix

__all__ = ["HomotopyPath", "constant_part", "sl_path_complex",
           "null_homotopy", "approx_path", "det_residual", "DEFAULT_SAMPLES"]

#: default sample count of a full null-homotopy (65 per half, shared midpoint)
DEFAULT_SAMPLES = 129

ORIENTATION = "H(0) = M, H(1) = I"


@dataclass(frozen=True)
class HomotopyPath:
    """Sampled path ``t -> H(t)`` with ``t`` running from 0 to 1."""

    ts: tuple[float, ...]
    matrices: tuple[MeasureMatrix, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ts = tuple(float(t) for t in self.ts)
        mats = tuple(self.matrices)
        if len(ts) < 2 or len(ts) != len(mats):
            raise DomainError("a path needs at least two samples, one per time")
        if ts[0] != 0.0 or ts[-1] != 1.0:
            raise DomainError("sample times must start at 0 and end at 1")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("sample times must be strictly increasing")
        if len({x.n for x in mats}) != 1:
            raise DomainError("all path samples must have the same size")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "matrices", mats)

    @property
    def samples(self) -> list[tuple[float, MeasureMatrix]]:
        return list(zip(self.ts, self.matrices))

    @property
    def n(self) -> int:
        return self.matrices[0].n

    @property
    def start(self) -> MeasureMatrix:
        return self.matrices[0]

    @property
    def end(self) -> MeasureMatrix:
        return self.matrices[-1]

    def lipschitz(self) -> float:
        """Largest ``frobenius_bound(H_{k+1} - H_k) / (t_{k+1} - t_k)``."""
        return max(mr.matrix_distance(b, a) / (tb - ta)
                   for (ta, a), (tb, b) in zip(self.samples, self.samples[1:]))

    def certificate(self) -> dict:
        """Summary of the recorded residuals, suitable for JSON output."""
        keys = ("orientation", "start_residual", "end_residual",
                "max_det_residual", "lipschitz", "splice_residual",
                "dominance_bound")
        out = {k: self.meta[k] for k in keys if k in self.meta}
        out["samples"] = len(self.ts)
        return out


def det_residual(a: MeasureMatrix) -> float:
    """``||det a - delta||``."""
    return m.distance(mr.det(a), m.dirac())


def _uniform(k: int) -> np.ndarray:
    if k < 2:
        raise DomainError(f"need at least 2 samples, got {k}")
    return np.linspace(0.0, 1.0, k)


def constant_part(a: MeasureMatrix) -> np.ndarray:
    """Complex matrix of the atoms at the origin of each entry."""
    return np.array([[m.atom_at_zero(x) for x in row] for row in a.entries],
                    dtype=complex)


def _shrunk_product(factors: Sequence[ElementaryFactor], n: int, s: float) -> np.ndarray:
    out = np.eye(n, dtype=complex)
    for f in factors:
        out[:, f.j - 1] += (1.0 - s) * f.param * out[:, f.i - 1]
    return out


def sl_path_complex(c, k: int = 65, tol: float = DET_TOL) -> HomotopyPath:
    """Path from ``C`` to ``I`` through ``prod E_k((1-s) alpha_k)``.

    Every sample is a product of shears, so its determinant is one up to
    rounding; the last sample is the identity exactly.
    """
    c = np.asarray(c, dtype=complex)
    factors = factor_complex(c, tol=tol)
    n = c.shape[0]
    ts = _uniform(k)
    mats = [mr.constant(_shrunk_product(factors, n, s)) for s in ts]
    mats[-1] = mr.identity(n)
    return HomotopyPath(ts, mats, {
        "orientation": "h(0) = C, h(1) = I",
        "factors": factors,
        "start_residual": float(np.abs(_shrunk_product(factors, n, 0.0) - c).max()),
    })


def null_homotopy(a: MeasureMatrix, k: int = DEFAULT_SAMPLES,
                  tol: float = DET_TOL) -> HomotopyPath:
    """Contract ``a`` (with ``det a = delta``) to the identity.

    For ``t <= 1/2`` the sample is the entrywise deformation at parameter
    ``2t``; it reaches the constant matrix ``C delta`` at ``t = 1/2``.  The
    second half follows :func:`sl_path_complex` for ``C`` at ``s = 2t - 1``.
    ``k`` must be odd so that the midpoint is a sample.
    """
    if k < 3 or k % 2 == 0:
        raise DomainError(f"sample count must be odd and >= 3, got {k}")
    res0 = det_residual(a)
    if res0 > tol:
        raise DeterminantError(f"||det M - delta|| = {res0:.3g} exceeds {tol:g}")
    half = (k - 1) // 2
    ts = np.linspace(0.0, 1.0, k)
    first = [mr.deform_matrix(a, 2.0 * t) for t in ts[:half]]
    midpoint = mr.deform_matrix(a, 1.0)
    c = constant_part(a)
    # the constant part of a det-one matrix has det one up to the same slack
    second = sl_path_complex(c, half + 1, tol=max(tol, DET_TOL))
    mats = first + [midpoint] + list(second.matrices[1:])
    residuals = [det_residual(x) for x in mats]
    path = HomotopyPath(ts, mats, {
        "orientation": ORIENTATION,
        "det_residuals": residuals,
        "max_det_residual": max(residuals),
        "start_residual": mr.matrix_distance(mats[0], a),
        "end_residual": mr.matrix_distance(mats[-1], mr.identity(a.n)),
        "splice_residual": mr.matrix_distance(midpoint, mr.constant(c)),
        "constant_part": c,
    })
    path.meta["lipschitz"] = path.lipschitz()
    return path


def _matrix_neumann(e: MeasureMatrix, bound: float, stop: float, max_terms: int):
    """``(I + e)^-1`` as ``sum (-e)^k``; ``bound`` certifies ``||e|| < 1``."""
    n = e.n
    neg = mr.MeasureMatrix([[m.scale(-1.0, x) for x in row] for row in e.entries])
    term = mr.identity(n)
    total = term
    for _ in range(max_terms):
        term = mr.mat_mul(term, neg)
        size = mr.frobenius_bound(term)
        total = mr.mat_add(total, term)
        if size < stop:
            return total
    raise CertificateError(f"matrix Neumann series with ratio {bound:.3g} "
                           f"did not reach {stop:g} in {max_terms} terms")


def approx_path(f: MeasureMatrix, g: MeasureMatrix, k: int = 65,
                tol: float = 1e-6, stop: float = mr.NEUMANN_STOP,
                max_terms: int = 2000) -> HomotopyPath:
    """Path from the renormalized approximant ``g`` to ``f``.

    ``H(t) = g (I + t f^-1 (g - f))^-1`` with its first column convolved
    by ``det(H(t))^-1``.  Since ``g = f (I + f^-1 (g - f))`` this ends at
    ``f``; the left-multiplied form ``(I + ...)^-1 g`` would end at
    ``g^-1 f g`` instead.  The dominance ``||g - f|| ||f^-1|| < 1`` is
    checked with Frobenius bounds, which also make the matrix Neumann series
    for ``(I + t f^-1 (g - f))^-1`` converge.
    """
    if f.n != g.n:
        raise DomainError(f"dimension mismatch: {f.n} vs {g.n}")
    f_inv, inv_res = mr.invert_matrix(f, with_residual=True)
    if inv_res > tol:
        raise CertificateError(f"inverse residual {inv_res:.3g} exceeds {tol:g}")
    diff = mr.mat_sub(g, f)
    bound = mr.frobenius_bound(diff) * mr.frobenius_bound(f_inv)
    if not bound < 1.0:
        raise CertificateError(f"||g - f|| ||f^-1|| = {bound:.6g} is not below 1")
    e = mr.mat_mul(f_inv, diff)
    mats, residuals = [], []
    for t in _uniform(k):
        inner = _matrix_neumann(
            MeasureMatrix([[m.scale(t, x) for x in row] for row in e.entries]),
            t * bound, stop, max_terms)
        h = mr.mat_mul(g, inner)
        h = mr.scale_column(h, 0, mr.invert_measure(mr.det(h)))
        mats.append(h)
        residuals.append(det_residual(h))
    g_fixed = mr.scale_column(g, 0, mr.invert_measure(mr.det(g)))
    path = HomotopyPath(_uniform(k), mats, {
        "orientation": "H(0) = g / det g (first column), H(1) = f",
        "dominance_bound": bound,
        "inverse_residual": inv_res,
        "det_residuals": residuals,
        "max_det_residual": max(residuals),
        "start_residual": mr.matrix_distance(mats[0], g_fixed),
        "end_residual": mr.matrix_distance(mats[-1], f),
    })
    path.meta["lipschitz"] = path.lipschitz()
    return path
