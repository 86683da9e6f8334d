"""Factorization into elementary (shear) matrices.

Indices of :class:`ElementaryFactor` are 1-based, matching the usual
``E_ij(alpha) = I + alpha e_ij`` notation.  A factor list ``[F1, ..., Fk]``
always denotes the left-to-right product ``F1 @ F2 @ ... @ Fk``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from . import matrix as mr
from . import measure as m
from .errors import DegenerateError, DeterminantError, DomainError
from .measure import HalfLineMeasure, lattice_coordinates
from .poly import Polynomial1, Polynomial2

__all__ = ["ElementaryFactor", "factor_complex", "factor_poly",
           "verify_product", "whitehead", "cohn_matrix", "poly2_det",
           "poly_det", "atoms_to_poly", "poly_to_atoms", "lattice_poly_mul",
           "lattice_poly_add", "lattice_poly_l1", "complex_roundtrip_error",
           "poly_roundtrip_error"]

DET_TOL = 1e-9
#: relative sizes of cancellation noise cut from Euclidean remainders, tried
#: in order until a factorization reproduces its input
_NOISE_LADDER = (1e-9, 1e-8, 1e-10, 1e-7, 1e-11, 1e-6)
#: round-trip error, relative to the largest coefficient, accepted at once
_GOOD_FIT = 1e-13


@dataclass(frozen=True)
class ElementaryFactor:
    """Shear ``E_ij(param)``; ``param`` is a complex number, a
    :class:`Polynomial1` or a :class:`HalfLineMeasure`."""

    i: int
    j: int
    param: Any

    def __post_init__(self):
        if self.i == self.j or self.i < 1 or self.j < 1:
            raise DomainError(f"invalid shear indices ({self.i}, {self.j})")

    def inverse(self) -> "ElementaryFactor":
        return ElementaryFactor(self.i, self.j, -self.param)

    def scaled(self, c: float) -> "ElementaryFactor":
        return ElementaryFactor(self.i, self.j, c * self.param)

    def as_complex_matrix(self, n: int) -> np.ndarray:
        e = np.eye(n, dtype=complex)
        e[self.i - 1, self.j - 1] = self.param
        return e


def whitehead(u: complex, k: int = 1, ring=complex) -> list[ElementaryFactor]:
    """Shears whose product is ``diag(u, 1/u)`` on rows/columns ``k, k+1``.

    Uses ``w(u) w(-1)`` with ``w(u) = E12(u) E21(-1/u) E12(u)``, the two
    middle ``E12`` factors merged.
    """
    if u == 1:
        return []
    a, b = k, k + 1
    params = [(a, b, u), (b, a, -1 / u), (a, b, u - 1), (b, a, 1.0), (a, b, -1.0)]
    out = []
    for i, j, p in params:
        if p == 0:
            continue
        out.append(ElementaryFactor(i, j, ring(p) if ring is not complex
                                    else complex(p)))
    return out


# -- complex matrices ----------------------------------------------------------

def factor_complex(c, tol: float = DET_TOL) -> list[ElementaryFactor]:
    """Write a determinant-one complex matrix as a product of shears.

    Row operations only: the pivot is improved by adding the row with the
    largest entry in the pivot column (with the sign that does not cancel),
    entries below and above the pivot are cleared, and the remaining
    diagonal is split into ``diag(u, 1/u)`` blocks.
    """
    a = np.array(c, dtype=complex)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DomainError("factor_complex needs a square matrix")
    d = np.linalg.det(a)
    if abs(d - 1) > tol:
        raise DeterminantError(f"det = {d} differs from 1 by more than {tol:g}")

    ops: list[tuple[int, int, complex]] = []

    def row_add(dst, src, alpha):
        a[dst] += alpha * a[src]
        ops.append((dst, src, alpha))

    scale = max(1.0, float(np.abs(a).max()))
    for col in range(n):
        below = np.abs(a[col:, col])
        r = col + int(np.argmax(below))
        if below.max() <= 1e-14 * scale:
            raise DegenerateError(f"pivot column {col + 1} vanishes")
        if r != col and abs(a[r, col]) > abs(a[col, col]):
            sign = 1.0 if abs(a[col, col] + a[r, col]) >= abs(a[col, col] - a[r, col]) else -1.0
            row_add(col, r, sign)
        for r in range(col + 1, n):
            if a[r, col] != 0:
                row_add(r, col, -a[r, col] / a[col, col])
                a[r, col] = 0
    for col in range(n - 1, 0, -1):
        for r in range(col):
            if a[r, col] != 0:
                row_add(r, col, -a[r, col] / a[col, col])
                a[r, col] = 0

    factors = [ElementaryFactor(i + 1, j + 1, complex(-alpha))
               for i, j, alpha in ops]
    partial = 1 + 0j
    for k in range(n - 1):
        partial *= a[k, k]
        factors.extend(whitehead(complex(partial), k + 1))
    return factors


def _complex_product(factors: Sequence[ElementaryFactor], n: int) -> np.ndarray:
    out = np.eye(n, dtype=complex)
    for f in factors:
        # right multiplication by E_ij(a) adds a * column i to column j
        out[:, f.j - 1] += f.param * out[:, f.i - 1]
    return out


def complex_roundtrip_error(factors, c) -> float:
    c = np.asarray(c, dtype=complex)
    return float(np.abs(_complex_product(factors, c.shape[0]) - c).max())


# -- polynomial matrices over C[z] -----------------------------------------------

PolyMatrix = list  # 2x2 nested list of Polynomial1


def _as_poly(x) -> Polynomial1:
    return x if isinstance(x, Polynomial1) else Polynomial1.const(x)


def poly_det(mat) -> Polynomial1:
    (a, b), (c, d) = mat
    return a * d - b * c


def factor_poly(mat, tol: float = DET_TOL) -> list[ElementaryFactor]:
    """Shear factorization of a 2x2 matrix over ``C[z]`` with det 1.

    Euclid's algorithm on the first column: the entry of larger degree is
    reduced by a multiple of the other until one entry vanishes.  The
    remaining upper triangular matrix ``[[u, b], [0, 1/u]]`` is
    ``diag(u, 1/u) E12(b/u)``.
    """
    rows = [[_as_poly(x) for x in row] for row in mat]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise DomainError("factor_poly handles 2x2 matrices only")
    det_err = (poly_det(rows) - Polynomial1.const(1)).max_abs()
    if det_err > tol:
        raise DeterminantError(f"det differs from 1 by {det_err:.3g}")
    if rows[0][0].is_zero and rows[1][0].is_zero:
        raise DegenerateError("first column is zero")

    scale = max(1.0, max(p.max_abs() for row in rows for p in row))
    best, best_err, last_exc = None, math.inf, None
    for noise in _NOISE_LADDER:
        try:
            factors = _euclid([r[:] for r in rows], scale, noise)
        except DegenerateError as exc:
            last_exc = exc
            continue
        factors = _polish(factors, rows)
        err = poly_roundtrip_error(factors, rows)
        if err < best_err:
            best, best_err = factors, err
        if best_err <= _GOOD_FIT * scale:
            break
    if best is None:
        raise last_exc
    return best


def _euclid(rows, scale: float, step_noise: float) -> list[ElementaryFactor]:
    cut = max(2.0 ** -40, 1e-11 * scale)
    ops: list[tuple[int, int, Polynomial1]] = []

    def row_add(dst, src, q: Polynomial1, rem: Polynomial1 | None = None):
        src_row = rows[src]
        new = [Polynomial1((x - q * y).coeffs, trim=cut)
               for x, y in zip(rows[dst], src_row)]
        if rem is not None:
            # rounding noise in the remainder scales with the terms cancelled
            noise = step_noise * (rows[dst][0].max_abs()
                                  + q.max_abs() * src_row[0].max_abs())
            new[0] = Polynomial1(rem.coeffs, trim=max(cut, noise))
        rows[dst] = new
        ops.append((dst, src, q))

    for _ in range(10_000):
        a, c = rows[0][0], rows[1][0]
        if a.is_zero or c.is_zero:
            break
        if a.degree > c.degree:
            top = True
        elif a.degree < c.degree:
            top = False
        else:
            top = abs(a.lead) >= abs(c.lead)
        if top:
            row_add(0, 1, *divmod(a, c))
        else:
            row_add(1, 0, *divmod(c, a))
    else:  # pragma: no cover - each step lowers a degree
        raise DegenerateError("Euclidean reduction did not terminate")

    if rows[0][0].is_zero:
        row_add(0, 1, Polynomial1.const(-1))
        row_add(1, 0, Polynomial1.const(1))
    u = rows[0][0]
    if u.degree != 0:
        raise DegenerateError("column reduced to a non-unit; det is not 1")
    u0 = u.lead

    factors = [ElementaryFactor(i + 1, j + 1, q) for i, j, q in ops]
    factors.extend(whitehead(u0, 1, ring=Polynomial1.const))
    top_right = rows[0][1] * (1 / u0)
    if not top_right.is_zero:
        factors.append(ElementaryFactor(1, 2, top_right))
    return factors


def _polish(factors, rows_in, iters: int = 4):
    """Refine shear coefficients by Gauss-Newton on the round-trip residual.

    Euclid's remainders lose accuracy along the chain; with the degrees of
    every factor frozen, the product is multilinear in the coefficients, so
    the Jacobian is exact and a few steps restore a backward-stable fit.
    """
    best = factors
    best_err = poly_roundtrip_error(factors, rows_in)
    current = factors
    for _ in range(iters):
        if best_err == 0.0:
            break
        prod = _poly_product(current)
        pre = [_poly_product(current[:k]) for k in range(len(current))]
        post = [_poly_product(current[k + 1:]) for k in range(len(current))]
        width = 1 + max(
            [p.degree for r in rows_in for p in r]
            + [p.degree for r in prod for p in r]
            + [pre[k][r][f.i - 1].degree + post[k][f.j - 1][c].degree
               + max(_as_poly(f.param).degree, 0)
               for k, f in enumerate(current) for r in range(2) for c in range(2)])

        def flat(mat):
            out = np.zeros((2, 2, width), dtype=complex)
            for r in range(2):
                for c in range(2):
                    co = mat[r][c].coeffs
                    out[r, c, :co.size] = co
            return out.ravel()

        residual = flat(rows_in) - flat(prod)
        columns, sizes = [], []
        for k, f in enumerate(current):
            nparam = max(_as_poly(f.param).degree, 0) + 1
            sizes.append(nparam)
            left = [pre[k][r][f.i - 1] for r in range(2)]
            right = [post[k][f.j - 1][c] for c in range(2)]
            for deg in range(nparam):
                z = np.zeros(2 * 2 * width, dtype=complex).reshape(2, 2, width)
                for r in range(2):
                    for c in range(2):
                        co = (left[r] * right[c]).coeffs
                        if co.size:
                            z[r, c, deg:deg + co.size] += co
                columns.append(z.ravel())
        jac = np.stack(columns, axis=1)
        step = np.linalg.lstsq(jac, residual, rcond=None)[0]
        updated, pos = [], 0
        for f, nparam in zip(current, sizes):
            co = np.zeros(nparam, dtype=complex)
            old = _as_poly(f.param).coeffs
            co[:old.size] = old
            co += step[pos:pos + nparam]
            pos += nparam
            updated.append(ElementaryFactor(f.i, f.j, Polynomial1(co, trim=0.0)))
        current = updated
        err = poly_roundtrip_error(current, rows_in)
        if err < best_err:
            best, best_err = current, err
        else:
            break
    return best


def _poly_product(factors: Sequence[ElementaryFactor], n: int = 2):
    """Left-to-right product over C[z]; an empty list gives the identity."""
    one, nil = Polynomial1.const(1), Polynomial1()
    out = [[one if i == j else nil for j in range(n)] for i in range(n)]
    for f in factors:
        p = _as_poly(f.param)
        for r in range(n):
            out[r][f.j - 1] = out[r][f.j - 1] + p * out[r][f.i - 1]
    return out


def poly_roundtrip_error(factors, mat) -> float:
    prod = _poly_product(factors, len(mat))
    return max((prod[i][j] - _as_poly(mat[i][j])).max_abs()
               for i in range(len(mat)) for j in range(len(mat)))


def _measure_product(factors: Sequence[ElementaryFactor], n: int):
    out = mr.identity(n)
    for f in factors:
        out = mr.mat_mul(out, mr.shear(n, f.i, f.j, f.param))
    return out


def verify_product(factors: Sequence[ElementaryFactor], n: int,
                   ring: str = "complex"):
    """Left-to-right product of ``factors`` in ``ring``.

    ``ring`` is ``"complex"`` (numpy array), ``"poly"`` (nested list of
    Polynomial1) or ``"measure"`` (MeasureMatrix).
    """
    for f in factors:
        if f.i > n or f.j > n:
            raise DomainError(f"factor index ({f.i}, {f.j}) exceeds n = {n}")
    if ring == "complex":
        return _complex_product(factors, n)
    if ring == "poly":
        return _poly_product(factors, n)
    if ring == "measure":
        return _measure_product(factors, n)
    raise DomainError(f"unknown ring {ring!r}")


# -- Cohn's matrix ---------------------------------------------------------------

def cohn_matrix() -> list[list[Polynomial2]]:
    """``[[1 + z1 z2, z1^2], [-z2^2, 1 - z1 z2]]``."""
    one = Polynomial2.const(1)
    z1z2 = Polynomial2.monomial(1, 1, 1)
    return [[one + z1z2, Polynomial2.monomial(1, 2, 0)],
            [Polynomial2.monomial(-1, 0, 2), one - z1z2]]


def poly2_det(mat) -> Polynomial2:
    (a, b), (c, d) = mat
    return a * d - b * c


# -- lattice measures <-> polynomials in several variables ------------------------

LatticePoly = Mapping[tuple, complex]


def atoms_to_poly(mu: HalfLineMeasure, base: Sequence[float]) -> dict[tuple, complex]:
    """Coefficient map ``{(n_1..n_d): weight}`` of an atomic lattice measure.

    The atom at ``n_1 e_1 + ... + n_d e_d`` becomes the monomial
    ``z^n``; decomposition uses :func:`lattice_coordinates`.
    """
    if mu.density is not None:
        raise DomainError("only purely atomic measures map to polynomials")
    out: dict[tuple, complex] = {}
    for loc, w in mu.atoms:
        key = lattice_coordinates(loc, base)
        out[key] = out.get(key, 0j) + w
    return out


def poly_to_atoms(coeffs: LatticePoly, base: Sequence[float]) -> HalfLineMeasure:
    base = np.asarray(base, dtype=float)
    atoms = [(float(np.dot(k, base)), c) for k, c in coeffs.items()]
    return HalfLineMeasure(atoms)


def lattice_poly_mul(p: LatticePoly, q: LatticePoly) -> dict[tuple, complex]:
    out: dict[tuple, complex] = {}
    for kp, cp in p.items():
        for kq, cq in q.items():
            k = tuple(a + b for a, b in zip(kp, kq))
            out[k] = out.get(k, 0j) + cp * cq
    return {k: c for k, c in out.items() if abs(c) > m.ATOM_DROP}


def lattice_poly_add(p: LatticePoly, q: LatticePoly) -> dict[tuple, complex]:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0j) + c
    return {k: c for k, c in out.items() if abs(c) > m.ATOM_DROP}


def lattice_poly_l1(p: LatticePoly) -> float:
    return float(sum(abs(c) for c in p.values()))
