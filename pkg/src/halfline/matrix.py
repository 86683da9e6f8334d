"""Square matrices and column vectors over the measure algebra."""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from . import measure as m
from .errors import DomainError, NeumannError
from .measure import HalfLineMeasure

__all__ = ["MeasureMatrix", "MeasureVector", "identity", "constant",
           "shear", "mat_mul", "mat_apply", "mat_add", "mat_sub", "det",
           "frobenius_bound", "vector_norm", "deform_matrix", "adjugate",
           "invert_measure", "invert_matrix", "matrix_distance",
           "scale_column", "NEUMANN_STOP", "NEUMANN_MAX_TERMS"]

NEUMANN_STOP = 2.0 ** -40
NEUMANN_MAX_TERMS = 10_000


class MeasureMatrix:
    """An ``n x n`` array of measures; multiplication uses convolution."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Sequence[HalfLineMeasure]]):
        rows = tuple(tuple(row) for row in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DomainError("measure matrix must be square and nonempty")
        for r in rows:
            for e in r:
                if not isinstance(e, HalfLineMeasure):
                    raise DomainError(f"matrix entry {e!r} is not a measure")
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("MeasureMatrix is immutable")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other):
        if isinstance(other, MeasureVector):
            return mat_apply(self, other)
        return mat_mul(self, other)

    def __add__(self, other):
        return mat_add(self, other)

    def __sub__(self, other):
        return mat_sub(self, other)

    def __repr__(self):
        return f"MeasureMatrix(n={self.n})"

    @property
    def is_atomic(self) -> bool:
        return all(e.is_atomic for row in self.entries for e in row)


class MeasureVector(tuple):
    """Column vector of measures."""

    def __new__(cls, items):
        items = tuple(items)
        if not items:
            raise DomainError("measure vector needs at least one entry")
        return super().__new__(cls, items)


def identity(n: int) -> MeasureMatrix:
    return constant(np.eye(n))


def constant(c) -> MeasureMatrix:
    """Embed a complex matrix as ``C * delta``."""
    c = np.asarray(c, dtype=complex)
    return MeasureMatrix([[m.scale(c[i, j], m.dirac()) for j in range(c.shape[1])]
                          for i in range(c.shape[0])])


def shear(n: int, i: int, j: int, param: HalfLineMeasure) -> MeasureMatrix:
    """``E_ij(param)`` with 1-based indices, ``i != j``."""
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise DomainError(f"invalid shear indices ({i}, {j}) for n = {n}")
    rows = [[m.dirac() if a == b else m.zero() for b in range(n)]
            for a in range(n)]
    rows[i - 1][j - 1] = param
    return MeasureMatrix(rows)


def _sum(items) -> HalfLineMeasure:
    out = m.zero()
    for x in items:
        out = m.add(out, x)
    return out


def _dot(row, col) -> HalfLineMeasure:
    return _sum(m.convolve(a, b) for a, b in zip(row, col)
                if not (a.is_zero or b.is_zero))


def _check_dims(a: int, b: int):
    if a != b:
        raise DomainError(f"dimension mismatch: {a} vs {b}")


def mat_mul(a: MeasureMatrix, b: MeasureMatrix) -> MeasureMatrix:
    _check_dims(a.n, b.n)
    cols = list(zip(*b.entries))
    return MeasureMatrix([[_dot(row, col) for col in cols] for row in a.entries])


def mat_apply(a: MeasureMatrix, v: MeasureVector) -> MeasureVector:
    _check_dims(a.n, len(v))
    return MeasureVector(_dot(row, v) for row in a.entries)


def mat_add(a: MeasureMatrix, b: MeasureMatrix) -> MeasureMatrix:
    _check_dims(a.n, b.n)
    return MeasureMatrix([[m.add(x, y) for x, y in zip(ra, rb)]
                          for ra, rb in zip(a.entries, b.entries)])


def mat_sub(a: MeasureMatrix, b: MeasureMatrix) -> MeasureMatrix:
    _check_dims(a.n, b.n)
    return MeasureMatrix([[m.sub(x, y) for x, y in zip(ra, rb)]
                          for ra, rb in zip(a.entries, b.entries)])


def _mat_scale(c: complex, a: MeasureMatrix) -> MeasureMatrix:
    return MeasureMatrix([[m.scale(c, x) for x in row] for row in a.entries])


def matrix_distance(a: MeasureMatrix, b: MeasureMatrix) -> float:
    """Frobenius bound of ``a - b``; zero iff the matrices agree."""
    return frobenius_bound(mat_sub(a, b))


def _perm_sign(p) -> int:
    sign = 1
    seen = [False] * len(p)
    for start in range(len(p)):
        if seen[start]:
            continue
        k, length = start, 0
        while not seen[k]:
            seen[k] = True
            k = p[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _product(items) -> HalfLineMeasure:
    out = items[0]
    for x in items[1:]:
        if out.is_zero:
            return out
        out = m.convolve(out, x)
    return out


def _det_rows(rows) -> HalfLineMeasure:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n <= 4:
        terms = []
        for p in itertools.permutations(range(n)):
            factors = [rows[i][p[i]] for i in range(n)]
            if any(f.is_zero for f in factors):
                continue
            term = _product(factors)
            terms.append(term if _perm_sign(p) > 0 else m.scale(-1.0, term))
        return _sum(terms)
    # cofactor expansion along the first row
    terms = []
    for j, a in enumerate(rows[0]):
        if a.is_zero:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = m.convolve(a, _det_rows(minor))
        terms.append(term if j % 2 == 0 else m.scale(-1.0, term))
    return _sum(terms)


def det(a: MeasureMatrix) -> HalfLineMeasure:
    """Determinant by permutation expansion; no division needed."""
    return _det_rows(a.entries)


def adjugate(a: MeasureMatrix) -> MeasureMatrix:
    n = a.n
    if n == 1:
        return identity(1)
    rows = a.entries
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
            c = _det_rows(minor)
            adj[j][i] = c if (i + j) % 2 == 0 else m.scale(-1.0, c)
    return MeasureMatrix(adj)


def vector_norm(v: MeasureVector) -> float:
    """Euclidean combination of entry norms, ``sqrt(sum ||v_i||^2)``."""
    return math.sqrt(sum(m.tv_norm(x) ** 2 for x in v))


def frobenius_bound(a: MeasureMatrix) -> float:
    """Upper bound for the operator norm: ``sqrt(sum ||m_ij||^2)``."""
    return math.sqrt(sum(m.tv_norm(x) ** 2 for row in a.entries for x in row))


def deform_matrix(a: MeasureMatrix, t: float) -> MeasureMatrix:
    return MeasureMatrix([[m.deform(x, t) for x in row] for row in a.entries])


def scale_column(a: MeasureMatrix, col: int, factor: HalfLineMeasure) -> MeasureMatrix:
    """Convolve every entry of column ``col`` (0-based) with ``factor``."""
    return MeasureMatrix([[m.convolve(x, factor) if j == col else x
                           for j, x in enumerate(row)] for row in a.entries])


def invert_measure(mu: HalfLineMeasure, *, stop: float = NEUMANN_STOP,
                   max_terms: int = NEUMANN_MAX_TERMS, with_residual: bool = False):
    """Neumann-series inverse of ``mu = alpha*delta + rho``.

    Requires ``||rho|| < |alpha|``.  Sums ``alpha^-1 (-rho/alpha)^{*k}``
    until a term has norm below ``stop``.  With ``with_residual`` also
    returns the achieved ``||mu * mu^-1 - delta||``.
    """
    alpha = m.atom_at_zero(mu)
    if alpha == 0:
        raise NeumannError("no atom at the origin to dominate the series")
    rest = m.sub(mu, m.scale(alpha, m.dirac()))
    ratio = m.tv_norm(rest) / abs(alpha)
    if ratio >= 1.0:
        raise NeumannError(
            f"perturbation too large: ||rho|| / |alpha| = {ratio:.6g} >= 1")
    q = m.scale(-1.0 / alpha, rest)
    term = m.scale(1.0 / alpha, m.dirac())
    total = term
    for _ in range(max_terms):
        term = m.convolve(term, q)
        if m.tv_norm(term) < stop:
            break
        total = m.add(total, term)
    else:
        raise NeumannError(f"Neumann series did not reach {stop:g} "
                           f"within {max_terms} terms")
    inv = m.add(total, term)
    if with_residual:
        return inv, m.distance(m.convolve(mu, inv), m.dirac())
    return inv


def invert_matrix(a: MeasureMatrix, *, with_residual: bool = False):
    """Inverse via ``adj(a) * det(a)^-1``.

    With ``with_residual`` also returns ``frobenius_bound(a a^-1 - I)``.
    """
    d_inv = invert_measure(det(a))
    adj = adjugate(a)
    inv = MeasureMatrix([[m.convolve(x, d_inv) for x in row]
                         for row in adj.entries])
    if with_residual:
        return inv, matrix_distance(mat_mul(a, inv), identity(a.n))
    return inv
