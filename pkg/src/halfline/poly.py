"""Dense complex polynomials in one and two variables."""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = ["TRIM", "Polynomial1", "Polynomial2"]

#: coefficients at or below this modulus are treated as zero
TRIM = 2.0 ** -40


class Polynomial1:
    """``c[0] + c[1] z + ... + c[d] z^d`` with the top coefficient nonzero.

    ``degree`` is -1 for the zero polynomial.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=(), trim: float = TRIM):
        c = np.array(coeffs, dtype=complex).ravel()
        c[np.abs(c) <= trim] = 0
        nz = np.flatnonzero(c)
        c = c[:nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial1 is immutable")

    @classmethod
    def const(cls, a) -> "Polynomial1":
        return cls([a])

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1]) if self.coeffs.size else 0j

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs) if self.coeffs.size else 0j * z

    def __repr__(self):
        return f"Polynomial1({self.coeffs.tolist()})"

    def _pad(self, other):
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[:self.coeffs.size] = self.coeffs
        b[:other.coeffs.size] = other.coeffs
        return a, b

    @staticmethod
    def _coerce(x):
        return x if isinstance(x, Polynomial1) else Polynomial1.const(x)

    def __add__(self, other):
        a, b = self._pad(self._coerce(other))
        return Polynomial1(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pad(self._coerce(other))
        return Polynomial1(a - b)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Polynomial1(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Polynomial1):
            return Polynomial1(complex(other) * self.coeffs)
        if self.is_zero or other.is_zero:
            return Polynomial1()
        return Polynomial1(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __divmod__(self, other: "Polynomial1"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = self.coeffs.copy()
        dq = self.degree - other.degree
        if dq < 0:
            return Polynomial1(), self
        quot = np.zeros(dq + 1, dtype=complex)
        lead = other.lead
        dc = other.degree
        for k in range(dq, -1, -1):
            q = rem[k + dc] / lead
            quot[k] = q
            rem[k:k + dc + 1] -= q * other.coeffs
            rem[k + dc] = 0
        return Polynomial1(quot), Polynomial1(rem[:max(dc, 0)])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    def close_to(self, other: "Polynomial1", tol: float) -> bool:
        return (self - other).max_abs() <= tol


class Polynomial2:
    """Dense grid ``c[k, l]`` of the monomial ``z1^k z2^l``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2:
            raise DomainError("bivariate coefficients must form a 2-D grid")
        c[np.abs(c) <= TRIM] = 0
        rows = np.flatnonzero(np.abs(c).sum(axis=1))
        cols = np.flatnonzero(np.abs(c).sum(axis=0))
        if rows.size == 0:
            c = np.zeros((0, 0), dtype=complex)
        else:
            c = c[:rows[-1] + 1, :cols[-1] + 1]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial2 is immutable")

    @classmethod
    def monomial(cls, coef, k: int, l: int) -> "Polynomial2":
        c = np.zeros((k + 1, l + 1), dtype=complex)
        c[k, l] = coef
        return cls(c)

    @classmethod
    def const(cls, a) -> "Polynomial2":
        return cls.monomial(a, 0, 0)

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def coefficient(self, k: int, l: int) -> complex:
        r, s = self.coeffs.shape
        return complex(self.coeffs[k, l]) if k < r and l < s else 0j

    def __eq__(self, other):
        if not isinstance(other, Polynomial2):
            return NotImplemented
        return (self.coeffs.shape == other.coeffs.shape
                and bool(np.all(self.coeffs == other.coeffs)))

    def __hash__(self):
        return hash((self.coeffs.shape, self.coeffs.tobytes()))

    def __repr__(self):
        terms = [f"({complex(c):g})*z1^{k}*z2^{l}"
                 for (k, l), c in np.ndenumerate(self.coeffs) if c != 0]
        return "Polynomial2(" + (" + ".join(terms) or "0") + ")"

    def _combine(self, other, sign):
        r = max(self.coeffs.shape[0], other.coeffs.shape[0])
        s = max(self.coeffs.shape[1], other.coeffs.shape[1])
        out = np.zeros((r, s), dtype=complex)
        out[:self.coeffs.shape[0], :self.coeffs.shape[1]] += self.coeffs
        out[:other.coeffs.shape[0], :other.coeffs.shape[1]] += sign * other.coeffs
        return Polynomial2(out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return Polynomial2(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Polynomial2):
            return Polynomial2(complex(other) * self.coeffs)
        if self.is_zero or other.is_zero:
            return Polynomial2(np.zeros((1, 1)))
        return Polynomial2(_conv2(self.coeffs, other.coeffs))

    def __call__(self, z1, z2):
        return np.polynomial.polynomial.polyval2d(z1, z2, self.coeffs)


def _conv2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # direct sum keeps integer-valued coefficients exact
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1),
                   dtype=complex)
    for (k, l), c in np.ndenumerate(a):
        if c != 0:
            out[k:k + b.shape[0], l:l + b.shape[1]] += c * b
    return out
