"""Seeded random inputs shared by the acceptance checks and the test suite."""

from __future__ import annotations

import os

import numpy as np

from . import matrix as mr
from . import measure as m
from .elementary import ElementaryFactor, verify_product
from .matrix import MeasureMatrix
from .measure import DEFAULT_H, HalfLineMeasure
from .poly import Polynomial1

__all__ = ["seed_from_env", "rng_for", "random_complex", "random_atomic",
           "random_mixed", "random_shear_product", "random_sl_complex",
           "random_poly_shears", "desk_instance", "MIXED_HORIZON"]

#: horizon of randomized mixed inputs; shorter than the default to keep the
#: randomized suites fast (all checks compare values on the same grid)
MIXED_HORIZON = 8.0


def seed_from_env(default: int = 0) -> int:
    """Base seed from ``HLA_SEED`` (fixed default for reproducibility)."""
    raw = os.environ.get("HLA_SEED", "")
    return int(raw) if raw.strip() else default


def rng_for(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for one check, derived from the base seed."""
    return np.random.default_rng([seed, stream])


def random_complex(rng, size=None):
    return rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size)


def random_atomic(rng, max_atoms: int = 4, span: float = 4.0) -> HalfLineMeasure:
    """One to ``max_atoms`` atoms; one of them sits at the origin half the time."""
    k = int(rng.integers(1, max_atoms + 1))
    locs = rng.uniform(0.0, span, k)
    if rng.random() < 0.5:
        locs[0] = 0.0
    return HalfLineMeasure(list(zip(locs, random_complex(rng, k))))


def random_mixed(rng, h: float = DEFAULT_H, horizon: float = MIXED_HORIZON,
                 max_atoms: int = 2, decay=(0.5, 2.0)) -> HalfLineMeasure:
    """Atoms plus a density ``sum c x^p e^{-a x}``, ``p <= 2``, ``a`` in ``decay``."""
    terms = [(complex(random_complex(rng)), int(rng.integers(0, 3)),
              float(rng.uniform(*decay))) for _ in range(int(rng.integers(1, 3)))]

    def f(x):
        return sum(c * x ** p * np.exp(-a * x) for c, p, a in terms)

    k = int(rng.integers(0, max_atoms + 1))
    atoms = list(zip(rng.uniform(0.0, 2.0, k), random_complex(rng, k)))
    return m.from_function(f, h, horizon, atoms)


def random_shear_product(rng, n: int, param, max_shears: int = 6) -> MeasureMatrix:
    """Product of 1..max_shears shears ``E_ij(param(rng))``, random ``i != j``."""
    out = mr.identity(n)
    for _ in range(int(rng.integers(1, max_shears + 1))):
        i, j = rng.choice(n, 2, replace=False)
        out = mr.mat_mul(out, mr.shear(n, int(i) + 1, int(j) + 1, param(rng)))
    return out


def random_sl_complex(rng, n: int) -> np.ndarray:
    """Gaussian complex matrix rescaled to determinant one."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    d = np.linalg.det(a)
    return a / d ** (1.0 / n)


def random_poly_shears(rng, max_shears: int = 6, max_degree: int = 5):
    """Product over C[z] of alternating shears of degree 1..max_degree.

    Leading coefficients have modulus one and the rest are uniform in the
    unit square.  Returns ``(matrix, factors)``.
    """
    factors = []
    for q in range(int(rng.integers(1, max_shears + 1))):
        d = int(rng.integers(1, max_degree + 1))
        c = random_complex(rng, d + 1)
        c[-1] = np.exp(2j * np.pi * rng.uniform())
        factors.append(ElementaryFactor(1 + q % 2, 2 - q % 2, Polynomial1(c)))
    return verify_product(factors, 2, "poly"), factors


def _geometric(c: float, r: float, terms: int, step: float) -> HalfLineMeasure:
    return HalfLineMeasure([(k * step, c * r ** k) for k in range(terms)])


def _truncate(mu: HalfLineMeasure, loc: float) -> HalfLineMeasure:
    keep = mu.locs <= loc
    return HalfLineMeasure.from_arrays(mu.locs[keep], mu.weights[keep])


def desk_instance(terms: int = 40, cutoff: float = 5.0):
    """Atomic ``f = E12(phi) E21(psi)`` with geometric ``phi``, ``psi``.

    The tails are cut after ``terms`` atoms; ``g`` keeps only the atoms of
    ``f`` at locations up to ``cutoff``.  Returns ``(f, g)``.
    """
    phi = _geometric(0.4, 0.5, terms, 1.0)
    psi = _geometric(0.3, -0.6, terms, 0.5)
    f = mr.mat_mul(mr.shear(2, 1, 2, phi), mr.shear(2, 2, 1, psi))
    g = MeasureMatrix([[_truncate(x, cutoff) for x in row] for row in f.entries])
    return f, g
