"""Invariants checked on generated inputs.

Atomic inputs must satisfy the algebraic laws to rounding; inputs with a
density satisfy them up to a multiple of the grid step ``H``.
"""

import math

import numpy as np
from hypothesis import assume, given, strategies as st

from halfline import matrix as mr
from halfline import measure as m
from halfline.elementary import (ElementaryFactor, atoms_to_poly, factor_complex,
                                 lattice_poly_l1, lattice_poly_mul, poly_to_atoms,
                                 verify_product)
from halfline.laplace import laplace_eval, laplace_product_residual, laplace_shift_residual
from halfline.spectra import P_GAP, property_p_failure, region_membership, spectrum_curve
from strategies import (H, any_measures, atomic_measures, mixed_measures, open_times,
                        times, weights)

EXACT = 1e-12
APPROX = 2 * H

half_plane = st.builds(complex, st.floats(0.0, 20.0), st.floats(-20.0, 20.0))


def scale_tol(*mus):
    return EXACT * max(1.0, *(m.tv_norm(x) for x in mus)) ** 3


# -- measure algebra ---------------------------------------------------------------

@given(any_measures)
def test_unit_law(mu):
    prod = m.convolve(m.dirac(), mu)
    assert prod.atoms == mu.atoms
    if mu.density is not None:
        np.testing.assert_array_equal(prod.density.values, mu.density.values)


@given(atomic_measures(), atomic_measures(), atomic_measures())
def test_atomic_ring_laws_exact(a, b, c):
    assert m.distance(m.convolve(a, b), m.convolve(b, a)) <= scale_tol(a, b)
    lhs = m.convolve(m.convolve(a, b), c)
    rhs = m.convolve(a, m.convolve(b, c))
    assert m.distance(lhs, rhs) <= scale_tol(a, b, c)
    dist = m.distance(m.convolve(a, m.add(b, c)), m.add(m.convolve(a, b), m.convolve(a, c)))
    assert dist <= scale_tol(a, b, c)


@given(mixed_measures(), mixed_measures(), mixed_measures())
def test_mixed_ring_laws(a, b, c):
    assert m.distance(m.convolve(a, b), m.convolve(b, a)) <= APPROX
    lhs = m.convolve(m.convolve(a, b), c)
    rhs = m.convolve(a, m.convolve(b, c))
    assert m.distance(lhs, rhs) <= APPROX * m.tv_norm(a) * m.tv_norm(b) * m.tv_norm(c)


@given(any_measures, any_measures)
def test_submultiplicative(a, b):
    assert m.tv_norm(m.convolve(a, b)) <= m.tv_norm(a) * m.tv_norm(b) + APPROX


@given(any_measures, times)
def test_deformation_contracts(mu, t):
    assert m.tv_norm(m.deform(mu, t)) <= m.tv_norm(mu) + EXACT


@given(atomic_measures(), atomic_measures(), times)
def test_deformation_multiplicative_atomic(a, b, t):
    lhs = m.deform(m.convolve(a, b), t)
    rhs = m.convolve(m.deform(a, t), m.deform(b, t))
    assert m.distance(lhs, rhs) <= scale_tol(a, b)


@given(any_measures, any_measures, times)
def test_deformation_multiplicative(a, b, t):
    lhs = m.deform(m.convolve(a, b), t)
    rhs = m.convolve(m.deform(a, t), m.deform(b, t))
    assert m.distance(lhs, rhs) <= APPROX * max(1.0, m.tv_norm(a) * m.tv_norm(b))


@given(any_measures, any_measures, times)
def test_deformation_additive(a, b, t):
    lhs = m.deform(m.add(a, b), t)
    rhs = m.add(m.deform(a, t), m.deform(b, t))
    assert m.distance(lhs, rhs) <= EXACT * max(1.0, m.tv_norm(a) + m.tv_norm(b))


@given(any_measures, times, times)
def test_deformation_composition(mu, t, u):
    tu = 1 - (1 - t) * (1 - u)
    # t, u < 1 can round to tu == 1, where the exact t = 1 rule takes over
    assume(tu < 1 or t == 1 or u == 1)
    lhs = m.deform(m.deform(mu, t), u)
    rhs = m.deform(mu, tu)
    assert m.distance(lhs, rhs) <= EXACT * max(1.0, m.tv_norm(mu))


@given(any_measures, open_times, open_times)
def test_deformation_continuity(mu, t, t0):
    # mean-value bound with R the right end of the support
    radius = max([0.0] + mu.locs.tolist()
                 + ([mu.density.horizon] if mu.density is not None else []))
    lip = radius * max(1 / (1 - t), 1 / (1 - t0)) * m.tv_norm(mu)
    gap = m.distance(m.deform(mu, t), m.deform(mu, t0))
    assert gap <= lip * abs(t - t0) + EXACT


# -- Laplace transform ------------------------------------------------------------

@given(any_measures, half_plane)
def test_transform_bounded_by_norm(mu, s):
    assert abs(laplace_eval(mu, s)) <= m.tv_norm(mu) + APPROX


@given(atomic_measures(), open_times, half_plane)
def test_shift_identity_atomic(mu, t, s):
    assert laplace_shift_residual(mu, t, s) <= EXACT * max(1.0, m.tv_norm(mu))


@given(mixed_measures(), open_times, st.floats(0.0, 5.0))
def test_shift_identity_mixed(mu, t, s):
    assert laplace_shift_residual(mu, t, s) <= APPROX


@given(atomic_measures(), atomic_measures(), half_plane)
def test_product_identity_atomic(a, b, s):
    assert laplace_product_residual(a, b, s) <= scale_tol(a, b)


# -- matrices ------------------------------------------------------------------------

@st.composite
def matrices(draw, entries=any_measures, n=None):
    n = n or draw(st.integers(1, 3))
    return mr.MeasureMatrix([[draw(entries) for _ in range(n)] for _ in range(n)])


@given(st.integers(2, 3).flatmap(
    lambda n: st.tuples(matrices(atomic_measures(2), n), matrices(atomic_measures(2), n))))
def test_det_multiplicative_atomic(pair):
    a, b = pair
    lhs = mr.det(mr.mat_mul(a, b))
    rhs = m.convolve(mr.det(a), mr.det(b))
    assert m.distance(lhs, rhs) <= 1e-10 * max(1.0, m.tv_norm(rhs))


@given(st.integers(2, 3).flatmap(
    lambda n: st.tuples(matrices(atomic_measures(2), n), matrices(atomic_measures(2), n))),
    times)
def test_matrix_deformation_multiplicative(pair, t):
    a, b = pair
    lhs = mr.deform_matrix(mr.mat_mul(a, b), t)
    rhs = mr.mat_mul(mr.deform_matrix(a, t), mr.deform_matrix(b, t))
    assert mr.matrix_distance(lhs, rhs) <= 1e-10 * max(1.0, mr.frobenius_bound(a)
                                                       * mr.frobenius_bound(b))


@given(st.integers(2, 4), st.data(), atomic_measures())
def test_shear_inverse_exact(n, data, mu):
    i = data.draw(st.integers(1, n))
    j = data.draw(st.integers(1, n).filter(lambda j: j != i))
    prod = mr.mat_mul(mr.shear(n, i, j, mu), mr.shear(n, i, j, m.scale(-1.0, mu)))
    assert mr.matrix_distance(prod, mr.identity(n)) == 0


@given(st.integers(1, 3).flatmap(
    lambda n: st.tuples(matrices(any_measures, n),
                        st.lists(any_measures, min_size=n, max_size=n))))
def test_frobenius_bound_dominates(pair):
    a, v = pair
    v = mr.MeasureVector(v)
    lhs = mr.vector_norm(mr.mat_apply(a, v))
    assert lhs <= mr.frobenius_bound(a) * mr.vector_norm(v) + APPROX


# -- factorization -----------------------------------------------------------------

@given(st.integers(2, 4), st.integers(0, 2 ** 32 - 1))
def test_factor_complex_prefixes_have_det_one(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assume(abs(np.linalg.det(a)) > 1e-3)
    c = a / np.linalg.det(a) ** (1 / n)
    fs = factor_complex(c)
    assert np.abs(verify_product(fs, n) - c).max() <= 1e-9
    for q in range(len(fs) + 1):
        assert abs(np.linalg.det(verify_product(fs[:q], n)) - 1) <= 1e-9


@given(st.lists(st.tuples(st.sampled_from([(1, 2), (2, 1)]), weights), max_size=6))
def test_shear_products_refactor(shears):
    fs = [ElementaryFactor(i, j, w) for (i, j), w in shears]
    c = verify_product(fs, 2)
    back = factor_complex(c)
    assert np.abs(verify_product(back, 2) - c).max() <= 1e-9 * max(1.0, np.abs(c).max()) ** 2


lattice_polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                                weights.filter(lambda w: abs(w) > 1e-3), max_size=4)


@given(lattice_polys, lattice_polys)
def test_lattice_encoding_ring_isomorphism(p, q):
    base = (1.0, math.sqrt(2))
    mu, nu = poly_to_atoms(p, base), poly_to_atoms(q, base)
    assert abs(m.tv_norm(mu) - lattice_poly_l1(p)) <= EXACT * (1 + lattice_poly_l1(p))
    got = atoms_to_poly(m.convolve(mu, nu), base)
    want = lattice_poly_mul(p, q)
    keys = set(got) | set(want)
    assert all(abs(got.get(k, 0) - want.get(k, 0)) <= 1e-12 * (1 + lattice_poly_l1(p)
               * lattice_poly_l1(q)) for k in keys)


# -- spectrum ------------------------------------------------------------------------

@given(st.integers(3, 2000))
def test_curve_samples_are_members(k):
    _, curve = spectrum_curve(k)
    assert np.all(region_membership(curve))


@given(st.floats(0.0, 2 * math.pi), st.floats(1.05, 3.0))
def test_points_beyond_unit_circle_fail(theta, r):
    # the curve lies in |w| <= 1, so its convex hull does too
    assert not region_membership(r * complex(math.cos(theta), math.sin(theta)))


@given(st.lists(st.builds(complex, st.floats(-10, 10), st.floats(-10, 10)),
                min_size=1, max_size=8))
def test_property_p_certificate(coeffs):
    r = property_p_failure(coeffs)
    assert r.certificate and r.residual0 + r.residual1 >= P_GAP - 1e-12
