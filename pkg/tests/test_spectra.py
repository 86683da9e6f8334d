import math

import numpy as np
import pytest

import oracles
from halfline.errors import DomainError, HalfPlaneError
from halfline.measure import atom_at_zero, tv_norm
from halfline.spectra import (BOX, INFINITY, P_GAP, closed_form_errors,
                              complement_components, curve_self_intersections,
                              mobius_disc_to_halfplane, mobius_halfplane_to_disc,
                              nonexample_measure, nonexample_transform,
                              property_p_batch, property_p_failure, rasterize,
                              region_membership, spectrum_curve, spectrum_region)

# moduli of the roots of z^2 + z - 4, i.e. (-1 +- sqrt 17) / 2
ROOTS_AT_TWO = (1.5615528128088303, 2.5615528128088303)


def test_nonexample_measure():
    mu = nonexample_measure()
    assert atom_at_zero(mu) == 1
    assert tv_norm(mu) == pytest.approx(2.8925206405937196, abs=1e-6)
    assert max(closed_form_errors(mu)) <= 5e-4
    assert abs(closed_form_errors(mu, [0.0])[0]) <= 5e-4


def test_closed_form_transform():
    assert nonexample_transform(1.0) == 0
    assert nonexample_transform(2.0) == pytest.approx(2 / 9)
    assert nonexample_transform(INFINITY) == 1
    vals = nonexample_transform(np.array([0.0, 5.0]))
    assert np.allclose(vals, [0.0, 5 / 9])


def test_curve_values():
    theta, curve = spectrum_curve(720)
    assert theta[0] == 0 and curve[0] == 1
    assert theta[360] == math.pi and abs(curve[360]) <= 1e-12
    assert abs(curve[180] - (1j - 1) / 2) <= 1e-15
    assert np.all(np.diff(theta) > 0) and theta[-1] < 2 * math.pi
    with pytest.raises(DomainError):
        spectrum_curve(2)


def test_membership_examples():
    assert region_membership(0.0)
    assert region_membership(1.0)
    assert not region_membership(2.0)
    assert ROOTS_AT_TWO == pytest.approx(oracles.quadratic_root_moduli(2.0), abs=1e-15)
    assert min(ROOTS_AT_TWO) > 1


def test_membership_agrees_with_root_oracle(rng):
    w = rng.uniform(-1.3, 1.3, 500) + 1j * rng.uniform(-1.3, 1.3, 500)
    got = region_membership(w)
    for wi, gi in zip(w, got):
        r = oracles.quadratic_root_moduli(wi)
        if abs(r[0] - 1) > 1e-9:
            assert gi == (r[0] <= 1)


def test_curve_lies_in_region():
    _, curve = spectrum_curve(720)
    assert np.all(region_membership(curve))
    outside = 1.06 * np.exp(2j * np.pi * np.arange(360) / 360)
    assert not np.any(region_membership(outside))


def test_region_has_no_bounded_holes():
    region = spectrum_region(720, 512)
    assert region.bounded_components == 0
    assert oracles.bfs_bounded_components(region.bitmap) == 0
    assert region.box == BOX and region.bitmap.shape == (512, 512)


def test_annulus_has_one_hole():
    def annulus(w):
        return (np.abs(w) >= 0.3) & (np.abs(w) <= 0.8)
    bitmap = rasterize(annulus, 128)
    assert complement_components(bitmap) == 1
    assert oracles.bfs_bounded_components(bitmap) == 1


def test_full_box_has_no_holes():
    bitmap = rasterize(lambda w: np.ones(w.shape, dtype=bool), 64)
    assert complement_components(bitmap) == 0


def test_component_count_rejects_small_raster():
    with pytest.raises(DomainError):
        complement_components(np.zeros((32, 32), dtype=bool))
    with pytest.raises(DomainError):
        spectrum_region(720, 32)


def test_components_match_bfs_on_random_bitmaps(rng):
    for _ in range(5):
        bitmap = rng.random((64, 64)) < 0.55
        assert complement_components(bitmap) == oracles.bfs_bounded_components(bitmap)


def test_curve_crosses_itself_once():
    _, curve = spectrum_curve(720)
    hits = curve_self_intersections(curve)
    assert hits.size >= 1
    assert np.abs(hits + 0.5).max() <= 1e-3


def test_property_p_examples():
    r = property_p_failure([0.0])
    assert (r.residual0, r.residual1) == (0.0, pytest.approx(2 / 9)) and r.certificate
    r = property_p_failure([1 / 9, 5.0, -3j])
    assert r.residual0 == pytest.approx(1 / 9) and r.residual1 == pytest.approx(1 / 9)
    assert r.certificate
    r = property_p_failure([2 / 9])
    assert r.residual0 == pytest.approx(2 / 9) and r.residual1 == pytest.approx(0, abs=1e-16)


def test_property_p_with_sampled_transform():
    from halfline.laplace import laplace_eval
    mu = nonexample_measure()
    r = property_p_failure([0.1, 1.0], transform=lambda s: laplace_eval(mu, s))
    assert r.residual0 + r.residual1 >= P_GAP - 1e-3


def test_property_p_batch(rng):
    c = rng.normal(size=(1000, 4)) + 1j * rng.normal(size=(1000, 4))
    r0, r1 = property_p_batch(c)
    assert np.all(r0 + r1 >= P_GAP - 1e-12)
    assert np.allclose(r0, np.abs(c[:, 0]))
    assert np.allclose(r1, np.abs(2 / 9 - c[:, 0]))


def test_mobius_examples():
    assert mobius_disc_to_halfplane(0) == 1
    assert mobius_disc_to_halfplane(-1) == 0
    assert mobius_disc_to_halfplane(1) == INFINITY
    assert mobius_halfplane_to_disc(INFINITY) == 1
    assert mobius_halfplane_to_disc(1) == 0
    with pytest.raises(HalfPlaneError):
        mobius_disc_to_halfplane(1.5)
    with pytest.raises(HalfPlaneError):
        mobius_halfplane_to_disc(-1)


def test_transform_pulls_back_to_quadratic(rng):
    r = 0.99 * np.sqrt(rng.uniform(0, 1, 100))
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    for zi in z:
        s = mobius_disc_to_halfplane(zi)
        assert abs(nonexample_transform(s) - (zi + zi * zi) / 2) <= 1e-10
        assert abs(mobius_halfplane_to_disc(s) - zi) <= 1e-12
