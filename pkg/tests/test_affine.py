import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcdisk.affine import (
    DegenerateDataError,
    GeneralAffine,
    affine_conformal,
    affine_from_triangles,
    beltrami_of_affine,
    foot_parameter,
    interpolate_two_points,
    is_skewed,
    linear_stretch,
    signed_area,
    triangle_beltrami,
)

finite = st.floats(-10, 10, allow_nan=False)
points = st.builds(complex, finite, finite)
mus = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0, 0.95), st.floats(0, 2 * np.pi))


def test_linear_stretch_examples():
    assert linear_stretch(0, 3 + 4j) == 3 + 4j
    assert linear_stretch(0.4, 1) == pytest.approx(1.4)
    assert linear_stretch(0.4, 1j) == pytest.approx(0.6j)


def test_linear_stretch_rejects_non_qc():
    with pytest.raises(ValueError):
        linear_stretch(1.0, 1j)


def test_affine_conformal_examples():
    z0 = 0.3 - 0.7j
    assert affine_conformal(1, 0, z0) == z0
    assert affine_conformal(2j, 1, 1) == 1 + 2j
    z1, z2 = 0.2 + 0.1j, -1.0 + 2.0j
    assert affine_conformal(1 / (z2 - z1), -z1 / (z2 - z1), z2) == pytest.approx(1)
    with pytest.raises(DegenerateDataError):
        affine_conformal(0, 1, 1)


def test_interpolate_identity():
    f = interpolate_two_points(0, 0, 1, 0, 1)
    assert (f.alpha, f.beta, f.gamma) == (1, 0, 0)


def test_interpolate_hand_solution():
    # a * L(2) + b = 2 and b = 0 give a = 2/3, so F(i) = (2/3)(i - 0.5 i) = i/3
    f = interpolate_two_points(0.5, 0, 2, 0, 2)
    assert f.alpha == pytest.approx(2 / 3)
    assert f.beta == pytest.approx(1 / 3)
    assert f(1j) == pytest.approx(1j / 3)


@given(mus, points, points, points, points)
def test_interpolate_constraints_and_mu(mu, z1, z2, w1, w2):
    if abs(z1 - z2) < 1e-3 or abs(w1 - w2) < 1e-3:
        return
    f = interpolate_two_points(mu, z1, z2, w1, w2)
    assert abs(f(z1) - w1) <= 1e-9 * (1 + abs(w1))
    assert abs(f(z2) - w2) <= 1e-9 * (1 + abs(w2))
    assert abs(f.mu - mu) < 1e-12


def test_interpolate_degenerate():
    with pytest.raises(DegenerateDataError):
        interpolate_two_points(0.2, 1, 1, 0, 1)
    with pytest.raises(DegenerateDataError):
        interpolate_two_points(0.2, 0, 1, 2, 2)


def test_interpolate_vectorized():
    z1 = np.array([0, 1j])
    z2 = np.array([1, 2j])
    f = interpolate_two_points(np.array([0.1, 0.2j]), z1, z2, z1 * 2, z2 * 2)
    np.testing.assert_allclose(f(z2), 2 * z2)


def test_triangle_map_examples():
    src = (0, 1, 1j)
    f = affine_from_triangles(src, src)
    assert f.alpha == pytest.approx(1) and abs(f.beta) < 1e-15
    f = affine_from_triangles(src, (0, 1, 2j))
    assert (f.alpha, f.beta, f.gamma) == pytest.approx((1.5, -0.5, 0))
    f = affine_from_triangles(src, (0, 1.4, 0.6j))
    assert (f.alpha, f.beta, f.gamma) == pytest.approx((1, 0.4, 0))


def test_triangle_map_collinear():
    with pytest.raises(DegenerateDataError):
        affine_from_triangles((0, 1, 2), (0, 1, 1j))


def test_beltrami_examples():
    assert beltrami_of_affine(GeneralAffine(1, 0)) == 0
    f = affine_from_triangles((0, 1, 1j), (0, 1, 2j))
    assert f.mu == pytest.approx(-1 / 3)
    assert triangle_beltrami(0, 1, 1j, 0, 1, 2j) == pytest.approx(-1 / 3)
    g = interpolate_two_points(0.3 - 0.2j, 0, 1, 1j, 2)
    assert g.mu == pytest.approx(0.3 - 0.2j)


def test_beltrami_finite_difference():
    f = affine_from_triangles((0, 1, 1j), (0, 1, 2j))
    h = 1e-6
    fz = (f(h) - f(-h)) / (2 * h)
    fy = (f(1j * h) - f(-1j * h)) / (2 * h)
    dz, dzbar = 0.5 * (fz - 1j * fy), 0.5 * (fz + 1j * fy)
    assert dzbar / dz == pytest.approx(-1 / 3, abs=1e-8)


def test_beltrami_flags_reversal():
    mu = triangle_beltrami(0, 1, 1j, 0, 1, -1j)
    assert abs(mu) >= 1
    with pytest.raises(DegenerateDataError):
        beltrami_of_affine(GeneralAffine(0, 1))


@settings(max_examples=50)
@given(points, points, points, mus)
def test_triangle_beltrami_matches_general_affine(a, b, c, mu):
    if abs(signed_area(a, b, c)) < 1e-2:
        return
    F = GeneralAffine(1.3 - 0.2j, (1.3 - 0.2j) * mu, 0.5j)
    assert triangle_beltrami(a, b, c, F(a), F(b), F(c)) == pytest.approx(mu, abs=1e-8)


def test_skew_examples():
    assert not is_skewed(0, 1, 0.5 + 1j)
    assert is_skewed(0, 1, 2 + 1j)
    assert not is_skewed(0, 1, 1 + 1j)
    assert foot_parameter(0, 1, 1 + 1j) == 1
    with pytest.raises(DegenerateDataError):
        is_skewed(1, 1, 1j)


def test_signed_area_orientation():
    assert signed_area(0, 1, 1j) == 0.5
    assert signed_area(0, 1j, 1) == -0.5
