import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcdisk.elliptic import (
    EllipseGeometry,
    JacobiParams,
    complete_elliptic_K,
    ellipse_to_disk,
    jacobi_sn,
    modulus_from_nome,
    nome_from_axes,
    nome_from_parameter,
    seed_first_ring,
    seed_map,
    theta2,
    theta3,
)

# frozen from mpmath at 30 digits (jtheta, ellipk, ellipfun)
THETA2_0625 = 1.0039063096046483
THETA3_0625 = 1.1250305176072288
K_HALF = 1.8540746773013719
SN_03_02 = {
    0.1: 0.301531528713367564 + 0.191593186738522939j,
    0.5: 0.301848909507443676 + 0.188596676788381367j,
    0.9: 0.302154545316009150 + 0.185608538179232389j,
}


def test_geometry_invariants():
    EllipseGeometry(1.25, 0.75)
    with pytest.raises(ValueError):
        EllipseGeometry(1.0, 1.0)
    with pytest.raises(ValueError):
        EllipseGeometry(2.0, 1.0)
    g = EllipseGeometry.from_semiminor(1.0)
    assert g.a == pytest.approx(math.sqrt(2))


def test_nome_examples():
    assert nome_from_axes(EllipseGeometry(1.25, 0.75)) == pytest.approx(0.0625)
    assert nome_from_axes(EllipseGeometry.from_semiminor(1.0)) == pytest.approx(0.029437251522859414)
    assert nome_from_axes(EllipseGeometry.from_semiminor(99.999)) < 1e-9


def test_theta_series():
    assert theta3(0) == 1
    assert theta2(0) == 0
    assert theta2(0.0625) == pytest.approx(THETA2_0625, rel=1e-15)
    assert theta3(0.0625) == pytest.approx(THETA3_0625, rel=1e-15)
    with pytest.raises(ValueError):
        theta3(1.0)


def test_modulus_from_nome():
    assert modulus_from_nome(0) == 0
    assert modulus_from_nome(0.0625) == pytest.approx(0.7963, abs=1e-4)
    for q in (1e-4, 1e-6, 1e-8):
        assert modulus_from_nome(q) == pytest.approx(4 * math.sqrt(q), rel=0.01)


def test_nome_parameter_roundtrip():
    for m in (0.1, 0.5, 0.9):
        q = nome_from_parameter(m)
        assert modulus_from_nome(q) ** 2 == pytest.approx(m, rel=1e-12)


def test_complete_K():
    assert complete_elliptic_K(0) == pytest.approx(math.pi / 2, abs=1e-12)
    assert complete_elliptic_K(0.5) == pytest.approx(K_HALF, rel=1e-14)
    with pytest.raises(ValueError):
        complete_elliptic_K(1.0)


@pytest.mark.parametrize("m", [0.1, 0.5, 0.9])
def test_sn_identities(m):
    assert jacobi_sn(0, m) == 0
    assert abs(jacobi_sn(complete_elliptic_K(m), m) - 1) < 1e-10
    assert jacobi_sn(0.3 + 0.2j, m) == pytest.approx(SN_03_02[m], abs=1e-14)


def test_sn_degenerate_parameter():
    u = np.linspace(-3, 3, 11) + 0.1j
    np.testing.assert_allclose(jacobi_sn(u, 0), np.sin(u), rtol=1e-15)
    with pytest.raises(ValueError):
        jacobi_sn(0.1, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(-2, 2), st.floats(-0.5, 0.5))
def test_sn_against_mpmath(m, x, y):
    ref = complex(mpmath.ellipfun("sn", mpmath.mpc(x, y), m=m))
    assert abs(jacobi_sn(complex(x, y), m) - ref) < 1e-11 * max(1, abs(ref))


def test_ellipse_to_disk():
    g = EllipseGeometry(1.25, 0.75)
    assert ellipse_to_disk(0, g) == 0
    assert abs(abs(ellipse_to_disk(g.a, g)) - 1) < 1e-8
    t = np.linspace(0, 2 * np.pi, 257)[:-1]
    w = ellipse_to_disk(g.a * np.cos(t) + 1j * g.b * np.sin(t), g)
    assert np.max(np.abs(np.abs(w) - 1)) < 1e-8
    x = np.linspace(0.01, g.a - 1e-9, 50)
    wx = ellipse_to_disk(x, g)
    assert np.all(np.abs(wx.imag) < 1e-14)
    assert np.all(np.diff(wx.real) > 0) and 0 < wx.real[0] and wx.real[-1] <= 1 + 1e-12
    with pytest.raises(ValueError):
        ellipse_to_disk(2.0, g)


def test_ellipse_to_disk_conformal():
    # finite-difference check that d/dzbar vanishes inside
    g = EllipseGeometry(1.25, 0.75)
    rng = np.random.default_rng(0)
    u = 0.8 * (rng.uniform(-1, 1, 20) + 0.5j * rng.uniform(-1, 1, 20))
    h = 1e-6
    fx = (ellipse_to_disk(u + h, g) - ellipse_to_disk(u - h, g)) / (2 * h)
    fy = (ellipse_to_disk(u + 1j * h, g) - ellipse_to_disk(u - 1j * h, g)) / (2 * h)
    assert np.max(np.abs(0.5 * (fx + 1j * fy))) < 1e-6


def test_jacobi_params():
    p = JacobiParams.from_nome(0.0625)
    assert p.m == pytest.approx(p.k**2)
    assert p.K == pytest.approx(complete_elliptic_K(p.m))


def test_seed_identity_shortcut():
    ang = 2 * np.pi * (np.arange(8) + 0.5) / 8
    np.testing.assert_array_equal(seed_first_ring(0, 0.1, 8, ang), 0.1 * np.exp(1j * ang))


def test_seed_boundary_modulus():
    ang = 2 * np.pi * (np.arange(8) + 0.5) / 8
    w = seed_first_ring(0.4, 0.1, 8, ang)
    assert np.max(np.abs(np.abs(w) - 0.1)) < 1e-6


def test_seed_positive_axis_and_origin():
    f = seed_map(0.4, 0.5)
    x = np.linspace(0, 0.5, 11)
    w = f(x)
    assert w[0] == 0
    assert np.all(np.abs(w.imag) < 1e-14) and np.all(np.diff(w.real) > 0)


def test_seed_is_mu_conformal():
    mu0 = 0.3 + 0.2j
    f = seed_map(mu0, 0.5)
    z = np.array([0.1 + 0.1j, -0.2 + 0.05j, 0.3j])
    h = 1e-7
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    fz, fzb = 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)
    np.testing.assert_allclose(fzb / fz, mu0, atol=1e-6)


def test_seed_rejects_large_mu():
    with pytest.raises(ValueError):
        seed_map(1.0, 0.5)
