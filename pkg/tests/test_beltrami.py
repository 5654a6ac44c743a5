import numpy as np
import pytest

from qcdisk.beltrami import (
    constant_mu,
    daripa_mu,
    exact_radial_map,
    exact_sectorial_map,
    from_callable,
    grid_mu,
    parse_provider,
    radial_mu,
    read_grid_csv,
    sample_grid,
    sector_angle,
    sectorial_mu,
    sine_squared_profile,
    triangle_average,
    write_grid_csv,
)


def fd_beltrami(f, z, h=1e-6):
    """Beltrami coefficient of ``f`` by central differences."""
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return (fx + 1j * fy) / (fx - 1j * fy)


def random_points(n, rmin=0.05, rmax=0.95, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(rmin, rmax, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def test_constant():
    f = constant_mu(0)
    assert f(0.3j) == 0 and f.sup_bound == 0 and f.name == "constant:0.0"
    f = constant_mu(0.4)
    np.testing.assert_array_equal(f(np.array([0, 0.5, -0.7j])), 0.4)
    assert constant_mu(0.3j).sup_bound == pytest.approx(0.3)
    assert constant_mu(0.3 + 0.1j).name == "constant:0.3+0.1i"
    with pytest.raises(ValueError):
        constant_mu(1.0)


def test_radial_identity_profile():
    f = radial_mu(lambda r: r, lambda r: np.ones_like(r))
    z = random_points(50)
    assert np.max(np.abs(f(z))) < 1e-15


def test_radial_square_profile():
    # r phi'/phi = 2 gives |mu| = 1/3 with phase z/conj(z)
    f = radial_mu(lambda r: r * r, lambda r: 2 * r, mu_at_zero=0.0)
    z = random_points(50)
    np.testing.assert_allclose(f(z), np.exp(2j * np.angle(z)) / 3, atol=1e-14)


def test_radial_default_matches_exact_map():
    f = radial_mu()
    assert f.name == "radial:default" and f(0j) == 0
    z = random_points(100)
    np.testing.assert_allclose(fd_beltrami(exact_radial_map, z), f(z), atol=1e-6)
    assert f.sup_bound < 1


def test_radial_rejects_non_monotone():
    with pytest.raises(ValueError):
        radial_mu(*sine_squared_profile())


def test_sectorial_examples():
    f = sectorial_mu()
    # slope 1/2 branch: (1/3) z/conj(z) = (1/3) e^{i pi/2}
    assert f(np.exp(1j * np.pi / 4)) == pytest.approx(1j / 3)
    assert f(np.exp(1.5j * np.pi)) == pytest.approx(1 / 5)
    assert f(0j) == 0
    assert f.sup_bound == pytest.approx(1 / 3)


def test_sectorial_matches_exact_map():
    f = sectorial_mu()
    z = random_points(200, seed=1)
    # stay away from the two rays where psi' jumps
    z = z[np.abs(np.sin(np.angle(z))) > 0.01]
    np.testing.assert_allclose(fd_beltrami(exact_sectorial_map, z), f(z), atol=1e-6)


def test_sector_angle():
    assert sector_angle(0.0) == 0
    assert sector_angle(np.pi) == pytest.approx(np.pi / 2)
    assert sector_angle(2 * np.pi - 1e-12) == pytest.approx(2 * np.pi)


def test_daripa_fields():
    f1, f2 = daripa_mu(1), daripa_mu(2)
    assert f1(0j) == 0 and f2(0j) == 0
    assert f1(1.0) == pytest.approx(np.exp(-1.3 + 0.65j))
    assert f2(0.5) == pytest.approx(0.125 * np.sin(2.5))
    for f in (f1, f2):
        z = random_points(2000, 0, 1, seed=2)
        assert np.max(np.abs(f(z))) <= f.sup_bound < 1
    with pytest.raises(ValueError):
        daripa_mu(3)


def test_from_callable_samples_bound():
    f = from_callable(lambda z: 0.5 * z)
    assert f.sup_bound == pytest.approx(0.525, rel=1e-6)
    with pytest.raises(ValueError):
        from_callable(lambda z: 0.99 * np.ones_like(z))


def test_grid_constant_and_validation():
    r = np.linspace(0, 1, 5)
    t = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    f = grid_mu(r, t, np.full((5, 8), 0.2 - 0.1j))
    np.testing.assert_allclose(f(random_points(100)), 0.2 - 0.1j)
    with pytest.raises(ValueError):
        grid_mu(r[:1], t, np.zeros((1, 8)))
    with pytest.raises(ValueError):
        grid_mu(r, t, np.full((5, 8), 1.0))


def test_grid_interpolates_daripa():
    f2 = daripa_mu(2)
    g = grid_mu(*sample_grid(f2, 512, 512))
    z = random_points(10_000, 0, 1, seed=3)
    assert np.max(np.abs(g(z) - f2(z))) < 1e-3


def test_grid_csv_roundtrip(tmp_path):
    r, t, v = sample_grid(daripa_mu(1), 9, 12)
    path = tmp_path / "mu.csv"
    write_grid_csv(path, r, t, v)
    g = read_grid_csv(path)
    z = random_points(100)
    np.testing.assert_array_equal(g(z), grid_mu(r, t, v)(z))


def test_triangle_average():
    tri = (0.5 + 0j, 0.52 + 0j, 0.51 + 0.02j)
    c = constant_mu(0.3)
    assert triangle_average(c, tri, 1) == pytest.approx(0.3)
    assert triangle_average(c, tri, 3) == pytest.approx(0.3)
    lin = from_callable(lambda z: 0.1 * z.real + 0j, sup_bound=0.1)
    assert triangle_average(lin, tri, 3) == pytest.approx(0.1 * (0.5 + 0.52 + 0.51) / 3, abs=1e-15)
    # Monte Carlo oracle on a small triangle
    rng = np.random.default_rng(4)
    u, v = rng.uniform(0, 1, (2, 4096))
    flip = u + v > 1
    u[flip], v[flip] = 1 - u[flip], 1 - v[flip]
    p = tri[0] + u * (tri[1] - tri[0]) + v * (tri[2] - tri[0])
    f2 = daripa_mu(2)
    assert abs(triangle_average(f2, tri, 3) - f2(p).mean()) < 1e-4
    with pytest.raises(ValueError):
        triangle_average(c, tri, 2)


def test_parse_provider(tmp_path):
    assert parse_provider("constant:0.4")(0j) == 0.4
    assert parse_provider("constant:0.3+0.1i").sup_bound == pytest.approx(abs(0.3 + 0.1j))
    assert parse_provider("radial:default").name == "radial:default"
    assert parse_provider("sectorial").name == "sectorial"
    assert parse_provider("daripa:2").name == "daripa:2"
    path = tmp_path / "g.csv"
    write_grid_csv(path, *sample_grid(constant_mu(0.1), 3, 4))
    assert parse_provider(f"grid:{path}")(0.5) == pytest.approx(0.1)
    for bad in ("nope", "radial:other", "constant:2"):
        with pytest.raises(ValueError):
            parse_provider(bad)
