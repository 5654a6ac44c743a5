import math

import numpy as np
import pytest

from qcdisk.affine import signed_area
from qcdisk.mesh import (
    MeshConfig,
    RingMesh,
    build_mesh,
    equilateral_ratio,
    max_ratio_bound,
    ring_count,
    table1_csv,
    table1_generate,
)

# published ratio table: N -> [(beta, M) for mu = 0.1 .. 0.5]
TABLE = {
    32: [(2.561, 5), (1.605, 9), (1.299, 15), (1.156, 27), (1.078, 52)],
    64: [(1.789, 8), (1.309, 18), (1.155, 32), (1.083, 58), (1.044, 107)],
    128: [(1.396, 16), (1.156, 37), (1.079, 70), (1.043, 127), (1.023, 230)],
    256: [(1.198, 34), (1.078, 80), (1.04, 154), (1.022, 279), (1.012, 504)],
    512: [(1.099, 71), (1.039, 175), (1.02, 339), (1.011, 614), (1.006, 1108)],
}


def test_bound_printed_example():
    # cos(pi/16) + 4.05 sin(pi/16)
    assert max_ratio_bound(32, 0.1) == pytest.approx(1.77090, abs=1e-5)


def test_bound_limits():
    for v in ("printed", "half_angle", "sharp", "table_compatible"):
        assert max_ratio_bound(64, 0.0, v) == math.inf
        for mu in (0.3, 0.5):
            b = max_ratio_bound(10**6, mu, v)
            assert 1 < b < 1.0001
    with pytest.raises(ValueError):
        max_ratio_bound(64, 1.0)
    with pytest.raises(ValueError):
        max_ratio_bound(64, 0.2, "bogus")


def test_bound_ordering():
    # the sharp threshold dominates the half-angle form for every |mu|
    for mu in (0.05, 0.2, 0.5, 0.8):
        assert max_ratio_bound(128, mu, "sharp") >= max_ratio_bound(128, mu, "half_angle")


def test_sharp_bound_is_exact_threshold():
    # apex of the worst-phase image triangle lands on the perpendicular at the base end
    from qcdisk.affine import foot_parameter, interpolate_two_points

    N, kappa = 64, 0.3
    beta = max_ratio_bound(N, kappa, "sharp")
    phases = np.exp(1j * np.linspace(0, 2 * np.pi, 4001))
    a, b = 1.0 + 0j, np.exp(2j * np.pi / N)
    c = beta * np.exp(1j * np.pi / N)
    apex = interpolate_two_points(kappa * phases, a, b, a, b)(c)
    t = np.array([foot_parameter(a, b, p) for p in apex])
    assert t.min() == pytest.approx(0, abs=1e-5) or t.max() == pytest.approx(1, abs=1e-5)


def test_ring_count_examples():
    # ceil(ln(64 / 2 pi) / ln 2) = ceil(3.348) = 4
    assert ring_count(64, 2.0) == 4
    assert ring_count(7, 2.0) == 1
    # the printed formula gives 2 where the published table has 5
    assert ring_count(32, 2.561) == 2
    with pytest.raises(ValueError):
        ring_count(64, 1.0)


def test_table_reproduces_published_cells():
    rows = table1_generate()
    assert len(rows) == 25
    for N, mu, beta, M, variant in rows:
        want_beta, want_M = TABLE[N][round(mu * 10) - 1]
        assert variant == "table_compatible"
        assert beta == pytest.approx(want_beta, abs=5e-4)
        assert M == want_M


def test_table_printed_variant_differs():
    rows = table1_generate(variant="printed")
    assert rows[0][2] == pytest.approx(1.77090, abs=1e-5)
    assert rows[0][3] == ring_count(32, rows[0][2])
    text = table1_csv(rows)
    assert text.splitlines()[0] == "N,mu,beta,M,variant"
    assert len(text.splitlines()) == 26


def test_mesh_config_validation():
    with pytest.raises(ValueError):
        MeshConfig(N=7, M=2, ratio=2)
    with pytest.raises(ValueError):
        MeshConfig(N=4, M=2, ratio=2)
    with pytest.raises(ValueError):
        MeshConfig(N=8, M=0, ratio=2)
    with pytest.raises(ValueError):
        MeshConfig(N=8, M=2, ratio=1.0)


def test_from_kappa_respects_bound():
    for N in (16, 64, 256):
        for kappa in (0.05, 0.4, 0.8):
            cfg = MeshConfig.from_kappa(N, kappa)
            assert cfg.satisfies_bound()
            assert cfg.ratio <= equilateral_ratio(N)
            assert cfg.M == ring_count(N, cfg.ratio)


def test_radii_and_vertices():
    mesh = build_mesh(MeshConfig(N=8, M=2, ratio=2.0))
    np.testing.assert_allclose(mesh.radii, [0.5, 1.0])
    # ring 2 is offset by a full vertex spacing: z[2, -1] = 1
    assert mesh.vertex(2, -1) == pytest.approx(1)
    assert mesh.vertex(1, 0) == pytest.approx(0.5 * np.exp(1j * np.pi / 8))
    assert mesh.anchor_index(2) == 7 and mesh.anchor_index(1) == 0
    assert mesh.ratio == 2.0


def test_ring_mesh_small_n_and_radii_checks():
    mesh = RingMesh(np.array([1.0]), 4)
    np.testing.assert_allclose(mesh.ring(1), np.exp(2j * np.pi * (np.arange(4) + 0.5) / 4))
    mesh = RingMesh(np.array([0.25, 0.5, 1.0]), 4)
    assert mesh.z.shape == (3, 4)
    with pytest.raises(ValueError):
        RingMesh(np.array([0.5, 0.9]), 8)
    with pytest.raises(ValueError):
        RingMesh(np.array([0.5, 0.5, 1.0]), 8)


def test_triangles_clockwise_and_cover_annulus():
    cfg = MeshConfig.from_kappa(128, 0.4, M=64)
    mesh = build_mesh(cfg)
    tris, outward = mesh.triangles()
    assert tris.shape == (2 * 128 * 63, 3, 2)
    assert outward.sum() == 128 * 63
    z = mesh.z[tris[..., 0] - 1, tris[..., 1]]
    # listed clockwise: outer vertex lies to the right of the inner edge
    area = -signed_area(z[:, 0], z[:, 1], z[:, 2])
    assert np.all(area > 0)
    r1 = mesh.radii[0]
    annulus = np.pi * (1 - r1**2)
    # the triangles fill the annulus up to the polygonal boundary loss
    assert area.sum() == pytest.approx(annulus, rel=1e-3)


def test_triangle_order_matches_ring_helpers():
    mesh = build_mesh(MeshConfig(N=8, M=3, ratio=1.5))
    tris, outward = mesh.triangles()
    a, b, c = mesh.outward_triangles(1)
    first = mesh.z[tris[0, :, 0] - 1, tris[0, :, 1]]
    np.testing.assert_allclose(first, [a[0], b[0], c[0]])
    a, b, c = mesh.inward_triangles(1)
    second = mesh.z[tris[1, :, 0] - 1, tris[1, :, 1]]
    np.testing.assert_allclose(second, [a[0], b[0], c[0]])
    assert outward[0] and not outward[1]


def test_locate():
    mesh = build_mesh(MeshConfig.from_kappa(32, 0.3, M=10))
    rng = np.random.default_rng(1)
    r = np.sqrt(rng.uniform(mesh.radii[0] ** 2, 1, 500))
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, 500))
    j, k, outward, score = mesh.locate(z)
    inside_polygon = r < np.cos(np.pi / 32) * 0.999
    assert np.all(score[inside_polygon] >= -1e-12)
    # recomputed containment for a few points
    for i in np.flatnonzero(inside_polygon)[:20]:
        a, b, c = mesh._tri_vertices(j[i], k[i], outward[i])
        assert signed_area(a, b, z[i]) <= 1e-15
        assert signed_area(b, c, z[i]) <= 1e-15
        assert signed_area(c, a, z[i]) <= 1e-15


def test_fuzz_skew_only_below_one_third():
    from qcdisk.runs import fuzz_nonskew
    assert fuzz_nonskew(2000, variant="sharp")["skewed"] == 0
    r = fuzz_nonskew(2000, variant="printed")
    assert r["skewed"] == 0 or r["max_kappa_skewed"] < 1 / 3
