"""Reference runs with known answers, shared by the CLI, demos and tests.

Each runner solves one configuration and returns a flat dict of error
measures, so results can be printed, written to JSON or asserted on.
"""
import time

import numpy as np

from .beltrami import (
    constant_mu,
    daripa_mu,
    exact_radial_map,
    exact_sectorial_map,
    radial_mu,
    sector_angle,
    sectorial_mu,
)
from .elliptic import seed_map
from .affine import interpolate_two_points, is_skewed
from .mesh import MeshConfig, max_ratio_bound
from .solver import Retention, SolverConfig, exterior_map, per_triangle_beltrami, solve


def _wrap(a):
    return np.angle(np.exp(1j * a))


def constant_oracle(c):
    """Exact ``c``-conformal self-map of the disk with ``f(0)=0``, ``f(1)=1``."""
    g = seed_map(c, 1.0)
    g1 = complex(g(np.array([1.0 + 0j]))[0])
    rot = abs(g1) / g1

    def f(z):
        return g(np.asarray(z, dtype=complex)) * rot

    return f


def oracle_for(field):
    """Exact map for the fields that have one, else None."""
    name = getattr(field, "name", "")
    if name == "sectorial":
        return exact_sectorial_map
    if name == "radial:default":
        return exact_radial_map
    if name.startswith("constant:"):
        c = complex(field(0j))
        return (lambda z: np.asarray(z, dtype=complex)) if c == 0 else constant_oracle(c)
    return None


def oracle_errors(result, field):
    """Max ``|w - f(z)|`` over retained vertices for fields with a closed form."""
    f = oracle_for(field)
    if f is None:
        return {}
    m = result.retained
    err = float(np.max(np.abs(result.images[m] - f(result.mesh.z[m]))))
    key = field.name.split(":")[0]
    if key == "constant" and complex(field(0j)) == 0:
        key = "identity"
    return {key: err}


def _config(field, N, M, variant="sharp", retention=None, **kw):
    mesh = MeshConfig.from_kappa(N, field.sup_bound, M=M, variant=variant)
    return SolverConfig(mesh, retention=retention or Retention.full(), bound_variant=variant, **kw)


def _timed(cfg, field):
    t = time.perf_counter()
    result = solve(cfg, field)
    return result, time.perf_counter() - t


def run_identity(N=64, M=32, **kw):
    field = constant_mu(0)
    result, dt = _timed(_config(field, N, M, **kw), field)
    err = float(np.max(np.abs(result.images - result.mesh.z)))
    return {"name": "identity", "N": N, "M": M, "max_displacement": err,
            "orientation_violations": result.diagnostics["orientation_violations"], "seconds": dt}


def run_constant(c=0.4, N=128, M=64, **kw):
    field = constant_mu(c)
    result, dt = _timed(_config(field, N, M, **kw), field)
    tb = per_triangle_beltrami(result)
    f = constant_oracle(c)
    return {
        "name": "constant",
        "mu": c,
        "N": N,
        "M": M,
        "sup_beltrami_error": float(np.max(np.abs(tb.mu - c))),
        "max_vertex_error": float(np.max(np.abs(result.images - f(result.mesh.z)))),
        "max_boundary_error": float(np.max(np.abs(result.boundary_images - f(result.mesh.z[-1])))),
        "orientation_violations": result.diagnostics["orientation_violations"],
        "seconds": dt,
    }


def run_sectorial(N=128, M=256, **kw):
    field = sectorial_mu()
    cfg = _config(field, N, M, retention=Retention.boundary_only(), **kw)
    result, dt = _timed(cfg, field)
    z, w = result.mesh.z[-1], result.boundary_images
    err = np.abs(_wrap(np.angle(w) - sector_angle(np.angle(z))))
    return {"name": "sectorial", "N": N, "M": M, "max_arg_error": float(err.max()),
            "max_boundary_error": float(np.max(np.abs(w - exact_sectorial_map(z)))), "seconds": dt}


def run_radial(N=128, M=256, **kw):
    field = radial_mu()
    cfg = _config(field, N, M, retention=Retention.boundary_only(positive_real_ray=True), **kw)
    result, dt = _timed(cfg, field)
    z, w = result.mesh.z[result.retained], result.images[result.retained]
    ray = np.abs(np.angle(z)) < 1e-12
    err = np.abs(w[ray] - exact_radial_map(z[ray]))
    return {"name": "radial", "N": N, "M": M, "ray_vertices": int(ray.sum()),
            "max_ray_error": float(err.max()), "seconds": dt}


def boundary_distance(coarse, fine):
    """Sup distance between two boundary results at the coarse vertices.

    Every coarse boundary vertex must also be a fine boundary vertex.
    """
    zc, zf = coarse.mesh.z[-1], fine.mesh.z[-1]
    idx = np.argmin(np.abs(zc[:, None] - zf[None, :]), axis=1)
    if np.max(np.abs(zf[idx] - zc)) > 1e-12:
        raise ValueError("coarse boundary vertices are not fine boundary vertices")
    return float(np.max(np.abs(coarse.boundary_images - fine.boundary_images[idx])))


def run_daripa(which=1, coarse=(64, 64), fine=(256, 256), **kw):
    """Boundary images of ``daripa:which`` at two resolutions ``(N, M)``."""
    field = daripa_mu(which)
    out = {"name": f"daripa:{which}", "coarse": list(coarse), "fine": list(fine)}
    res = []
    t = time.perf_counter()
    for N, M in (coarse, fine):
        res.append(solve(_config(field, N, M, retention=Retention.boundary_only(), **kw), field))
    out["boundary_distance"] = boundary_distance(*res)
    out["seconds"] = time.perf_counter() - t
    out["results"] = res
    return out


def exterior_check(result, alpha=0.6):
    """Errors of the exterior composition: image of 1 and ellipse equation."""
    h1 = complex(exterior_map(np.array([1.0 + 0j]), alpha)[0])
    t = np.linspace(0, 2 * np.pi, 257)[:-1]
    e = exterior_map(np.exp(1j * t), alpha)
    ellipse = np.abs(e.real**2 + (alpha * e.imag) ** 2 - 1)
    w = exterior_map(result.boundary_images, alpha)
    return {
        "fixes_one": abs(h1 - 1),
        "ellipse_residual": float(ellipse.max()),
        "boundary_residual": float(np.max(np.abs(w.real**2 + (alpha * w.imag) ** 2 - 1))),
    }


def fuzz_nonskew(n=10_000, variant="printed", margin=0.01, seed=0, Ns=(8, 16, 32, 64, 128, 256, 512)):
    """Count skewed step-1 triangles over random admissible instances.

    Each instance draws ``N``, ``kappa`` in ``(0, 0.9)``, a ratio uniform in
    ``(1, 1 + (1 - margin) * (bound - 1))`` (capped at 4 where the bound is
    huge), a ring radius and a ``mu`` uniform in the disk ``|mu| <= kappa``.
    Draws whose bound does not exceed 1 admit no mesh and are redrawn.  The
    inner ring is its own image, as after normalization.
    """
    rng = np.random.default_rng(seed)
    N = np.empty(0, dtype=int)
    kappa = bound = np.empty(0)
    while len(N) < n:
        Nd = rng.choice(Ns, n)
        kd = rng.uniform(1e-3, 0.9, n)
        bd = np.array([max_ratio_bound(int(a), b, variant) for a, b in zip(Nd, kd)])
        ok = bd > 1
        N, kappa, bound = (np.concatenate([x, y[ok]]) for x, y in ((N, Nd), (kappa, kd), (bound, bd)))
    N, kappa, bound = N[:n], kappa[:n], bound[:n]
    top = 1 + (1 - margin) * (np.minimum(bound, 4.0) - 1)
    ratio = 1 + rng.uniform(0, 1, n) * (top - 1)
    r = rng.uniform(0.01, 1, n)
    mu = kappa * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    k = rng.integers(0, N)
    a = r * np.exp(2j * np.pi * k / N)
    b = r * np.exp(2j * np.pi * (k + 1) / N)
    c = ratio * r * np.exp(2j * np.pi * (k + 0.5) / N)
    apex = interpolate_two_points(mu, a, b, a, b)(c)
    skewed = is_skewed(a, b, apex)
    return {"instances": int(n), "skewed": int(np.count_nonzero(skewed)), "variant": variant,
            "max_kappa_skewed": float(kappa[skewed].max()) if skewed.any() else None}


EXAMPLES = {
    "identity": run_identity,
    "constant": run_constant,
    "sectorial": run_sectorial,
    "radial": run_radial,
    "daripa": run_daripa,
}
