"""The disk algorithm: a piecewise-linear solution of the Beltrami equation.

Given ``mu`` on the unit disk and a ring mesh (see :mod:`qcdisk.mesh`),
the images ``w[j, k]`` of the mesh vertices are built ring by ring:

* seed: ring 1 is mapped by the exact solution for the constant
  coefficient ``mu0`` on the central hole (:func:`qcdisk.elliptic.seed_map`);
* step 1: each vertex of ring ``j+1`` is placed by the ``mu_k``-conformal
  affine map fixed by the two ring-``j`` vertices below it;
* step 2: the resulting polygon is mapped conformally onto the disk of
  radius ``r_{j+1}`` with a geodesic zipper fixing 0, then rotated so the
  designated vertex ``k = -[(j+1)/2]`` is positive real;
* step 3: the same conformal map is applied to every retained image of
  the inner rings.

The collection ``w[j, k]`` defines a piecewise-linear map of the meshed
annulus; :class:`PiecewiseLinearResult` evaluates it and reports
diagnostics.
"""
from dataclasses import dataclass, field
from functools import cached_property
import json
import math
import time
import warnings
from typing import NamedTuple

import numpy as np

from .affine import (
    DegenerateDataError,
    affine_from_triangles,
    interpolate_two_points,
    is_skewed,
    signed_area,
    triangle_beltrami,
)
from .beltrami import triangle_average
from .conformal import (
    ZipperGeometryError,
    geodesic_zipper_build,
    rotate_vertex_positive_real,
    scale_to_radius,
)
from .elliptic import seed_map
from .mesh import MeshConfig, RingMesh, build_mesh, max_ratio_bound

NORMALIZATIONS = ("per_ring", "final_only")
APPLICABILITY_MODES = ("error", "warn")
ZIPPER_SUBDIVISIONS = ("polar", "linear", "four_point")
HOLE_RULES = ("origin", "mean")


class GeometryError(RuntimeError):
    """The algorithm could not continue; ``ring`` and ``stage`` give the context."""

    def __init__(self, message, ring=None, stage=None, report=None):
        super().__init__(message)
        self.ring = ring
        self.stage = stage
        self.report = report


class ApplicabilityError(GeometryError):
    """Ring extension produced skewed triangles or a non-simple polygon."""


class RetentionError(LookupError):
    """The requested vertex images were not retained."""


class DomainError(ValueError):
    """Point outside the closed unit disk."""


@dataclass(frozen=True)
class Retention:
    """Which vertex images are carried through step 3.

    ``kind`` is ``"full"``, ``"submesh"`` (``Mprime`` evenly spaced rings
    ending at ring M, ``Nprime`` evenly spaced rays) or ``"boundary"``
    (only ring M).  ``positive_real_ray`` additionally keeps the vertices
    on the positive real axis (``k = -j/2`` for even ``j``).
    """

    kind: str = "full"
    Mprime: int = None
    Nprime: int = None
    positive_real_ray: bool = False

    def __post_init__(self):
        if self.kind not in ("full", "submesh", "boundary"):
            raise ValueError(f"unknown retention {self.kind!r}")
        if self.kind == "submesh" and (self.Mprime is None or self.Nprime is None):
            raise ValueError("submesh retention needs Mprime and Nprime")

    @classmethod
    def full(cls):
        return cls("full")

    @classmethod
    def submesh(cls, Mprime, Nprime, positive_real_ray=False):
        return cls("submesh", Mprime, Nprime, positive_real_ray)

    @classmethod
    def boundary_only(cls, positive_real_ray=False):
        return cls("boundary", positive_real_ray=positive_real_ray)

    def validate(self, M, N):
        if self.kind == "submesh":
            if not (1 <= self.Mprime <= M and 1 <= self.Nprime <= N and N % self.Nprime == 0):
                raise ValueError("submesh needs Mprime <= M, Nprime <= N and Nprime | N")

    def rings(self, M):
        """1-based retained ring indices (every vertex or a subsample)."""
        if self.kind == "full":
            return np.arange(1, M + 1)
        if self.kind == "boundary":
            return np.array([M])
        return np.unique(np.round(np.arange(1, self.Mprime + 1) * M / self.Mprime).astype(int))

    def mask(self, M, N):
        """Boolean ``(M, N)`` array of retained vertices; ring M is always kept."""
        self.validate(M, N)
        mask = np.zeros((M, N), dtype=bool)
        if self.kind == "full":
            mask[:] = True
        elif self.kind == "submesh":
            # columns follow rays: vertex (j, c - [j/2]) sits at angle c (+ half a step)
            js = self.rings(M)
            cols = np.arange(0, N, N // self.Nprime)
            mask[js[:, None] - 1, (cols[None, :] - js[:, None] // 2) % N] = True
        mask[M - 1] = True
        if self.positive_real_ray:
            j = np.arange(2, M + 1, 2)
            mask[j - 1, (-(j // 2)) % N] = True
        return mask

    def to_dict(self):
        return {k: v for k, v in vars(self).items() if v is not None}


@dataclass(frozen=True)
class SolverConfig:
    """Mesh and algorithm options.

    Parameters
    ----------
    mesh : MeshConfig
    retention : Retention
    quadrature_order : {1, 3}
        Rule for the triangle averages of ``mu`` (see
        :func:`qcdisk.beltrami.triangle_average`).
    normalization : {"per_ring", "final_only"}
        Rotate each new ring so its designated vertex is positive real, or
        only rotate once at the end.
    applicability : {"error", "warn"}
        Abort on skewed step-1 triangles, or count them and continue.
    hole_rule : {"origin", "mean"}
        ``mu0`` for the seed: ``mu(0)``, or the mean of the triangle
        averages over the fan of the central hole.
    bound_variant : str
        Ratio bound checked before starting (see
        :func:`qcdisk.mesh.max_ratio_bound`).
    keep_maps : bool
        Keep every conformal correction so points of the central hole can
        be evaluated.
    zipper_refine : int
        Nodes per polygon edge in the conformal correction.  With 1 a
        sawtooth error mode grows from ring to ring once the mesh
        triangles are tall; one extra node per edge damps it.
    zipper_subdivision : {"polar", "linear", "four_point"}
        Placement of the extra nodes (see
        :func:`qcdisk.conformal.geodesic_zipper_build`).  ``polar`` follows
        the near-circular ring polygons without the chord bias of
        ``linear`` or the overshoot of ``four_point`` at jumps of mu.
    """

    mesh: MeshConfig
    retention: Retention = field(default_factory=Retention.full)
    quadrature_order: int = 1
    normalization: str = "per_ring"
    applicability: str = "error"
    hole_rule: str = "origin"
    bound_variant: str = "sharp"
    keep_maps: bool = True
    zipper_refine: int = 2
    zipper_subdivision: str = "polar"

    def __post_init__(self):
        if self.quadrature_order not in (1, 3):
            raise ValueError("quadrature_order must be 1 or 3")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        if self.applicability not in APPLICABILITY_MODES:
            raise ValueError(f"applicability must be one of {APPLICABILITY_MODES}")
        if self.hole_rule not in HOLE_RULES:
            raise ValueError(f"hole_rule must be one of {HOLE_RULES}")
        if self.zipper_subdivision not in ZIPPER_SUBDIVISIONS:
            raise ValueError(f"zipper_subdivision must be one of {ZIPPER_SUBDIVISIONS}")
        if int(self.zipper_refine) < 1:
            raise ValueError("zipper_refine must be >= 1")
        self.retention.validate(self.mesh.M, self.mesh.N)

    def to_dict(self):
        m = self.mesh
        return {
            "mesh": {"N": m.N, "M": m.M, "ratio": m.ratio, "kappa": m.kappa},
            "retention": self.retention.to_dict(),
            "quadrature_order": self.quadrature_order,
            "normalization": self.normalization,
            "applicability": self.applicability,
            "hole_rule": self.hole_rule,
            "bound_variant": self.bound_variant,
            "zipper_refine": self.zipper_refine,
            "zipper_subdivision": self.zipper_subdivision,
        }


# -- step 1 -------------------------------------------------------------------


def ring_extension(inner_z, outer_z, inner_w, mu_k):
    """Images of the outer ring vertices under the two-point interpolants.

    ``w~[k] = B[mu_k; z[k], z[k+1]; w[k], w[k+1]](z'[k])``, indices mod N,
    where ``B`` is the ``mu_k``-conformal affine map fixed by the two inner
    vertices.
    """
    inner_z, outer_z, inner_w = (np.asarray(a, dtype=complex) for a in (inner_z, outer_z, inner_w))
    B = interpolate_two_points(
        np.asarray(mu_k, dtype=complex), inner_z, np.roll(inner_z, -1), inner_w, np.roll(inner_w, -1)
    )
    return B(outer_z)


class ApplicabilityReport(NamedTuple):
    skewed: np.ndarray
    simple: bool

    @property
    def skew_count(self):
        return int(np.count_nonzero(self.skewed))

    @property
    def applicable(self):
        return self.simple and self.skew_count == 0

    def to_dict(self):
        return {
            "skewed": np.flatnonzero(self.skewed).tolist(),
            "skew_count": self.skew_count,
            "simple": self.simple,
            "applicable": self.applicable,
        }


def _segments_cross(p, q):
    """Pairwise proper-or-touching intersection of segments ``p[i]`` and ``q[i]``."""
    a0, a1 = p
    b0, b1 = q

    def orient(u, v, w):
        return np.sign(np.imag(np.conj(v - u) * (w - u)))

    d1, d2 = orient(b0, b1, a0), orient(b0, b1, a1)
    d3, d4 = orient(a0, a1, b0), orient(a0, a1, b1)
    return (d1 * d2 <= 0) & (d3 * d4 <= 0)


def polygon_is_simple(w):
    """Whether the closed polygon ``w`` has no self-intersections.

    Polygons whose vertex arguments increase monotonically around 0 and
    wind once are accepted immediately; otherwise every pair of
    non-adjacent edges is tested.
    """
    w = np.asarray(w, dtype=complex)
    n = len(w)
    nxt = np.roll(w, -1)
    if np.all(w != 0):
        steps = np.angle(nxt / w)
        if np.all(steps > 0) and abs(steps.sum() - 2 * np.pi) < 1e-9:
            return True
    i, k = np.triu_indices(n, 2)
    keep = ~((i == 0) & (k == n - 1))
    i, k = i[keep], k[keep]
    return not np.any(_segments_cross((w[i], nxt[i]), (w[k], nxt[k])))


def check_applicability(inner_w, outer_w_tilde):
    """Skew flags of the step-1 triangles and simplicity of the new polygon.

    Triangle ``k`` is ``(w[k], w[k+1], w~[k])``.
    """
    inner_w = np.asarray(inner_w, dtype=complex)
    outer = np.asarray(outer_w_tilde, dtype=complex)
    skewed = np.atleast_1d(is_skewed(inner_w, np.roll(inner_w, -1), outer))
    return ApplicabilityReport(skewed=skewed, simple=polygon_is_simple(outer))


# -- result -------------------------------------------------------------------


class TriangleBeltrami(NamedTuple):
    indices: np.ndarray  # (T, 3, 2) 1-based ring and vertex indices
    outward: np.ndarray  # (T,) bool
    mu: np.ndarray  # (T,) complex
    centroid: np.ndarray  # (T,) complex, domain side


@dataclass(frozen=True, eq=False)
class PiecewiseLinearResult:
    """Images of the mesh vertices and the piecewise-linear map they define.

    Attributes
    ----------
    images : ndarray, shape (M, N)
        ``w[j-1, k]``; NaN where not retained.
    retained : ndarray of bool, shape (M, N)
    step1_mu : ndarray, shape (M-1, N)
        Coefficient used for outward triangle ``k`` between rings ``j`` and
        ``j+1`` (row ``j-1``).
    diagnostics : dict
    """

    config: SolverConfig
    mesh: RingMesh
    images: np.ndarray
    retained: np.ndarray
    step1_mu: np.ndarray
    mu0: complex
    diagnostics: dict
    maps: tuple = ()
    seed_factor: complex = 1 + 0j
    final_factor: complex = 1 + 0j
    field_name: str = ""

    @property
    def boundary_images(self):
        return self.images[-1]

    def ring_images(self, j):
        """Images of ring ``j`` (1-based); raises if any vertex is missing."""
        if not self.retained[j - 1].all():
            raise RetentionError(f"ring {j} was not fully retained")
        return self.images[j - 1]

    def __call__(self, z):
        return evaluate(self, z)

    @cached_property
    def _triangles(self):
        return self.mesh.triangles()

    def triangle_maps(self):
        """Affine maps of all mesh triangles (a batched GeneralAffine)."""
        tri, _ = self._triangles
        src, dst = self._vertex_triples(tri)
        return affine_from_triangles(src, dst)

    def _vertex_triples(self, tri):
        rows, cols = tri[..., 0] - 1, tri[..., 1]
        if not self.retained[rows, cols].all():
            raise RetentionError("triangle vertices were not retained (use full retention)")
        z, w = self.mesh.z[rows, cols], self.images[rows, cols]
        return tuple(z.T), tuple(w.T)


def _orientation_counts(mesh, images, retained):
    tri, _ = mesh.triangles()
    rows, cols = tri[..., 0] - 1, tri[..., 1]
    ok = retained[rows, cols].all(axis=1)
    w = images[rows[ok], cols[ok]]
    area = signed_area(w[:, 0], w[:, 1], w[:, 2])
    # the mesh lists triangles clockwise, so positive orientation of the
    # map means the image keeps the sign of the source area
    src = mesh.z[rows[ok], cols[ok]]
    src_area = signed_area(src[:, 0], src[:, 1], src[:, 2])
    bad = np.sign(area) != np.sign(src_area)
    return int(np.count_nonzero(bad)), int(np.count_nonzero(ok))


# -- solve --------------------------------------------------------------------


def _hole_mu(field, mesh, config):
    if config.hole_rule == "origin":
        return complex(field(0j))
    ring = mesh.ring(1)
    tri = (np.zeros_like(ring), ring, np.roll(ring, -1))
    return complex(np.mean(triangle_average(field, tri, config.quadrature_order)))


def _unit(w):
    return w / abs(w)


def solve(config, field, state_dump=None, progress=None):
    """Run the disk algorithm.

    Parameters
    ----------
    config : SolverConfig
    field : BeltramiField
    state_dump : str or path, optional
        Write one JSON object per ring (JSON lines) with ``j``, ``r``, the
        step-1 polygon, the corrected polygon and the skew report.
    progress : callable, optional
        Called as ``progress(j, M)`` after each ring.

    Raises
    ------
    ApplicabilityError
        The ratio violates the bound for ``field.sup_bound``, or step 1
        produced skewed triangles (only with ``applicability="error"``), or
        a non-simple polygon.
    GeometryError
        A conformal correction failed.
    """
    mcfg = config.mesh
    mesh = build_mesh(mcfg)
    M, N = mesh.M, mesh.N
    bound = max_ratio_bound(N, field.sup_bound, config.bound_variant)
    if not mcfg.ratio < bound:
        msg = f"ratio {mcfg.ratio} violates the {config.bound_variant} bound {bound} for kappa={field.sup_bound}"
        if config.applicability == "error":
            raise ApplicabilityError(msg, ring=0, stage="precheck")
        warnings.warn(msg)

    retained = config.retention.mask(M, N)
    images = np.full((M, N), np.nan + 0j)
    step1_mu = np.zeros((max(M - 1, 0), N), dtype=complex)
    per_ring = config.normalization == "per_ring"
    z = mesh.z
    radii = mesh.radii
    timings = {"step1": 0.0, "step2": 0.0, "step3": 0.0}
    diag = {
        "skew_count": 0,
        "nonsimple_rings": 0,
        "skew_rings": [],
        "max_modulus_drift": [],
        "anchor_arg": [],
    }
    dump = open(state_dump, "w") if state_dump is not None else None
    try:
        mu0 = _hole_mu(field, mesh, config)
        w = seed_map(mu0, radii[0])(z[0])
        seed_factor = 1 + 0j
        if per_ring:
            seed_factor = 1 / _unit(w[mesh.anchor_index(1)])
            w = w * seed_factor
        images[0] = np.where(retained[0], w, np.nan)
        diag["anchor_arg"].append(float(np.angle(w[mesh.anchor_index(1)])))
        diag["max_modulus_drift"].append(float(np.max(np.abs(w)) / radii[0] - 1))
        maps = []

        for j in range(1, M):
            t0 = time.perf_counter()
            inner_z, outer_z = z[j - 1], z[j]
            tri = (inner_z, np.roll(inner_z, -1), outer_z)
            mu_k = triangle_average(field, tri, config.quadrature_order)
            step1_mu[j - 1] = mu_k
            try:
                w_tilde = ring_extension(inner_z, outer_z, w, mu_k)
            except DegenerateDataError as exc:
                raise GeometryError(f"ring {j}: {exc}", ring=j, stage="ring_extension") from exc
            report = check_applicability(w, w_tilde)
            if report.skew_count:
                diag["skew_count"] += report.skew_count
                diag["skew_rings"].append(j)
            if not report.simple:
                diag["nonsimple_rings"] += 1
            if not report.applicable:
                msg = f"ring extension {j} -> {j + 1}: {report.skew_count} skewed, simple={report.simple}"
                if config.applicability == "error" or not report.simple:
                    raise ApplicabilityError(msg, ring=j, stage="ring_extension", report=report.to_dict())
                warnings.warn(msg)
            t1 = time.perf_counter()

            try:
                zm = geodesic_zipper_build(
                    w_tilde, anchor=0j, refine=config.zipper_refine, subdivision=config.zipper_subdivision
                )
            except ZipperGeometryError as exc:
                raise GeometryError(
                    f"conformal correction of ring {j + 1} failed at stage {exc.index}: {exc}",
                    ring=j + 1, stage=exc.index,
                ) from exc
            zm = scale_to_radius(zm, radii[j])
            if per_ring:
                zm = rotate_vertex_positive_real(zm, mesh.anchor_index(j + 1))
            w = zm.corner_images.copy()
            t2 = time.perf_counter()

            inner = retained[:j]
            if inner.any():
                images[:j][inner] = zm(images[:j][inner])
            images[j] = np.where(retained[j], w, np.nan)
            t3 = time.perf_counter()

            timings["step1"] += t1 - t0
            timings["step2"] += t2 - t1
            timings["step3"] += t3 - t2
            drift = np.abs(w).max() / radii[j]
            if inner.any():
                drift = max(drift, np.max(np.abs(images[:j][inner]) / np.broadcast_to(radii[:j, None], (j, N))[inner]))
            diag["max_modulus_drift"].append(float(drift - 1))
            diag["anchor_arg"].append(float(np.angle(w[mesh.anchor_index(j + 1)])))
            if config.keep_maps:
                maps.append(zm)
            if dump is not None:
                dump.write(json.dumps({
                    "j": j + 1,
                    "r": float(radii[j]),
                    "w_tilde": [[v.real, v.imag] for v in w_tilde.tolist()],
                    "w": [[v.real, v.imag] for v in w.tolist()],
                    "skew_report": report.to_dict(),
                }) + "\n")
            if progress is not None:
                progress(j + 1, M)
    finally:
        if dump is not None:
            dump.close()

    # f(1) = 1: rotate the boundary vertex nearest 1 onto the positive axis
    k1 = int(np.argmin(np.abs(z[-1] - 1)))
    final_factor = 1 / _unit(images[-1, k1])
    if final_factor != 1:
        images *= final_factor
    n_bad, n_checked = _orientation_counts(mesh, images, retained)
    diag["orientation_violations"] = n_bad
    diag["triangles_checked"] = n_checked
    diag["timings"] = timings
    for arr in (images, retained, step1_mu):
        arr.setflags(write=False)
    return PiecewiseLinearResult(
        config=config,
        mesh=mesh,
        images=images,
        retained=retained,
        step1_mu=step1_mu,
        mu0=mu0,
        diagnostics=diag,
        maps=tuple(maps),
        seed_factor=seed_factor,
        final_factor=final_factor,
        field_name=getattr(field, "name", ""),
    )


# -- evaluation ---------------------------------------------------------------

_INSIDE_TOL = 1e-12


def _hole_eval(result, z):
    if len(result.maps) != result.mesh.M - 1:
        raise RetentionError("conformal corrections were not kept (keep_maps=False)")
    w = seed_map(result.mu0, result.mesh.radii[0])(z) * result.seed_factor
    for zm in result.maps:
        w = zm(w)
    return w * result.final_factor


def evaluate(result, z):
    """Evaluate the piecewise-linear map at ``z`` (scalar or array).

    Points in a mesh triangle use that triangle's affine map.  Points of
    the central hole go through the seed map and every stored conformal
    correction.  Points between the outer polygon and the unit circle are
    extrapolated with the nearest triangle's map.

    Raises
    ------
    DomainError
        ``|z| > 1``.
    RetentionError
        A needed triangle vertex was not retained.
    """
    z = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(z).ravel()
    if np.any(np.abs(flat) > 1 + 1e-12):
        raise DomainError("evaluation points must satisfy |z| <= 1")
    mesh = result.mesh
    out = np.empty_like(flat)
    j, k, outward, score = mesh.locate(flat)
    hole = (score < -_INSIDE_TOL) & (np.abs(flat) < mesh.radii[0])
    if np.any(hole):
        out[hole] = _hole_eval(result, flat[hole])
    tri = ~hole
    if np.any(tri):
        jj, kk, oo = j[tri], k[tri], outward[tri]
        kn = (kk + 1) % mesh.N
        # vertex rows / columns of the located triangles
        r0 = jj - 1
        r1 = np.where(oo, jj - 1, jj)
        r2 = jj
        c0 = np.where(oo, kk, kn)
        c1 = kn
        c2 = kk
        rows = np.stack([r0, r1, r2], axis=1)
        cols = np.stack([c0, c1, c2], axis=1)
        if not result.retained[rows, cols].all():
            raise RetentionError("triangle vertices were not retained (use full retention)")
        zs, ws = mesh.z[rows, cols], result.images[rows, cols]
        f = affine_from_triangles(tuple(zs.T), tuple(ws.T))
        out[tri] = f(flat[tri])
    out = out.reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def per_triangle_beltrami(result):
    """Beltrami coefficient of the affine map on every mesh triangle.

    Requires full retention.  Values with modulus >= 1 mark triangles whose
    image is flipped.
    """
    tri, outward = result._triangles
    src, dst = result._vertex_triples(tri)
    mu = triangle_beltrami(*src, *dst)
    return TriangleBeltrami(tri, outward, np.asarray(mu), (src[0] + src[1] + src[2]) / 3)


# -- exterior map -------------------------------------------------------------


def exterior_map(z, alpha):
    """``h(z) = ((1+alpha) - (1-alpha) z**2) / (2 alpha z)``.

    Sends the punctured unit disk conformally onto the exterior of the
    ellipse ``x**2 + (alpha y)**2 = 1`` (aspect ratio ``alpha``), with
    ``h(exp(it)) = cos t - i sin(t) / alpha``; fixes 1.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z[~np.isnan(z)]) < 1e-9):
        raise ValueError("h has a pole at 0")
    with np.errstate(invalid="ignore"):
        out = ((1 + alpha) - (1 - alpha) * z * z) / (2 * alpha * z)
    return out[()] if out.ndim == 0 else out


def exterior_compose(result, alpha):
    """Apply :func:`exterior_map` to all retained images (NaN elsewhere)."""
    return exterior_map(result.images, alpha)
