"""Geodesic zipper conformal maps from polygons onto the unit disk.

The map for vertices ``v[0], ..., v[N-1]`` (counterclockwise) is the
composition

1. ``z -> i * sqrt((z - v1) / (z - v0))``: the complement of the segment
   ``[v0, v1]`` onto the upper half-plane ``H``, ``v1 -> 0``, ``v0 -> oo``;
2. for ``k = 2, ..., N-1`` a geodesic slit map ``z -> sqrt(m_c(z)**2 + h**2)``
   that opens the hyperbolic geodesic from 0 to the current image of
   ``v[k]`` onto the real axis (``m_c(z) = z / (1 - z/c)`` straightens the
   geodesic to the segment ``[0, ih]``);
3. ``z -> m_c(z)**2`` with ``c`` the image of ``v0``, closing the last edge;
4. a Moebius map from the half-plane containing the image of the anchor
   onto the disk, sending the anchor to 0;
5. a disk automorphism and a scale factor, used for normalization.

Construction costs O(N**2) and evaluation O(N) per point; the inner loops
are compiled with numba.
"""
from dataclasses import dataclass, field, replace
import math
import os
import warnings

import numba
import numpy as np

INF = math.inf
_DEGENERATE = 1e-12


class ZipperGeometryError(ValueError):
    """The polygon could not be unzipped (not simple or badly oriented)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


# -- elementary maps ---------------------------------------------------------


@dataclass(frozen=True)
class InitialRoot:
    z0: complex
    z1: complex
    tag = "initial_root"


@dataclass(frozen=True)
class GeodesicSlit:
    c: float
    h: float
    tag = "geodesic_slit"


@dataclass(frozen=True)
class FinalClose:
    c: float
    tag = "final_close"


@dataclass(frozen=True)
class HalfPlaneToDisk:
    anchor: complex
    tag = "half_plane_to_disk"


@dataclass(frozen=True)
class DiskAutomorphism:
    a: complex
    theta: float
    tag = "disk_automorphism"


@dataclass(frozen=True)
class Scale:
    r: float
    tag = "scale"


def geodesic_parameters(a):
    """Parameters ``(c, h)`` of the slit map for the geodesic from 0 to ``a``.

    The circle through 0 and ``a`` orthogonal to the real axis meets it again
    at ``c = |a|**2 / Re(a)``; ``m_c`` sends that circle to the imaginary axis
    and ``a`` to ``i * h`` with ``h = |a|**2 / Im(a)``.
    """
    a = complex(a)
    if not a.imag > 0:
        raise ValueError(f"need Im(a) > 0, got {a}")
    r2 = a.real * a.real + a.imag * a.imag
    c = r2 / a.real if a.real != 0 else INF
    return c, r2 / a.imag


def mobius_m(z, c):
    """``m_c(z) = z / (1 - z/c)``; identity for ``c = inf``."""
    if math.isinf(c):
        return z
    return z / (1 - z / c)


# -- compiled kernels ---------------------------------------------------------


@numba.njit(cache=True, error_model="numpy")
def _slit(w, c, h):
    if h == 0.0:
        return w
    if not math.isinf(c):
        w = w / (1.0 - w / c)
    s = np.sqrt(w * w + h * h)
    # branch with values in H; the right quadrant maps into itself and the
    # slit base (a processed vertex) goes to the interior side, -h
    if w.real < 0.0 or (w.real == 0.0 and w.imag == 0.0):
        s = -s
    return s


@numba.njit(cache=True, error_model="numpy")
def _apply_one(z, z0, z1, cs, hs, close_c, anchor, auto_a, post):
    if z == z0:
        return complex(np.nan, np.nan)
    w = 1j * np.sqrt((z - z1) / (z - z0))
    for s in range(cs.shape[0]):
        w = _slit(w, cs[s], hs[s])
    if not math.isinf(close_c):
        w = w / (1.0 - w / close_c)
    w = w * w
    w = (w - anchor) / (w - np.conj(anchor))
    w = (w - auto_a) / (1.0 - np.conj(auto_a) * w)
    return post * w


@numba.njit(cache=True, error_model="numpy")
def _apply_kernel(z, z0, z1, cs, hs, close_c, anchor, auto_a, post):
    out = np.empty_like(z)
    for p in range(z.shape[0]):
        out[p] = _apply_one(z[p], z0, z1, cs, hs, close_c, anchor, auto_a, post)
    return out


@numba.njit(cache=True, error_model="numpy", parallel=True)
def _apply_kernel_parallel(z, z0, z1, cs, hs, close_c, anchor, auto_a, post):
    out = np.empty_like(z)
    for p in numba.prange(z.shape[0]):
        out[p] = _apply_one(z[p], z0, z1, cs, hs, close_c, anchor, auto_a, post)
    return out


# below this many points the thread start-up cost dominates
PARALLEL_THRESHOLD = 8192


def set_threads(n=None):
    """Cap the data-parallel width; ``None`` reads ``QCDISK_THREADS`` (0 = all cores)."""
    if n is None:
        n = int(os.environ.get("QCDISK_THREADS", "0") or 0)
    n = numba.config.NUMBA_NUM_THREADS if n <= 0 else min(n, numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(n)
    return n


@numba.njit(cache=True, error_model="numpy")
def _build_kernel(v, anchor):
    """Returns (cs, hs, close_c, images, anchor_image, failed_index)."""
    n = v.shape[0]
    cs = np.full(n - 2, np.inf)
    hs = np.zeros(n - 2)
    z0 = v[0]
    z1 = v[1]
    img = np.empty(n, dtype=np.complex128)
    img[0] = 0.0
    img[1] = 0.0
    for i in range(2, n):
        img[i] = 1j * np.sqrt((v[i] - z1) / (v[i] - z0))
    anc = 1j * np.sqrt((anchor - z1) / (anchor - z0))
    # The interior lies left of v0 -> v1; that side of the segment lands on
    # the negative real axis, where processed vertices stay.
    side = -1.0
    x0_inf = True
    x0 = 0.0
    for k in range(2, n):
        a = img[k]
        if not a.imag > 0.0:
            return cs, hs, np.inf, img, anc, k
        r2 = a.real * a.real + a.imag * a.imag
        if math.sqrt(r2) < 1e-12:
            img[k] = 0.0
            continue
        c = r2 / a.real if a.real != 0.0 else np.inf
        h = r2 / a.imag
        cs[k - 2] = c
        hs[k - 2] = h
        for i in range(1, n):
            if i != k - 1 and i != k:
                img[i] = _slit(img[i], c, h)
        img[k - 1] = side * h
        img[k] = 0.0
        anc = _slit(anc, c, h)
        # image of v0, a point of the real axis or infinity
        if x0_inf:
            if not math.isinf(c):
                x0 = -c
                x0_inf = False
        elif not math.isinf(c):
            if x0 == c:
                x0_inf = True
            else:
                x0 = x0 / (1.0 - x0 / c)
        if not x0_inf:
            x0 = math.sqrt(x0 * x0 + h * h) * (-1.0 if x0 < 0 else 1.0)
    close_c = np.inf if x0_inf else x0
    for i in range(1, n):
        w = img[i]
        if not math.isinf(close_c):
            w = w / (1.0 - w / close_c)
        img[i] = w * w
    if not math.isinf(close_c):
        anc = anc / (1.0 - anc / close_c)
    anc = anc * anc
    return cs, hs, close_c, img, anc, -1


# -- the map ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ZipperMap:
    """Conformal map of a polygon interior onto a disk centred at 0.

    Attributes
    ----------
    vertices : ndarray
        Nodes of the unzipped polygon, counterclockwise: the input corners,
        each followed by ``refine - 1`` points placed along its edge by the
        chosen subdivision rule.
    vertex_images : ndarray
        Cached images of ``vertices``.
    refine : int
        Nodes per input edge.
    """

    vertices: np.ndarray
    slit_c: np.ndarray
    slit_h: np.ndarray
    close_c: float
    half_plane_anchor: complex
    vertex_images: np.ndarray
    auto_a: complex = 0j
    rotation: float = 0.0
    scale: float = 1.0
    _post: complex = field(default=1 + 0j, repr=False)
    refine: int = 1

    @property
    def corners(self):
        return self.vertices[:: self.refine]

    @property
    def corner_images(self):
        """Images of the input polygon's corners."""
        return self.vertex_images[:: self.refine]

    @property
    def stages(self):
        """The composition as a list of elementary maps, first applied first."""
        out = [InitialRoot(complex(self.vertices[0]), complex(self.vertices[1]))]
        out += [GeodesicSlit(float(c), float(h)) for c, h in zip(self.slit_c, self.slit_h) if h > 0]
        out += [
            FinalClose(float(self.close_c)),
            HalfPlaneToDisk(complex(self.half_plane_anchor)),
            DiskAutomorphism(complex(self.auto_a), float(self.rotation)),
        ]
        if self.scale != 1.0:
            out.append(Scale(float(self.scale)))
        return out

    def __call__(self, z):
        return zipper_apply(self, z)

    def to_dict(self):
        def enc(x):
            if isinstance(x, complex):
                return [x.real, x.imag]
            if isinstance(x, float) and math.isinf(x):
                return "inf"
            return x

        return {
            "stages": [
                {"tag": s.tag, **{k: enc(v) for k, v in vars(s).items()}} for s in self.stages
            ],
            "vertex_images": [[w.real, w.imag] for w in self.vertex_images],
        }


def _with_post(zm, rotation=None, scale=None):
    rotation = zm.rotation if rotation is None else rotation
    scale = zm.scale if scale is None else scale
    post = scale * complex(math.cos(rotation), math.sin(rotation))
    images = zm.vertex_images * (post / zm._post)
    return replace(zm, rotation=rotation, scale=scale, _post=post, vertex_images=images)


def _subdivide(v, refine, rule, anchor=0j):
    if rule == "linear":
        t = np.arange(refine) / refine
        return (v[:, None] * (1 - t) + np.roll(v, -1)[:, None] * t).ravel()
    if rule == "four_point":
        levels = refine.bit_length() - 1
        if 1 << levels != refine:
            raise ValueError("four_point subdivision needs refine to be a power of 2")
        for _ in range(levels):
            mid = (9 * (v + np.roll(v, -1)) - np.roll(v, 1) - np.roll(v, -2)) / 16
            v = np.stack([v, mid], axis=1).ravel()
        return v
    if rule == "polar":
        # linear in log(v - anchor): exact on circles about the anchor
        t = np.arange(refine) / refine
        u = v - anchor
        return (anchor + u[:, None] * np.exp(np.log(np.roll(u, -1) / u)[:, None] * t)).ravel()
    raise ValueError(f"unknown subdivision rule {rule!r}")


def geodesic_zipper_build(vertices, anchor=0j, refine=1, subdivision="linear"):
    """Build the zipper map of a counterclockwise simple polygon.

    Parameters
    ----------
    vertices : array_like of complex, shape (N,)
        Polygon vertices in counterclockwise order, ``N >= 4``.
    anchor : complex
        Interior point sent to 0.
    refine : int
        Unzip ``refine`` nodes per edge (the corner and ``refine - 1``
        points along the edge).  The map then follows the straight edges
        more closely between corners, at ``refine**2`` times the build cost.
    subdivision : {"linear", "polar", "four_point"}
        Placement of the extra nodes: on the straight edges; on the
        log-spiral arcs obtained by interpolating ``log(v - anchor)``
        linearly, which is exact for circles about the anchor; or by the
        interpolatory 4-point rule ``(-1, 9, 9, -1) / 16`` (repeated
        ``log2(refine)`` times), which follows a smooth curve through the
        corners but overshoots at kinks.

    Raises
    ------
    ZipperGeometryError
        The polygon is clockwise, or a vertex fell outside the upper
        half-plane during unzipping (the polygon is not simple, or the
        anchor is outside it).
    """
    v = np.ascontiguousarray(vertices, dtype=np.complex128)
    if v.shape[0] < 4:
        raise ValueError("need at least 4 vertices")
    if refine < 1:
        raise ValueError("refine must be >= 1")
    if refine > 1:
        v = np.ascontiguousarray(_subdivide(v, refine, subdivision, complex(anchor)))
    n = v.shape[0]
    area2 = np.sum(np.imag(np.conj(v) * np.roll(v, -1)))
    if not area2 > 0:
        raise ZipperGeometryError("polygon is not counterclockwise")
    cs, hs, close_c, img, anc, failed = _build_kernel(v, complex(anchor))
    if failed >= 0:
        raise ZipperGeometryError(f"polygon could not be unzipped at vertex {failed}", failed)
    n_skipped = int(np.sum(hs[: n - 2] == 0))
    if n_skipped:
        warnings.warn(f"{n_skipped} degenerate zipper stages skipped (duplicate vertices?)")
    if abs(anc.imag) < 1e-14 * max(1.0, abs(anc)):
        raise ZipperGeometryError("anchor lies on the polygon boundary")
    images = (img - anc) / (img - np.conj(anc))
    images[0] = 1.0  # v0 sits at infinity before the last Moebius map
    return ZipperMap(
        vertices=v,
        slit_c=cs,
        slit_h=hs,
        close_c=float(close_c),
        half_plane_anchor=complex(anc),
        vertex_images=images,
        refine=refine,
    )


def zipper_apply(zm, z):
    """Evaluate the zipper map at ``z`` (scalar or array)."""
    z = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(z.ravel())
    kernel = _apply_kernel_parallel if flat.size >= PARALLEL_THRESHOLD else _apply_kernel
    out = kernel(
        flat, zm.vertices[0], zm.vertices[1], zm.slit_c, zm.slit_h,
        zm.close_c, zm.half_plane_anchor, zm.auto_a, zm._post,
    )
    # exact vertices sit on slit endpoints, where the branch is ambiguous
    order = np.argsort(zm.vertices)
    pos = np.searchsorted(zm.vertices[order], flat).clip(0, len(order) - 1)
    hit = zm.vertices[order][pos] == flat
    if np.any(hit):
        out[hit] = zm.vertex_images[order[pos[hit]]]
    out = out.reshape(z.shape)
    return out[()] if out.ndim == 0 else out


def scale_to_radius(zm, r):
    """Post-compose with ``w -> r * w``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    return _with_post(zm, scale=zm.scale * r)


def rotate_vertex_positive_real(zm, vertex_index):
    """Post-compose with the rotation making ``corner_images[vertex_index]`` positive real."""
    w = zm.corner_images[vertex_index]
    if w == 0:
        raise ValueError("vertex image is 0; cannot normalize its argument")
    return _with_post(zm, rotation=zm.rotation - math.atan2(w.imag, w.real))


def rotate(zm, angle):
    """Post-compose with ``w -> exp(i*angle) * w``."""
    return _with_post(zm, rotation=zm.rotation + angle)
