"""Concentric-ring triangular meshes of the unit disk.

Ring ``j = 1..M`` has radius ``r_j`` and vertices

    z[j, k] = r_j * exp(2*pi*i*(k + j/2) / N),   k = 0..N-1,

so each vertex of ring ``j+1`` sits angularly halfway between two
vertices of ring ``j``.  Between rings ``j`` and ``j+1`` there are ``N``
outward triangles ``(z[j,k], z[j,k+1], z[j+1,k])`` and ``N`` inward
triangles ``(z[j,k+1], z[j+1,k+1], z[j+1,k])``.

Arrays are indexed with ``j - 1`` (ring 1 is row 0).
"""
from dataclasses import dataclass, field
import csv
import io
import math

import numpy as np

BOUND_VARIANTS = ("printed", "half_angle", "sharp", "table_compatible")


def max_ratio_bound(N, mu_abs, variant="printed"):
    """Largest admissible ratio ``r_{j+1}/r_j`` for a given ``|mu|``.

    ``cos(t) + (1 - |mu|)**2 / (2 |mu|) * sin(t)``, where the angle is
    ``t = 2*pi/N`` for the ``printed`` form and ``t = pi/N`` (half the
    vertex spacing, which is what the non-skew argument actually uses)
    for ``half_angle``.  ``sharp`` is the exact threshold
    ``cos(pi/N) + (1 - |mu|**2) / (2 |mu|) * sin(pi/N)``: the apex of the
    step-1 image triangle projects onto the base iff ``(beta - cos(pi/N))
    * |Im q| <= sin(pi/N)`` with ``q = (1 + mu) / (1 - mu)``, and
    ``max |Im q| = 2|mu| / (1 - |mu|**2)``.  The ``table_compatible`` form
    ``cos(2 pi/N) + (1 - |mu|)**2 / |mu| * sin(2 pi/N)`` reproduces the
    published table of ratios.

    ``half_angle`` and ``sharp`` guarantee non-skewed triangles for every
    ``|mu|``; ``printed`` admits skewed ones when ``|mu|`` is below about
    1/3.

    Returns ``inf`` for ``mu_abs == 0``.
    """
    if N < 3:
        raise ValueError("need N >= 3")
    if not 0 <= mu_abs < 1:
        raise ValueError(f"|mu| must lie in [0, 1), got {mu_abs}")
    if mu_abs == 0:
        return math.inf
    q = (1 - mu_abs) ** 2 / (2 * mu_abs)
    if variant == "printed":
        t = 2 * math.pi / N
    elif variant == "half_angle":
        t = math.pi / N
    elif variant == "sharp":
        t, q = math.pi / N, (1 - mu_abs * mu_abs) / (2 * mu_abs)
    elif variant == "table_compatible":
        t, q = 2 * math.pi / N, 2 * q
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return math.cos(t) + q * math.sin(t)


def ring_count(N, beta):
    """Rings needed so the central hole is about as wide as the outer triangles.

    ``ceil(log(N / (2 pi)) / log(beta))``, at least 1.
    """
    if not beta > 1:
        raise ValueError("ratio must exceed 1")
    return max(1, math.ceil(math.log(N / (2 * math.pi)) / math.log(beta)))


def _table_ring_count(N, beta):
    return max(1, math.ceil(math.log(N * math.pi / 2) / math.log(beta)))


def equilateral_ratio(N):
    """Ratio giving (nearly) equilateral outer triangles: base angle 60 degrees."""
    return 1 + (math.pi / N) * math.tan(math.pi / 3)


@dataclass(frozen=True)
class MeshConfig:
    """Ring count, vertices per ring and uniform radius ratio.

    ``kappa`` records the bound on ``|mu|`` the ratio was chosen for
    (0 when the ratio was given directly).
    """

    N: int
    M: int
    ratio: float
    kappa: float = 0.0

    def __post_init__(self):
        if self.N < 8 or self.N % 2:
            raise ValueError("N must be even and >= 8")
        if self.M < 1:
            raise ValueError("need M >= 1")
        if not self.ratio > 1:
            raise ValueError("ratio must exceed 1")
        if not 0 <= self.kappa < 1:
            raise ValueError("kappa must lie in [0, 1)")

    @classmethod
    def from_kappa(cls, N, kappa, M=None, variant="sharp", margin=0.01, cap=None):
        """Choose the ratio from a bound ``kappa`` on ``|mu|``.

        The ratio is ``c + (1 - margin) * (bound - c)`` with
        ``c = cos(pi/N)`` (the margin shrinks the apex height that decides
        skewness), capped at ``cap`` (default: the equilateral-triangle
        ratio).  Without ``M`` the ring count follows :func:`ring_count`.
        """
        cap = equilateral_ratio(N) if cap is None else cap
        bound = min(max_ratio_bound(N, kappa, variant), cap)
        c = math.cos(math.pi / N)
        ratio = c + (1 - margin) * (bound - c)
        if not ratio > 1:
            raise ValueError(f"no admissible ratio for N={N}, kappa={kappa}")
        if M is None:
            M = ring_count(N, ratio)
        return cls(N=N, M=M, ratio=ratio, kappa=kappa)

    @property
    def radii(self):
        j = np.arange(1, self.M + 1)
        return self.ratio ** (j - self.M).astype(float)

    def satisfies_bound(self, kappa=None, variant="sharp"):
        kappa = self.kappa if kappa is None else kappa
        return self.ratio < max_ratio_bound(self.N, kappa, variant)


@dataclass(frozen=True, eq=False)
class RingMesh:
    """Vertices of a concentric-ring mesh; see the module docstring."""

    radii: np.ndarray
    N: int
    _z: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        if radii[-1] != 1.0 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
            raise ValueError("radii must increase strictly from > 0 to exactly 1")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "_z", self._vertex_array())

    @property
    def M(self):
        return len(self.radii)

    @property
    def ratio(self):
        return self.radii[-1] / self.radii[-2] if self.M > 1 else math.inf

    def angle_index(self, j, k):
        """Angle (radians) of vertex ``(j, k)``; ``k + j/2`` is reduced mod N first."""
        t = np.mod(np.asarray(k, dtype=float) + np.asarray(j) / 2.0, self.N)
        return 2 * np.pi * t / self.N

    def ring_angles(self, j=1):
        return self.angle_index(j, np.arange(self.N))

    def _vertex_array(self):
        j = np.arange(1, self.M + 1)[:, None]
        k = np.arange(self.N)[None, :]
        return self.radii[:, None] * np.exp(1j * self.angle_index(j, k))

    @property
    def z(self):
        """Vertex array of shape ``(M, N)``; row ``j-1`` is ring ``j``."""
        return self._z

    def vertex(self, j, k):
        """Vertex ``z[j, k]`` with 1-based ring index and ``k`` taken mod N."""
        return self._z[j - 1, np.mod(k, self.N)]

    def ring(self, j):
        return self._z[j - 1]

    def anchor_index(self, j):
        """Index ``k = -[j/2] mod N`` of the normalization vertex of ring ``j``."""
        return (-(j // 2)) % self.N

    def outward_triangles(self, j):
        """Triples of arrays ``(z[j,k], z[j,k+1], z[j+1,k])`` for ``k = 0..N-1``."""
        inner, outer = self.ring(j), self.ring(j + 1)
        return inner, np.roll(inner, -1), outer

    def inward_triangles(self, j):
        """Triples of arrays ``(z[j,k+1], z[j+1,k+1], z[j+1,k])``."""
        inner, outer = self.ring(j), self.ring(j + 1)
        return np.roll(inner, -1), np.roll(outer, -1), outer

    def triangles(self):
        """Vertex index triples ``(ring0, k0, ring1, k1, ring2, k2)`` of all triangles.

        Returns an ``(T, 3, 2)`` integer array of 1-based ring and vertex
        indices plus a boolean array marking outward triangles.  Within each
        ring gap, outward triangle ``k`` comes first, then inward ``k``.
        """
        N = self.N
        j = np.repeat(np.arange(1, self.M), N)
        k = np.tile(np.arange(N), self.M - 1)
        k1 = (k + 1) % N
        out = np.stack([np.stack([j, k], -1), np.stack([j, k1], -1), np.stack([j + 1, k], -1)], 1)
        inw = np.stack([np.stack([j, k1], -1), np.stack([j + 1, k1], -1), np.stack([j + 1, k], -1)], 1)
        tris = np.stack([out, inw], 1).reshape(-1, 3, 2)
        outward = np.tile([True, False], j.size)
        return tris, outward

    def locate(self, z):
        """Containing (or nearest) mesh triangle of each point.

        Returns ``(j, k, outward, score)``: the triangle lies between rings
        ``j`` and ``j+1``, and ``score`` is its smallest barycentric
        coordinate of the point, so ``score >= 0`` means the point is
        inside.  Candidates come from the ring index of ``|z|`` and the
        angle index of ``arg z``; O(1) work per point.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        r = np.abs(z)
        j_out = np.ones(z.shape, dtype=int)
        k_out = np.zeros(z.shape, dtype=int)
        o_out = np.zeros(z.shape, dtype=bool)
        j_guess = np.searchsorted(self.radii, r, side="right")  # r_j <= r < r_{j+1}
        theta = np.mod(np.angle(z), 2 * np.pi)
        best = np.full(z.shape, -np.inf)
        for dj in (-1, 0, 1):
            j = np.clip(j_guess + dj, 1, self.M - 1)
            # outward triangle k spans the angles of z[j,k] .. z[j,k+1]
            k0 = np.floor(theta * self.N / (2 * np.pi) - j / 2.0).astype(int)
            for dk in (-1, 0, 1):
                for outward in (True, False):
                    k = np.mod(k0 + dk, self.N)
                    a, b, c = self._tri_vertices(j, k, outward)
                    score = _barycentric_min(z, a, b, c)
                    better = score > best
                    best = np.where(better, score, best)
                    j_out = np.where(better, j, j_out)
                    k_out = np.where(better, k, k_out)
                    o_out = np.where(better, outward, o_out)
        return j_out, k_out, o_out, best

    def _tri_vertices(self, j, k, outward):
        N = self.N
        if outward:
            return self._z[j - 1, k], self._z[j - 1, (k + 1) % N], self._z[j, k]
        return self._z[j - 1, (k + 1) % N], self._z[j, (k + 1) % N], self._z[j, k]


def _barycentric_min(p, a, b, c):
    """Smallest barycentric coordinate of ``p`` in triangle ``abc``."""
    d = np.imag(np.conj(b - a) * (c - a))
    l1 = np.imag(np.conj(c - b) * (p - b)) / d
    l2 = np.imag(np.conj(a - c) * (p - c)) / d
    l0 = 1 - l1 - l2
    return np.minimum(np.minimum(l0, l1), l2)


def build_mesh(config):
    """Mesh with radii ``ratio**(j - M)``, ``j = 1..M``."""
    return RingMesh(radii=config.radii, N=config.N)


def table1_generate(Ns=(32, 64, 128, 256, 512), mus=(0.1, 0.2, 0.3, 0.4, 0.5), variant="table_compatible"):
    """Rows ``(N, mu, beta, M, variant)`` of the ratio table.

    ``printed`` evaluates the bound and ring count exactly as stated;
    ``table_compatible`` uses the forms that reproduce the published
    values (doubled sine coefficient, ``M = ceil(ln(N pi/2) / ln beta)``).
    """
    rows = []
    for N in Ns:
        for mu in mus:
            if variant == "printed":
                beta = max_ratio_bound(N, mu, "printed")
                M = ring_count(N, beta)
            elif variant == "table_compatible":
                beta = max_ratio_bound(N, mu, "table_compatible")
                M = _table_ring_count(N, beta)
            else:
                raise ValueError(f"unknown variant {variant!r}")
            rows.append((N, mu, beta, M, variant))
    return rows


def table1_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "mu", "beta", "M", "variant"])
    for N, mu, beta, M, variant in rows:
        writer.writerow([N, repr(float(mu)), repr(float(beta)), M, variant])
    return buf.getvalue()
