"""Elliptic-function machinery for seeding the innermost ring.

The conformal map from the interior of the ellipse with foci ``+-1`` and
semi-axes ``a > b`` (``a**2 - b**2 == 1``) onto the unit disk is

    w = sqrt(k) * sn((2K/pi) * arcsin(u); k**2)

where the modulus ``k`` is fixed by the nome ``q = (a + b)**-4`` through
``k = (theta2(q) / theta3(q))**2`` and ``K = K(k**2)``.

Everything here is double precision.  Parameters follow the
``m = k**2`` convention of scipy/Abramowitz-Stegun.
"""
from dataclasses import dataclass
import math

import numpy as np

from .affine import linear_stretch

_SERIES_RTOL = 1e-16
_LANDEN_MAX_DEPTH = 32
_LANDEN_TOL = 1e-14


@dataclass(frozen=True)
class EllipseGeometry:
    """Ellipse centred at 0 with foci at ``+-1``."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > self.b >= 0):
            raise ValueError(f"need a > b >= 0, got a={self.a}, b={self.b}")
        if abs(self.a**2 - self.b**2 - 1) > 1e-10:
            raise ValueError("foci must be at +-1: a**2 - b**2 == 1")

    @classmethod
    def from_semiminor(cls, b):
        return cls(math.sqrt(1 + b * b), b)

    def contains(self, u, tol=1e-9):
        """Whether ``u`` lies in the closed ellipse (up to ``tol``)."""
        u = np.asarray(u, dtype=complex)
        # focal-distance characterization: |u-1| + |u+1| <= 2a
        return np.abs(u - 1) + np.abs(u + 1) <= 2 * self.a + tol


@dataclass(frozen=True)
class JacobiParams:
    q: float
    m: float
    k: float
    K: float

    @classmethod
    def from_nome(cls, q):
        k = modulus_from_nome(q)
        m = k * k
        return cls(q=q, m=m, k=k, K=complete_elliptic_K(m))


def nome_from_axes(geom):
    """Nome ``q = (a + b)**-4`` of the normalized ellipse."""
    return (geom.a + geom.b) ** -4.0


def _check_nome(q):
    if not 0 <= q < 1:
        raise ValueError(f"theta series diverge for q={q}; need 0 <= q < 1")


def theta2(q):
    """Jacobi theta_2 at zero argument, ``2 * sum_{n>=0} q**((n+1/2)**2)``."""
    _check_nome(q)
    if q == 0:
        return 0.0
    total = 0.0
    n = 0
    while True:
        term = q ** ((n + 0.5) ** 2)
        total += term
        if term < _SERIES_RTOL * total:
            break
        n += 1
    return 2.0 * total


def theta3(q):
    """Jacobi theta_3 at zero argument, ``1 + 2 * sum_{n>=1} q**(n**2)``."""
    _check_nome(q)
    total = 1.0
    n = 1
    while q > 0:
        term = 2.0 * q ** (n * n)
        total += term
        if term < _SERIES_RTOL * total:
            break
        n += 1
    return total


def modulus_from_nome(q):
    """Jacobi modulus ``k = (theta2(q) / theta3(q))**2``."""
    return (theta2(q) / theta3(q)) ** 2


def _agm(a, b):
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_elliptic_K(m):
    """Complete elliptic integral of the first kind, ``K(m) = pi / (2 agm(1, sqrt(1-m)))``."""
    if not 0 <= m < 1:
        raise ValueError(f"K(m) requires 0 <= m < 1, got {m}")
    return math.pi / (2.0 * _agm(1.0, math.sqrt(1.0 - m)))


def nome_from_parameter(m):
    """Inverse relation ``q = exp(-pi K(1-m) / K(m))``."""
    if m == 0:
        return 0.0
    return math.exp(-math.pi * complete_elliptic_K(1 - m) / complete_elliptic_K(m))


def jacobi_sn(u, m):
    """Jacobi elliptic function ``sn(u | m)`` for complex ``u``.

    Descending Landen transformation: the modulus is driven to zero, where
    ``sn`` reduces to ``sin``, and the result is carried back up with

        sn(u, k) = (1 + k1) s / (1 + k1 s**2),  s = sn(u / (1 + k1), k1).
    """
    if not 0 <= m < 1:
        raise ValueError(f"sn requires 0 <= m < 1, got {m}")
    u = np.asarray(u, dtype=complex)
    k = math.sqrt(m)
    moduli = []
    while k >= _LANDEN_TOL:
        if len(moduli) >= _LANDEN_MAX_DEPTH:
            raise RuntimeError("Landen recursion did not converge")
        kp = math.sqrt((1 - k) * (1 + k))
        k = (k * k) / (1 + kp) ** 2
        moduli.append(k)
    for k1 in moduli:
        u = u / (1 + k1)
    s = np.sin(u)
    for k1 in reversed(moduli):
        s = (1 + k1) * s / (1 + k1 * s * s)
    return s[()] if s.ndim == 0 else s


def ellipse_to_disk(u, geom, check=True):
    """Conformal map of the ellipse ``geom`` onto the unit disk.

    Fixes 0, maps the real axis into itself and the vertex ``a`` to 1.
    The principal ``arcsin`` is discontinuous across the real segments
    beyond the foci, but ``sn`` takes equal values on both sides there,
    so the composite is continuous on the whole ellipse.
    """
    u = np.asarray(u, dtype=complex)
    if check and not np.all(geom.contains(u)):
        raise ValueError("point outside the ellipse")
    params = JacobiParams.from_nome(nome_from_axes(geom))
    arg = (2.0 * params.K / math.pi) * np.arcsin(u)
    w = math.sqrt(params.k) * jacobi_sn(arg, params.m)
    return w[()] if np.ndim(w) == 0 else w


_MU0_IDENTITY = 1e-8


def seed_map(mu0, r1):
    """The mu0-conformal map of ``{|z| < r1}`` onto itself fixing 0.

    Returns a vectorized callable.  The chain is ``L[mu0]``, the conformal
    normalization ``A[1/(2 r1 sqrt(mu0)), 0]`` onto the ellipse with foci
    ``+-1``, the elliptic map onto the unit disk, and a rescale by ``r1``.
    """
    mu0 = complex(mu0)
    if abs(mu0) >= 1:
        raise ValueError("|mu0| must be < 1")
    if abs(mu0) < _MU0_IDENTITY:
        return lambda z: np.asarray(z, dtype=complex)
    rho = abs(mu0)
    geom = EllipseGeometry((1 + rho) / (2 * math.sqrt(rho)), (1 - rho) / (2 * math.sqrt(rho)))
    scale = 1.0 / (2.0 * r1 * np.sqrt(mu0))

    def f(z):
        u = scale * linear_stretch(mu0, z)
        return r1 * ellipse_to_disk(u, geom, check=False)

    return f


def seed_first_ring(mu0, r1, N, offset_args):
    """Images of the first-ring vertices ``r1 * exp(i * offset_args)``."""
    offset_args = np.asarray(offset_args, dtype=float)
    if offset_args.shape != (N,):
        raise ValueError("need one angle per vertex")
    z = r1 * np.exp(1j * offset_args)
    return seed_map(mu0, r1)(z)
