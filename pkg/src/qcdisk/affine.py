"""Affine quasiconformal building blocks.

Every real-linear affine map of the plane can be written as

    F(z) = alpha * z + beta * conj(z) + gamma,

with Beltrami derivative ``beta / alpha``.  The maps used by the disk
algorithm (the stretch ``L[mu]``, the conformal map ``A[a, b]``, the
two-point interpolant ``B`` and the triangle map ``T``) are all of this
form, so a single :class:`GeneralAffine` carries all of them.

All functions accept scalars or numpy arrays and broadcast.
"""
from dataclasses import dataclass

import numpy as np


class DegenerateDataError(ValueError):
    """Coincident or collinear input points."""


def _check_mu(mu):
    if np.any(np.abs(mu) >= 1):
        raise ValueError("Beltrami coefficient must satisfy |mu| < 1")


@dataclass(frozen=True)
class GeneralAffine:
    """Real-linear map ``z -> alpha*z + beta*conj(z) + gamma``.

    Fields may be arrays of equal shape, in which case the instance
    represents a batch of maps (one per triangle, say).
    """

    alpha: complex
    beta: complex
    gamma: complex = 0j

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.alpha * z + self.beta * np.conj(z) + self.gamma
        return out[()] if out.ndim == 0 else out

    @property
    def mu(self):
        """Beltrami derivative ``beta / alpha``."""
        return beltrami_of_affine(self)

    @property
    def jacobian(self):
        """Real Jacobian determinant ``|alpha|^2 - |beta|^2``."""
        return np.abs(self.alpha) ** 2 - np.abs(self.beta) ** 2

    @property
    def orientation_preserving(self):
        return np.abs(self.beta) < np.abs(self.alpha)

    def compose_conformal(self, a, b=0j):
        """Return ``A[a, b] o self``."""
        return GeneralAffine(a * self.alpha, a * self.beta, a * self.gamma + b)


def linear_stretch(mu, z):
    """The mu-conformal linear map ``L[mu](z) = z + mu*conj(z)``."""
    _check_mu(mu)
    z = np.asarray(z, dtype=complex)
    out = z + mu * np.conj(z)
    return out[()] if out.ndim == 0 else out


def affine_conformal(a, b, z):
    """The conformal affine map ``A[a, b](z) = a*z + b``."""
    if np.any(a == 0):
        raise DegenerateDataError("A[a, b] requires a != 0")
    return a * np.asarray(z, dtype=complex)[()] + b


def interpolate_two_points(mu, z1, z2, w1, w2):
    """Unique mu-conformal affine map sending ``z1 -> w1`` and ``z2 -> w2``.

    Built as ``A[a, b] o L[mu]``; the returned map therefore has Beltrami
    derivative exactly ``mu``.
    """
    _check_mu(mu)
    z1, z2, w1, w2 = (np.asarray(v, dtype=complex) for v in (z1, z2, w1, w2))
    if np.any(z1 == z2) or np.any(w1 == w2):
        raise DegenerateDataError("interpolation points must be distinct")
    lz1 = z1 + mu * np.conj(z1)
    lz2 = z2 + mu * np.conj(z2)
    a = (w2 - w1) / (lz2 - lz1)
    b = w1 - a * lz1
    return GeneralAffine(a[()], (a * mu)[()], b[()])


def _edges(v0, v1, v2):
    v0, v1, v2 = (np.asarray(v, dtype=complex) for v in (v0, v1, v2))
    return v0, v1 - v0, v2 - v0


def signed_area(v0, v1, v2):
    """Signed area, positive for counterclockwise vertex order."""
    _, e1, e2 = _edges(v0, v1, v2)
    out = 0.5 * np.imag(np.conj(e1) * e2)
    return out[()] if out.ndim == 0 else out


def affine_from_triangles(src, dst):
    """Unique affine map sending the vertices of ``src`` onto those of ``dst``.

    Parameters
    ----------
    src, dst : sequence of three complex (or three arrays)
        Vertex triples ``(v0, v1, v2)``.

    Returns
    -------
    GeneralAffine
        May be orientation reversing; check ``orientation_preserving``.
    """
    z0, dz1, dz2 = _edges(*src)
    w0, dw1, dw2 = _edges(*dst)
    det = dz1 * np.conj(dz2) - dz2 * np.conj(dz1)
    if np.any(det == 0):
        raise DegenerateDataError("source triangle is degenerate")
    if np.any(np.imag(np.conj(dw1) * dw2) == 0):
        raise DegenerateDataError("target triangle is degenerate")
    alpha = (dw1 * np.conj(dz2) - dw2 * np.conj(dz1)) / det
    beta = (dz1 * dw2 - dz2 * dw1) / det
    gamma = w0 - alpha * z0 - beta * np.conj(z0)
    return GeneralAffine(alpha[()], beta[()], gamma[()])


def triangle_beltrami(z1, z2, z3, w1, w2, w3):
    r"""Beltrami derivative of ``T[z1, z2, z3; w1, w2, w3]`` in closed form.

    .. math::
        \mu = -\frac{(z_2-z_1)(w_3-w_1) - (z_3-z_1)(w_2-w_1)}
                    {\overline{(z_2-z_1)}(w_3-w_1) - \overline{(z_3-z_1)}(w_2-w_1)}

    Vectorized; used for per-triangle diagnostics on whole meshes.  An
    anticonformal triangle map (zero denominator) gives ``inf``.
    """
    z1, z2, z3, w1, w2, w3 = (np.asarray(v, dtype=complex) for v in (z1, z2, z3, w1, w2, w3))
    dz2, dz3 = z2 - z1, z3 - z1
    dw2, dw3 = w2 - w1, w3 - w1
    num = dz2 * dw3 - dz3 * dw2
    den = np.conj(dz2) * dw3 - np.conj(dz3) * dw2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den != 0, -num / np.where(den != 0, den, 1), np.inf)
    return out[()] if out.ndim == 0 else out


def beltrami_of_affine(f):
    """Beltrami derivative ``beta / alpha`` of an affine map.

    Values with modulus >= 1 are returned as is; they flag orientation
    reversing (or degenerate) maps.
    """
    alpha = np.asarray(f.alpha, dtype=complex)
    if np.any(alpha == 0):
        raise DegenerateDataError("alpha = 0: map is anticonformal or degenerate")
    out = np.asarray(f.beta, dtype=complex) / alpha
    return out[()] if out.ndim == 0 else out


def foot_parameter(base0, base1, apex):
    """Position of the foot of the perpendicular from ``apex`` on the base line.

    0 at ``base0``, 1 at ``base1``.
    """
    base0, base1, apex = (np.asarray(v, dtype=complex) for v in (base0, base1, apex))
    e = base1 - base0
    if np.any(e == 0):
        raise DegenerateDataError("base endpoints coincide")
    out = np.real((apex - base0) * np.conj(e)) / np.abs(e) ** 2
    return out[()] if out.ndim == 0 else out


def is_skewed(base0, base1, apex):
    """True when a base angle of the triangle exceeds pi/2.

    A base angle of exactly pi/2 counts as non-skewed.
    """
    t = foot_parameter(base0, base1, apex)
    return (t < 0) | (t > 1)
