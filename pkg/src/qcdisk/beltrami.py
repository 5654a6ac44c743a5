"""Beltrami coefficients on the unit disk.

A :class:`BeltramiField` is a vectorized callable ``z -> mu(z)`` together
with a bound ``sup_bound`` on ``|mu|`` over the closed disk.  Bounds are
exact where a closed form is available and otherwise come from dense
sampling plus a 5% safety margin (not a rigorous certificate).
"""
from dataclasses import dataclass
from functools import lru_cache
import csv
import json
import math
from typing import Callable

import numpy as np

SAMPLING_MARGIN = 1.05
_N_SAMPLE = 2048


@dataclass(frozen=True, eq=False)
class BeltramiField:
    """A Beltrami coefficient with a bound ``|mu(z)| <= sup_bound`` on the disk."""

    fn: Callable
    sup_bound: float
    name: str = "custom"

    def __post_init__(self):
        if not 0 <= self.sup_bound < 1:
            raise ValueError(f"{self.name}: sup bound {self.sup_bound} is not < 1")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.asarray(self.fn(z), dtype=complex)
        out = np.broadcast_to(out, z.shape).copy() if out.shape != z.shape else out
        return out[()] if out.ndim == 0 else out

    eval = __call__


def polar_samples(n_r=_N_SAMPLE, n_theta=_N_SAMPLE):
    """Points of a polar grid covering the closed unit disk."""
    r = np.linspace(0.0, 1.0, n_r)
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    return (r[:, None] * np.exp(1j * theta[None, :])).ravel()


def sampled_sup(fn, n_r=_N_SAMPLE, n_theta=_N_SAMPLE):
    """Max of ``|fn|`` over a dense polar grid."""
    rows = np.linspace(0.0, 1.0, n_r)
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    e = np.exp(1j * theta)
    best = 0.0
    for chunk in np.array_split(rows, max(1, n_r // 256)):
        z = chunk[:, None] * e[None, :]
        best = max(best, float(np.max(np.abs(fn(z)))))
    return best


def from_callable(fn, sup_bound=None, name="custom"):
    """Wrap a user function; the bound is sampled when not given."""
    if sup_bound is None:
        sup_bound = SAMPLING_MARGIN * sampled_sup(fn)
    return BeltramiField(fn, sup_bound, name)


# -- constant -----------------------------------------------------------------


def constant_mu(c):
    c = complex(c)
    if abs(c) >= 1:
        raise ValueError("|c| must be < 1")
    label = repr(c.real) if c.imag == 0 else f"{c.real!r}{c.imag:+}i"
    return BeltramiField(lambda z: np.full(np.shape(z), c, dtype=complex), abs(c), f"constant:{label}")


# -- radial -------------------------------------------------------------------


def default_radial_profile():
    """``phi(r) = r - sin(2 pi r) / (4 pi)`` and its derivative.

    An increasing diffeomorphism of [0, 1] with ``phi' in [1/2, 3/2]``.
    """
    phi = lambda r: r - np.sin(2 * np.pi * r) / (4 * np.pi)
    dphi = lambda r: 1 - 0.5 * np.cos(2 * np.pi * r)
    return phi, dphi


def sine_squared_profile():
    """``phi(r) = 1 + sin(pi (r - 1/2))**2 / 2`` and its derivative.

    Kept for plotting comparisons only: it is not monotone on [0, 1] and
    does not define a valid Beltrami coefficient, so :func:`radial_mu`
    rejects it.
    """
    phi = lambda r: 1 + 0.5 * np.sin(np.pi * (r - 0.5)) ** 2
    dphi = lambda r: 0.5 * np.pi * np.sin(2 * np.pi * (r - 0.5))
    return phi, dphi


def radial_mu(phi=None, phi_prime=None, mu_at_zero=None):
    """Beltrami coefficient of ``f(z) = phi(|z|) exp(i arg z)``.

    ``mu(z) = (x - 1) / (x + 1) * z / conj(z)`` with
    ``x = |z| phi'(|z|) / phi(|z|)``.

    Parameters
    ----------
    phi, phi_prime : callable
        Profile and derivative; default :func:`default_radial_profile`.
    mu_at_zero : complex, optional
        Value at the origin (the ``r -> 0`` limit).  For the default
        profile it is 0; otherwise it is estimated at ``r = 1e-6``.
    """
    name = "radial"
    if phi is None:
        phi, phi_prime = default_radial_profile()
        mu_at_zero = 0.0 if mu_at_zero is None else mu_at_zero
        name = "radial:default"
    r = np.linspace(0.0, 1.0, 4 * _N_SAMPLE + 1)
    values = phi(r)
    if np.any(np.diff(values) <= 0) or np.any(phi_prime(r[1:]) < 0):
        raise ValueError("radial profile must be increasing on [0, 1]")

    def mu_of_r(rr):
        x = rr * phi_prime(rr) / phi(rr)
        return (x - 1) / (x + 1)

    if mu_at_zero is None:
        mu_at_zero = float(mu_of_r(1e-6))

    def fn(z):
        rr = np.abs(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = mu_of_r(np.where(rr > 0, rr, 1.0)) * np.exp(2j * np.angle(z))
        return np.where(rr > 0, out, mu_at_zero)

    sup = SAMPLING_MARGIN * float(np.max(np.abs(mu_of_r(r[1:]))))
    return BeltramiField(fn, sup, name)


def exact_radial_map(z, phi=None):
    """``phi(|z|) exp(i arg z)``; the default profile when ``phi`` is None."""
    if phi is None:
        phi, _ = default_radial_profile()
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(r > 0, phi(r) * z / np.where(r > 0, r, 1.0), 0.0)
    return out[()] if out.ndim == 0 else out


# -- sectorial ----------------------------------------------------------------


def sector_angle(theta):
    """``psi(theta)``: slope 1/2 on [0, pi], slope 3/2 on [pi, 2 pi]."""
    theta = np.mod(theta, 2 * np.pi)
    return np.where(theta <= np.pi, theta / 2, np.pi / 2 + 1.5 * (theta - np.pi))


def sector_slope(theta):
    theta = np.mod(theta, 2 * np.pi)
    return np.where(theta < np.pi, 0.5, 1.5)


def sectorial_mu():
    """Beltrami coefficient of ``f(z) = |z| exp(i psi(arg z))``.

    ``mu = (1 - psi') / (1 + psi') * z / conj(z)``: modulus 1/3 in the
    upper half-disk and 1/5 in the lower one; ``mu(0) = 0``.
    """

    def fn(z):
        r = np.abs(z)
        theta = np.angle(z)
        s = sector_slope(theta)
        factor = (1 - s) / (1 + s)
        return np.where(r > 0, factor * np.exp(2j * theta), 0.0)

    return BeltramiField(fn, 1.0 / 3.0, "sectorial")


def exact_sectorial_map(z):
    z = np.asarray(z, dtype=complex)
    out = np.abs(z) * np.exp(1j * sector_angle(np.angle(z)))
    return out[()] if out.ndim == 0 else out


# -- Daripa's examples --------------------------------------------------------


def _daripa1(z):
    return np.abs(z) ** 2 * np.exp(0.65 * (1j * z**5 - 2.0))


def _daripa2(z):
    return 0.5 * np.abs(z) ** 2 * np.sin(5 * z.real) + 0j


@lru_cache(maxsize=None)
def daripa_mu(which):
    """``mu1 = |z|^2 exp(0.65 (i z^5 - 2))`` or ``mu2 = |z|^2 sin(5 Re z) / 2``."""
    fn = {1: _daripa1, 2: _daripa2}.get(which)
    if fn is None:
        raise ValueError("which must be 1 or 2")
    return BeltramiField(fn, SAMPLING_MARGIN * sampled_sup(fn), f"daripa:{which}")


# -- gridded data -------------------------------------------------------------


def grid_mu(r, theta, values):
    """Bilinear interpolation of samples on a polar grid.

    Parameters
    ----------
    r : array_like, shape (n_r,)
        Increasing radii covering [0, 1].
    theta : array_like, shape (n_theta,)
        Increasing angles covering [0, 2 pi); interpolation wraps around.
    values : array_like of complex, shape (n_r, n_theta)

    The interpolant is a convex combination of samples, so ``max |values|``
    bounds it exactly.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    values = np.asarray(values, dtype=complex)
    if r.ndim != 1 or theta.ndim != 1 or len(r) < 2 or len(theta) < 2:
        raise ValueError("grid needs at least two radii and two angles")
    if values.shape != (len(r), len(theta)):
        raise ValueError("values must have shape (len(r), len(theta))")
    if r[0] > 0 or r[-1] < 1 or np.any(np.diff(r) <= 0):
        raise ValueError("radii must increase and cover [0, 1]")
    if theta[0] < 0 or theta[-1] >= 2 * np.pi or np.any(np.diff(theta) <= 0):
        raise ValueError("angles must increase within [0, 2 pi)")
    sup = float(np.max(np.abs(values)))
    if sup >= 1:
        raise ValueError("grid contains samples with |mu| >= 1")
    # wrap the angle axis
    theta_ext = np.append(theta, theta[0] + 2 * np.pi)
    values_ext = np.concatenate([values, values[:, :1]], axis=1)

    def fn(z):
        rr = np.clip(np.abs(z), r[0], r[-1])
        tt = np.mod(np.angle(z) - theta[0], 2 * np.pi) + theta[0]
        i = np.clip(np.searchsorted(r, rr, side="right") - 1, 0, len(r) - 2)
        k = np.clip(np.searchsorted(theta_ext, tt, side="right") - 1, 0, len(theta))
        fr = (rr - r[i]) / (r[i + 1] - r[i])
        ft = (tt - theta_ext[k]) / (theta_ext[k + 1] - theta_ext[k])
        v00, v01 = values_ext[i, k], values_ext[i, k + 1]
        v10, v11 = values_ext[i + 1, k], values_ext[i + 1, k + 1]
        return (1 - fr) * ((1 - ft) * v00 + ft * v01) + fr * ((1 - ft) * v10 + ft * v11)

    return BeltramiField(fn, sup, "grid")


def read_grid_csv(path):
    """Load a polar grid written by :func:`write_grid_csv`.

    The first line is ``# {"n_r": ..., "n_theta": ...}``; the rest is CSV
    with header ``r,theta,re_mu,im_mu``, radius-major order.
    """
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError("missing JSON header line")
        header = json.loads(first[1:])
        n_r, n_theta = int(header["n_r"]), int(header["n_theta"])
        rows = list(csv.DictReader(fh))
    if len(rows) != n_r * n_theta:
        raise ValueError(f"expected {n_r * n_theta} rows, found {len(rows)}")
    data = np.array([[float(row[c]) for c in ("r", "theta", "re_mu", "im_mu")] for row in rows])
    data = data.reshape(n_r, n_theta, 4)
    return grid_mu(data[:, 0, 0], data[0, :, 1], data[..., 2] + 1j * data[..., 3])


def write_grid_csv(path, r, theta, values):
    values = np.asarray(values, dtype=complex)
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps({"n_r": len(r), "n_theta": len(theta)}) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["r", "theta", "re_mu", "im_mu"])
        for i, ri in enumerate(r):
            for k, tk in enumerate(theta):
                v = values[i, k]
                writer.writerow([repr(float(x)) for x in (ri, tk, v.real, v.imag)])


def sample_grid(field, n_r, n_theta):
    """Sample a field on the polar grid used by :func:`grid_mu`."""
    r = np.linspace(0.0, 1.0, n_r)
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    return r, theta, field(r[:, None] * np.exp(1j * theta[None, :]))


# -- quadrature ---------------------------------------------------------------


def triangle_average(field, tri, order=1):
    """Approximate mean of ``field`` over triangles ``tri = (v0, v1, v2)``.

    ``order=1`` samples the centroid; ``order=3`` averages the three edge
    midpoints (exact for affine integrands).
    """
    v0, v1, v2 = (np.asarray(v, dtype=complex) for v in tri)
    if order == 1:
        return field((v0 + v1 + v2) / 3)
    if order == 3:
        return (field((v0 + v1) / 2) + field((v1 + v2) / 2) + field((v2 + v0) / 2)) / 3
    raise ValueError("order must be 1 or 3")


def parse_provider(spec):
    """Build a field from ``constant:<c>``, ``radial:default``, ``sectorial``,
    ``daripa:1|2`` or ``grid:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "constant":
        return constant_mu(complex(arg.replace(" ", "").replace("i", "j")))
    if kind == "radial":
        if arg not in ("", "default"):
            raise ValueError(f"unknown radial profile {arg!r}")
        return radial_mu()
    if kind == "sectorial":
        return sectorial_mu()
    if kind == "daripa":
        return daripa_mu(int(arg))
    if kind == "grid":
        return read_grid_csv(arg)
    raise ValueError(f"unknown provider {spec!r}")
