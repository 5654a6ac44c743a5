"""Radial stretch along the positive real axis.

Keeps the boundary and the vertices on the positive real ray, and prints
the computed ``w(r)`` next to the exact profile ``phi(r)``.

    python3 demos/radial_ray.py
"""
import numpy as np

from qcdisk import MeshConfig, Retention, SolverConfig, radial_mu, solve
from qcdisk.beltrami import default_radial_profile

if __name__ == "__main__":
    field = radial_mu()
    phi, _ = default_radial_profile()
    cfg = SolverConfig(MeshConfig.from_kappa(128, field.sup_bound, M=256),
                       retention=Retention.boundary_only(positive_real_ray=True))
    res = solve(cfg, field)
    z, w = res.mesh.z[res.retained], res.images[res.retained]
    ray = np.abs(np.angle(z)) < 1e-12
    r, wr = z[ray].real, w[ray]
    order = np.argsort(r)
    for i in order[:: max(1, len(order) // 12)]:
        print(f"r = {r[i]:.4f}   w = {wr[i].real:.5f}{wr[i].imag:+.1e}i   phi = {phi(r[i]):.5f}")
    print(f"max |w - phi(r)| = {np.max(np.abs(wr - phi(r))):.5f}")
