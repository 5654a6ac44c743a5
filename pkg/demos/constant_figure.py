"""Distorted triangulation for constant mu = 0.4.

Solves on the (M, N) = (64, 128) mesh, keeps a display submesh of 32 rings
and 32 rays, and writes ``constant_mu04.svg`` (domain left, image right).

    python3 demos/constant_figure.py [outdir]
"""
import sys
from pathlib import Path

from qcdisk import MeshConfig, Retention, SolverConfig, constant_mu, solve
from qcdisk.io import SvgOptions, render_svg
from qcdisk.runs import oracle_errors


def main(outdir="."):
    field = constant_mu(0.4)
    mesh = MeshConfig.from_kappa(128, field.sup_bound, M=64)
    cfg = SolverConfig(mesh, retention=Retention.submesh(32, 32), keep_maps=False)
    result = solve(cfg, field)
    path = Path(outdir) / "constant_mu04.svg"
    render_svg(result, path, SvgOptions(rings=32, spokes=32))
    print(f"ratio {mesh.ratio:.4f}, errors {oracle_errors(result, field)}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
