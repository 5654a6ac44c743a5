"""Daripa's first coefficient at two resolutions, then the exterior map.

Writes ``daripa1.svg`` (disk image) and ``daripa1_exterior.svg`` (the same
triangulation pushed to the exterior of the aspect-0.6 ellipse).

    python3 demos/daripa_exterior.py [outdir]
"""
import sys
from dataclasses import replace
from pathlib import Path

from qcdisk import MeshConfig, Retention, SolverConfig, daripa_mu, exterior_compose, solve
from qcdisk.io import SvgOptions, render_svg
from qcdisk.runs import boundary_distance


def main(outdir="."):
    field = daripa_mu(1)
    runs = []
    for N, M in ((64, 64), (256, 256)):
        cfg = SolverConfig(MeshConfig.from_kappa(N, field.sup_bound, M=M), retention=Retention.submesh(32, 32))
        runs.append(solve(cfg, field))
    print(f"boundary sup distance (64,64) vs (256,256): {boundary_distance(*runs):.4f}")
    out = Path(outdir)
    opts = SvgOptions(rings=32, spokes=32)
    render_svg(runs[1], out / "daripa1.svg", opts)
    # show |w| <= 4; the inner rings go near the pole and leave the frame
    ext = exterior_compose(runs[1], 0.6)
    render_svg(replace(runs[1], images=ext / 4), out / "daripa1_exterior.svg",
               replace(opts, domain_panel=False))
    print(f"wrote {out / 'daripa1.svg'} and {out / 'daripa1_exterior.svg'}")


if __name__ == "__main__":
    main(*sys.argv[1:])
