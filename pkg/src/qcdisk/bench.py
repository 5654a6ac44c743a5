"""Wall-clock measurements for the cost model of the algorithm.

Full retention costs ``O(M**2 N**2)`` (step 3 dominates), boundary-only
retention ``O(M N**2)``, and building one zipper ``O(N**2)``.
"""
import csv
import io
import time

import numpy as np

from .beltrami import constant_mu
from .conformal import geodesic_zipper_build
from .mesh import MeshConfig
from .solver import Retention, SolverConfig, solve

DEFAULT_SIZES = ((16, 64), (32, 128), (64, 256))
DEFAULT_ZIPPER_SIZES = (256, 512, 1024)
FIELDS = ("kind", "M", "N", "retention", "step1", "step2", "step3", "total", "model", "per_unit")


def _best(fn, repeat):
    best = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, out


def bench_solve(M, N, retention="full", mu=0.4, repeat=1, **kw):
    field = constant_mu(mu)
    mesh = MeshConfig.from_kappa(N, field.sup_bound, M=M)
    ret = Retention.full() if retention == "full" else Retention.boundary_only()
    cfg = SolverConfig(mesh, retention=ret, keep_maps=False, **kw)
    total, result = _best(lambda: solve(cfg, field), repeat)
    t = result.diagnostics["timings"]
    model = M * M * N * N if retention == "full" else M * N * N
    return {"kind": "solve", "M": M, "N": N, "retention": retention, "step1": t["step1"],
            "step2": t["step2"], "step3": t["step3"], "total": total, "model": model,
            "per_unit": total / model}


def bench_zipper(N, repeat=3):
    v = np.exp(2j * np.pi * np.arange(N) / N)
    total, _ = _best(lambda: geodesic_zipper_build(v), repeat)
    return {"kind": "zipper", "M": 0, "N": N, "retention": "", "step1": 0.0, "step2": total,
            "step3": 0.0, "total": total, "model": N * N, "per_unit": total / (N * N)}


def warm_up():
    """Compile the numba kernels so the first timing is not skewed."""
    bench_solve(4, 16, "full")
    bench_zipper(16, repeat=1)


def bench(sizes=DEFAULT_SIZES, zipper_sizes=DEFAULT_ZIPPER_SIZES, retentions=("full", "boundary"), repeat=1):
    """Timing rows for every solve size and retention, then every zipper size."""
    warm_up()
    rows = [bench_solve(M, N, r, repeat=repeat) for r in retentions for M, N in sizes]
    rows += [bench_zipper(N, repeat=max(repeat, 3)) for N in zipper_sizes]
    return rows


def fit_spread(rows, kind="solve", retention="full"):
    """``max / min`` of time per model unit; 1 means a perfect fit."""
    per = [r["per_unit"] for r in rows if r["kind"] == kind and r["retention"] == retention]
    return max(per) / min(per)


def zipper_ratios(rows):
    """``time(2N) / time(N)`` for consecutive zipper rows."""
    z = sorted((r["N"], r["total"]) for r in rows if r["kind"] == "zipper")
    return [(n2, t2 / t1) for (n1, t1), (n2, t2) in zip(z, z[1:]) if n2 == 2 * n1]


def bench_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
