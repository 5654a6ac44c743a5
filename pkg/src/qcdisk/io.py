"""Serialization and SVG rendering of solver results.

JSON and CSV numbers are written with ``repr(float)``, the shortest decimal
string that reads back to the same double, so files round-trip bit-exactly.
"""
from dataclasses import dataclass
import csv
import json
import math
import time

import numpy as np

from .solver import RetentionError

SCHEMA_VERSION = 1


class OutputError(OSError):
    """A result file could not be written."""


def _pair(w):
    return [float(w.real), float(w.imag)]


def _clean(obj):
    """Make diagnostics JSON-safe (numpy scalars, non-finite floats)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return _pair(complex(obj))
    return obj


def result_to_dict(result, errors_vs_oracle=None, timestamp=True):
    """JSON-ready dictionary of a result.

    Rings without any retained vertex are left out; partially retained
    rings list their vertex indices under ``"k"``.  Timings are not
    included so identical runs give identical documents apart from the
    ``timestamp`` field.
    """
    mesh = result.mesh
    rings = []
    for j in range(1, mesh.M + 1):
        keep = result.retained[j - 1]
        if not keep.any():
            continue
        entry = {"j": j, "r": float(mesh.radii[j - 1])}
        if not keep.all():
            entry["k"] = np.flatnonzero(keep).tolist()
        entry["w"] = [_pair(w) for w in result.images[j - 1][keep]]
        rings.append(entry)
    d = result.diagnostics
    diagnostics = {
        "skew_count": d["skew_count"],
        "max_orientation_violation": d["orientation_violations"],
        "triangles_checked": d["triangles_checked"],
        "nonsimple_rings": d["nonsimple_rings"],
        "max_modulus_drift": max(d["max_modulus_drift"]),
    }
    if errors_vs_oracle:
        diagnostics["errors_vs_oracle"] = dict(errors_vs_oracle)
    doc = {
        "schema": SCHEMA_VERSION,
        "field": result.field_name,
        "config": result.config.to_dict(),
        "mu0": _pair(result.mu0),
        "rings": rings,
        "diagnostics": diagnostics,
    }
    if timestamp:
        doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return _clean(doc)


def write_result_json(result, path, errors_vs_oracle=None, timestamp=True):
    doc = result_to_dict(result, errors_vs_oracle, timestamp)
    try:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return doc


def read_result_json(path):
    """Load a result document; ring ``w`` lists become complex arrays."""
    with open(path) as fh:
        doc = json.load(fh)
    for ring in doc["rings"]:
        w = np.asarray(ring["w"], dtype=float).reshape(-1, 2)
        ring["w"] = w[:, 0] + 1j * w[:, 1]
    return doc


def write_result_csv(result, path):
    """Rows ``j,k,re_z,im_z,re_w,im_w`` for every retained vertex."""
    j, k = np.nonzero(result.retained)
    z, w = result.mesh.z[j, k], result.images[j, k]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["j", "k", "re_z", "im_z", "re_w", "im_w"])
            for row in zip(j + 1, k, z.real, z.imag, w.real, w.imag):
                writer.writerow([int(row[0]), int(row[1])] + [repr(float(x)) for x in row[2:]])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def read_result_csv(path):
    """Returns ``(j, k, z, w)`` arrays (``j`` is 1-based)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    j, k = data[:, 0].astype(int), data[:, 1].astype(int)
    return j, k, data[:, 2] + 1j * data[:, 3], data[:, 4] + 1j * data[:, 5]


# -- SVG ------------------------------------------------------------------------


@dataclass(frozen=True)
class SvgOptions:
    """Drawing options.

    ``rings`` and ``spokes`` select a display submesh of ``M'`` rings and
    ``N'`` rays; left as ``None`` every triangle edge is drawn.
    Sizes are in pixels per panel; coordinates are written with
    ``digits`` decimals, which keeps the output byte-stable.
    """

    rings: int = None
    spokes: int = None
    size: int = 400
    stroke_width: float = 0.6
    domain_panel: bool = True
    digits: int = 3
    stroke: str = "#1f3b73"


def _edges_full(mesh):
    tri, _ = mesh.triangles()
    a = tri[:, [0, 1, 2]]
    b = tri[:, [1, 2, 0]]
    e = np.stack([a, b], axis=2).reshape(-1, 2, 2)  # (E, endpoint, (ring, k))
    # canonical order of each edge, then unique
    key = e[:, :, 0] * (mesh.N + 1) + e[:, :, 1]
    swap = key[:, 0] > key[:, 1]
    e[swap] = e[swap][:, ::-1]
    flat = e.reshape(len(e), 4)
    flat = np.unique(flat, axis=0)
    return [[(r0, k0), (r1, k1)] for r0, k0, r1, k1 in flat.tolist()]


def _edges_submesh(mesh, rings, spokes):
    M, N = mesh.M, mesh.N
    js = np.unique(np.round(np.arange(1, rings + 1) * M / rings).astype(int))
    if N % spokes:
        raise ValueError("spokes must divide N")
    cols = np.arange(0, N, N // spokes)
    paths = []
    for j in js.tolist():
        # ring arcs between consecutive displayed rays
        ks = ((cols - j // 2) % N).tolist()
        for a, b in zip(ks, ks[1:] + ks[:1]):
            stop = b if b > a else b + N
            paths.append([(j, k % N) for k in range(a, stop + 1)])
    for c in cols.tolist():
        paths.append([(j, (c - j // 2) % N) for j in js.tolist()])
    return paths


def _points(arr, path, scale, ox, digits):
    out = []
    for j, k in path:
        w = arr[j - 1, k]
        out.append(f"{ox + scale * (1 + w.real):.{digits}f},{scale * (1 - w.imag):.{digits}f}")
    return " ".join(out)


def render_svg(result, path=None, options=None):
    """Line drawing of the image triangulation, optionally beside the domain.

    Returns the SVG text and writes it to ``path`` if given.

    Raises
    ------
    RetentionError
        A vertex needed for the drawing was not retained.
    """
    opt = options or SvgOptions()
    mesh = result.mesh
    if opt.rings is None and opt.spokes is None:
        paths = _edges_full(mesh)
    else:
        paths = _edges_submesh(mesh, opt.rings or mesh.M, opt.spokes or mesh.N)
    kept = result.retained
    missing = {v for p in paths for v in (p[0], p[-1]) if not kept[v[0] - 1, v[1]]}
    if missing:
        raise RetentionError(f"{len(missing)} displayed vertices were not retained")
    # ring arcs pass through intermediate vertices only where they were kept
    paths = [[v for v in p if kept[v[0] - 1, v[1]]] for p in paths]

    s = opt.size / 2
    panels = [(mesh.z, 0.0)] if opt.domain_panel else []
    panels.append((result.images, opt.size * len(panels)))
    width = opt.size * len(panels)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{opt.size}" '
        f'viewBox="0 0 {width} {opt.size}">',
        f'<g fill="none" stroke="{opt.stroke}" stroke-width="{opt.stroke_width}" '
        'stroke-linejoin="round">',
    ]
    for arr, ox in panels:
        lines.append(
            f'<circle cx="{ox + s:.{opt.digits}f}" cy="{s:.{opt.digits}f}" r="{s:.{opt.digits}f}" '
            'stroke="#999999"/>'
        )
        for p in paths:
            lines.append(f'<polyline points="{_points(arr, p, s, ox, opt.digits)}"/>')
    lines += ["</g>", "</svg>", ""]
    text = "\n".join(lines)
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
    return text
