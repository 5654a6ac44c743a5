"""``qcdisk`` command line.

Exit codes: 0 success, 2 configuration error, 3 solver geometry error,
4 output error.
"""
import argparse
import json
import sys

from . import bench as _bench
from .beltrami import parse_provider
from .io import OutputError, SvgOptions, render_svg, write_result_csv, write_result_json
from .mesh import BOUND_VARIANTS, MeshConfig, ring_count, table1_csv, table1_generate
from .runs import EXAMPLES, exterior_check, oracle_errors
from .solver import GeometryError, Retention, RetentionError, SolverConfig, solve

EXIT_OK, EXIT_CONFIG, EXIT_GEOMETRY, EXIT_OUTPUT = 0, 2, 3, 4

TABLE_VARIANTS = {"table": ["table_compatible"], "table_compatible": ["table_compatible"],
                  "printed": ["printed"], "both": ["table_compatible", "printed"]}


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _sizes(text):
    out = []
    for item in text.split(","):
        m, _, n = item.partition("x")
        out.append((int(m), int(n)))
    return out


def parse_retention(text, ray=False):
    """``full``, ``boundary`` or ``submesh:M',N'``."""
    kind, _, arg = text.partition(":")
    if kind == "full":
        return Retention.full() if not ray else Retention("full", positive_real_ray=True)
    if kind == "boundary":
        return Retention.boundary_only(ray)
    if kind == "submesh":
        mp, np_ = (int(x) for x in arg.split(","))
        return Retention.submesh(mp, np_, ray)
    raise ConfigError(f"unknown retention {text!r}")


def build_parser():
    p = _Parser(prog="qcdisk", description="Quasiconformal self-maps of the unit disk.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve for one Beltrami coefficient")
    s.add_argument("--config", help="JSON file of option defaults (keys as the long flags)")
    s.add_argument("--mu", help="constant:<c>, radial:default, sectorial, daripa:1|2, grid:<path>")
    s.add_argument("--n", type=int, help="vertices per ring")
    s.add_argument("--m", type=int, help="number of rings (default: reach the bound's ring count)")
    s.add_argument("--ratio", type=float, help="ring ratio (default: from the bound)")
    s.add_argument("--variant", choices=BOUND_VARIANTS, help="ratio bound (default sharp)")
    s.add_argument("--retention", help="full, boundary or submesh:M',N' (default full)")
    s.add_argument("--ray", action="store_true", default=None, help="also keep the positive real ray")
    s.add_argument("--applicability", choices=("error", "warn"))
    s.add_argument("--quadrature", type=int, choices=(1, 3))
    s.add_argument("--out", help="result JSON")
    s.add_argument("--csv", help="result CSV")
    s.add_argument("--svg", help="SVG drawing")
    s.add_argument("--svg-rings", type=int, help="displayed rings M'")
    s.add_argument("--svg-spokes", type=int, help="displayed rays N'")
    s.add_argument("--state-dump", help="per-ring JSON lines")
    s.add_argument("--no-timestamp", action="store_true", default=None)

    t = sub.add_parser("table1", help="ratio and ring-count table")
    t.add_argument("--variant", choices=sorted(TABLE_VARIANTS), default="both")
    t.add_argument("--out", help="CSV path (default stdout)")

    e = sub.add_parser("example", help="run a reference example and print its errors")
    e.add_argument("name", choices=sorted(EXAMPLES) + ["exterior"])
    e.add_argument("--n", type=int)
    e.add_argument("--m", type=int)
    e.add_argument("--which", type=int, default=1, help="daripa field (1 or 2)")
    e.add_argument("--mu", type=float, default=0.4, help="value for the constant example")
    e.add_argument("--alpha", type=float, default=0.6, help="ellipse aspect for exterior")

    b = sub.add_parser("bench", help="timings for the complexity model")
    b.add_argument("--sizes", type=_sizes, default=list(_bench.DEFAULT_SIZES), help="MxN,MxN,...")
    b.add_argument("--zipper", default="256,512,1024", help="zipper-only N list")
    b.add_argument("--retention", default="full,boundary")
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--out", help="CSV path (default stdout)")
    return p


_SOLVE_DEFAULTS = {"variant": "sharp", "retention": "full", "ray": False, "applicability": "error",
                   "quadrature": 1, "no_timestamp": False}


def _merge_config(args):
    opts = dict(_SOLVE_DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                extra = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(extra, dict):
            raise ConfigError("config file must hold a JSON object")
        extra = {k.replace("-", "_"): v for k, v in extra.items()}
        unknown = set(extra) - (set(vars(args)) - {"command", "config"})
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        opts.update(extra)
    opts.update({k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")})
    if not opts.get("mu"):
        raise ConfigError("--mu is required")
    if not opts.get("n"):
        raise ConfigError("--n is required")
    paths = [opts.get(k) for k in ("out", "csv", "svg", "state_dump") if opts.get(k)]
    if len(set(paths)) != len(paths):
        raise ConfigError("output paths must be distinct")
    return opts


def _cmd_solve(args, out):
    opts = _merge_config(args)
    try:
        field = parse_provider(opts["mu"])
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad --mu: {exc}") from exc
    N, M = int(opts["n"]), opts.get("m")
    if opts.get("ratio"):
        ratio = float(opts["ratio"])
        mesh = MeshConfig(N=N, M=int(M) if M else ring_count(N, ratio), ratio=ratio, kappa=field.sup_bound)
    else:
        mesh = MeshConfig.from_kappa(N, field.sup_bound, M=M, variant=opts["variant"])
    cfg = SolverConfig(
        mesh,
        retention=parse_retention(opts["retention"], bool(opts["ray"])),
        quadrature_order=int(opts["quadrature"]),
        applicability=opts["applicability"],
        bound_variant=opts["variant"],
        keep_maps=False,
    )
    result = solve(cfg, field, state_dump=opts.get("state_dump"))
    errors = oracle_errors(result, field)
    d = result.diagnostics
    summary = {"field": field.name, "N": mesh.N, "M": mesh.M, "ratio": mesh.ratio,
               "skew_count": d["skew_count"], "orientation_violations": d["orientation_violations"]}
    summary.update({f"error_{k}": v for k, v in errors.items()})
    if opts.get("out"):
        write_result_json(result, opts["out"], errors, timestamp=not opts["no_timestamp"])
    if opts.get("csv"):
        write_result_csv(result, opts["csv"])
    if opts.get("svg"):
        render_svg(result, opts["svg"], SvgOptions(rings=opts.get("svg_rings"), spokes=opts.get("svg_spokes")))
    print(json.dumps(summary, sort_keys=True), file=out)


def _write_or_print(text, path, out):
    if path:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
    else:
        out.write(text)


def _cmd_table1(args, out):
    rows = []
    for v in TABLE_VARIANTS[args.variant]:
        rows += table1_generate(variant=v)
    _write_or_print(table1_csv(rows), args.out, out)


def _cmd_example(args, out):
    kw = {k: v for k, v in (("N", args.n), ("M", args.m)) if v is not None}
    if args.name == "daripa":
        res = EXAMPLES["daripa"](which=args.which)
        info = {k: v for k, v in res.items() if k != "results"}
        info["exterior"] = exterior_check(res["results"][1], args.alpha)
    elif args.name == "exterior":
        res = EXAMPLES["daripa"](which=args.which, coarse=(32, 32), fine=(64, 64))
        info = exterior_check(res["results"][1], args.alpha)
    elif args.name == "constant":
        info = EXAMPLES["constant"](c=args.mu, **kw)
    else:
        info = EXAMPLES[args.name](**kw)
    print(json.dumps(info, sort_keys=True), file=out)


def _cmd_bench(args, out):
    zs = [int(x) for x in args.zipper.split(",") if x]
    rets = [r for r in args.retention.split(",") if r]
    for r in rets:
        if r not in ("full", "boundary"):
            raise ConfigError(f"unknown retention {r!r}")
    rows = _bench.bench(args.sizes, zs, rets, repeat=args.repeat)
    _write_or_print(_bench.bench_csv(rows), args.out, out)


COMMANDS = {"solve": _cmd_solve, "table1": _cmd_table1, "example": _cmd_example, "bench": _cmd_bench}


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, out)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except ConfigError as exc:
        print(f"qcdisk: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        if exc.stage == "precheck":
            print(f"qcdisk: error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"qcdisk: geometry error at ring {exc.ring}, stage {exc.stage}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (OutputError, RetentionError) as exc:
        print(f"qcdisk: output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except ValueError as exc:
        print(f"qcdisk: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
