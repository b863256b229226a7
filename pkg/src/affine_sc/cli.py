"""Command line entry point: ``affine-sc {sweep,verify-geometry,cluster,plot}``.

Exit status is 0 on success, 2 for configuration errors and 3 for I/O errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ParseError, SubspaceClusteringError
from .experiments import (
    SweepConfig,
    SweepResult,
    emit_plot,
    run_dataset_cluster,
    run_geometry_verification,
    run_synthetic_sweep,
)
from .solvers import METHODS

EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger("affine_sc")


class ConfigError(Exception):
    pass


def _load_config(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith((".yaml", ".yml")):
        import yaml
        values = yaml.safe_load(text) or {}
    else:
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: expected a mapping of SweepConfig fields")
    return values


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default 1)")
    p.add_argument("--out", default=None, help="output file or directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affine-sc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="synthetic sweep over the ambient dimension")
    _common(p)
    p.add_argument("--config", help="JSON or YAML file with SweepConfig fields")
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--D-min", type=int)
    p.add_argument("--D-max", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--methods", help=f"comma separated subset of {','.join(METHODS)}")
    p.add_argument("--mode", choices=["exact", "noisy"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--plot", action="store_true", help="also write spr.svg and acc.svg")

    p = sub.add_parser("verify-geometry", help="statistical checks of the geometric results")
    _common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dims", default="4,4,4,4,4", help="comma separated subspace dimensions")
    p.add_argument("--ambient", default=None, help="comma separated ambient dimensions")
    p.add_argument("--mixed", type=int, default=1000, help="random mixed-shape arrangements")

    p = sub.add_parser("cluster", help="cluster the rows of a CSV file")
    _common(p)
    p.add_argument("data", help="CSV file, one point per row, optional trailing 'label'")
    p.add_argument("--method", choices=METHODS, default="A-SSC")
    p.add_argument("--n", type=int, default=None, help="cluster count (default: label count)")
    p.add_argument("--mode", choices=["exact", "noisy"], default="noisy")
    p.add_argument("--alpha", type=float, default=50.0)
    p.add_argument("--lam", type=float, default=100.0)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--rho", type=float, default=1.0, help="ADMM penalty for noisy SSC")
    p.add_argument("--center", action="store_true", help="subtract the mean point")
    p.add_argument("--normalize", action="store_true", help="scale points to unit norm")

    p = sub.add_parser("plot", help="SVG of a sweep metric against D")
    _common(p)
    p.add_argument("input", help="raw.csv or aggregate.csv from a sweep")
    p.add_argument("--metric", choices=["spr", "acc"], default="spr")
    return parser


def _sweep(args):
    values = _load_config(args.config) if args.config else {}
    flags = {"d": args.d, "n": args.n, "N": args.N, "trials": args.trials, "mode": args.mode,
             "alpha": args.alpha, "lam": args.lam, "max_iters": args.max_iters,
             "master_seed": args.seed, "threads": args.threads, "output": args.out}
    values.update({k: v for k, v in flags.items() if v is not None})
    if args.methods:
        values["methods"] = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if args.D_min is not None or args.D_max is not None:
        lo, hi = values.get("D_range", (5, 30))
        values["D_range"] = (args.D_min if args.D_min is not None else lo,
                             args.D_max if args.D_max is not None else hi)
    values.setdefault("output", "sweep_out")
    cfg = SweepConfig.from_mapping(values)
    result = run_synthetic_sweep(cfg)
    for a in result.aggregate():
        print(f"{a['method']:6s} D={a['D']:3d}  SPR={a['mean_spr']:.4f}  ACC={a['mean_acc']:.4f}")
    if args.plot:
        for metric in ("spr", "acc"):
            emit_plot(result, metric, Path(cfg.output) / f"{metric}.svg")
    print(f"wrote {cfg.output}")


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _verify(args):
    try:
        dims = _ints(args.dims)
        ambient = _ints(args.ambient) if args.ambient else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    report = run_geometry_verification(args.trials, dims, ambient, seed=args.seed or 0,
                                       mixed=args.mixed)
    for row in report.rows:
        print(f"D={row['D']:3d}  affinely independent {row['affinely_independent']}/{args.trials}"
              f"  independent & origin-free {row['independent_and_origin_free']}/{args.trials}")
    print(f"mixed arrangements: {report.mixed}")
    print("violations: none" if report.ok else f"violations: {report.violations}")
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
    return 0 if report.ok else 1


def _cluster(args):
    summary = run_dataset_cluster(args.data, args.method, args.n, args.seed or 0,
                                  mode=args.mode, alpha=args.alpha, lam=args.lam,
                                  center=args.center, normalize=args.normalize,
                                  max_iters=args.max_iters, rho=args.rho, out_dir=args.out)
    summary.pop("labels")
    print(json.dumps(summary, indent=2, sort_keys=True))


def _plot(args):
    result = SweepResult.read(args.input)
    out = args.out or f"{args.metric}.svg"
    print(f"wrote {emit_plot(result, args.metric, out)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    handler = {"sweep": _sweep, "verify-geometry": _verify, "cluster": _cluster,
               "plot": _plot}[args.command]
    try:
        return handler(args) or 0
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, SubspaceClusteringError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
