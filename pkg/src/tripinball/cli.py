"""Command-line frontend.

Subcommands: attractor, scan, manifolds, basins, verify.  Every run writes a
`<prefix>.meta.json` naming all parameters next to its data files.  Exit
codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

import argparse
import json
import sys

from . import __version__
from .attractor import (
    basin_raster,
    escape_time_raster,
    homoclinic_test,
    lambda_scan,
    sample_attractor,
    unstable_manifold,
)
from .output import (
    ParseError,
    write_meta,
    write_points_csv,
    write_scan_csv,
    write_segments_csv,
)
from .raster import GridSpec, basin_rgb, linear_scale, log_scale, occupancy, write_pgm, write_ppm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_grid(text):
    try:
        w, h = text.lower().split("x")
        w, h = int(w), int(h)
    except ValueError as exc:
        raise UsageError(f"bad --grid {text!r}; expected WxH") from exc
    if not (1 <= w <= 8192 and 1 <= h <= 8192):
        raise UsageError("grid dimensions must lie in 1..8192")
    return w, h


def _parse_range(text):
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad --lambda-range {text!r}; expected a:b:step") from exc
    if step <= 0 or a > b:
        raise UsageError("lambda range must satisfy a <= b with step > 0")
    out = []
    k = 0
    while True:
        lam = a + k * step
        if lam > b + 1e-12:
            break
        out.append(lam)
        k += 1
    if not out or not all(0.0 < lam < 1.0 for lam in out):
        raise UsageError("lambda values must lie in (0, 1)")
    return out


def _check_lambda(lam, allow_elastic=True):
    hi_ok = lam <= 1.0 if allow_elastic else lam < 1.0
    if not (0.0 < lam and hi_ok):
        raise UsageError(f"lambda must lie in (0, 1{']' if allow_elastic else ')'}, got {lam!r}")


def _build_parser():
    parser = _Parser(prog="tripinball", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tripinball {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_attr = sub.add_parser("attractor", help="sample the attractor; points CSV + hit raster")
    p_attr.add_argument("--lambda", dest="lam", type=float, required=True)
    p_attr.add_argument("--seed", type=int, default=0)
    p_attr.add_argument("--transient", type=int, default=10_000)
    p_attr.add_argument("--keep", type=int, default=100_000)
    p_attr.add_argument("--seeds", type=int, default=1)
    p_attr.add_argument("--grid", default="512x512")
    p_attr.add_argument("--out", default="pinball")

    p_scan = sub.add_parser("scan", help="structural observables over a lambda range")
    p_scan.add_argument("--lambda-range", dest="lam_range", required=True)
    p_scan.add_argument("--seed", type=int, default=0)
    p_scan.add_argument("--transient", type=int, default=10_000)
    p_scan.add_argument("--keep", type=int, default=100_000)
    p_scan.add_argument("--seeds", type=int, default=12)
    p_scan.add_argument("--grid", default="800x800")
    p_scan.add_argument("--escape-n", type=int, default=30)
    p_scan.add_argument("--generations", type=int, default=60)
    p_scan.add_argument("--out", default="pinball")

    p_man = sub.add_parser("manifolds", help="unstable manifold + escape-time raster")
    p_man.add_argument("--lambda", dest="lam", type=float, required=True)
    p_man.add_argument("--grid", default="800x800")
    p_man.add_argument("--escape-n", type=int, default=30)
    p_man.add_argument("--generations", type=int, default=60)
    p_man.add_argument("--out", default="pinball")

    p_bas = sub.add_parser("basins", help="basin-of-attraction pixmap")
    p_bas.add_argument("--lambda", dest="lam", type=float, required=True)
    p_bas.add_argument("--seed", type=int, default=0)
    p_bas.add_argument("--grid", default="512x512")
    p_bas.add_argument("--horizon", type=int, default=4000)
    p_bas.add_argument("--out", default="pinball")

    p_ver = sub.add_parser("verify", help="run acceptance checks / validate a points CSV")
    p_ver.add_argument("--checks", default=None, help="comma-separated check names (default: all)")
    p_ver.add_argument("--points", default=None, help="attractor CSV to validate")
    p_ver.add_argument("--lambda", dest="lam", type=float, default=None)
    p_ver.add_argument("--out", default="pinball")

    return parser


def _meta_base(args, command):
    meta = {"command": command, "version": __version__}
    for key, value in sorted(vars(args).items()):
        if key == "command":
            continue
        meta[key] = value
    return meta


def _cmd_attractor(args):
    _check_lambda(args.lam, allow_elastic=False)
    if args.keep < 1 or args.transient < 0 or args.seeds < 1:
        raise UsageError("counts must be positive")
    w, h = _parse_grid(args.grid)
    grid = GridSpec.phase_space(w, h)
    hits = None
    restarts = []
    for k in range(args.seeds):
        smp = sample_attractor(
            args.lam, args.seed, args.transient, args.keep, base_stream=k
        )
        restarts.append(smp.restarts)
        occ = occupancy(grid, smp.s, smp.theta)
        hits = occ.data if hits is None else hits + occ.data
        suffix = f".seed{k}" if args.seeds > 1 else ""
        write_points_csv(f"{args.out}{suffix}.points.csv", smp.s, smp.theta)
    write_pgm(f"{args.out}.hits.pgm", log_scale(hits))
    meta = _meta_base(args, "attractor")
    meta["restarts"] = restarts
    write_meta(f"{args.out}.meta.json", meta)
    return EXIT_OK


def _cmd_scan(args):
    lams = _parse_range(args.lam_range)
    w, h = _parse_grid(args.grid)
    rows = lambda_scan(
        lams,
        seed=args.seed,
        n_keep=args.keep,
        n_transient=args.transient,
        n_seeds=args.seeds,
        escape_n=args.escape_n,
        grid=GridSpec.side0_positive(w, h),
        generations=args.generations,
    )
    write_scan_csv(f"{args.out}.scan.csv", rows)
    meta = _meta_base(args, "scan")
    meta["lambdas"] = lams
    write_meta(f"{args.out}.meta.json", meta)
    return EXIT_OK


def _cmd_manifolds(args):
    _check_lambda(args.lam, allow_elastic=False)
    w, h = _parse_grid(args.grid)
    grid = GridSpec.side0_positive(w, h)
    curve = unstable_manifold(args.lam, generations=args.generations)
    raster = escape_time_raster(args.lam, grid, n=args.escape_n)
    verdict = homoclinic_test(
        args.lam, n=args.escape_n, grid=grid, generations=args.generations
    )
    write_segments_csv(f"{args.out}.unstable.csv", curve.segments)
    write_pgm(f"{args.out}.escape.pgm", linear_scale(raster.data, args.escape_n))
    meta = _meta_base(args, "manifolds")
    meta["homoclinic"] = verdict.found
    meta["segments"] = len(curve)
    write_meta(f"{args.out}.meta.json", meta)
    return EXIT_OK


def _cmd_basins(args):
    _check_lambda(args.lam, allow_elastic=False)
    if args.horizon < 1:
        raise UsageError("horizon must be >= 1")
    w, h = _parse_grid(args.grid)
    grid = GridSpec.phase_space(w, h)
    try:
        ids, analysis = basin_raster(args.lam, grid, horizon=args.horizon, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_ppm(f"{args.out}.basins.ppm", basin_rgb(ids.data))
    meta = _meta_base(args, "basins")
    meta["components"] = analysis.count
    meta["basin_fractions"] = [
        float((ids.data == k).mean()) for k in range(1, analysis.count + 1)
    ]
    write_meta(f"{args.out}.meta.json", meta)
    return EXIT_OK


def _cmd_verify(args):
    from .verify import CHECKS, check_points_file, run_checks

    results = []
    if args.points is not None:
        if args.lam is None:
            raise UsageError("--points needs --lambda")
        _check_lambda(args.lam)
        results.append(check_points_file(args.points, args.lam))
    else:
        names = None
        if args.checks:
            names = [n.strip() for n in args.checks.split(",") if n.strip()]
            unknown = [n for n in names if n not in CHECKS]
            if unknown:
                raise UsageError(
                    f"unknown checks: {', '.join(unknown)}; known: {', '.join(CHECKS)}"
                )
        results = run_checks(names)

    for res in results:
        print(res.line())
    payload = {
        "version": __version__,
        "passed": all(r.passed for r in results),
        "checks": [
            {"name": r.name, "passed": r.passed, "seconds": round(r.seconds, 3), **r.details}
            for r in results
        ],
    }
    with open(f"{args.out}.verify.json", "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return EXIT_OK if payload["passed"] else EXIT_VERIFY


_COMMANDS = {
    "attractor": _cmd_attractor,
    "scan": _cmd_scan,
    "manifolds": _cmd_manifolds,
    "basins": _cmd_basins,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
