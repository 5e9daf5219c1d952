"""Command-line front end: ``chamber-bessel {eval,verify,simulate,calibrate,table}``.

Exit codes: 0 success, 1 a verification or comparison check failed,
2 usage error, 3 domain error, 4 runtime abort.

Settings come from flags, then from an INI file given by ``--config``
(section ``[defaults]`` plus one section per command, keys named like the
long flags), then from built-in defaults.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import os
import sys
import time
from pathlib import Path

import numpy as np

from ._jsonio import dumps
from .errors import ChamberBesselError, DomainError, SimulationAborted

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_DOMAIN, EXIT_ABORT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument types


def vector(text: str) -> list[float]:
    try:
        vals = [float(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"expected finite comma-separated numbers, got {text!r}")
    return vals


def finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _root_args(p):
    p.add_argument("--kind", choices=["A", "B", "D"], default="A", help="root system type")
    p.add_argument("--m", type=positive_int, default=None, help="rank (default: length of the points)")
    p.add_argument("--k1", type=finite, default=1.0, help="multiplicity on +-e_i+-e_j")
    p.add_argument("--k0", type=finite, default=0.0, help="multiplicity on +-e_i (type B)")


def _policy_args(p):
    p.add_argument("--max-weight", type=positive_int, default=30, help="series truncation weight")
    p.add_argument("--tail-ratio", type=finite, default=0.5)
    p.add_argument("--abs-floor", type=finite, default=1e-14)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chamber-bessel", description=__doc__.split("\n")[0])
    parser.add_argument("--config", type=Path, help="INI file with [defaults] and per-command sections")
    parser.add_argument("--cache-dir", help="Jack/calibration cache directory (empty string disables)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate a Bessel function, density, series or Grabiner kernel")
    p.add_argument("target", choices=["bessel", "density", "series", "grabiner"])
    _root_args(p)
    p.add_argument("--x", type=vector)
    p.add_argument("--y", type=vector)
    p.add_argument("--t", type=finite, default=1.0, help="time (density, grabiner)")
    p.add_argument("--family", choices=["0F0", "0F1"], default="0F0", help="series family")
    p.add_argument("--b", type=finite, default=None, help="lower parameter of 0F1")
    p.add_argument("--alpha", type=finite, default=None, help="Jack parameter (series; default 1/k1)")
    p.add_argument("--d-constant", choices=["verified", "printed"], default="verified")
    _policy_args(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run identity and oracle checks")
    p.add_argument("suite", choices=["jack", "detrep", "theorem1", "shift", "symmetrize", "normalization",
                                     "chapman", "montecarlo", "all"])
    p.add_argument("--json", type=Path, default=None, help="write the summary here")
    p.add_argument("--printed-constant", action="store_true", help="shift suite: use C = 2^m")
    p.add_argument("--tabulated-eigenvalue", action="store_true",
                   help="jack suite: test against the tabulated eigenvalue formula")
    p.add_argument("--paths", type=positive_int, default=100_000, help="montecarlo suite paths")
    p.add_argument("--seed", type=int, default=7, help="montecarlo suite seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="simulate the radial process and report moments")
    _root_args(p)
    p.add_argument("--y0", type=vector)
    p.add_argument("--t", type=finite, default=1.0)
    p.add_argument("--dt", type=finite, default=1e-3)
    p.add_argument("--paths", type=positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shrink", type=finite, default=0.5, help="step shrink factor near walls")
    p.add_argument("--max-retries", type=positive_int, default=20)
    p.add_argument("--wall-eps", type=finite, default=1e-6)
    p.add_argument("--backend", choices=["cython", "python"], default=None)
    p.add_argument("--out", type=Path, default=Path("ensemble"), help="output prefix for .csv and .json")
    p.add_argument("--compare", action="store_true", help="compare moments with quadrature at 3 sigma")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="compute and store constants")
    p.add_argument("target", choices=["detrep", "normalization", "jack"])
    _root_args(p)
    p.add_argument("--family", choices=["F00", "F01"], default="F00")
    p.add_argument("--phi", type=finite, default=None)
    p.add_argument("--alpha", type=finite, default=1.0)
    p.add_argument("--max-weight", type=positive_int, default=30)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("table", help="emit plot-ready tables")
    p.add_argument("target", choices=["jack", "bessel", "density"])
    _root_args(p)
    p.add_argument("--alpha", type=finite, default=1.0)
    p.add_argument("--weight", type=int, default=4)
    p.add_argument("--x", type=vector)
    p.add_argument("--y", type=vector, help="segment start")
    p.add_argument("--y-end", type=vector, help="segment end")
    p.add_argument("--n", type=positive_int, default=21)
    p.add_argument("--t", type=finite, default=1.0)
    _policy_args(p)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.set_defaults(func=cmd_table)
    return parser


def _subparsers(parser) -> dict:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return dict(action.choices)
    return {}


def apply_config(parser, path: Path):
    """Push INI values into subparser defaults; argparse converts them like flags."""
    cfg = configparser.ConfigParser()
    try:
        if not cfg.read(path):
            raise UsageError(f"cannot read config file {path}")
    except configparser.Error as exc:
        raise UsageError(f"bad config file {path}: {exc}") from None
    subs = _subparsers(parser)
    for name, sp in subs.items():
        dests = {a.dest for a in sp._actions}
        values = {}
        for section in ("defaults", name):
            if cfg.has_section(section):
                for key, val in cfg.items(section):
                    dest = key.replace("-", "_")
                    if dest in dests and dest not in ("target", "suite"):
                        values[dest] = val
                    elif section == name:
                        raise UsageError(f"config [{section}]: unknown key {key!r}")
        for dest, val in values.items():
            action = next(a for a in sp._actions if a.dest == dest)
            if isinstance(action, argparse._StoreTrueAction):
                values[dest] = cfg.BOOLEAN_STATES.get(val.lower())
                if values[dest] is None:
                    raise UsageError(f"config key {dest}: expected a boolean, got {val!r}")
        sp.set_defaults(**values)
    unknown = set(cfg.sections()) - set(subs) - {"defaults"}
    if unknown:
        raise UsageError(f"config: unknown sections {sorted(unknown)}")


# ---------------------------------------------------------------------------
# helpers


def _effective(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "config"):
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"{args.command}: --{n.replace('_', '-')} is required")


def _rank(args, *vectors) -> int:
    lens = {len(v) for v in vectors if v is not None}
    if len(lens) > 1:
        raise UsageError(f"points have different dimensions: {sorted(lens)}")
    m = lens.pop() if lens else None
    if args.m is not None and m is not None and args.m != m:
        raise UsageError(f"--m {args.m} does not match point dimension {m}")
    m = args.m or m
    if m is None:
        raise UsageError("cannot infer the rank: give --m or points")
    return m


def _rs_mult(args, m: int):
    from .rootsys import Multiplicity, build_root_system
    return build_root_system(args.kind, m), Multiplicity(args.k1, args.k0)


def _policy(args):
    from .hyperseries import TruncationPolicy
    return TruncationPolicy(args.max_weight, args.tail_ratio, args.abs_floor)


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    _require(args, "x", "y")
    m = _rank(args, args.x, args.y)
    x, y = np.array(args.x), np.array(args.y)
    layers, converged = 0, True
    if args.target == "bessel":
        from .bessel import BesselSpec, generalized_bessel
        rs, mult = _rs_mult(args, m)
        r = generalized_bessel(BesselSpec(rs, mult), x, y, _policy(args), args.d_constant)
        value, layers, converged = r.value, r.layers_used, r.converged
    elif args.target == "density":
        from .kernels import DensityQuery, density
        rs, mult = _rs_mult(args, m)
        value = density(DensityQuery(rs, mult, args.t, x, y), policy=_policy(args))
    elif args.target == "grabiner":
        from .kernels import grabiner_A, grabiner_B, grabiner_D
        value = {"A": grabiner_A, "B": grabiner_B, "D": grabiner_D}[args.kind](args.t, x, y)
    else:
        from .hyperseries import mv_series
        alpha = args.alpha if args.alpha is not None else 1.0 / args.k1
        if args.family == "0F1":
            _require(args, "b")
        q = (args.b,) if args.family == "0F1" else ()
        r = mv_series((), q, alpha, x, y, _policy(args))
        value, layers, converged = r.value, r.layers_used, r.converged
    record = {"command": f"eval {args.target}", "config": _effective(args), "value": float(value),
              "layers_used": int(layers), "converged": bool(converged)}
    if args.format == "json":
        _emit(dumps(record))
    else:
        _emit(_csv(["value", "layers_used", "converged"], [[float(value), int(layers), str(bool(converged)).lower()]]))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run_suite
    opts = {"printed_constant": args.printed_constant, "tabulated_eigenvalue": args.tabulated_eigenvalue,
            "paths": args.paths, "seed": args.seed}
    t0 = time.perf_counter()
    checks = run_suite(args.suite, opts)
    for c in checks:
        _emit(c.line())
    failed = sum(not c.passed for c in checks)
    _emit(f"{args.suite}: {len(checks) - failed}/{len(checks)} checks passed in {time.perf_counter() - t0:.1f}s")
    if args.json is not None:
        doc = {"suite": args.suite, "config": _effective(args), "passed": failed == 0,
               "checks": [c.as_dict() for c in checks]}
        args.json.write_text(dumps(doc) + "\n")
    return EXIT_OK if failed == 0 else EXIT_CHECK


def cmd_simulate(args) -> int:
    from .simulate import (SdeConfig, analytic_moments, compare_moments, moment_report, report_json,
                           simulate)
    _require(args, "y0")
    m = _rank(args, args.y0)
    rs, mult = _rs_mult(args, m)
    cfg = SdeConfig(rs, mult, tuple(args.y0), args.t, args.dt, args.paths, args.seed, args.shrink,
                    args.max_retries, wall_eps=args.wall_eps)
    ens = simulate(cfg, args.backend)
    est = moment_report(ens)
    extra = {"command": "simulate", "cli": _effective(args)}
    status = EXIT_OK
    if args.compare:
        rows = compare_moments(est, analytic_moments(rs, mult, args.t, cfg.y0))
        extra["comparison"] = rows
        for r in rows:
            tag = "PASS" if r["pass"] else "FAIL"
            _emit(f"{tag}  {r['function']:<10s} mc={r['estimate']:.6g} +- {r['std_error']:.2g}  "
                  f"quadrature={r['reference']:.6g}  z={r['z']:+.2f}")
        status = EXIT_OK if all(r["pass"] for r in rows) else EXIT_CHECK
    csv_path = args.out.with_suffix(".csv")
    json_path = args.out.with_suffix(".json")
    csv_path.write_text(ens.to_csv())
    json_path.write_text(report_json(ens, est, extra) + "\n")
    for e in est:
        _emit(f"{e.function:<10s} {e.estimate:.10g} +- {e.std_error:.3g}")
    _emit(f"wrote {csv_path} and {json_path}")
    return status


def cmd_calibrate(args) -> int:
    record = {"command": f"calibrate {args.target}", "config": _effective(args)}
    if args.target == "detrep":
        from .detrep import calibrate, kappa_closed_form
        _require(args, "m")
        phi = args.phi if args.family == "F01" else None
        const = calibrate(args.family, args.m, phi, max_weight=args.max_weight)
        record.update(kappa=const.kappa, spread=const.spread, closed_form=kappa_closed_form(args.m, phi))
    elif args.target == "normalization":
        from .kernels import normalization_c
        _require(args, "m")
        rs, mult = _rs_mult(args, args.m)
        nc = normalization_c(rs, mult)
        record.update(c_k=nc.c_k, estimate_error=nc.estimate_error, probe_residuals=list(nc.probe_residuals))
    else:
        from .jack import cache_dir, get_table
        _require(args, "m")
        table = get_table(args.alpha, args.m, args.max_weight)
        d = cache_dir()
        record.update(max_weight=table.max_weight, cache_dir=None if d is None else str(d))
    _emit(dumps(record))
    return EXIT_OK


def cmd_table(args) -> int:
    if args.target == "jack":
        from .jack import weight_expansions
        _require(args, "m")
        rows = []
        for tau, e in weight_expansions(args.weight, args.alpha, args.m).items():
            for mu, c in e.coeffs.items():
                rows.append([" ".join(map(str, tau)), " ".join(map(str, mu)), float(c)])
        header = ["tau", "mu", "coefficient"]
    else:
        _require(args, "x", "y", "y_end")
        m = _rank(args, args.x, args.y, args.y_end)
        rs, mult = _rs_mult(args, m)
        s = np.linspace(0.0, 1.0, args.n)
        Y = np.array(args.y)[None, :] * (1 - s[:, None]) + np.array(args.y_end)[None, :] * s[:, None]
        x = np.array(args.x)
        if args.target == "bessel":
            from .bessel import BesselSpec, generalized_bessel
            vals = generalized_bessel(BesselSpec(rs, mult), np.broadcast_to(x, Y.shape), Y, _policy(args)).value
        else:
            from .kernels import DensityQuery, density, normalization_c
            c = normalization_c(rs, mult, policy=_policy(args)).c_k
            vals = [density(DensityQuery(rs, mult, args.t, x, yy), policy=_policy(args), c_k=c) for yy in Y]
        rows = [[float(si)] + [float(v) for v in yy] + [float(v)] for si, yy, v in zip(s, Y, vals)]
        header = ["s"] + [f"y{j + 1}" for j in range(m)] + [args.target]
    if args.format == "csv":
        _emit(_csv(header, rows))
    else:
        _emit(dumps({"command": f"table {args.target}", "config": _effective(args), "columns": header,
                     "rows": rows}))
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg_path = _config_path(argv)
        if cfg_path is not None:
            apply_config(parser, cfg_path)
        args = parser.parse_args(argv)
        if args.cache_dir is not None:
            os.environ["CHAMBER_BESSEL_CACHE"] = args.cache_dir
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SimulationAborted as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except ChamberBesselError as exc:
        print(f"aborted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT


def _config_path(argv) -> Path | None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    ns, _ = pre.parse_known_args(argv)
    return ns.config


if __name__ == "__main__":
    sys.exit(main())
