"""Command-line front end: transform tables, heat slices, audits and the identity suite.

Exit codes: 0 success, 2 warnings (flagged points, truncation), 1 errors,
64 usage errors, 65 parameter violations.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .audit import audit
from .checks import THRESHOLDS, poisson_table, run_checks
from .errors import KnFourierError, ParamError, TruncationWarning
from .functions import DeformedGaussian, parse_function
from .heat import HeatFlow, gaussian_solution, heat_residual
from .kernel import kernel_b, make_params
from .quadrature import QuadSpec
from .transform import forward

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARN = 2
EXIT_USAGE = 64
EXIT_PARAMS = 65
SCHEMA_VERSION = "1"

DEFAULTS = {
    "k": "1.0",
    "n": "1",
    "tol": None,
    "radius": None,
    "out": "-",
    "format": "csv",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(f"{path}:{num}: expected key = value")
        out[key] = value.strip()
    return out


def parse_grid(text, name="grid"):
    """``lo:hi:num`` (inclusive, evenly spaced) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, num = text.split(":")
            num = int(num)
            if num < 0:
                raise ValueError
            pts = np.linspace(float(lo), float(hi), num)
        elif text:
            pts = np.array([float(v) for v in text.split(",")])
        else:
            pts = np.empty(0)
    except ValueError:
        raise UsageError(f"malformed {name} {text!r}") from None
    if pts.size == 0:
        raise UsageError(f"empty {name}")
    if not np.all(np.isfinite(pts)):
        raise UsageError(f"non-finite value in {name}")
    return pts


def _given(value, default):
    return default if value is None else value


def _float(value, name):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"--{name} expects a number, got {value!r}") from None
    if not math.isfinite(out):
        raise UsageError(f"--{name} must be finite")
    return out


def _resolve(args):
    """Merge flags over the config file over the built-in defaults."""
    cfg = read_config(args.config) if args.config else {}
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.pop(key, default))
        else:
            cfg.pop(key, None)
    # command options may also come from the file
    for key, value in cfg.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if args.format not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {args.format!r}")
    n = _float(args.n, "n")
    if n != int(n):
        raise ParamError(f"n must be a positive integer, got {args.n}")
    params = make_params(_float(args.k, "k"), int(n))
    kw = {}
    if args.tol is not None:
        tol = _float(args.tol, "tol")
        if tol <= 0:
            raise ParamError("--tol must be positive")
        kw["rel_tol"] = tol
    if args.radius is not None:
        radius = _float(args.radius, "radius")
        if radius <= 0:
            raise ParamError("--radius must be positive")
        kw["truncation_radius"] = radius
    return params, QuadSpec(**kw)


def _config_dict(params, spec):
    return {
        "k": params.k,
        "n": params.n,
        "rel_tol": spec.rel_tol,
        "abs_tol": spec.abs_tol,
        "radius": spec.truncation_radius,
    }


def _num(v):
    """Finite floats pass through; infinities become strings so the JSON stays valid."""
    if isinstance(v, float) and math.isinf(v):
        return "infinite" if v > 0 else "-infinite"
    return v


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return _num(obj)


def dump_json(payload):
    return json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n"


def _cell(v):
    # shortest round-trip decimal for floats; integers and strings as-is
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def dump_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(args, text):
    if args.out in ("-", ""):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _function(spec_text, params):
    if not spec_text:
        raise UsageError("missing function spec")
    try:
        return parse_function(spec_text, params)
    except ParamError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_transform(args, params, spec):
    f = _function(args.fn, params)
    lams = parse_grid(_given(args.lambdas, "-5:5:21"), "lambda grid")
    res = forward(params, f, lams, spec)
    vals = res.grid.values
    if args.format == "csv":
        rows = [(lam, v.real, v.imag, e) for lam, v, e in zip(res.grid.points, vals, res.errors)]
        text = dump_csv(["lambda", "re_F", "im_F", "err_est"], rows)
    else:
        text = dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "transform",
                "config": _config_dict(params, spec),
                "function": f.name,
                "lambda": res.grid.points.tolist(),
                "re_F": vals.real.tolist(),
                "im_F": vals.imag.tolist(),
                "err_est": res.errors.tolist(),
                "flagged": res.flagged.tolist(),
            }
        )
    _emit(args, text)
    return EXIT_WARN if np.any(res.flagged) else EXIT_OK


def _heat_report(params, spec, flow, u0, times, xs):
    """Residual order, semigroup defect and (for Gaussians) closed-form defect."""
    t_probe = [t for t in times if t > 0] or [0.5]
    x_probe = [x for x in xs if abs(x) >= 0.05][:4] or [0.7]
    probes = [(t, x) for t in t_probe[:2] for x in x_probe]
    r1 = heat_residual(params, flow, probes, 1e-2, 1e-2)
    r2 = heat_residual(params, flow, probes, 5e-3, 5e-3)
    order = math.log2(r1 / r2) if r1 > 0 and r2 > 0 else None
    t1 = t_probe[0]
    direct = flow.state(2 * t1, xs).values
    nested = HeatFlow(params, flow.at(t1), spec).state(t1, xs).values
    report = {
        "residual": {"h": [1e-2, 5e-3], "value": [r1, r2], "order": order},
        "semigroup": {"t1": t1, "t2": t1, "defect": float(np.max(np.abs(nested - direct)))},
    }
    if isinstance(u0, DeformedGaussian):
        worst = 0.0
        for t in times:
            exact = u0.amplitude * gaussian_solution(params, u0.rate, t, xs)
            worst = max(worst, float(np.max(np.abs(flow.state(t, xs).values - exact))))
        report["closed_form"] = {"defect": worst}
    return report


def cmd_heat(args, params, spec):
    u0 = _function(args.u0, params)
    times = parse_grid(_given(args.times, "0,0.5,1"), "time list")
    if np.any(times < 0):
        raise UsageError("negative time")
    xs = np.unique(parse_grid(_given(args.xs, "-3:3:13"), "x grid"))
    flow = HeatFlow(params, u0, spec)
    flagged = False
    slices = []
    for t in times:
        st = flow.state(float(t), xs)
        flagged |= bool(np.any(st.errors > flow.spectrum0.tolerance(st.values)))
        slices.append(st)
    if args.report:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "heat",
            "config": _config_dict(params, spec),
            "u0": u0.name,
            "times": times.tolist(),
            "report": _heat_report(params, spec, flow, u0, [float(t) for t in times], xs),
        }
        _emit(args, dump_json(payload))
    elif args.format == "csv":
        rows = [(st.time, x, v.real, v.imag) for st in slices for x, v in zip(st.grid.points, st.values)]
        _emit(args, dump_csv(["t", "x", "re_u", "im_u"], rows))
    else:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "heat",
            "config": _config_dict(params, spec),
            "u0": u0.name,
            "slices": [
                {"t": st.time, "x": st.grid.points.tolist(), "re_u": st.values.real.tolist(), "im_u": st.values.imag.tolist()}
                for st in slices
            ],
        }
        _emit(args, dump_json(payload))
    return EXIT_WARN if flagged else EXIT_OK


def cmd_audit(args, params, spec):
    f = _function(args.fn, params)
    against = None
    if args.against:
        try:
            against = tuple(float(v) for v in args.against.split(","))
        except ValueError:
            raise UsageError(f"malformed --against {args.against!r}") from None
        if len(against) != 2:
            raise UsageError("--against expects a,b")
    report = audit(params, f, spec, against=against, miyachi=not args.no_functionals, cowling_price=not args.no_functionals)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "audit",
        "config": _config_dict(params, spec),
        "function": f.name,
    }
    payload.update(report.to_dict())
    _emit(args, dump_json(payload))
    if report.verdict is None:
        return EXIT_ERROR
    return EXIT_WARN if report.errors else EXIT_OK


def cmd_check(args, params, spec):
    results = run_checks(params, spec)
    warned = any(r.warnings for r in results)
    failed = any(r.passed is False for r in results)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "check",
        "config": _config_dict(params, spec),
        "checks": [r.to_dict() for r in results],
        "passed": not failed,
    }
    _emit(args, dump_json(payload))
    # truncation explains failures at a loosened radius, so it takes precedence
    if warned:
        return EXIT_WARN
    return EXIT_ERROR if failed else EXIT_OK


def cmd_kernel_table(args, params, spec):
    xs = parse_grid(_given(args.xs, "-3:3:7"), "x grid")
    lams = parse_grid(_given(args.lambdas, "-3:3:7"), "lambda grid")
    X, L = np.meshgrid(xs, lams, indexing="ij")
    kv = kernel_b(params, X, L)
    val, even, odd = (np.asarray(v, dtype=complex).ravel() for v in (kv.value, kv.even_part, kv.odd_part))
    x, lam = X.ravel(), L.ravel()
    if args.format == "csv":
        rows = zip(x, lam, val.real, val.imag, even.real, odd.real, odd.imag)
        text = dump_csv(["x", "lambda", "re_B", "im_B", "re_even", "re_odd", "im_odd"], rows)
    else:
        text = dump_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "kernel-table",
                "config": _config_dict(params, spec),
                "x": x.tolist(),
                "lambda": lam.tolist(),
                "re_B": val.real.tolist(),
                "im_B": val.imag.tolist(),
                "re_even": even.real.tolist(),
                "re_odd": odd.real.tolist(),
                "im_odd": odd.imag.tolist(),
            }
        )
    _emit(args, text)
    return EXIT_OK


def cmd_specfun_check(args, params, spec):
    rows = poisson_table()
    worst = max(r[-1] for r in rows)
    passed = worst <= THRESHOLDS["poisson"]
    header = ["alpha", "degree", "x", "series", "oracle", "abs_err"]
    if args.format == "csv":
        text = dump_csv(header, rows)
    else:
        cols = list(zip(*rows))
        payload = {"schema_version": SCHEMA_VERSION, "command": "specfun-check"}
        payload.update({h: list(c) for h, c in zip(header, cols)})
        payload.update({"max_abs_err": worst, "threshold": THRESHOLDS["poisson"], "passed": passed})
        text = dump_json(payload)
    _emit(args, text)
    return EXIT_OK if passed else EXIT_ERROR


COMMANDS = {
    "transform": cmd_transform,
    "heat": cmd_heat,
    "audit": cmd_audit,
    "check": cmd_check,
    "kernel-table": cmd_kernel_table,
    "specfun-check": cmd_specfun_check,
}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--k", help="deformation parameter k (default 1.0)")
    common.add_argument("--n", help="positive integer n (default 1)")
    common.add_argument("--tol", help="relative quadrature tolerance")
    common.add_argument("--radius", help="truncation radius in the substituted variable")
    common.add_argument("--out", help="output path, '-' for stdout")
    common.add_argument("--format", help="csv or json (default csv)")
    common.add_argument("--config", help="flat key = value file; flags override it")

    parser = _Parser(prog="knfourier", description="(k, 2/n)-generalized Fourier transform on the line")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("transform", parents=[common], help="table of F f on a lambda grid")
    p.add_argument("--fn", help="function spec, e.g. gaussian:0.5")
    p.add_argument("--lambdas", help="lo:hi:num or comma list (default -5:5:21)")

    p = sub.add_parser("heat", parents=[common], help="heat slices u(t, x)")
    p.add_argument("--u0", help="initial datum spec")
    p.add_argument("--times", help="comma list or lo:hi:num (default 0,0.5,1)")
    p.add_argument("--xs", help="x grid (default -3:3:13)")
    p.add_argument("--report", action="store_true", help="emit the residual/semigroup JSON report")

    p = sub.add_parser("audit", parents=[common], help="decay-envelope audit (JSON)")
    p.add_argument("--fn", help="function spec")
    p.add_argument("--against", help="a,b pair to check the decay conditions for")
    p.add_argument("--no-functionals", action="store_true", help="skip the Miyachi and Cowling-Price functionals")

    sub.add_parser("check", parents=[common], help="identity suite (JSON)")

    p = sub.add_parser("kernel-table", parents=[common], help="kernel values on an x-lambda grid")
    p.add_argument("--xs", help="x grid (default -3:3:7)")
    p.add_argument("--lambdas", help="lambda grid (default -3:3:7)")

    sub.add_parser("specfun-check", parents=[common], help="Poisson-integral oracles vs the Bessel evaluator")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        if args.command in ("check", "audit"):
            args.format = args.format or "json"
        for name in ("fn", "u0", "lambdas", "times", "xs", "against", "report", "no_functionals"):
            if not hasattr(args, name):
                setattr(args, name, None)
        params, spec = _resolve(args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            return COMMANDS[args.command](args, params, spec)
    except UsageError as exc:
        print(f"knfourier: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParamError as exc:
        print(f"knfourier: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except KnFourierError as exc:
        print(f"knfourier: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
