"""
Command-line front end.

Every subcommand reads options from ``--config`` (TOML or JSON, keys named
like the long flags) and from flags, flags winning.  A JSON report goes to
stdout or ``--out``.  Exit codes: 0 ok, 1 numeric failure or invariant
violation, 2 usage error.

Map syntax: ``exp:<re>[,<im>]`` for ``e^z + a`` and
``cos:<a_re>,<a_im>,<b_re>,<b_im>`` for ``a e^z + b e^-z``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ._geometry import Window
from .errors import DreadlockError, PreconditionViolated, ResolutionCapExceeded
from .function_model import EntireMap
from .periodic_points import Classification, build_hyperbolic_set, scan_periodic
from .portrait import (
    Tolerances,
    compare_colanding,
    count_colanding,
    default_base,
    land_all,
    uniform_landing_check,
    verify_landing_theorem,
)
from .pullback import land, trace_ray
from .render import RenderSpec, render
from .report import dumps, landing_record, point_record, ray_record
from .symbolic import alphabet, parse_address, periodic_addresses


class UsageError(Exception):
    pass


DEFAULTS = {
    "map": None,
    "radius": None,
    "out": None,
    "threads": None,
    "address": None,
    "zeta": None,
    "tol": 1e-10,
    "n_max": 10_000,
    "slow_n_max": 1_000_000,
    "csv": None,
    "n_pull": 20,
    "samples": 8,
    "period": 1,
    "K": 3,
    "window": [-5.0, 5.0, -8.0, 8.0],
    "grid": [40, 40],
    "match_tol": 1e-7,
    "check_stability": False,
    "table": False,
    "eps": 1e-3,
    "n0_max": 60,
    "k": 1,
    "size": [400, 400],
    "max_iter": 60,
    "escape_radius": 50.0,
    "ray": None,
    "mark_period": None,
    "image": None,
    "svg": None,
}


def parse_map(text, radius=None):
    """Build an :class:`EntireMap` from the map mini-language."""
    try:
        kind, _, rest = text.partition(":")
        nums = [float(x) for x in rest.split(",")] if rest.strip() else []
    except ValueError as exc:
        raise UsageError(f"bad map spec {text!r}: {exc}") from None
    kind = kind.strip().lower()
    try:
        if kind == "exp" and len(nums) in (1, 2):
            a = complex(nums[0], nums[1] if len(nums) == 2 else 0.0)
            return EntireMap.exponential(a, disc_radius=radius)
        if kind == "cos" and len(nums) == 4:
            return EntireMap.cosine(complex(*nums[:2]), complex(*nums[2:]), disc_radius=radius)
    except PreconditionViolated as exc:
        raise UsageError(f"map {text!r} rejected: {exc}") from None
    raise UsageError(f"bad map spec {text!r}; use exp:<re>[,<im>] or cos:<a_re>,<a_im>,<b_re>,<b_im>")


def _parse_complex(text):
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad complex number {text!r}") from None


def load_config(path):
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    try:
        if p.suffix.lower() == ".json":
            data = json.loads(raw)
        else:
            data = tomllib.loads(raw.decode())
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a table/object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def build_parser():
    parser = argparse.ArgumentParser(prog="dreadlock", description="Dynamic rays of e^z+a and a e^z+b e^-z.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML or JSON file with option values")
        p.add_argument("--map", help='e.g. "exp:-2" or "cos:1,0,1,0"')
        p.add_argument("--radius", type=float, help="override the disc radius R")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--threads", type=int, help="worker threads (default: DREADLOCK_THREADS or CPU count)")
        return p

    def landing(p):
        p.add_argument("--zeta", help="base point in W0, e.g. 16 or 1e4+0j")
        p.add_argument("--tol", type=float)
        p.add_argument("--n-max", type=int)
        p.add_argument("--slow-n-max", type=int)

    p = common(sub.add_parser("land", help="land periodic addresses"))
    p.add_argument("--address", action="append", help='e.g. "(0)" or "[2] (1,-1)"; repeatable')
    p.add_argument("--csv", help="write the pullback orbit of the first address as CSV")
    landing(p)

    p = common(sub.add_parser("trace-ray", help="polyline approximation of a ray"))
    p.add_argument("--address")
    p.add_argument("--zeta")
    p.add_argument("--n-pull", type=int)
    p.add_argument("--samples", type=int, help="vertices per unit of potential")
    p.add_argument("--csv", help="also write t,re,im as CSV")

    def window_grid(p):
        p.add_argument("--window", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
        p.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"))

    p = common(sub.add_parser("scan-periodic", help="periodic points by Newton's method"))
    p.add_argument("--period", type=int)
    p.add_argument("--tol", type=float)
    window_grid(p)

    p = common(sub.add_parser("portrait", help="check the landing theorem over an alphabet"))
    p.add_argument("--period", type=int)
    p.add_argument("--K", type=int, help="alphabet bound |k| <= K")
    p.add_argument("--match-tol", type=float)
    p.add_argument("--table", action="store_true", default=None,
                   help="also print a human-readable table to stderr")
    p.add_argument("--check-stability", action="store_true", default=None,
                   help="rerun with K+1 and flag growing co-landing counts")
    window_grid(p)
    landing(p)

    p = common(sub.add_parser("hyperbolic", help="uniform landing on a repelling hyperbolic set"))
    p.add_argument("--period", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--k", type=int, help="iterate used for the expansion witness")
    p.add_argument("--eps", type=float)
    p.add_argument("--n0-max", type=int)
    p.add_argument("--match-tol", type=float)
    window_grid(p)
    landing(p)

    p = common(sub.add_parser("render", help="escape-time PPM with ray overlays"))
    p.add_argument("--window", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    p.add_argument("--size", type=int, nargs=2, metavar=("W", "H"))
    p.add_argument("--max-iter", type=int)
    p.add_argument("--escape-radius", type=float)
    p.add_argument("--ray", action="append", help="address of a ray to overlay; repeatable")
    p.add_argument("--n-pull", type=int)
    p.add_argument("--zeta")
    p.add_argument("--mark-period", type=int, help="mark periodic points of this period")
    p.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"))
    p.add_argument("--image", help="PPM output path")
    p.add_argument("--svg", help="SVG output path for the overlays")
    return parser


def resolve(args):
    """Merge defaults, config file and flags (in increasing priority)."""
    opts = dict(DEFAULTS)
    if args.config:
        opts.update(load_config(args.config))
    for key, value in vars(args).items():
        if value is not None:
            opts[key] = value
    for key in ("tol", "match_tol", "eps", "escape_radius"):
        if key in opts and opts[key] is not None and not float(opts[key]) > 0:
            raise UsageError(f"{key} must be positive")
    if opts.get("map") is None:
        raise UsageError("--map is required (flag or config)")
    return opts


def _window(opts):
    try:
        w = Window.from_sequence(opts["window"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad window: {exc}") from None
    if w.degenerate:
        raise UsageError("window is degenerate")
    return w


def _address(text):
    try:
        return parse_address(str(text))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _addresses(value):
    if value is None:
        raise UsageError("at least one address is required")
    if isinstance(value, str):
        value = [value]
    return [_address(a) for a in value]


def _zeta(m, opts, default=None):
    if opts.get("zeta") is None:
        return default_base(m) if default is None else default
    return _parse_complex(opts["zeta"])


def _tolerances(opts):
    return Tolerances(
        land_tol=float(opts["tol"]),
        match_tol=float(opts["match_tol"]),
        n_max=int(opts["n_max"]),
        slow_n_max=int(opts["slow_n_max"]),
    )


def _header(cmd, m):
    return {"command": cmd, "map": m.map_id, "disc_radius": m.disc_radius, "cut_angle": m.cut_angle}


# -- subcommands: each returns (report dict, ok flag) ------------------------


def cmd_land(m, opts):
    addrs = _addresses(opts["address"])
    zeta = _zeta(m, opts)
    records, ok = [], True
    for i, s in enumerate(addrs):
        rep = land(m, s, zeta, tol=float(opts["tol"]), n_max=int(opts["n_max"]),
                   slow_n_max=int(opts["slow_n_max"]), keep_orbit=(i == 0 and bool(opts["csv"])))
        if i == 0 and opts["csv"]:
            Path(opts["csv"]).write_text(rep.orbit.to_csv())
        records.append(landing_record(rep, m.family))
        ok &= rep.landed
    return {**_header("land", m), "zeta": zeta, "records": records}, ok


def cmd_trace_ray(m, opts):
    if opts["address"] is None:
        raise UsageError("--address is required")
    s = _address(opts["address"] if isinstance(opts["address"], str) else opts["address"][0])
    zeta = _zeta(m, opts, default=-1e4 * m.cut_direction)
    ray = trace_ray(m, s, zeta, int(opts["n_pull"]), int(opts["samples"]))
    if opts["csv"]:
        Path(opts["csv"]).write_text(ray.to_csv())
    return {**_header("trace-ray", m), "zeta": zeta, "n_pull": int(opts["n_pull"]),
            "ray": ray_record(ray, m.family)}, True


def cmd_scan(m, opts):
    window = _window(opts)
    scan = scan_periodic(m, int(opts["period"]), window, grid=tuple(opts["grid"]),
                         tol=float(opts["tol"]), workers=opts["threads"])
    return {
        **_header("scan-periodic", m),
        "period": int(opts["period"]),
        "window": window.as_list(),
        "grid": list(opts["grid"]),
        "seeds": scan.seeds,
        "failures": scan.failures,
        "outside": scan.outside,
        "other_period": scan.other_period,
        "points": [point_record(pt) for pt in scan],
    }, True


def cmd_portrait(m, opts):
    window = _window(opts)
    tol = _tolerances(opts)
    p, K = int(opts["period"]), int(opts["K"])
    rep = verify_landing_theorem(m, p, K, window, tol, zeta=_zeta(m, opts),
                                 grid=tuple(opts["grid"]), workers=opts["threads"])
    out = {**_header("portrait", m), **rep.to_dict(m.family)}
    if opts["table"]:
        opts["_stderr"].write(rep.table(m.family))
    out["counts"] = [{"point": z, "count": n} for z, n in count_colanding(rep).items()]
    ok = rep.ok
    if opts["check_stability"]:
        bigger = verify_landing_theorem(m, p, K + 1, window, tol, zeta=_zeta(m, opts),
                                        grid=tuple(opts["grid"]), workers=opts["threads"])
        grew = compare_colanding(rep, bigger, tol.match_tol)
        out["stability"] = {"K_next": K + 1, "grew": [{"point": z, "before": a, "after": b}
                                                      for z, a, b in grew]}
        ok &= not grew
    out["ok"] = ok
    return out, ok


def cmd_hyperbolic(m, opts):
    window = _window(opts)
    tol = _tolerances(opts)
    p, K = int(opts["period"]), int(opts["K"])
    scan = scan_periodic(m, p, window, grid=tuple(opts["grid"]), workers=opts["threads"])
    repelling = [pt for pt in scan if pt.classification is Classification.REPELLING]
    if not repelling:
        raise DreadlockError("no repelling points in the window")
    H = build_hyperbolic_set(m, repelling, k=int(opts["k"]))
    zeta = _zeta(m, opts)
    landings = land_all(m, periodic_addresses(p, alphabet(K, m.family)), zeta, tol, opts["threads"])
    hits = sorted(s for s, r in landings.items()
                  if r.landed and min(abs(r.landing_point - z) for z in H.points) <= tol.match_tol)
    u = uniform_landing_check(m, H, hits, zeta, eps=float(opts["eps"]), n0_max=int(opts["n0_max"]))
    return {
        **_header("hyperbolic", m),
        "period": p,
        "K": K,
        "k": H.k,
        "eta": H.eta,
        "points": H.points,
        "addresses": [s.format(m.family) for s in hits],
        "eps": u.eps,
        "n0": u.n0,
        "diagnostic": u.diagnostic,
    }, not u.failed


def cmd_render(m, opts):
    window = _window(opts)
    if not opts["image"]:
        raise UsageError("--image is required")
    overlays = []
    for text in opts["ray"] or []:
        zeta = _zeta(m, opts, default=-1e4 * m.cut_direction)
        overlays.append(trace_ray(m, _address(text), zeta, int(opts["n_pull"])))
    marks = []
    if opts["mark_period"]:
        marks = list(scan_periodic(m, int(opts["mark_period"]), window, grid=tuple(opts["grid"]),
                                   workers=opts["threads"]))
    w, h = (int(v) for v in opts["size"])
    try:
        spec = RenderSpec(window, w, h, int(opts["max_iter"]), float(opts["escape_radius"]),
                          overlays, marks)
    except ResolutionCapExceeded:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    render(m, spec, opts["image"], opts["svg"], workers=opts["threads"])
    return {
        **_header("render", m),
        "window": window.as_list(),
        "size": [w, h],
        "max_iter": spec.max_iter,
        "escape_radius": spec.escape_radius,
        "image": str(opts["image"]),
        "svg": None if opts["svg"] is None else str(opts["svg"]),
        "rays": [r.address.format(m.family) for r in overlays],
        "marks": [pt.point for pt in marks],
    }, True


COMMANDS = {
    "land": cmd_land,
    "trace-ray": cmd_trace_ray,
    "scan-periodic": cmd_scan,
    "portrait": cmd_portrait,
    "hyperbolic": cmd_hyperbolic,
    "render": cmd_render,
}


def _emit(text, path, stream):
    if path:
        Path(path).write_text(text)
    else:
        stream.write(text)


def run_command(argv=None, stdout=None, stderr=None):
    """Run the CLI; returns the exit code instead of exiting."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        opts = resolve(args)
        opts["_stderr"] = stderr
        m = parse_map(str(opts["map"]), opts["radius"])
        report, ok = COMMANDS[args.command](m, opts)
    except UsageError as exc:
        stderr.write(dumps({"error": "usage", "message": str(exc)}))
        return 2
    except (DreadlockError, ArithmeticError, ValueError, OSError) as exc:
        stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    _emit(dumps(report), opts["out"], stdout)
    return 0 if ok else 1


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
