"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 computation error.  All
results are computed before anything is written, so a failing run leaves
the output directory untouched.
"""

from __future__ import annotations

import argparse
import io
import os
import sys

import numpy as np

from . import __version__
from .config import assemble, dumps, fmt_float, parse_bool, parse_float, parse_level, parse_list, read_config_file
from .equilibria import all_equilibria, equilibrium_radii, triangular_points_closed, triangular_points_series
from .errors import ChermnykhError, ConfigError
from .integrate import DEFAULT_ATOL, DEFAULT_RTOL, integrate_orbit
from .linearize import (
    BeltSetup,
    coefficients_exact,
    coefficients_series,
    critical_mass_numeric,
    critical_mass_surface,
    quartic_coefficients,
    series_audit,
    stability_analysis,
    stability_atlas,
)
from .model import PhaseState, effective_potential
from .normalform import build_transform, printed_scalars
from .zvc import critical_levels, write_contours_csv, zvc_contours

COMMANDS = ("equilibria", "stability", "zvc", "orbit", "normalform")


def _header(p):
    return {"version": __version__, "params": p.as_dict()}


def _flatten(obj, prefix=""):
    """Nested dict/list -> [(dotted.path, scalar)] for the CSV variant of summaries."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _summary(doc, name, fmt):
    """(filename, text) for a summary document in the requested format."""
    from .config import _plain

    if fmt == "json":
        return f"{name}.json", dumps(doc)
    buf = io.StringIO()
    buf.write("key,value\n")
    for key, value in _flatten(_plain(doc)):
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = fmt_float(value)
        elif value is None:
            value = ""
        buf.write(f"{key},{value}\n")
    return f"{name}.csv", buf.getvalue()


def _params_comment(p):
    return "".join(f"# {k}={fmt_float(v) if isinstance(v, float) else v}\n" for k, v in p.as_dict().items())


# ---------------------------------------------------------------- commands


def cmd_equilibria(cfg, p):
    levels = critical_levels(p)
    points = []
    closed = {}
    closed_error = None
    try:
        closed = {pt.label: pt for pt in triangular_points_closed(p)}
    except ChermnykhError as exc:
        closed_error = f"{type(exc).__name__}: {exc}"
    series = triangular_points_series(p)
    for pt in all_equilibria(p):
        entry = {"label": pt.label, "refined": {"x": pt.x, "y": pt.y, "residual": pt.residual}}
        if pt.label in ("L4", "L5"):
            sign = 1.0 if pt.label == "L4" else -1.0
            if pt.label in closed:
                c = closed[pt.label]
                entry["closed_form"] = {"x": c.x, "y": c.y, "residual": c.residual}
            else:
                entry["closed_form"] = {"error": closed_error}
            entry["series"] = {"x": series.x, "y": sign * series.y}
        entry["C"] = levels[pt.label]
        points.append(entry)
    radii = equilibrium_radii(p)
    doc = _header(p)
    doc["radii_printed"] = {"r1": radii.r1, "r2": radii.r2}
    doc["series_offsets"] = {"a": series.a, "b": series.b}
    doc["points"] = points
    return [_summary(doc, "equilibria", cfg.format)]


def _sweep_axis(block, key, default):
    return parse_list(block[key], f"stability.{key}") if key in block else [default]


def _atlas_csv(rows, p):
    buf = io.StringIO()
    buf.write(_params_comment(p))
    buf.write("mu,A2,Mb,q1,E,F,G,D,omega1,omega2,verdict,error\n")
    for r in rows:
        vals = [r.mu, r.A2, r.Mb, r.q1, r.E, r.F, r.G, r.D, r.omega1, r.omega2]
        cells = ["" if v is None else fmt_float(v) for v in vals]
        buf.write(",".join(cells + [r.verdict, r.error.replace(",", ";")]) + "\n")
    return buf.getvalue()


def _surface_csv(rows, p):
    buf = io.StringIO()
    buf.write(_params_comment(p))
    buf.write("q1,A2,Mb,mu_crit,error\n")
    for r in rows:
        mc = "" if r.mu_crit is None else fmt_float(r.mu_crit)
        buf.write(f"{fmt_float(r.q1)},{fmt_float(r.A2)},{fmt_float(r.Mb)},{mc},{r.error.replace(',', ';')}\n")
    return buf.getvalue()


def _boundaries(rows):
    """First stable->unstable switch along mu for each (A2, Mb, q1) line of the atlas."""
    lines = {}
    for r in rows:
        lines.setdefault((r.A2, r.Mb, r.q1), []).append(r)
    out = []
    for (A2, Mb, q1), line in lines.items():
        line.sort(key=lambda r: r.mu)
        edge = None
        for a, b in zip(line, line[1:]):
            if a.verdict == "stable" and b.verdict != "stable":
                edge = [a.mu, b.mu]
                break
        out.append({"A2": A2, "Mb": Mb, "q1": q1, "mu_bracket": edge})
    return out


def cmd_stability(cfg, p):
    block = cfg.stability
    tol = parse_float(block.get("tol", 1e-9), "stability.tol")
    setup = BeltSetup(p.belt.flatness_a, p.belt.core_b, p.rc if p.rc_overridden else None)
    mus = _sweep_axis(block, "mus", p.mu)
    A2s = _sweep_axis(block, "A2s", p.A2)
    Mbs = _sweep_axis(block, "Mbs", p.Mb)
    q1s = _sweep_axis(block, "q1s", p.q1)
    surface = parse_bool(block.get("surface", "false"), "stability.surface")

    doc = _header(p)
    c = coefficients_exact(p)
    s = coefficients_series(p)
    r = stability_analysis(c)
    b, q = quartic_coefficients(c)
    doc["point"] = {
        "coefficients_exact": {"E": c.E, "F": c.F, "G": c.G},
        "coefficients_series": {"E": s.E, "F": s.F, "G": s.G},
        "quartic": {"b": b, "q": q},
        "D": r.D,
        "omega1": r.omega1,
        "omega2": r.omega2,
        "verdict": "stable" if r.stable else "unstable",
        "detail": r.verdict_detail,
    }
    try:
        doc["mu_crit"] = critical_mass_numeric(p, tol=tol)
    except ChermnykhError as exc:
        doc["mu_crit"] = None
        doc["mu_crit_error"] = f"{type(exc).__name__}: {exc}"
    doc["series_audit"] = series_audit(p)

    rows = stability_atlas(mus, A2s, Mbs, q1s, setup, workers=cfg.threads)
    doc["sweep"] = {"mus": mus, "A2s": A2s, "Mbs": Mbs, "q1s": q1s, "nodes": len(rows)}
    doc["sweep"]["stable_nodes"] = sum(1 for row in rows if row.verdict == "stable")
    doc["sweep"]["boundaries"] = _boundaries(rows)
    files = [_summary(doc, "stability", cfg.format), ("atlas.csv", _atlas_csv(rows, p))]
    if surface:
        sq = parse_list(block.get("surface_q1s", "1,0.75,0.5,0.25"), "stability.surface_q1s")
        sa = parse_list(block.get("surface_A2s", "0:1:21"), "stability.surface_A2s")
        sm = parse_list(block.get("surface_Mbs", "0:2:21"), "stability.surface_Mbs")
        srows = critical_mass_surface(sq, sa, sm, setup, workers=cfg.threads, tol=tol)
        files.append(("mu_crit_surface.csv", _surface_csv(srows, p)))
    return files


def _zvc_levels(block, p):
    tokens = [t for t in block.get("levels", "L1,L2,L3,L4").split(",") if t.strip()]
    parsed = [parse_level(t) for t in tokens]
    crit = None
    out = []
    for tok, lv in zip(tokens, parsed):
        if isinstance(lv, tuple):
            if crit is None:
                crit = critical_levels(p)
            if lv[0] not in crit:
                raise ChermnykhError(f"level {tok.strip()}: {lv[0]} does not exist for these parameters")
            out.append((tok.strip(), crit[lv[0]] + lv[1]))
        else:
            out.append((tok.strip(), lv))
    return out


def _zvc_grid(block):
    bounds = parse_list(block.get("bounds", "-1.5,1.5,-1.5,1.5"), "zvc.bounds")
    if len(bounds) != 4 or bounds[0] >= bounds[1] or bounds[2] >= bounds[3]:
        raise ConfigError("zvc.bounds must be xmin,xmax,ymin,ymax with min < max")
    try:
        res = int(block.get("resolution", 256))
    except ValueError:
        raise ConfigError("zvc.resolution must be an integer") from None
    if res < 16:
        raise ConfigError("zvc.resolution must be at least 16")
    return bounds, res


def cmd_zvc(cfg, p):
    bounds, res = _zvc_grid(cfg.zvc)
    files = []
    for k, (token, level) in enumerate(_zvc_levels(cfg.zvc, p)):
        cs = zvc_contours(level, bounds, res, p)
        meta = dict(p.as_dict())
        meta.update(
            {
                "token": token,
                "bounds": ",".join(fmt_float(b) for b in bounds),
                "resolution": res,
                "polylines": len(cs),
                "closed": sum(cs.closed_flags),
            }
        )
        meta = {key: fmt_float(v) if isinstance(v, float) else v for key, v in meta.items()}
        buf = io.StringIO()
        write_contours_csv(cs, buf, meta)
        files.append((f"zvc_{k:02d}.csv", buf.getvalue()))
    return files


def _orbit_start(block, p):
    start = block.get("start", "L4").strip()
    vals = {k: parse_float(block.get(k, 0.0), f"orbit.{k}") for k in ("x", "y", "vx", "vy")}
    if start == "absolute":
        return PhaseState(vals["x"], vals["y"], vals["vx"], vals["vy"])
    if start not in ("L1", "L2", "L3", "L4", "L5"):
        raise ConfigError("orbit.start must be L1..L5 or absolute")
    base = {pt.label: pt for pt in all_equilibria(p)}
    if start not in base:
        raise ChermnykhError(f"{start} does not exist for these parameters")
    pt = base[start]
    return PhaseState(pt.x + vals["x"], pt.y + vals["y"], vals["vx"], vals["vy"])


def cmd_orbit(cfg, p):
    block = cfg.orbit
    t_end = parse_float(block.get("t_end", 100.0), "orbit.t_end")
    if t_end <= 0:
        raise ConfigError("orbit.t_end must be positive")
    stride = parse_float(block.get("stride", 0.1), "orbit.stride")
    if stride <= 0:
        raise ConfigError("orbit.stride must be positive")
    rtol = parse_float(block.get("rel_tol", DEFAULT_RTOL), "orbit.rel_tol")
    atol = parse_float(block.get("abs_tol", DEFAULT_ATOL), "orbit.abs_tol")
    for name, tol in (("rel_tol", rtol), ("abs_tol", atol)):
        if not 1e-14 <= tol <= 1e-3:
            raise ConfigError(f"orbit.{name} must lie in [1e-14, 1e-3]")
    s0 = _orbit_start(block, p)
    traj = integrate_orbit(s0, t_end, p, rel_tol=rtol, abs_tol=atol, stride=stride)
    buf = io.StringIO()
    buf.write(_params_comment(p))
    buf.write(f"# jacobi_drift={fmt_float(traj.jacobi_drift)}\n")
    buf.write(f"# accepted={traj.accepted}\n# rejected={traj.rejected}\n")
    buf.write("t,x,y,vx,vy,C\n")
    for t, s, C in zip(traj.t, traj.states, traj.jacobi):
        buf.write(",".join(fmt_float(v) for v in (t, *s, C)) + "\n")
    return [("orbit.csv", buf.getvalue())]


def cmd_normalform(cfg, p):
    c = coefficients_exact(p)
    r = stability_analysis(c)
    tr = build_transform(c, r)
    scal = printed_scalars(c, r)
    doc = _header(p)
    doc["coefficients"] = {"E": c.E, "F": c.F, "G": c.G, "n": c.n}
    doc["omega1"], doc["omega2"] = tr.omega1, tr.omega2
    doc["J"] = tr.J
    doc["residual_canonical"] = tr.residual_canonical
    doc["residual_diagonal"] = tr.residual_diagonal
    doc["residual_normality"] = list(tr.residual_normality)
    doc["column_scales"] = list(tr.column_scales)
    doc["K"] = [complex(k) for k in tr.eigen.K]
    doc["nullspace_residual"] = tr.eigen.nullspace_residual
    doc["printed_scalars"] = {
        f"mode{j}": {k: (complex(v) if isinstance(v, (complex, np.complexfloating)) else v) for k, v in d.items()}
        for j, d in scal.items()
    }
    return [_summary(doc, "normalform", cfg.format)]


_DISPATCH = {
    "equilibria": cmd_equilibria,
    "stability": cmd_stability,
    "zvc": cmd_zvc,
    "orbit": cmd_orbit,
    "normalform": cmd_normalform,
}


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="INI configuration file")
    shared.add_argument("--out", help="output directory")
    shared.add_argument("--mu", type=float)
    rad = shared.add_mutually_exclusive_group()
    rad.add_argument("--q1", type=float, help="mass reduction factor of the radiating primary")
    rad.add_argument("--epsilon", type=float, help="1 - q1")
    shared.add_argument("--a2", dest="A2", type=float, help="oblateness coefficient")
    shared.add_argument("--mb", dest="Mb", type=float, help="belt mass")
    shared.add_argument("--flatness", dest="flatness_a", type=float)
    shared.add_argument("--core", dest="core_b", type=float)
    shared.add_argument("--rc", dest="rc_override", type=float, help="fix rc instead of deriving it")
    shared.add_argument("--threads", type=int, help="worker processes for sweeps (default: all cores)")
    shared.add_argument("--format", choices=("json", "csv"), help="summary file format")

    parser = argparse.ArgumentParser(prog="chermnykh", description="Perturbed restricted three-body toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[shared])
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        sections = read_config_file(args.config) if args.config else {}
        cfg = assemble(sections, overrides)
        p = cfg.model.build()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        files = _DISPATCH[args.command](cfg, p)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ChermnykhError, ArithmeticError, ValueError) as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    os.makedirs(cfg.out, exist_ok=True)
    for name, text in files:
        with open(os.path.join(cfg.out, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))
