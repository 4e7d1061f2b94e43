"""Command-line front end.

A run is described by one JSON document (``--config`` file, or stdin with
``--config -``); flags override its fields.  Output goes to stdout unless
``--out`` is given.  Exit status: 0 success, 2 configuration error,
3 numerical error.

Example
-------
::

    echo '{"design": {"points": [[0.54682, 0], [-0.54682, 0]]}, "theta": [1, 1]}' \\
        | imspekit converge --config - --ladder 16:1024
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from .convergence import ConvergenceSeries, doubling_ladder, extrapolate, local_slopes
from .design import Design, Hyperparameters
from .errors import ConfigError, ImspeError, NonConvergenceError
from .imspe import DEFAULT_LADDER, imspe, imspe_converged
from .optimizer import DEFAULT_PROBE_LADDER, DEFAULT_TWIN_DELTAS, FAMILY_PARAMS, minimize_family, scan_family
from .rmatrix import METHODS, DiskSpec, RectDomain

__all__ = ["SCHEMA_VERSION", "COMMANDS", "RunConfig", "parse_config", "run", "main"]

SCHEMA_VERSION = 1
COMMANDS = ("eval", "converge", "optimize", "scan")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

_KNOWN = {
    "schema_version", "command", "domain", "theta", "method", "n_int", "ladder", "design", "family",
    "bounds", "fixed", "scan", "tol", "twin_deltas", "probe_ladder", "precision", "output", "seed",
    "series", "workers", "start",
}


@dataclass
class RunConfig:
    command: str
    domain: object
    theta: tuple
    method: str = "C"
    n_int: Optional[int] = None
    ladder: tuple = DEFAULT_LADDER
    points: Optional[list] = None
    family: Optional[str] = None
    bounds: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)
    start: dict = field(default_factory=dict)
    scan_param: Optional[str] = None
    grid: Optional[list] = None
    tol: float = 1e-5
    twin_deltas: tuple = DEFAULT_TWIN_DELTAS
    probe_ladder: tuple = DEFAULT_PROBE_LADDER
    precision: Optional[int] = None
    output: str = "json"
    seed: int = 0
    series: Optional[list] = None
    workers: int = 1

    @property
    def hyper(self):
        return Hyperparameters(*self.theta)

    @property
    def disk(self):
        return isinstance(self.domain, DiskSpec)

    def to_dict(self):
        """Normalized, JSON-ready view used to echo the run in reports."""
        if self.disk:
            dom = {"type": "disk"}
        else:
            dom = {"type": "rectangle", "center2": self.domain.center2, "half_width": self.domain.half_width,
                   "half_height": self.domain.half_height}
        out = {
            "schema_version": SCHEMA_VERSION, "command": self.command, "domain": dom, "theta": list(self.theta),
            "method": self.method, "n_int": self.n_int, "ladder": list(self.ladder), "precision": self.precision,
            "output": self.output, "seed": self.seed,
        }
        if self.points is not None:
            out["design"] = {"points": [list(p) for p in self.points]}
        if self.family is not None:
            out["family"] = self.family
            out["fixed"] = dict(self.fixed)
        if self.command == "optimize":
            out.update(bounds={k: list(v) for k, v in self.bounds.items()}, tol=self.tol,
                       twin_deltas=list(self.twin_deltas), probe_ladder=list(self.probe_ladder))
            if self.start:
                out["start"] = dict(self.start)
        if self.command == "scan":
            out["scan"] = {"param": self.scan_param, "grid": list(self.grid)}
        if self.series is not None:
            out["series"] = [list(s) for s in self.series]
        return out


def _num(v, name, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", name)
    v = float(v)
    if not math.isfinite(v) or (positive and v <= 0):
        raise ConfigError(f"expected a {'positive ' if positive else ''}finite number, got {v!r}", name)
    return v


def _int(v, name, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        else:
            raise ConfigError(f"expected an integer, got {v!r}", name)
    if lo is not None and v < lo:
        raise ConfigError(f"must be at least {lo}, got {v}", name)
    return v


def _ladder(v, name):
    if isinstance(v, str):
        parts = v.split(":")
        if len(parts) != 2:
            raise ConfigError(f"expected 'lo:hi', got {v!r}", name)
        try:
            v = [int(p) for p in parts]
        except ValueError:
            raise ConfigError(f"expected integers in 'lo:hi', got {v!r}", name) from None
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(f"expected [lo, hi] or 'lo:hi', got {v!r}", name)
    lo, hi = _int(v[0], name, 2), _int(v[1], name, 2)
    try:
        rungs = doubling_ladder(lo, hi)
    except ValueError as exc:
        raise ConfigError(str(exc), name) from None
    if len(rungs) < 3:
        raise ConfigError(f"ladder {lo}:{hi} has fewer than 3 rungs", name)
    return (lo, hi)


def _params(v, name):
    if not isinstance(v, dict):
        raise ConfigError(f"expected an object of named numbers, got {v!r}", name)
    return {k: _num(x, f"{name}.{k}") for k, x in v.items()}


def _domain(v, method, n_int):
    if v is None or v == "disk" or (isinstance(v, dict) and v.get("type", "disk") == "disk"):
        if isinstance(v, dict) and set(v) - {"type"}:
            raise ConfigError(f"unknown disk fields {sorted(set(v) - {'type'})}", "domain")
        return DiskSpec(n_int or 256, method)
    if isinstance(v, dict) and v.get("type") == "rectangle":
        extra = set(v) - {"type", "center2", "half_width", "half_height"}
        if extra:
            raise ConfigError(f"unknown rectangle fields {sorted(extra)}", "domain")
        return RectDomain(
            _num(v.get("center2", 0.0), "domain.center2"),
            _num(v.get("half_width", 1.0), "domain.half_width", True),
            _num(v.get("half_height", 1.0), "domain.half_height", True),
        )
    raise ConfigError(f"expected 'disk' or a rectangle object, got {v!r}", "domain")


def parse_config(doc, overrides=None, env=None):
    """Validate a config document (already decoded JSON) into a :class:`RunConfig`.

    ``overrides`` holds flag values (``None`` means not given).  ``env`` is the
    environment consulted for ``IMSPEKIT_PRECISION``; precedence is flag, then
    environment, then the document.
    """
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    env = os.environ if env is None else env
    if not isinstance(doc, dict):
        raise ConfigError("the config must be a JSON object", "<root>")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown fields {sorted(unknown)}", "<root>")
    sv = doc.get("schema_version", SCHEMA_VERSION)
    if sv != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {sv!r}; this build reads {SCHEMA_VERSION}", "schema_version")
    d = dict(doc, **overrides)

    command = d.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"expected one of {COMMANDS}, got {command!r}", "command")
    method = d.get("method", "C")
    if method not in METHODS:
        raise ConfigError(f"expected one of {METHODS}, got {method!r}", "method")
    n_int = d.get("n_int")
    if n_int is not None:
        n_int = _int(n_int, "n_int", 2)
        if n_int % 2:
            raise ConfigError(f"must be even, got {n_int}", "n_int")

    theta = d.get("theta")
    if theta is None:
        raise ConfigError("missing (give [theta1, theta2] or a single number)", "theta")
    if not isinstance(theta, (list, tuple)):
        theta = [theta, theta]
    if len(theta) != 2:
        raise ConfigError(f"expected two rates, got {theta!r}", "theta")
    theta = tuple(_num(t, f"theta[{i}]", True) for i, t in enumerate(theta))
    if "theta1" in overrides:
        theta = (_num(overrides["theta1"], "theta1", True), theta[1])
    if "theta2" in overrides:
        theta = (theta[0], _num(overrides["theta2"], "theta2", True))

    precision = d.get("precision")
    if "precision" not in overrides and env.get("IMSPEKIT_PRECISION"):
        try:
            precision = int(env["IMSPEKIT_PRECISION"])
        except ValueError:
            raise ConfigError(f"not an integer: {env['IMSPEKIT_PRECISION']!r}", "IMSPEKIT_PRECISION") from None
    if precision is not None:
        precision = _int(precision, "precision", 20)

    output = d.get("output", "json")
    if output not in ("json", "csv"):
        raise ConfigError(f"expected 'json' or 'csv', got {output!r}", "output")

    cfg = RunConfig(
        command=command,
        domain=_domain(d.get("domain"), method, n_int),
        theta=theta,
        method=method,
        n_int=n_int,
        ladder=_ladder(d.get("ladder", list(DEFAULT_LADDER)), "ladder"),
        precision=precision,
        output=output,
        seed=_int(d.get("seed", 0), "seed"),
        workers=_int(d.get("workers", 1), "workers", 1),
    )

    design, family = d.get("design"), d.get("family")
    if command in ("eval", "converge"):
        if family is not None:
            raise ConfigError("families are for optimize/scan; eval and converge take explicit design points", "family")
        if d.get("series") is not None and command == "converge":
            cfg.series = _series(d["series"])
            return cfg
        if not isinstance(design, dict) or "points" not in design:
            raise ConfigError("missing; expected {\"points\": [[x1, x2], ...]}", "design")
        pts = design["points"]
        if not isinstance(pts, list) or not pts:
            raise ConfigError("a design needs at least one point", "design.points")
        cfg.points = []
        for i, p in enumerate(pts):
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise ConfigError(f"expected [x1, x2], got {p!r}", f"design.points[{i}]")
            q = (_num(p[0], f"design.points[{i}][0]"), _num(p[1], f"design.points[{i}][1]"))
            if not cfg.domain.contains(q):
                raise ConfigError(f"point {list(q)} lies outside the domain", f"design.points[{i}]")
            cfg.points.append(q)
        try:
            Design(cfg.points).check_distinct()
        except ImspeError as exc:
            raise ConfigError(str(exc), "design.points") from None
        return cfg

    if design is not None:
        raise ConfigError("explicit designs are for eval/converge; optimize and scan take a family", "design")
    if family not in FAMILY_PARAMS:
        raise ConfigError(f"expected one of {sorted(FAMILY_PARAMS)}, got {family!r}", "family")
    cfg.family = family
    names = FAMILY_PARAMS[family]
    cfg.fixed = _params(d.get("fixed", {}), "fixed")
    for k in cfg.fixed:
        if k not in names:
            raise ConfigError(f"{family} has no parameter {k!r}; expected {names}", f"fixed.{k}")

    if command == "optimize":
        raw = d.get("bounds")
        if not isinstance(raw, dict) or not raw:
            raise ConfigError("expected a nonempty object {name: [lo, hi]}", "bounds")
        for k, b in raw.items():
            if k not in names:
                raise ConfigError(f"{family} has no parameter {k!r}; expected {names}", f"bounds.{k}")
            if not isinstance(b, (list, tuple)) or len(b) != 2:
                raise ConfigError(f"expected [lo, hi], got {b!r}", f"bounds.{k}")
            lo, hi = _num(b[0], f"bounds.{k}[0]"), _num(b[1], f"bounds.{k}[1]")
            if not lo < hi:
                raise ConfigError(f"empty box [{lo}, {hi}]", f"bounds.{k}")
            cfg.bounds[k] = (lo, hi)
        cfg.start = _params(d.get("start", {}), "start")
        cfg.tol = _num(d.get("tol", 1e-5), "tol", True)
        td = d.get("twin_deltas", list(DEFAULT_TWIN_DELTAS))
        if not isinstance(td, list) or len(td) < 3:
            raise ConfigError("expected at least three separations", "twin_deltas")
        cfg.twin_deltas = tuple(_num(x, f"twin_deltas[{i}]", True) for i, x in enumerate(td))
        if any(b >= a for a, b in zip(cfg.twin_deltas, cfg.twin_deltas[1:])):
            raise ConfigError("separations must be strictly decreasing", "twin_deltas")
        cfg.probe_ladder = _ladder(d.get("probe_ladder", list(DEFAULT_PROBE_LADDER)), "probe_ladder")
        return cfg

    sc = d.get("scan")
    if not isinstance(sc, dict) or "param" not in sc:
        raise ConfigError("expected {\"param\": name, \"grid\": [...]} or {\"param\", \"start\", \"stop\", \"num\"}", "scan")
    if sc["param"] not in names:
        raise ConfigError(f"{family} has no parameter {sc['param']!r}; expected {names}", "scan.param")
    cfg.scan_param = sc["param"]
    if "grid" in sc:
        if not isinstance(sc["grid"], list):
            raise ConfigError("expected a list of numbers", "scan.grid")
        grid = [_num(x, f"scan.grid[{i}]") for i, x in enumerate(sc["grid"])]
    elif {"start", "stop", "num"} <= set(sc):
        grid = np.linspace(_num(sc["start"], "scan.start"), _num(sc["stop"], "scan.stop"),
                           _int(sc["num"], "scan.num", 0)).tolist()
    else:
        raise ConfigError("missing 'grid' (or 'start', 'stop', 'num')", "scan")
    if not grid:
        raise ConfigError("the scan grid is empty", "scan.grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("the scan grid must be strictly increasing", "scan.grid")
    cfg.grid = grid
    return cfg


def _series(v):
    if not isinstance(v, list):
        raise ConfigError("expected [[n_int, value], ...]", "series")
    out = []
    for i, s in enumerate(v):
        if not isinstance(s, (list, tuple)) or len(s) != 2:
            raise ConfigError(f"expected [n_int, value], got {s!r}", f"series[{i}]")
        out.append((_int(s[0], f"series[{i}][0]", 1), _num(s[1], f"series[{i}][1]")))
    try:
        ConvergenceSeries(out)
    except ValueError as exc:
        raise ConfigError(str(exc), "series") from None
    return out


# ---------------------------------------------------------------- formatting


def fmt_num(v, digits=None):
    """17 significant digits for floats; decimal string at ``digits`` for mp values."""
    if v is None:
        return None
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, digits or mpmath.mp.dps)
    v = float(v)
    if not math.isfinite(v):
        return repr(v)
    return f"{v:.17g}"


def _jnum(v, digits=None):
    """JSON value: a number for doubles, a string for extended precision."""
    if v is None:
        return None
    if isinstance(v, mpmath.mpf):
        return fmt_num(v, digits)
    v = float(v)
    return v if math.isfinite(v) else repr(v)


def _value_report(v):
    return {
        "value": _jnum(v.value, v.digits),
        "n_int": v.n_int_used,
        "method": v.method_used,
        "cond_estimate": _jnum(v.cond_estimate),
        "digits": v.digits,
    }


def _table_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if x is None else x for x in r])
    return buf.getvalue()


# ---------------------------------------------------------------- workflows


def run_eval(cfg):
    design = Design(cfg.points)
    v = imspe(design, cfg.hyper, cfg.domain, digits=cfg.precision)
    res = _value_report(v)
    report = {"result": res}
    csv_text = _table_csv(list(res), [[fmt_num(x) if isinstance(x, float) else x for x in res.values()]])
    return report, csv_text


def _converge_rows(pairs, limit, order, digits):
    slopes = local_slopes(ConvergenceSeries(pairs), limit, strict=False) if limit is not None else []
    rows = []
    for k, (n, v) in enumerate(pairs):
        rows.append({"n_int": n, "value": _jnum(v, digits), "local_slope": _jnum(slopes[k - 1]) if 0 < k <= len(slopes) else None})
    return rows


def run_converge(cfg):
    if cfg.series is not None:
        pairs = list(cfg.series)
        digits = None
    else:
        design = Design(cfg.points)
        if not cfg.disk:
            v = imspe(design, cfg.hyper, cfg.domain, digits=cfg.precision)
            report = {"table": [], "limit": _jnum(v.value, v.digits), "order": None, "residual": 0.0,
                      "note": "rectangle moments are exact; nothing to extrapolate"}
            return report, _table_csv(["kind", "n_int", "value", "slope"], [["limit", "", fmt_num(v.value, v.digits), ""]])
        pairs, digits = [], cfg.precision
        for n in doubling_ladder(*cfg.ladder):
            v = imspe(design, cfg.hyper, cfg.domain.with_n_int(n), digits=digits)
            digits = v.digits
            pairs.append((n, v.value))
        # a later rung may have escalated; redo earlier ones at the final precision
        if digits is not None:
            pairs = [(n, x if isinstance(x, mpmath.mpf) else
                      imspe(design, cfg.hyper, cfg.domain.with_n_int(n), digits=digits, escalate=False).value)
                     for n, x in pairs]
    try:
        est = extrapolate(ConvergenceSeries(pairs))
    except NonConvergenceError as exc:
        table = _converge_rows(pairs, None, None, digits)
        raise _PartialFailure(str(exc), {"table": table, "limit": None, "order": None, "error": str(exc)},
                              _converge_csv(table, None, None, digits)) from None
    table = _converge_rows(pairs, est.limit, est.order, digits)
    report = {
        "table": table,
        "limit": _jnum(est.limit, digits),
        "order": _jnum(est.order),
        "residual": _jnum(est.residual),
        "digits": digits,
    }
    return report, _converge_csv(table, est.limit, est.order, digits)


def _converge_csv(table, limit, order, digits):
    rows = [["sample", r["n_int"], _cell(r["value"]), _cell(r["local_slope"])] for r in table]
    if limit is not None:
        rows.append(["limit", "", fmt_num(limit, digits), fmt_num(order)])
    return _table_csv(["kind", "n_int", "value", "slope"], rows)


def _cell(x):
    if x is None:
        return ""
    return fmt_num(x) if isinstance(x, float) else x


def run_optimize(cfg):
    r = minimize_family(
        cfg.family, cfg.bounds, cfg.hyper, cfg.domain, cfg.tol, fixed=cfg.fixed, start=cfg.start or None,
        probe_ladder=cfg.probe_ladder, final_ladder=cfg.ladder, twin_deltas=cfg.twin_deltas, digits=cfg.precision,
    )
    digits = r.twin.precision_digits_used if r.twin is not None else (r.final.digits if r.final else None)
    report = {
        "family": r.kind,
        "best_params": {k: _jnum(v) for k, v in r.best_params.items()},
        "best_value": _jnum(r.best_value, digits),
        "probe_value": _jnum(r.probe_value),
        "final": _value_report(r.final) if r.final is not None else None,
        "evaluations": r.evaluations,
        "bracket": {k: [_jnum(a), _jnum(b)] for k, (a, b) in r.bracket.items()},
        "tolerance_achieved": _jnum(r.tolerance_achieved),
        "boundary": list(r.boundary),
        "notes": list(r.notes),
        "twin": None,
    }
    rows = [["param", k, fmt_num(v)] for k, v in r.best_params.items()]
    rows.append(["best_value", "", fmt_num(r.best_value, digits)])
    rows += [["boundary", b, ""] for b in r.boundary]
    if r.twin is not None:
        t = r.twin
        report["twin"] = {
            "rows": [{"delta": _jnum(d), "value": _jnum(v.value, v.digits), "n_int": v.n_int_used, "digits": v.digits}
                     for d, v in zip(t.delta_sequence, t.values)],
            "limit": _jnum(t.limit, t.precision_digits_used),
            "error": _jnum(t.error),
            "precision_digits_used": t.precision_digits_used,
        }
        rows += [["twin", fmt_num(d), fmt_num(v.value, v.digits)] for d, v in zip(t.delta_sequence, t.values)]
        rows.append(["twin_limit", "", fmt_num(t.limit, t.precision_digits_used)])
    return report, _table_csv(["kind", "name", "value"], rows)


def run_scan(cfg):
    s = scan_family(cfg.family, cfg.fixed, cfg.scan_param, cfg.grid, cfg.hyper, cfg.domain, ladder=cfg.ladder,
                    n_int=cfg.n_int, digits=cfg.precision, workers=cfg.workers)
    fixed_names = [k for k in FAMILY_PARAMS[cfg.family] if k != cfg.scan_param]
    header = ["family"] + fixed_names + ["x", "imspe", "n_int", "flag"]
    rows = []
    points = []
    for x, v, n, flag in zip(s.abscissa, s.values, s.n_int, s.flags):
        fixed_vals = [fmt_num(s.fixed[k]) for k in fixed_names]
        rows.append([cfg.family] + fixed_vals + [fmt_num(x), "" if math.isnan(v) else fmt_num(v), n, flag])
        points.append({"x": x, "imspe": None if math.isnan(v) else v, "n_int": n, "flag": flag})
    report = {
        "family": cfg.family,
        "param": cfg.scan_param,
        "fixed": {k: s.fixed[k] for k in fixed_names},
        "points": points,
    }
    return report, _table_csv(header, rows)


_RUNNERS = {"eval": run_eval, "converge": run_converge, "optimize": run_optimize, "scan": run_scan}


class _PartialFailure(Exception):
    def __init__(self, message, report, csv_text):
        super().__init__(message)
        self.report = report
        self.csv_text = csv_text


def render(cfg, report, csv_text):
    if cfg.output == "csv":
        return csv_text
    doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "config": cfg.to_dict(), **report}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def run(cfg):
    """Execute a validated config; returns ``(exit_code, text)``."""
    try:
        report, csv_text = _RUNNERS[cfg.command](cfg)
    except _PartialFailure as exc:
        return EXIT_NUMERIC, render(cfg, exc.report, exc.csv_text)
    return EXIT_OK, render(cfg, report, csv_text)


def build_parser():
    p = argparse.ArgumentParser(prog="imspekit", description="IMSPE of Gaussian-process designs on the disk and rectangles.")
    p.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="COMMAND", help="one of " + ", ".join(COMMANDS))
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config file, or '-' for stdin")
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--n-int", type=int, dest="n_int")
    p.add_argument("--ladder", help="doubling ladder as lo:hi, e.g. 16:1024")
    p.add_argument("--precision", type=int, help="decimal digits for extended precision")
    p.add_argument("--out", help="write here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), dest="output")
    return p


def _load(path, stdin):
    if path is None:
        return {}
    try:
        text = stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(str(exc), "--config") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", "--config") from None


def main(argv=None, stdin=None, stdout=None, stderr=None):
    stdin, stdout, stderr = stdin or sys.stdin, stdout or sys.stdout, stderr or sys.stderr
    args = build_parser().parse_args(argv)
    if args.command_pos and args.command and args.command_pos != args.command:
        print(f"imspekit: config error: command given twice ({args.command_pos} vs {args.command})", file=stderr)
        return EXIT_CONFIG
    try:
        doc = _load(args.config, stdin)
        overrides = {
            "command": args.command or args.command_pos,
            "theta1": args.theta1,
            "theta2": args.theta2,
            "method": args.method,
            "n_int": args.n_int,
            "ladder": args.ladder,
            "precision": args.precision,
            "output": args.output,
        }
        if isinstance(doc, dict) and doc.get("theta") is None and args.theta1 is not None and args.theta2 is not None:
            doc = dict(doc, theta=[args.theta1, args.theta2])
        cfg = parse_config(doc, overrides)
    except ConfigError as exc:
        print(f"imspekit: config error: {exc}", file=stderr)
        return EXIT_CONFIG
    try:
        code, text = run(cfg)
    except ImspeError as exc:
        print(f"imspekit: numerical error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if code:
        print("imspekit: numerical error: the series did not converge (partial table emitted)", file=stderr)
    return code


def main_exit():  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_exit()
