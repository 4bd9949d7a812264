"""Command-line front end.

Subcommands::

    eval     values at points for one or all methods
    verify   identity and Harnack checks; exit 1 if any fails
    profile  values along a ray x = t e, t in [0, t_max]
    sweep-s  fractional value against the classical one as s -> 1

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 violated hypothesis of the representation formulas.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .datum import DSL_FORMS, direction, parse_datum
from .geometry import DomainError
from .kernels import KernelParams
from .quadrature import HypothesisError, QuadratureSpec
from .solvers import applicable_methods, s_limit_sweep, solve
from .verify import run_all

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_HYPOTHESIS = 0, 1, 2, 3
METHOD_CHOICES = ("direct", "malmheden", "malmheden_homog", "schwarz", "superposition", "all")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: int = 2
    s: float = 0.5
    datum: str = "const:1"
    points: list = field(default_factory=list)
    ray: str | None = None
    method: str = "all"
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    out: str | None = None
    format: str = "json"
    seed: int = 0
    strict: bool = False
    s_grid: list = field(default_factory=lambda: [0.5, 0.7, 0.9, 0.99])

    def to_dict(self):
        d = asdict(self)
        d["quadrature"] = self.quadrature.to_dict()
        return d

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if isinstance(data.get("quadrature"), dict):
            data["quadrature"] = QuadratureSpec.from_dict(data["quadrature"])
        return cls(**data)


def _fmt(v):
    return format(float(v), ".17g")


def _parse_point(text, n):
    try:
        coords = [float(t) for t in text.split(",")]
    except ValueError:
        raise ConfigError(f"invalid point {text!r}; expected comma-separated numbers") from None
    if len(coords) != n:
        raise ConfigError(f"point {text!r} has {len(coords)} coordinates, expected n = {n}")
    return coords


def _parse_ray(text, n):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"invalid ray {text!r}; expected e:t_max:steps")
    try:
        dir_parts = [float(p) for p in parts[0].split(",")]
        e = direction(dir_parts[0] if len(dir_parts) == 1 else dir_parts, n)
        t_max, steps = float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"invalid ray {text!r}: {exc}") from None
    if steps < 1:
        raise ConfigError("ray needs at least one step")
    return e, t_max, steps


def build_parser():
    parser = argparse.ArgumentParser(prog="sharmonic", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="dimension (default 2)")
    common.add_argument("--s", type=float, default=None, help="fractional order in (0, 1)")
    common.add_argument("--datum", default=None, help="datum DSL: " + ", ".join(DSL_FORMS))
    common.add_argument("--point", action="append", default=None, help="a,b[,c]; repeatable")
    common.add_argument("--method", choices=METHOD_CHOICES, default=None)
    common.add_argument("--spec", default=None, help="JSON file with quadrature settings")
    common.add_argument("--config", default=None, help="JSON file with run settings")
    common.add_argument("--sphere-level", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--strict", action="store_true", default=None)
    sub.add_parser("eval", parents=[common], help="evaluate the solution at points")
    sub.add_parser("verify", parents=[common], help="run all identity checks")
    prof = sub.add_parser("profile", parents=[common], help="values along a ray")
    prof.add_argument("--ray", default=None, help="e:t_max:steps, e an angle or components")
    sweep = sub.add_parser("sweep-s", aliases=["sweep_s"], parents=[common], help="s -> 1 sweep")
    sweep.add_argument("--s-grid", default=None, help="comma-separated orders")
    return parser


def resolve_config(args):
    """Defaults, then the JSON config file, then explicit flags."""
    command = "sweep-s" if args.command == "sweep_s" else args.command
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        data.pop("command", None)
    quad = data.pop("quadrature", {})
    if args.spec:
        try:
            with open(args.spec) as fh:
                quad = {**quad, **json.load(fh)}
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read spec {args.spec}: {exc}") from None
    if args.sphere_level is not None:
        quad["sphere_level"] = args.sphere_level
    for name in ("n", "s", "datum", "method", "out", "format", "seed", "strict"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    cfg = RunConfig.from_dict({"command": command, **data, "quadrature": quad})
    n = cfg.n
    if args.point is not None:
        cfg.points = [_parse_point(p, n) for p in args.point]
    if getattr(args, "ray", None) is not None:
        cfg.ray = args.ray
    if getattr(args, "s_grid", None) is not None:
        try:
            cfg.s_grid = [float(t) for t in args.s_grid.split(",")]
        except ValueError:
            raise ConfigError(f"invalid --s-grid {args.s_grid!r}") from None
    if n < 2:
        raise ConfigError(f"dimension must be >= 2, got {n}")
    if not 0.0 < cfg.s < 1.0:
        raise ConfigError(f"fractional order must lie in (0, 1), got s = {cfg.s}")
    return cfg


def _methods(cfg):
    if cfg.method == "all":
        return applicable_methods(cfg.n)
    if cfg.method == "schwarz" and cfg.n != 2:
        raise ConfigError("the schwarz method needs n = 2")
    return [cfg.method]


def _emit(cfg, records, columns):
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_fmt(rec[c]) if isinstance(rec[c], float) else rec[c] for c in columns])
        text = buf.getvalue()
    else:
        # the output path is left out so identical runs give identical bytes anywhere
        echo = {k: v for k, v in cfg.to_dict().items() if k != "out"}
        text = json.dumps({"config": echo, "records": records}, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_eval(cfg):
    f = parse_datum(cfg.datum, cfg.n, cfg.s)
    params = KernelParams(cfg.n, cfg.s)
    methods = _methods(cfg)
    points = cfg.points or [[0.0] * cfg.n]
    records = []
    for p in points:
        for m in methods:
            res = solve(f, np.asarray(p, dtype=float), params, cfg.quadrature, m)
            rec = {f"x{i + 1}": float(v) for i, v in enumerate(p)}
            rec.update(
                method=m,
                route=res.method,
                value=res.value,
                error_estimate=res.error_estimate,
                nodes_used=res.nodes_used,
            )
            records.append(rec)
    cols = [f"x{i + 1}" for i in range(cfg.n)] + ["method", "route", "value", "error_estimate", "nodes_used"]
    _emit(cfg, records, cols)
    return EXIT_OK


def cmd_verify(cfg, explicit_ns=False):
    n_values = (cfg.n,) if explicit_ns else (2, 3)
    s_values = (cfg.s,) if explicit_ns else (0.25, 0.5, 0.75)
    reports = run_all(n_values, s_values, cfg.quadrature)
    ok = all(r.passed for r in reports)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max error {r.max_abs_error:.3e} (tol {r.tolerance:.1e})", file=sys.stderr)
    payload = {"pass": ok, "checks": [r.to_dict() for r in reports]}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_profile(cfg):
    if cfg.ray is None:
        raise ConfigError("profile needs --ray e:t_max:steps")
    e, t_max, steps = _parse_ray(cfg.ray, cfg.n)
    if not 0.0 <= t_max < cfg.quadrature.x_cap:
        raise ConfigError(f"ray t_max = {t_max} must lie in [0, {cfg.quadrature.x_cap})")
    f = parse_datum(cfg.datum, cfg.n, cfg.s)
    params = KernelParams(cfg.n, cfg.s)
    methods = _methods(cfg)
    records = []
    for t in np.linspace(0.0, t_max, steps):
        for m in methods:
            res = solve(f, t * e, params, cfg.quadrature, m)
            records.append({"t": float(t), "value": res.value, "error_estimate": res.error_estimate, "method": m})
    _emit(cfg, records, ["t", "value", "error_estimate", "method"])
    return EXIT_OK


def cmd_sweep_s(cfg):
    f = parse_datum(cfg.datum, cfg.n, min(cfg.s_grid))
    if cfg.strict and not f.continuous:
        raise ConfigError(
            f"--strict needs a continuous datum; {f.label} is discontinuous and the s -> 1 limit is not guaranteed"
        )
    point = cfg.points[0] if cfg.points else [0.0] * cfg.n
    if any(not 0.0 < s < 1.0 for s in cfg.s_grid) or len(cfg.s_grid) < 1:
        raise ConfigError("s grid values must lie in (0, 1)")
    rows = s_limit_sweep(f, np.asarray(point, dtype=float), cfg.s_grid, cfg.quadrature, allow_discontinuous=True)
    records = [
        {"s": r.s, "value": r.value, "classical_value": r.classical_value, "gap": r.gap} for r in rows
    ]
    _emit(cfg, records, ["s", "value", "classical_value", "gap"])
    if cfg.strict and len(rows) >= 2 and rows[-1].gap > rows[-2].gap:
        print(
            f"gap at s = {rows[-1].s} ({rows[-1].gap:.3e}) exceeds gap at s = {rows[-2].s} ({rows[-2].gap:.3e})",
            file=sys.stderr,
        )
        return EXIT_VERIFY
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.command == "eval":
            return cmd_eval(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg, explicit_ns=args.n is not None or args.s is not None)
        if cfg.command == "profile":
            return cmd_profile(cfg)
        return cmd_sweep_s(cfg)
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ConfigError, DomainError, ValueError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
