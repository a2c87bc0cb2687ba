"""``bessel-means`` command line.

Configuration comes from an optional JSON file; command-line options override
it.  Exit codes: 0 success, 1 a verification check failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from dataclasses import field as dc_field

import numpy as np

from . import verify as V
from .epd import EpdProblem, SolverOptions, solve_epd
from .fields import builtin_field
from .means import iterated_mean_double, iterated_mean_reduced, multidim_shift, spherical_mean
from .shift1d import MultiIndex
from .sphere_geometry import sphere_grid
from .ultrahyperbolic import SplitGeometry, asgeirsson_check, separable_solution

COMMANDS = ("shift", "mean", "iterated-mean", "epd-solve", "asgeirsson-check", "verify")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass(frozen=True)
class RunConfig:
    command: str
    gamma: tuple[float, ...] = (1.0,)
    dimension: int | None = None
    k: float | None = None
    field: str = "gauss"
    points: tuple[tuple[float, ...], ...] = ()
    shifts: tuple[tuple[float, ...], ...] = ()
    radii: tuple[float, ...] = ()
    radii2: tuple[float, ...] = ()
    times: tuple[float, ...] = ()
    # second block for asgeirsson-check
    gamma2: tuple[float, ...] = ()
    points2: tuple[tuple[float, ...], ...] = ()
    xi1: tuple[float, ...] = ()
    xi2: tuple[float, ...] = ()
    shift_order: int = 64
    sphere_order: int = 48
    radial_order: int = 64
    iterated_method: str = "reduced"
    output_path: str | None = None
    output_format: str = "csv"
    flags: dict = dc_field(default_factory=dict)
    checks: tuple[int, ...] = ()

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        for key, val in d.items():
            if isinstance(val, tuple):
                d[key] = [list(v) if isinstance(v, tuple) else v for v in val]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown configuration key")
        if "command" not in raw:
            raise ConfigError("command", "missing")
        d = dict(raw)
        for key in ("gamma", "radii", "radii2", "times", "gamma2", "xi1", "xi2"):
            if key in d and d[key] is not None:
                d[key] = _float_tuple(d[key], key)
        for key in ("points", "shifts", "points2"):
            if key in d and d[key] is not None:
                d[key] = tuple(_float_tuple(p, key) for p in d[key])
        if "checks" in d:
            d["checks"] = tuple(int(c) for c in d["checks"])
        if "flags" in d and not isinstance(d["flags"], dict):
            raise ConfigError("flags", "must be an object")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON ({exc.msg})") from None
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be an object")
        return cls.from_dict(raw)

    # -- validation ---------------------------------------------------------

    @property
    def n(self) -> int:
        return self.dimension if self.dimension is not None else len(self.gamma)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")
        if self.command == "verify":
            bad = [c for c in self.checks if c not in V.CHECKS]
            if bad:
                raise ConfigError("checks", f"unknown criterion {bad[0]}")
            if self.output_format not in ("csv", "json"):
                raise ConfigError("output_format", "must be csv or json")
            return
        if not self.gamma or any(not g > 0 for g in self.gamma):
            raise ConfigError("gamma", "components must be positive")
        if self.dimension is not None and self.dimension != len(self.gamma):
            raise ConfigError("dimension", f"is {self.dimension} but gamma has {len(self.gamma)} components")
        for name in ("shift_order", "sphere_order", "radial_order"):
            if getattr(self, name) < 4:
                raise ConfigError(name, "must be >= 4")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output_format", "must be csv or json")
        if self.iterated_method not in ("reduced", "double"):
            raise ConfigError("iterated_method", "must be reduced or double")
        reading = self.flags.get("fractional_reading", "t2")
        if reading not in ("t", "t2"):
            raise ConfigError("flags.fractional_reading", "must be t or t2")
        if self.command != "asgeirsson-check":
            for p in self.points:
                if len(p) != self.n:
                    raise ConfigError("points", f"point {list(p)} has {len(p)} coordinates, expected {self.n}")
        if self.command in ("mean", "iterated-mean", "epd-solve", "shift", "asgeirsson-check") and not self.points:
            raise ConfigError("points", "at least one point is required")
        if self.command == "shift":
            if not self.shifts:
                raise ConfigError("shifts", "at least one shift vector is required")
            for p in self.shifts:
                if len(p) != self.n:
                    raise ConfigError("shifts", f"shift {list(p)} has {len(p)} coordinates, expected {self.n}")
        if self.command == "mean" and not self.radii:
            raise ConfigError("radii", "at least one radius is required")
        if self.command == "iterated-mean" and (not self.radii or not self.radii2):
            raise ConfigError("radii" if not self.radii else "radii2", "lambda and mu lists are required")
        if self.command == "epd-solve":
            if self.k is None:
                raise ConfigError("k", "required for epd-solve")
            if not self.times:
                raise ConfigError("times", "at least one time is required")
        if self.command == "asgeirsson-check":
            if not self.gamma2 or any(not g > 0 for g in self.gamma2):
                raise ConfigError("gamma2", "the y-block multi-index is required and must be positive")
            if not self.points2:
                raise ConfigError("points2", "at least one y-block point is required")
            for p in self.points:
                if len(p) != len(self.gamma):
                    raise ConfigError("points", "x-block points must match gamma")
            for p in self.points2:
                if len(p) != len(self.gamma2):
                    raise ConfigError("points2", "y-block points must match gamma2")
            if not self.radii:
                raise ConfigError("radii", "at least one radius is required")
            xi1, xi2 = self.block_frequencies()
            if len(xi1) != len(self.gamma) or len(xi2) != len(self.gamma2):
                raise ConfigError("xi1", "frequency lengths must match the blocks")
            if abs(np.linalg.norm(xi1) - np.linalg.norm(xi2)) > 1e-12:
                raise ConfigError("xi2", "|xi1| and |xi2| must be equal")
        if self.command != "asgeirsson-check":
            try:
                builtin_field(self.field, self.gamma)
            except ValueError as exc:
                raise ConfigError("field", str(exc)) from None

    def block_frequencies(self):
        m1, m2 = len(self.gamma), len(self.gamma2)
        xi1 = np.array(self.xi1) if self.xi1 else np.ones(m1)
        xi2 = np.array(self.xi2) if self.xi2 else np.full(m2, math.sqrt(m1 / m2)) if m2 else np.ones(0)
        return xi1, xi2

    def solver_options(self) -> SolverOptions:
        return SolverOptions(
            radial_order=self.radial_order,
            shift_order=self.shift_order,
            sphere_order=self.sphere_order,
            paper_constant=bool(self.flags.get("paper_constant", False)),
            fractional_reading=self.flags.get("fractional_reading", "t2"),
            method=self.flags.get("method", "auto"),
        )


def _float_tuple(value, name: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        value = [value]
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a list of numbers, got {value!r}") from None


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def _pmap(fn, items):
    """Map in parallel (capped by BESSEL_MEANS_THREADS) keeping input order."""
    items = list(items)
    threads = V.thread_count()
    if threads == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _table(cfg: RunConfig):
    """Header and rows for a non-verify command."""
    gamma = MultiIndex(cfg.gamma)
    n = len(gamma)
    xcols = [f"x{i + 1}" for i in range(n)]

    if cfg.command == "asgeirsson-check":
        geo = SplitGeometry(len(cfg.gamma), len(cfg.gamma2), cfg.gamma, cfg.gamma2)
        xi1, xi2 = cfg.block_frequencies()
        u = separable_solution(geo, xi1, xi2)
        ycols = [f"y{i + 1}" for i in range(geo.m2)]
        jobs = list(itertools.product(cfg.points, cfg.points2, cfg.radii))

        def row(job):
            x, y, r = job
            a, b = asgeirsson_check(u, geo, x, y, r, cfg.shift_order, cfg.sphere_order)
            return [*x, *y, r, a, b, abs(a - b)]

        return xcols + ycols + ["r", "left", "right", "gap"], _pmap(row, jobs)

    f = builtin_field(cfg.field, gamma)
    if cfg.command == "shift":
        jobs = list(itertools.product(cfg.points, cfg.shifts))
        ycols = [f"y{i + 1}" for i in range(n)]
        return xcols + ycols + ["value"], _pmap(
            lambda j: [*j[0], *j[1], multidim_shift(f, gamma, np.array(j[0]), np.array(j[1]), cfg.shift_order)], jobs
        )

    if cfg.command == "mean":
        grid = sphere_grid(n, gamma, cfg.sphere_order)

        def row(x):
            vals = spherical_mean(f, gamma, np.array(x), np.array(cfg.radii), grid, cfg.shift_order)
            return [[*x, t, v] for t, v in zip(cfg.radii, vals)]

        return xcols + ["t", "value"], [r for block in _pmap(row, cfg.points) for r in block]

    if cfg.command == "iterated-mean":
        grid = sphere_grid(n, gamma, cfg.sphere_order)
        jobs = list(itertools.product(cfg.points, cfg.radii, cfg.radii2))

        def row(job):
            x, lam, mu = job
            if cfg.iterated_method == "double":
                v = iterated_mean_double(f, gamma, np.array(x), lam, mu, grid, cfg.shift_order)
            else:
                v = iterated_mean_reduced(f, gamma, np.array(x), lam, mu, grid, cfg.shift_order, radial_order=cfg.radial_order)
            return [*x, lam, mu, v]

        return xcols + ["lambda", "mu", "value"], _pmap(row, jobs)

    # epd-solve
    sol = solve_epd(EpdProblem(f, gamma, cfg.k), cfg.solver_options())

    def row(x):
        vals = sol.evaluate_many(np.array(x), np.array(cfg.times))
        return [[*x, t, v, sol.regime] for t, v in zip(cfg.times, vals)]

    return xcols + ["t", "value", "regime"], [r for block in _pmap(row, cfg.points) for r in block]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return format(float(v), ".17g")


def render(header, rows, fmt: str) -> str:
    if fmt == "json":
        clean = [[v if isinstance(v, str) else float(v) for v in r] for r in rows]
        return json.dumps({"columns": header, "rows": clean}, indent=2) + "\n"
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _manifest_entry(result) -> dict:
    # wall time stays on stderr so manifests are reproducible
    d = result.to_dict()
    d.pop("seconds", None)
    return d


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration; returns the exit status."""
    cfg.validate()
    if cfg.command == "verify":
        results = V.run_checks(cfg.checks or None)
        for r in results:
            print(r.line(), file=sys.stderr)
        ok = all(r.passed for r in results)
        if cfg.output_format == "json":
            text = json.dumps({"all_passed": ok, "checks": [_manifest_entry(r) for r in results]}, indent=2) + "\n"
        else:
            header = ["criterion", "name", "measured", "tolerance", "passed", "detail"]
            rows = [[r.criterion, r.name, r.measured, r.tolerance, r.passed, r.detail] for r in results]
            text = "\n".join(
                [",".join(header)]
                + [",".join([str(c), json.dumps(nm), _fmt(m), _fmt(t), _fmt(p), json.dumps(d)]) for c, nm, m, t, p, d in rows]
            ) + "\n"
        _emit(text, cfg.output_path)
        return 0 if ok else 1
    header, rows = _table(cfg)
    _emit(render(header, rows, cfg.output_format), cfg.output_path)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_points(text: str):
    return [[float(v) for v in p.split(",")] for p in text.split(";") if p.strip()]


def _parse_list(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 on its own; keep the message uniform
        self.print_usage(sys.stderr)
        raise ConfigError("arguments", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bessel-means", description="Weighted spherical means built on Bessel translation, with EPD solvers on top.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--gamma", help="comma-separated multi-index, e.g. 1.0,2.5")
    p.add_argument("--dimension", type=int)
    p.add_argument("--k", type=float, help="EPD parameter")
    p.add_argument("--field", help="built-in field: one, radius-squared, gauss, bessel-product:xi1,..., b-harmonic, b-biharmonic")
    p.add_argument("--points", help="points separated by ';', coordinates by ','")
    p.add_argument("--shifts", help="shift vectors for the shift command, same syntax as --points")
    p.add_argument("--radii", help="radii (mean, asgeirsson-check) or lambda values (iterated-mean)")
    p.add_argument("--radii2", help="mu values for iterated-mean")
    p.add_argument("--times", help="times for epd-solve")
    p.add_argument("--gamma2", help="y-block multi-index for asgeirsson-check")
    p.add_argument("--points2", help="y-block points for asgeirsson-check")
    p.add_argument("--xi1", help="x-block frequency for asgeirsson-check")
    p.add_argument("--xi2", help="y-block frequency for asgeirsson-check")
    p.add_argument("--order", type=int, dest="shift_order", help="shift quadrature order")
    p.add_argument("--sphere-order", type=int)
    p.add_argument("--radial-order", type=int)
    p.add_argument("--iterated-method", choices=("reduced", "double"))
    p.add_argument("--method", choices=("auto", "fractional", "erdelyi-kober"))
    p.add_argument("--paper-constant", action="store_true", default=None, help="use the alternative printed normalizer")
    p.add_argument("--fractional-reading", choices=("t", "t2"))
    p.add_argument("--checks", help="comma-separated criterion numbers for verify")
    p.add_argument("--out", dest="output_path")
    p.add_argument("--format", dest="output_format", choices=("csv", "json"))
    return p


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    raw: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.loads(fh.read())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON ({exc.msg})") from None
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be an object")
    raw["command"] = args.command
    try:
        for key in ("gamma", "gamma2", "xi1", "xi2", "radii", "radii2", "times"):
            val = getattr(args, key)
            if val is not None:
                raw[key] = _parse_list(val)
        for key in ("points", "shifts", "points2"):
            val = getattr(args, key)
            if val is not None:
                raw[key] = _parse_points(val)
        if args.checks is not None:
            raw["checks"] = [int(c) for c in args.checks.split(",") if c.strip()]
    except ValueError as exc:
        raise ConfigError("arguments", str(exc)) from None
    for key in ("dimension", "k", "field", "shift_order", "sphere_order", "radial_order",
                "iterated_method", "output_path", "output_format"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    flags = dict(raw.get("flags") or {})
    if args.paper_constant:
        flags["paper_constant"] = True
    if args.fractional_reading:
        flags["fractional_reading"] = args.fractional_reading
    if args.method:
        flags["method"] = args.method
    raw["flags"] = flags
    return RunConfig.from_dict(raw)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"bessel-means: invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"bessel-means: invalid config: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"bessel-means: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
