"""Batch front end: tables of operator values, the identity suite and timing runs.

A run is described by a JSON job file; a few flags override its fields::

    prabhakar apply --job job.json --nodes 128 --out values.csv
    prabhakar verify --seed 3 --draws 20 --out report.json

Exit status is 0 when every row evaluated (and, for ``verify``, every
identity passed), 1 otherwise, and 2 for an invalid job.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, PrabhakarError
from .funcspace import (
    Exponential,
    FunctionRepr,
    PowerSum,
    QuadratureSpec,
    named_function,
)
from .operators import (
    ABConfig,
    ParamSet,
    ab_derivative_c,
    ab_derivative_r,
    ab_integral,
    apply_specialized,
    iterated_ab,
    iterated_prabhakar,
    prabhakar_derivative,
    prabhakar_quadrature,
    prabhakar_series,
    specialize_model,
)
from .special import Truncation, check_conditions, mittag_leffler
from .verify import SuiteConfig, run_suite, suite_passed

OUT_DIR_ENV = "PRABHAKAR_OUT_DIR"
MODES = ("ml", "apply", "verify", "bench")
MODELS = ("prabhakar", "prabhakar_derivative", "iterated_prabhakar", "abr", "abc", "abi", "iab")
METHODS = ("series", "quadrature", "specialized")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


# --- job description ----------------------------------------------------------


def _scalar(value, where: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ConfigError(f"{where}: expected a number or [re, im], got {value!r}")


def _real(value, where: str) -> float:
    z = _scalar(value, where)
    if z.imag != 0:
        raise ConfigError(f"{where}: must be real, got {value!r}")
    return z.real


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"grid.count must be >= 1, got {self.count}")
        if self.count > 1 and not self.stop >= self.start:
            raise ConfigError("grid.stop must be >= grid.start")

    def points(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


@dataclass
class JobSpec:
    """Everything needed to reproduce one run."""

    mode: str
    model: str = "prabhakar"
    method: str = "series"
    params: dict = field(default_factory=dict)
    function: dict = field(default_factory=lambda: {"kind": "polynomial", "coeffs": [1.0]})
    grid: Grid = field(default_factory=lambda: Grid(0.25, 1.0, 4))
    trunc: Truncation = field(default_factory=Truncation)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: dict = field(default_factory=lambda: {"format": "csv", "path": None})
    seed: int = 0
    draws: int = 20

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        fmt = self.output.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
        if self.mode in ("apply", "bench"):
            c = _real(self.params.get("c", 0.0), "params.c")
            if not self.grid.start > c:
                raise ConfigError(f"grid.start must exceed params.c ({self.grid.start} <= {c})")

    @classmethod
    def from_dict(cls, d: dict) -> "JobSpec":
        known = {"mode", "model", "method", "params", "function", "grid", "trunc", "quad", "output", "seed", "draws"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown job field(s): {sorted(extra)}")
        kw = dict(d)
        if "mode" not in kw:
            raise ConfigError("mode: missing")
        try:
            if "grid" in kw:
                kw["grid"] = Grid(**kw["grid"])
        except TypeError as exc:
            raise ConfigError(f"grid: {exc}") from None
        for name, typ in (("trunc", Truncation), ("quad", QuadratureSpec)):
            if name in kw:
                try:
                    kw[name] = typ(**kw[name])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{name}: {exc}") from None
        if "output" in kw:
            kw["output"] = {"format": "csv", "path": None, **kw["output"]}
        return cls(**kw)


def parse_function(desc: dict, c: float) -> FunctionRepr:
    """Build a function from a descriptor; only power sums, exponentials and named functions exist."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("function: expected an object with a 'kind' field")
    kind = desc["kind"]
    try:
        if kind == "polynomial":
            return PowerSum.polynomial([_scalar(v, "function.coeffs") for v in desc["coeffs"]], c)
        if kind == "powersum":
            terms = tuple(
                (_scalar(a, "function.terms"), _scalar(mu, "function.terms")) for a, mu in desc["terms"]
            )
            return PowerSum(c, terms)
        if kind == "exponential":
            return Exponential(_scalar(desc.get("a", 1.0), "function.a"))
        if kind == "named":
            return named_function(desc["name"])
    except KeyError as exc:
        raise ConfigError(f"function.{exc.args[0]}: missing") from None
    except ValueError as exc:
        raise ConfigError(f"function: {exc}") from None
    raise ConfigError(f"function.kind must be polynomial, powersum, exponential or named, got {kind!r}")


def _param_set(params: dict) -> ParamSet:
    try:
        vals = {k: _scalar(params[k], f"params.{k}") for k in ("alpha", "beta", "omega", "rho")}
    except KeyError as exc:
        raise ConfigError(f"params.{exc.args[0]}: missing") from None
    vals["kappa"] = _scalar(params.get("kappa", 1.0), "params.kappa")
    vals["c"] = _real(params.get("c", 0.0), "params.c")
    try:
        return ParamSet(**vals)
    except PrabhakarError as exc:
        raise ConfigError(f"params: {exc}") from None


def _ab_config(params: dict) -> ABConfig:
    if "alpha" not in params:
        raise ConfigError("params.alpha: missing")
    B = _real(params.get("B", 1.0), "params.B")
    try:
        return ABConfig(_real(params["alpha"], "params.alpha"), lambda a: B)
    except PrabhakarError as exc:
        raise ConfigError(f"params: {exc}") from None


# --- output ---------------------------------------------------------------------


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, complex):
            out[f"{k}_re"], out[f"{k}_im"] = v.real, v.imag
        else:
            out[k] = v
    return out


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_safe(x) for x in v]
    return v


def emit_output(rows: list[dict], fmt: str, path, columns: list[str] | None = None) -> None:
    """Write rows as CSV (17 significant digits, complex split into _re/_im) or a JSON array.

    ``columns`` fixes the header so an empty table still gets one.
    """
    flat = [_flatten(r) for r in rows]
    if columns is None:
        columns = list(flat[0]) if flat else []
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in flat:
                w.writerow([_csv_cell(r.get(k)) for k in columns])
    elif fmt == "json":
        data = [{k: _json_safe(r.get(k)) for k in columns} for r in flat]
        with open(path, "w") as fh:
            json.dump(data, fh, indent=1)
            fh.write("\n")
    else:
        raise ConfigError(f"output.format must be csv or json, got {fmt!r}")


# --- modes ------------------------------------------------------------------------

_VALUE_COLS = ["x", "value_re", "value_im", "err_estimate", "terms_used", "method", "error"]


def _row(x, res=None, err: Exception | None = None) -> dict:
    if err is not None:
        return {"x": x, "value": complex(math.nan, math.nan), "err_estimate": math.nan,
                "terms_used": 0, "method": "", "error": f"{type(err).__name__}: {err}"}
    return {"x": x, "value": complex(res.value), "err_estimate": float(res.err_estimate),
            "terms_used": int(res.terms_used), "method": res.method, "error": ""}


def _ml_rows(job: JobSpec) -> list[dict]:
    p = job.params
    args = [_scalar(p.get(k, 1.0), f"params.{k}") for k in ("alpha", "beta", "rho", "kappa")]
    try:
        check_conditions(args[0], args[1], args[3])
    except PrabhakarError as exc:
        raise ConfigError(f"params: {exc}") from None
    rows = []
    for z in job.grid.points():
        try:
            r = mittag_leffler(*args, z, job.trunc)
            rows.append({"z": z, "value": complex(r.value), "err_estimate": r.err_estimate,
                         "terms_used": r.terms_used, "error": ""})
        except (PrabhakarError, ArithmeticError) as exc:
            rows.append({"z": z, "value": complex(math.nan, math.nan), "err_estimate": math.nan,
                         "terms_used": 0, "error": f"{type(exc).__name__}: {exc}"})
    return rows


def _evaluator(job: JobSpec):
    """Return (f, x -> EvalResult) for an apply/bench job."""
    m, method = job.model, job.method
    c = _real(job.params.get("c", 0.0), "params.c")
    f = parse_function(job.function, c)
    t, q = job.trunc, job.quad
    if m in ("prabhakar", "prabhakar_derivative", "iterated_prabhakar"):
        p = _param_set(job.params)
        if m == "prabhakar":
            if method == "quadrature":
                return f, lambda x: prabhakar_quadrature(p, f, x, q, t)
            if method == "specialized":
                spec = specialize_model("prabhakar", p=p)
                return f, lambda x: apply_specialized(spec, f, x, t, q)
            return f, lambda x: prabhakar_series(p, f, x, t, q)
        if m == "prabhakar_derivative":
            kind = "definition" if method == "quadrature" else "series"
            return f, lambda x: prabhakar_derivative(p, f, x, t, q, method=kind)
        if "nu" not in job.params:
            raise ConfigError("params.nu: missing")
        nu = _scalar(job.params["nu"], "params.nu")
        kind = "definition" if method == "quadrature" else "series"
        return f, lambda x: iterated_prabhakar(p, nu, f, x, t, q, method=kind)
    cfg = _ab_config(job.params)
    if m == "iab":
        if "rho" not in job.params:
            raise ConfigError("params.rho: missing")
        rho = _real(job.params["rho"], "params.rho")
        if method == "specialized":
            spec = specialize_model("iab", cfg=cfg, rho=rho, c=c)
            return f, lambda x: apply_specialized(spec, f, x, t, q)
        return f, lambda x: iterated_ab(cfg, rho, f, c, x, t, q)
    if m == "abi":
        return f, lambda x: ab_integral(cfg, f, c, x, t, q)
    direct = ab_derivative_r if m == "abr" else ab_derivative_c
    if method == "specialized":
        spec = specialize_model(m, cfg=cfg, c=c)
        return f, lambda x: apply_specialized(spec, f, x, t, q)
    return f, lambda x: direct(cfg, f, c, x, t, q, method=method)


def _apply_rows(job: JobSpec) -> list[dict]:
    _, ev = _evaluator(job)
    rows = []
    for x in job.grid.points():
        try:
            rows.append(_row(x, ev(x)))
        except (PrabhakarError, ArithmeticError, ValueError) as exc:
            rows.append(_row(x, err=exc))
    return rows


@dataclass(frozen=True)
class BenchRecord:
    method: str
    wall_time: float
    terms_or_nodes: int
    max_rel_dev_vs_reference: float

    def __post_init__(self):
        if self.wall_time < 0:
            raise ValueError("wall_time must be >= 0")


def _timed(fn, xs):
    t0 = time.perf_counter()
    out = [fn(x) for x in xs]
    return out, time.perf_counter() - t0


def run_bench(job: JobSpec) -> list[BenchRecord]:
    """Series against quadrature at a ladder of node counts; reference is quadrature at 4x nodes."""
    p = _param_set(job.params)
    f = parse_function(job.function, p.c)
    xs = job.grid.points()
    t = job.trunc
    ref_quad = replace(job.quad, nodes=4 * job.quad.nodes)
    ref = [prabhakar_quadrature(p, f, x, ref_quad, t).value for x in xs]

    def dev(vals):
        return max(abs(v - r) / max(abs(v), abs(r), 1e-8) for v, r in zip(vals, ref))

    out = []
    try:
        res, wall = _timed(lambda x: prabhakar_series(p, f, x, t, job.quad), xs)
        out.append(BenchRecord("series", wall, max(r.terms_used for r in res), dev([r.value for r in res])))
    except (PrabhakarError, ArithmeticError):
        out.append(BenchRecord("series", 0.0, 0, math.nan))
    nodes = 8
    while nodes <= job.quad.nodes:
        # coarse rungs are meant to be inaccurate: measure, do not fail
        qs = replace(job.quad, nodes=nodes, rel_tol=math.inf)
        try:
            res, wall = _timed(lambda x: prabhakar_quadrature(p, f, x, qs, t), xs)
            out.append(BenchRecord(f"quadrature[{qs.scheme}]", wall, nodes, dev([r.value for r in res])))
        except (PrabhakarError, ArithmeticError):
            out.append(BenchRecord(f"quadrature[{qs.scheme}]", 0.0, nodes, math.nan))
        nodes *= 2
    return out


# --- driver -------------------------------------------------------------------------


def _default_path(job: JobSpec) -> Path:
    fmt = job.output.get("format", "csv")
    base = Path(os.environ.get(OUT_DIR_ENV, "."))
    return base / f"{job.mode}.{fmt}"


def run_job(job: JobSpec) -> int:
    """Run a job, write its output file and return the exit status."""
    fmt = job.output.get("format", "csv")
    path = job.output.get("path") or _default_path(job)
    if job.mode == "ml":
        rows = _ml_rows(job)
        emit_output(rows, fmt, path, ["z", "value_re", "value_im", "err_estimate", "terms_used", "error"])
        return EXIT_FAILED if any(r["error"] for r in rows) else EXIT_OK
    if job.mode == "apply":
        rows = _apply_rows(job)
        emit_output(rows, fmt, path, _VALUE_COLS)
        return EXIT_FAILED if any(r["error"] for r in rows) else EXIT_OK
    if job.mode == "verify":
        cfg = SuiteConfig(seed=job.seed, draws=job.draws, trunc=job.trunc)
        reports = run_suite(cfg)
        if fmt == "json":
            emit_output([r.to_dict() for r in reports], fmt, path,
                        list(reports[0].to_dict()) if reports else [])
        else:
            cols = ["identity_id", "param_draws", "max_abs_dev", "max_rel_dev", "pass", "tolerance", "witnesses", "errors"]
            emit_output([r.to_dict() for r in reports], fmt, path, cols)
        return EXIT_OK if suite_passed(reports) else EXIT_FAILED
    records = run_bench(job)
    emit_output([asdict(r) for r in records], fmt, path, list(BenchRecord.__dataclass_fields__))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prabhakar", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        sp.add_argument("--job", type=Path, help="JSON job file")
        sp.add_argument("--tol", type=float, help="series truncation tolerance")
        sp.add_argument("--max-terms", type=int, help="series term cap")
        sp.add_argument("--nodes", type=int, help="quadrature nodes")
        sp.add_argument("--seed", type=int, help="suite seed")
        sp.add_argument("--out", type=Path, help=f"output file (default: ${OUT_DIR_ENV}/<mode>.<format>)")
        sp.add_argument("--format", choices=("csv", "json"), help="output format")
        if mode == "verify":
            sp.add_argument("--draws", type=int, help="parameter draws per identity")
    return ap


def job_from_args(args: argparse.Namespace) -> JobSpec:
    if args.job is not None:
        try:
            data = json.loads(args.job.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"job: cannot read {args.job}: {exc}") from None
        if data.setdefault("mode", args.mode) != args.mode:
            raise ConfigError(f"mode: job file says {data['mode']!r} but subcommand is {args.mode!r}")
    elif args.mode == "verify":
        data = {"mode": "verify"}
    else:
        raise ConfigError(f"job: the {args.mode} subcommand needs --job")
    if args.tol is not None or args.max_terms is not None:
        t = dict(data.get("trunc", {}))
        if args.tol is not None:
            t["rel_tol"] = args.tol
        if args.max_terms is not None:
            t["max_terms"] = args.max_terms
        data["trunc"] = t
    if args.nodes is not None:
        data["quad"] = {**data.get("quad", {}), "nodes": args.nodes}
    if args.seed is not None:
        data["seed"] = args.seed
    if getattr(args, "draws", None) is not None:
        data["draws"] = args.draws
    out = dict(data.get("output", {}))
    if args.out is not None:
        out["path"] = str(args.out)
    if args.format is not None:
        out["format"] = args.format
    if out:
        data["output"] = out
    return JobSpec.from_dict(data)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = job_from_args(args)
        return run_job(job)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
