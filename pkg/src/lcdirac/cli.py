"""Config parsing, subcommand dispatch, and artifact serialization.

The CLI takes a single argument, the path of a JSON config document with a
strict schema (unknown keys are rejected). Exit codes: 0 success and all
requested audits passed; 1 audit failure or solver blow-up (partial
artifacts are still written); 2 configuration or precondition error.
All floating-point output is serialized with 17 significant digits so a
round trip through text is lossless.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .errors import (
    BlowUpError,
    ConfigurationError,
    FrequencyDomainError,
    PlanningError,
    PreconditionError,
    ResolutionError,
    UsageError,
)
from .fields import (
    ComponentSpec,
    GridSpec,
    InitialDatum,
    SpinorField,
    TriangleDomain,
    charge,
    make_grid,
    sample_initial,
)
from .functionals import (
    FunctionalTrace,
    bony_decay_audit,
    gronwall_audit,
    pointwise_audit,
    trace_base,
    trace_pair,
    triangle_charge_audit,
)
from .harness import ConvergenceTable, convergence_study, uniqueness_probe
from .model import EstimateConstants, ModelParams, check_algebraic_bounds, derive_constants
from .reports import AuditReport
from .solver import SolverConfig, evolve, thirring_soliton

COMMANDS = ("simulate", "audit", "converge", "unique", "soliton-check")
AUDITS = ("algebraic", "charge", "triangle", "pointwise", "bony", "gronwall")
FORMATS = ("csv", "structured-report")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# Config schema


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    grid: GridSpec
    T: float
    record_every: int
    init: InitialDatum
    constants: EstimateConstants
    c_tol: float
    command: str
    audit_selection: tuple[str, ...]
    out_path: str
    out_format: str
    domain: Optional[TriangleDomain]
    epsilons: tuple[float, ...]
    kernel: str
    kernel_b: str
    frequency: float
    audit_c0: Optional[float]
    audit_samples: int
    audit_seed: int
    audit_perturbation: float


class _Section:
    """Strict view over one nested dict: every key must be consumed."""

    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ConfigurationError(f"section {path!r} must be an object")
        self.data = dict(data)
        self.path = path

    def take(self, key: str, default=..., kind=None):
        if key in self.data:
            val = self.data.pop(key)
        elif default is not ...:
            val = default
        else:
            raise ConfigurationError(f"missing required key '{self.path}{key}'")
        if kind is not None and val is not None and not isinstance(val, kind):
            raise ConfigurationError(f"key '{self.path}{key}' has wrong type")
        return val

    def sub(self, key: str, required=False) -> Optional["_Section"]:
        if key not in self.data:
            if required:
                raise ConfigurationError(f"missing required section '{self.path}{key}'")
            return None
        return _Section(self.data.pop(key), f"{self.path}{key}.")

    def finish(self):
        if self.data:
            bad = sorted(self.data)[0]
            raise ConfigurationError(f"unknown key '{self.path}{bad}'")


def _as_float(val, path: str) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigurationError(f"key {path!r} must be a number")
    return float(val)


def _as_complex(val, path: str) -> complex:
    if isinstance(val, (int, float)) and not isinstance(val, bool):
        return complex(val)
    if isinstance(val, list) and len(val) == 2:
        return complex(_as_float(val[0], path), _as_float(val[1], path))
    raise ConfigurationError(f"key {path!r} must be a number or [re, im] pair")


def _component(sec: _Section) -> ComponentSpec:
    kind = sec.take("kind", kind=str)
    kwargs: dict[str, Any] = {}
    if "amplitude" in sec.data:
        kwargs["amplitude"] = _as_complex(sec.take("amplitude"), sec.path + "amplitude")
    for name in ("center", "width", "halfwidth", "exponent", "cap"):
        if name in sec.data:
            kwargs[name] = _as_float(sec.take(name), sec.path + name)
    if "values" in sec.data:
        raw = sec.take("values", kind=list)
        kwargs["values"] = np.array(
            [_as_complex(z, sec.path + "values") for z in raw], dtype=np.complex128
        )
    sec.finish()
    return ComponentSpec(kind, **kwargs)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a config document; defaults filled."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed config document at line {exc.lineno}: {exc.msg}") from exc
    root = _Section(doc, "")

    msec = root.sub("model", required=True)
    model = ModelParams(
        m=_as_float(msec.take("m"), "model.m"),
        alpha=_as_float(msec.take("alpha"), "model.alpha"),
        beta=_as_float(msec.take("beta"), "model.beta"),
    )
    msec.finish()

    gsec = root.sub("grid", required=True)
    grid = make_grid(
        _as_float(gsec.take("x_min"), "grid.x_min"),
        _as_float(gsec.take("x_max"), "grid.x_max"),
        gsec.take("n_points", kind=int),
        gsec.take("boundary", default="periodic", kind=str),
    )
    gsec.finish()

    tsec = root.sub("time")
    T, record_every = 1.0, 1
    if tsec is not None:
        T = _as_float(tsec.take("T", default=1.0), "time.T")
        record_every = tsec.take("record_every", default=1, kind=int)
        tsec.finish()
    if T < 0:
        raise ConfigurationError("time.T must be nonnegative")
    if record_every < 1:
        raise ConfigurationError("time.record_every must be >= 1")

    isec = root.sub("init")
    if isec is None:
        init = InitialDatum(ComponentSpec("uniform", 0.0), ComponentSpec("uniform", 0.0))
    else:
        init = InitialDatum(
            _component(isec.sub("u0", required=True)),
            _component(isec.sub("v0", required=True)),
        )
        isec.finish()

    csec = root.sub("constants")
    overrides: dict[str, Optional[float]] = {"delta0": None, "c_star": None, "K": None, "delta": None}
    c_tol = 10.0
    if csec is not None:
        for name in overrides:
            if name in csec.data:
                overrides[name] = _as_float(csec.take(name), f"constants.{name}")
        c_tol = _as_float(csec.take("C_tol", default=10.0), "constants.C_tol")
        csec.finish()
    constants = derive_constants(model, **overrides)

    command = root.take("command", kind=str)
    if command not in COMMANDS:
        raise ConfigurationError(f"unknown command {command!r}; expected one of {COMMANDS}")

    selection = tuple(root.take("audit_selection", default=list(AUDITS), kind=list))
    for a in selection:
        if a not in AUDITS:
            raise ConfigurationError(f"unknown audit {a!r}; expected subset of {AUDITS}")

    osec = root.sub("output")
    out_path, out_format = "lcdirac_out", "csv"
    if osec is not None:
        out_path = osec.take("path", default="lcdirac_out", kind=str)
        out_format = osec.take("format", default="csv", kind=str)
        osec.finish()
    if out_format not in FORMATS:
        raise ConfigurationError(f"unknown output format {out_format!r}")

    dsec = root.sub("domain")
    domain = None
    if dsec is not None:
        domain = TriangleDomain(
            _as_float(dsec.take("a"), "domain.a"),
            _as_float(dsec.take("b"), "domain.b"),
            _as_float(dsec.take("t0", default=0.0), "domain.t0"),
        )
        dsec.finish()

    esec = root.sub("mollify")
    epsilons: tuple[float, ...] = ()
    kernel, kernel_b = "bump", "triangle"
    if esec is not None:
        epsilons = tuple(
            _as_float(e, "mollify.epsilons") for e in esec.take("epsilons", kind=list)
        )
        kernel = esec.take("kernel", default="bump", kind=str)
        kernel_b = esec.take("kernel_b", default="triangle", kind=str)
        esec.finish()

    ssec = root.sub("soliton")
    frequency = 0.5 * model.m
    if ssec is not None:
        frequency = _as_float(ssec.take("frequency"), "soliton.frequency")
        ssec.finish()

    asec = root.sub("audit")
    audit_c0, audit_samples, audit_seed, audit_pert = None, 100_000, 0, 1e-3
    if asec is not None:
        if "c0" in asec.data:
            audit_c0 = _as_float(asec.take("c0"), "audit.c0")
        audit_samples = asec.take("samples", default=100_000, kind=int)
        audit_seed = asec.take("seed", default=0, kind=int)
        audit_pert = _as_float(asec.take("perturbation", default=1e-3), "audit.perturbation")
        asec.finish()

    root.finish()
    return RunConfig(
        model=model, grid=grid, T=T, record_every=record_every, init=init,
        constants=constants, c_tol=c_tol, command=command, audit_selection=selection,
        out_path=out_path, out_format=out_format, domain=domain, epsilons=epsilons,
        kernel=kernel, kernel_b=kernel_b, frequency=frequency, audit_c0=audit_c0,
        audit_samples=audit_samples, audit_seed=audit_seed, audit_perturbation=audit_pert,
    )


# ---------------------------------------------------------------------------
# Serialization


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def trace_csv(trace: FunctionalTrace) -> str:
    cols = ["t", "L0", "D0", "Q0", "cumD0", "charge", "max_abs_u", "max_abs_v"]
    arrays = [trace.times, trace.L0, trace.D0, trace.Q0, trace.cumD0,
              trace.charge, trace.max_abs_u, trace.max_abs_v]
    if trace.has_pair:
        cols += ["L1", "D1", "Q1", "cumD1"]
        arrays += [trace.L1, trace.D1, trace.Q1, trace.cumD1]
    lines = [",".join(cols)]
    for row in zip(*arrays):
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def snapshots_csv(snapshots: Sequence[SpinorField]) -> str:
    lines = ["t,x,re_u,im_u,re_v,im_v"]
    for s in snapshots:
        x = s.grid.sites()
        for i in range(s.grid.n_points):
            lines.append(
                ",".join(_fmt(z) for z in (s.t, x[i], s.u[i].real, s.u[i].imag, s.v[i].real, s.v[i].imag))
            )
    return "\n".join(lines) + "\n"


def convergence_csv(table: ConvergenceTable) -> str:
    lines = ["eps_coarse,eps_fine,field_distance,product_distance"]
    if table.mode == "consecutive":
        pairs = zip(table.epsilons[:-1], table.epsilons[1:])
    else:
        pairs = zip(table.epsilons, table.epsilons)
    for (ea, eb), dp, dq in zip(pairs, table.pair_distances, table.product_distances):
        lines.append(",".join(_fmt(x) for x in (ea, eb, dp, dq)))
    return "\n".join(lines) + "\n"


def _report_record(name: str, rep: AuditReport) -> dict:
    rec: dict[str, Any] = {
        "audit": name,
        "inequality": rep.inequality,
        "passed": rep.passed,
        "max_violation": rep.max_violation,
        "tolerance_budget": rep.tolerance_budget,
        "witness_time": rep.witness[0] if rep.witness else None,
        "witness_location": rep.witness[1] if rep.witness else None,
    }
    if isinstance(rep.constants_used, EstimateConstants):
        for f in ("c", "delta0", "c_star", "K", "delta"):
            rec[f"constants_{f}"] = getattr(rep.constants_used, f)
    for key, val in rep.info.items():
        rec[f"info_{key}"] = val
    return rec


def _json_scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return json.dumps(str(v))


def reports_json(records: Sequence[dict]) -> str:
    """Flat record list with floats at 17 significant digits."""
    out = ["["]
    for i, rec in enumerate(records):
        body = ", ".join(f"{json.dumps(k)}: {_json_scalar(v)}" for k, v in rec.items())
        out.append("  {" + body + "}" + ("," if i + 1 < len(records) else ""))
    out.append("]")
    return "\n".join(out) + "\n"


def reports_csv(records: Sequence[dict]) -> str:
    cols: list[str] = []
    for rec in records:
        for k in rec:
            if k not in cols:
                cols.append(k)
    lines = [",".join(cols)]
    for rec in records:
        row = []
        for k in cols:
            v = rec.get(k)
            if v is None:
                row.append("")
            elif isinstance(v, bool):
                row.append("true" if v else "false")
            elif isinstance(v, (int, np.integer)):
                row.append(str(int(v)))
            elif isinstance(v, (float, np.floating)):
                row.append(_fmt(v))
            else:
                row.append(json.dumps(str(v)))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def emit_reports(records: Sequence[dict], fmt: str, path: Path):
    if fmt == "structured-report":
        _write(path.with_suffix(".json"), reports_json(records))
    else:
        _write(path.with_suffix(".csv"), reports_csv(records))


def emit_outputs(artifact, fmt: str, path) -> Path:
    """Serialize a trace, convergence table, snapshot list, or report set.

    Returns the path written; traces and tables are always CSV, report
    records honor the requested format.
    """
    path = Path(path)
    if isinstance(artifact, FunctionalTrace):
        out = path.with_suffix(".csv")
        _write(out, trace_csv(artifact))
    elif isinstance(artifact, ConvergenceTable):
        out = path.with_suffix(".csv")
        _write(out, convergence_csv(artifact))
    elif isinstance(artifact, (list, tuple)) and artifact and isinstance(artifact[0], SpinorField):
        out = path.with_suffix(".csv")
        _write(out, snapshots_csv(artifact))
    elif isinstance(artifact, (list, tuple)) and (not artifact or isinstance(artifact[0], dict)):
        out = path.with_suffix(".json" if fmt == "structured-report" else ".csv")
        emit_reports(list(artifact), fmt, path)
    else:
        raise UsageError(f"no serializer for artifact of type {type(artifact).__name__}")
    return out


# ---------------------------------------------------------------------------
# Commands


def _default_domain(cfg: RunConfig) -> TriangleDomain:
    g = cfg.grid
    return TriangleDomain(g.x_min, g.x_min + (g.n_points - 1) * g.dx, 0.0)


def _perturbed(f0: SpinorField, rel: float) -> SpinorField:
    return SpinorField(f0.grid, f0.t, f0.u * (1.0 + rel), f0.v * (1.0 + rel))


def _cmd_simulate(cfg: RunConfig, prefix: Path) -> int:
    f0 = sample_initial(cfg.init, cfg.grid)
    status = 0
    try:
        snaps = evolve(f0, cfg.model, SolverConfig(record_every=cfg.record_every), cfg.T)
    except BlowUpError as exc:
        snaps = exc.partial
        status = 1
        print(f"blow-up: {exc}", file=sys.stderr)
    trace = trace_base(snaps, cfg.domain)
    emit_outputs(trace, cfg.out_format, prefix.parent / (prefix.name + "_trace"))
    emit_outputs(snaps, cfg.out_format, prefix.parent / (prefix.name + "_snapshots"))
    return status


def _snap_tau(dom: TriangleDomain, T: float, dt: float) -> float:
    tau = min(T, dom.apex_time)
    k = int(np.floor((tau - dom.t0) / dt + 1e-12))
    return dom.t0 + k * dt


def _cmd_audit(cfg: RunConfig, prefix: Path) -> int:
    p, k = cfg.model, cfg.constants
    dom = cfg.domain if cfg.domain is not None else _default_domain(cfg)
    f0 = sample_initial(cfg.init, cfg.grid)
    records: list[dict] = []
    status = 0
    snaps = None
    try:
        if any(a in cfg.audit_selection for a in ("charge", "triangle", "pointwise", "bony", "gronwall")):
            snaps = evolve(f0, p, SolverConfig(record_every=1), cfg.T)
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        emit_reports(records, cfg.out_format, prefix.parent / (prefix.name + "_audits"))
        return 1

    for name in AUDITS:
        if name not in cfg.audit_selection:
            continue
        if name == "algebraic":
            rep = check_algebraic_bounds(cfg.audit_samples, p, k, cfg.audit_seed)
        elif name == "charge":
            q = np.array([charge(s) for s in snaps])
            drift = float(np.max(np.abs(q - q[0])))
            budget = cfg.c_tol * cfg.grid.dx**2 * (1.0 + q[0]) * max(cfg.T, 1.0)
            rep = AuditReport(
                inequality="total charge conservation over the run",
                passed=drift <= budget,
                max_violation=drift,
                tolerance_budget=budget,
                info={"initial_charge": float(q[0])},
            )
        elif name == "triangle":
            rep = triangle_charge_audit(snaps, dom, _snap_tau(dom, cfg.T, cfg.grid.dt), cfg.c_tol)
        elif name == "pointwise":
            c0 = cfg.audit_c0 if cfg.audit_c0 is not None else charge(f0) + 1.0
            rep = pointwise_audit(snaps, dom, c0, p, cfg.c_tol)
        elif name == "bony":
            rep = bony_decay_audit(snaps, dom, k, p, cfg.c_tol)
        else:  # gronwall
            fB0 = _perturbed(f0, cfg.audit_perturbation)
            snapsB = evolve(fB0, p, SolverConfig(record_every=1), cfg.T)
            rep = gronwall_audit(snaps, snapsB, dom, k, p, cfg.c_tol)
        if rep.constants_used is None:
            rep = dataclasses.replace(rep, constants_used=k)
        records.append(_report_record(name, rep))
        if not rep.passed:
            status = 1

    emit_reports(records, cfg.out_format, prefix.parent / (prefix.name + "_audits"))
    return status


def _cmd_converge(cfg: RunConfig, prefix: Path) -> int:
    if not cfg.epsilons:
        raise ConfigurationError("converge needs mollify.epsilons")
    table = convergence_study(cfg.init, cfg.epsilons, cfg.model, cfg.grid, cfg.T, cfg.kernel)
    emit_outputs(table, cfg.out_format, prefix.parent / (prefix.name + "_convergence"))
    return 0


def _cmd_unique(cfg: RunConfig, prefix: Path) -> int:
    if not cfg.epsilons:
        raise ConfigurationError("unique needs mollify.epsilons")
    table = uniqueness_probe(
        cfg.init, cfg.kernel, cfg.kernel_b, cfg.epsilons, cfg.model, cfg.grid, cfg.T
    )
    emit_outputs(table, cfg.out_format, prefix.parent / (prefix.name + "_uniqueness"))
    return 0


def _cmd_soliton(cfg: RunConfig, prefix: Path) -> int:
    oracle = thirring_soliton(cfg.model.m, cfg.frequency, cfg.grid)
    records = []
    for variant, residuals, orders in oracle.trials:
        records.append(
            {
                "variant_phase_mirror": bool(variant[0]),
                "variant_time_sign": int(variant[1]),
                "residual_coarse": residuals[0],
                "residual_mid": residuals[1],
                "residual_fine": residuals[2],
                "order_first": orders[0],
                "order_second": orders[1],
                "accepted": oracle.available and variant == oracle.variant,
            }
        )
    emit_reports(records, cfg.out_format, prefix.parent / (prefix.name + "_soliton"))
    return 0 if oracle.available else 1


def run_command(cfg: RunConfig) -> int:
    prefix = Path(cfg.out_path)
    handler = {
        "simulate": _cmd_simulate,
        "audit": _cmd_audit,
        "converge": _cmd_converge,
        "unique": _cmd_unique,
        "soliton-check": _cmd_soliton,
    }[cfg.command]
    try:
        return handler(cfg, prefix)
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, PreconditionError, ResolutionError, PlanningError,
            FrequencyDomainError, UsageError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lcdirac",
        description="Light-cone lattice solver and estimate audits for cubic nonlinear Dirac systems.",
    )
    parser.add_argument("config", help="path of the JSON run configuration")
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(text)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
