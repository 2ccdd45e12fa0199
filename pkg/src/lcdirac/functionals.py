"""Cone-restricted functionals of fields and the inequality audits.

Over a cross-section I(t) of a triangle domain (or the full line):

    L0 = sum (|u|^2 + |v|^2) dx          (charge level)
    D0 = sum |u|^2 |v|^2 dx              (interaction dissipation)
    Q0 = sum_{x<y} |u(x)|^2 |v(y)|^2 dx^2    (ordered interaction potential)

and for a pair of fields, with U = uA - uB, V = vA - vB:

    L1 = sum (|U|^2 + |V|^2) dx
    D1 = sum r2(x, x) dx
    Q1 = sum_{x<y} r2(x, y) dx^2

Q0/Q1 are evaluated in O(N) by suffix scans; a direct O(N^2) mode is kept
as an oracle. Each audit verifies a continuum inequality on the discrete
solution within a resolution-dependent budget.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import PreconditionError, UsageError
from .fields import GridSpec, SpinorField, TriangleDomain, charge
from .model import EstimateConstants, ModelParams
from .reports import AuditReport, tolerance_budget

log = logging.getLogger(__name__)

__all__ = [
    "AuditReport",
    "FunctionalTrace",
    "base_functionals",
    "difference_functionals",
    "trace_base",
    "trace_pair",
    "triangle_charge_audit",
    "pointwise_audit",
    "bony_decay_audit",
    "gronwall_audit",
]


def _section(f: SpinorField, dom: Optional[TriangleDomain]) -> tuple[int, int]:
    if dom is None:
        return 0, f.grid.n_points
    i0, i1 = dom.section_indices(f.grid, f.t)
    if i0 >= i1:
        log.debug("degenerate cross-section at t=%s", f.t)
    return i0, i1


def base_functionals(
    f: SpinorField, dom: Optional[TriangleDomain] = None, naive: bool = False
) -> tuple[float, float, float]:
    """(L0, D0, Q0) over the cross-section of dom at f.t, or the full line."""
    i0, i1 = _section(f, dom)
    if i0 >= i1:
        return 0.0, 0.0, 0.0
    u = f.u[i0:i1]
    v = f.v[i0:i1]
    au2 = u.real**2 + u.imag**2
    av2 = v.real**2 + v.imag**2
    dx = f.grid.dx
    L0 = float(np.sum(au2 + av2)) * dx
    D0 = float(np.sum(au2 * av2)) * dx
    q = kernels.q_upper_naive(au2, av2) if naive else kernels.q_upper(au2, av2)
    return L0, D0, q * dx * dx


def difference_functionals(
    fA: SpinorField,
    fB: SpinorField,
    dom: Optional[TriangleDomain],
    k: EstimateConstants,
    naive: bool = False,
) -> tuple[float, float, float]:
    """(L1, D1, Q1) for the pair over the cross-section."""
    if fA.grid != fB.grid or fA.t != fB.t:
        raise UsageError("pair functionals need matching grids and times")
    i0, i1 = _section(fA, dom)
    if i0 >= i1:
        return 0.0, 0.0, 0.0
    U = fA.u[i0:i1] - fB.u[i0:i1]
    V = fA.v[i0:i1] - fB.v[i0:i1]
    aU2 = U.real**2 + U.imag**2
    aV2 = V.real**2 + V.imag**2
    vmod = (fA.v[i0:i1].real**2 + fA.v[i0:i1].imag**2) + (fB.v[i0:i1].real**2 + fB.v[i0:i1].imag**2)
    umod = (fA.u[i0:i1].real**2 + fA.u[i0:i1].imag**2) + (fB.u[i0:i1].real**2 + fB.u[i0:i1].imag**2)
    dx = fA.grid.dx
    L1 = float(np.sum(aU2 + aV2)) * dx
    D1 = float(np.sum(aU2 * vmod + umod * aV2)) * dx
    qfn = kernels.q_upper_naive if naive else kernels.q_upper
    Q1 = (qfn(aU2, vmod) + qfn(umod, aV2)) * dx * dx
    return L1, D1, Q1


def _cumtrapz(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    if len(values) > 1:
        out[1:] = np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(times))
    return out


@dataclass(frozen=True)
class FunctionalTrace:
    """Time series of the cone functionals with running time integrals."""

    times: np.ndarray
    L0: np.ndarray
    D0: np.ndarray
    Q0: np.ndarray
    cumD0: np.ndarray
    charge: np.ndarray
    max_abs_u: np.ndarray
    max_abs_v: np.ndarray
    domain: Optional[TriangleDomain] = None
    L1: Optional[np.ndarray] = None
    D1: Optional[np.ndarray] = None
    Q1: Optional[np.ndarray] = None
    cumD1: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.times)
        for name in ("L0", "D0", "Q0", "cumD0", "charge", "max_abs_u", "max_abs_v", "L1", "D1", "Q1", "cumD1"):
            arr = getattr(self, name)
            if arr is None:
                continue
            if len(arr) != n:
                raise UsageError(f"trace column {name} has length {len(arr)}, expected {n}")
            if np.any(arr < 0):
                raise UsageError(f"trace column {name} has negative entries")

    @property
    def has_pair(self) -> bool:
        return self.L1 is not None


def trace_base(snapshots: Sequence[SpinorField], dom: Optional[TriangleDomain] = None) -> FunctionalTrace:
    times = np.array([s.t for s in snapshots])
    rows = [base_functionals(s, dom) for s in snapshots]
    L0, D0, Q0 = (np.array(col) for col in zip(*rows))
    ch = np.array([charge(s, dom) for s in snapshots])
    mau = np.array([float(np.max(np.abs(s.u))) if s.grid.n_points else 0.0 for s in snapshots])
    mav = np.array([float(np.max(np.abs(s.v))) for s in snapshots])
    return FunctionalTrace(times, L0, D0, Q0, _cumtrapz(times, D0), ch, mau, mav, dom)


def trace_pair(
    snapsA: Sequence[SpinorField],
    snapsB: Sequence[SpinorField],
    dom: Optional[TriangleDomain],
    k: EstimateConstants,
) -> FunctionalTrace:
    """Base functionals of the first field plus the pair functionals."""
    if len(snapsA) != len(snapsB):
        raise UsageError("pair traces need snapshot sequences of equal length")
    base = trace_base(snapsA, dom)
    rows = [difference_functionals(a, b, dom, k) for a, b in zip(snapsA, snapsB)]
    L1, D1, Q1 = (np.array(col) for col in zip(*rows))
    return FunctionalTrace(
        base.times, base.L0, base.D0, base.Q0, base.cumD0, base.charge,
        base.max_abs_u, base.max_abs_v, dom,
        L1=L1, D1=D1, Q1=Q1, cumD1=_cumtrapz(base.times, D1),
    )


# ---------------------------------------------------------------------------
# Audits


def _require_every_step(snapshots: Sequence[SpinorField]):
    dt = snapshots[0].grid.dt
    ts = np.array([s.t for s in snapshots])
    if len(ts) > 1 and np.max(np.abs(np.diff(ts) - dt)) > 1e-9 * dt:
        raise UsageError("audit needs snapshots recorded at every step")


def _cone_times(snapshots: Sequence[SpinorField], dom: TriangleDomain, t_end: float):
    out = [s for s in snapshots if s.t <= min(t_end, dom.apex_time) + 1e-12]
    if not out or abs(out[0].t - dom.t0) > 1e-12:
        raise UsageError("snapshots must start at the domain's base time")
    return out


def triangle_charge_audit(
    snapshots: Sequence[SpinorField],
    dom: TriangleDomain,
    tau: float,
    c_tol: float = 10.0,
) -> AuditReport:
    """Charge balance over the truncated cone: interior charge at tau plus
    twice the outgoing edge fluxes must return the initial interior charge."""
    _require_every_step(snapshots)
    f0 = snapshots[0]
    grid = f0.grid
    ia = grid.index_of(dom.a)  # also validates lattice alignment
    ib = grid.index_of(dom.b)
    if abs(dom.t0 - f0.t) > 1e-12:
        raise UsageError("snapshots must start at the cone's base time")
    if tau > dom.apex_time + 1e-12:
        raise UsageError(f"tau={tau} beyond the cone apex {dom.apex_time}")
    inside = _cone_times(snapshots, dom, tau)
    if abs(inside[-1].t - tau) > 1e-9 * max(1.0, abs(tau)):
        raise UsageError("snapshots do not reach tau")

    dx = grid.dx
    dt = grid.dt
    interior0 = charge(f0, dom)
    interior_tau = charge(inside[-1], dom)

    flux_u = np.empty(len(inside))
    flux_v = np.empty(len(inside))
    for j, s in enumerate(inside):
        kshift = round((s.t - dom.t0) / dt)
        ir = ib - kshift
        il = ia + kshift
        zu = s.u[ir]
        zv = s.v[il]
        flux_u[j] = zu.real**2 + zu.imag**2
        flux_v[j] = zv.real**2 + zv.imag**2
    w = np.full(len(inside), dt)
    w[0] = w[-1] = 0.5 * dt
    boundary = 2.0 * float(np.sum(flux_u * w)) + 2.0 * float(np.sum(flux_v * w))

    residual = abs(interior_tau + boundary - interior0)
    budget = tolerance_budget(dx, interior0, c_tol)
    return AuditReport(
        inequality="cone charge balance (interior + edge fluxes = initial charge)",
        passed=residual <= budget,
        max_violation=residual,
        tolerance_budget=budget,
        witness=(tau, None) if residual > 0 else None,
        info={"interior_initial": interior0, "interior_final": interior_tau, "boundary_flux": boundary},
    )


def pointwise_audit(
    snapshots: Sequence[SpinorField],
    dom: TriangleDomain,
    C0: float,
    p: ModelParams,
    c_tol: float = 10.0,
) -> AuditReport:
    """Exponential pointwise and interval bounds on |u|^2, |v|^2 in the cone.

    With E(t) = exp(2|beta| C0 + m (t - t0)):
        |u(x,t)|^2 <= E(t) (|u0(x - (t-t0))|^2 + m C0)    (and v with x + t)
    plus the windowed integral forms on subintervals of the cross-section.
    Requires the initial charge over [a, b] to be below C0.
    """
    _require_every_step(snapshots)
    f0 = snapshots[0]
    grid = f0.grid
    dx = grid.dx
    ia = grid.index_of(dom.a)
    ib = grid.index_of(dom.b)
    if abs(dom.t0 - f0.t) > 1e-12:
        raise UsageError("snapshots must start at the cone's base time")
    dens0 = f0.density()
    charge0 = float(np.sum(dens0[ia : ib + 1])) * dx
    if not charge0 < C0:
        raise PreconditionError(
            f"initial charge {charge0} over [{dom.a}, {dom.b}] is not below C0={C0}"
        )

    au0 = f0.u.real**2 + f0.u.imag**2
    av0 = f0.v.real**2 + f0.v.imag**2
    pre_u0 = np.concatenate([[0.0], np.cumsum(au0)])
    pre_v0 = np.concatenate([[0.0], np.cumsum(av0)])

    worst = 0.0
    witness = None
    for s in _cone_times(snapshots, dom, dom.apex_time):
        tau = s.t - dom.t0
        kshift = round(tau / grid.dt)
        E = float(np.exp(2.0 * abs(p.beta) * C0 + p.m * tau))
        i0, i1 = dom.section_indices(grid, s.t)
        if i0 >= i1:
            continue
        au = s.u.real**2 + s.u.imag**2
        av = s.v.real**2 + s.v.imag**2
        vio_u = au[i0:i1] - E * (au0[i0 - kshift : i1 - kshift] + p.m * C0)
        vio_v = av[i0:i1] - E * (av0[i0 + kshift : i1 + kshift] + p.m * C0)
        for vio in (vio_u, vio_v):
            j = int(np.argmax(vio))
            if vio[j] > worst:
                worst = float(vio[j])
                witness = (s.t, grid.x_min + (i0 + j) * dx)

        # interval forms over sliding dyadic windows of the cross-section
        pre_u = np.concatenate([[0.0], np.cumsum(au)])
        pre_v = np.concatenate([[0.0], np.cumsum(av)])
        n_sec = i1 - i0
        width = 2
        while width <= n_sec:
            stride = max(1, width // 2)
            starts = np.arange(i0, i1 - width + 1, stride)
            su_t = (pre_u[starts + width] - pre_u[starts]) * dx
            sv_t = (pre_v[starts + width] - pre_v[starts]) * dx
            su_0 = (pre_u0[starts - kshift + width] - pre_u0[starts - kshift]) * dx
            sv_0 = (pre_v0[starts + kshift + width] - pre_v0[starts + kshift]) * dx
            slack = E * p.m * C0 * (width * dx)
            vio_w = np.maximum(su_t - E * su_0, sv_t - E * sv_0) - slack
            j = int(np.argmax(vio_w))
            if vio_w[j] > worst:
                worst = float(vio_w[j])
                witness = (s.t, grid.x_min + starts[j] * dx)
            width *= 2

    budget = tolerance_budget(dx, charge0, c_tol)
    return AuditReport(
        inequality="exponential pointwise/interval growth bounds in the cone",
        passed=worst <= budget,
        max_violation=worst,
        tolerance_budget=budget,
        witness=witness,
        info={"C0": C0, "initial_charge": charge0},
    )


def bony_decay_audit(
    snapshots: Sequence[SpinorField],
    dom: TriangleDomain,
    k: EstimateConstants,
    p: ModelParams,
    c_tol: float = 10.0,
) -> AuditReport:
    """Decay of the interaction potential net of dissipation:

        Q0(t) + int_{t0}^t D0 <= 2 m L0(t0)^2 (t - t0) + Q0(t0)

    under the smallness hypothesis L0(t0) <= delta0, plus the coarse seed
    bound Q0(t0) <= L0(t0)^2. The sharper product constant actually measured
    is recorded informationally.
    """
    _require_every_step(snapshots)
    inside = _cone_times(snapshots, dom, dom.apex_time)
    tr = trace_base(inside, dom)
    L00 = tr.L0[0]
    if not L00 <= k.delta0:
        raise PreconditionError(
            f"charge level {L00} over the base section exceeds the smallness threshold delta0={k.delta0}"
        )
    dx = inside[0].grid.dx
    elapsed = tr.times - tr.times[0]
    rhs = 2.0 * p.m * L00**2 * elapsed + tr.Q0[0]
    vio = tr.Q0 + tr.cumD0 - rhs
    j = int(np.argmax(vio))
    worst = float(max(vio[j], 0.0))
    seed_vio = tr.Q0[0] - L00**2
    worst = max(worst, float(seed_vio))
    budget = tolerance_budget(dx, L00, c_tol)
    return AuditReport(
        inequality="interaction-potential decay net of dissipation",
        passed=worst <= budget,
        max_violation=worst,
        tolerance_budget=budget,
        witness=(float(tr.times[j]), None) if worst > 0 else None,
        constants_used=k,
        info={
            "L0_initial": float(L00),
            "Q0_initial": float(tr.Q0[0]),
            "seed_ratio_measured": float(tr.Q0[0] / L00**2) if L00 > 0 else 0.0,
        },
    )


def gronwall_audit(
    snapsA: Sequence[SpinorField],
    snapsB: Sequence[SpinorField],
    dom: TriangleDomain,
    k: EstimateConstants,
    p: ModelParams,
    c_tol: float = 10.0,
) -> AuditReport:
    """Difference-functional envelope under the pair smallness hypothesis.

    With h3(t) = 2m (L0(t0) + L0'(t0)) (t - t0) + int c (D0 + D0'), checks

        L1 + K Q1 <= (L1(t0) + K Q1(t0)) exp(h3)
        int D1    <= (L1(t0) + K Q1(t0)) ((4 m delta + 4 m delta^2 c)(t-t0)
                                          + 2 c delta^2 + 1) exp(h3)
        h3(t)     <= 4 m (delta + delta^2)(t - t0) + 2 delta^2

    each within the tolerance budget; requires L0(t0), L0'(t0) < delta.
    """
    _require_every_step(snapsA)
    _require_every_step(snapsB)
    inA = _cone_times(snapsA, dom, dom.apex_time)
    inB = _cone_times(snapsB, dom, dom.apex_time)
    n = min(len(inA), len(inB))
    inA, inB = inA[:n], inB[:n]
    trA = trace_base(inA, dom)
    trB = trace_base(inB, dom)
    tr = trace_pair(inA, inB, dom, k)
    L0A, L0B = trA.L0[0], trB.L0[0]
    if not (L0A < k.delta and L0B < k.delta):
        raise PreconditionError(
            f"charge levels ({L0A}, {L0B}) not both below the pair smallness threshold delta={k.delta}"
        )
    elapsed = tr.times - tr.times[0]
    h3 = 2.0 * p.m * (L0A + L0B) * elapsed + _cumtrapz(tr.times, k.c * (trA.D0 + trB.D0))
    seed = tr.L1[0] + k.K * tr.Q1[0]
    env = seed * np.exp(h3)

    vio_env = tr.L1 + k.K * tr.Q1 - env
    d = k.delta
    factor = (4.0 * p.m * d + 4.0 * p.m * d * d * k.c) * elapsed + 2.0 * k.c * d * d + 1.0
    vio_d1 = tr.cumD1 - seed * factor * np.exp(h3)
    vio_h3 = h3 - (4.0 * p.m * (d + d * d) * elapsed + 2.0 * d * d)

    dx = inA[0].grid.dx
    budget = tolerance_budget(dx, L0A + L0B, c_tol)
    worst = 0.0
    witness = None
    for name, vio in (("envelope", vio_env), ("dissipation", vio_d1), ("exponent_ceiling", vio_h3)):
        j = int(np.argmax(vio))
        if vio[j] > worst:
            worst = float(vio[j])
            witness = (float(tr.times[j]), name)
    return AuditReport(
        inequality="pair-difference growth envelope and exponent ceiling",
        passed=worst <= budget,
        max_violation=worst,
        tolerance_budget=budget,
        witness=witness,
        constants_used=k,
        info={"seed": float(seed), "h3_final": float(h3[-1])},
    )
