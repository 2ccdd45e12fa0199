"""Cubic nonlinearity, pointwise algebraic bounds, and difference quantities.

The interaction density is W(u, v) = alpha |u|^2 |v|^2 + beta (conj(u) v
+ u conj(v))^2; the source terms N1, N2 are its Wirtinger derivatives in
conj(u) and conj(v). alpha = 1, beta = 0 is the Thirring interaction,
alpha = 0, beta = 1/4 the Gross-Neveu one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .reports import AuditReport

# delta0 sentinel when no smallness constraint is active (coupling c = 0).
UNCONSTRAINED = 1.0e6

# Multiplicative slack absorbing rounding in bounds that are exact in reals.
EXACT_SLACK = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Mass and the two coupling constants of the interaction density."""

    m: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.m >= 0:
            raise ConfigurationError(f"mass must be nonnegative, got {self.m}")
        for name in ("m", "alpha", "beta"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")


THIRRING = ModelParams(m=1.0, alpha=1.0, beta=0.0)
GROSS_NEVEU = ModelParams(m=1.0, alpha=0.0, beta=0.25)


@dataclass(frozen=True)
class EstimateConstants:
    """Constants entering the decay and difference estimates.

    c is tied exactly to the coupling (c = 8|beta|); the remaining constants
    are validated against the strict inequalities that make the estimates
    effective:

        -2 + 2*delta0*c < -1,   -2 + 2*c_star*delta < -1,   -K + 2*c_star < -1.
    """

    c: float
    delta0: float
    c_star: float
    K: float
    delta: float

    def validate(self, beta: float):
        if self.c != 8.0 * abs(beta):
            raise ConfigurationError(f"c must equal 8|beta| = {8*abs(beta)}, got {self.c}")
        if not (-2.0 + 2.0 * self.delta0 * self.c < -1.0):
            raise ConfigurationError("-2+2delta_0 c<-1 violated")
        if not (-2.0 + 2.0 * self.c_star * self.delta < -1.0):
            raise ConfigurationError("-2+2c_*delta<-1 violated")
        if not (-self.K + 2.0 * self.c_star < -1.0):
            raise ConfigurationError("-K+2c_*<-1 violated")
        if not 0 < self.delta <= self.delta0:
            raise ConfigurationError(f"delta must lie in (0, delta0], got {self.delta}")


def derive_constants(
    p: ModelParams,
    delta0: Optional[float] = None,
    c_star: Optional[float] = None,
    K: Optional[float] = None,
    delta: Optional[float] = None,
) -> EstimateConstants:
    """Defaults satisfying the strict inequalities with a factor-two margin.

    c_star = 16(|alpha| + 4|beta|) dominates the difference-term envelope
    (the tight value is 8(|alpha| + 4|beta|)); K = 2 c_star + 2 then leaves
    -K + 2 c_star = -2.
    """
    c = 8.0 * abs(p.beta)
    if delta0 is None:
        delta0 = 1.0 / (4.0 * c) if c > 0 else UNCONSTRAINED
    if c_star is None:
        c_star = 16.0 * (abs(p.alpha) + 4.0 * abs(p.beta))
    if K is None:
        K = 2.0 * c_star + 2.0
    if delta is None:
        delta = min(delta0, 1.0 / (4.0 * c_star)) if c_star > 0 else delta0
    k = EstimateConstants(c=c, delta0=delta0, c_star=c_star, K=K, delta=delta)
    k.validate(p.beta)
    return k


# ---------------------------------------------------------------------------
# Pointwise evaluations (all vectorize over numpy arrays)


def eval_nonlinearity(u, v, p: ModelParams):
    """Interaction density W and its Wirtinger derivatives (W, N1, N2).

    N1 = dW/d(conj u) = alpha u |v|^2 + 2 beta (conj(u)v + u conj(v)) v,
    N2 = dW/d(conj v) = alpha v |u|^2 + 2 beta (conj(u)v + u conj(v)) u.
    """
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    au2 = u.real**2 + u.imag**2
    av2 = v.real**2 + v.imag**2
    s = 2.0 * (u.real * v.real + u.imag * v.imag)  # conj(u)v + u conj(v), real
    W = p.alpha * au2 * av2 + p.beta * s * s
    N1 = p.alpha * u * av2 + (2.0 * p.beta) * s * v
    N2 = p.alpha * v * au2 + (2.0 * p.beta) * s * u
    return W, N1, N2


def eval_r0(u, v, p: ModelParams, k: EstimateConstants):
    """Charge-growth envelope m(|u|^2+|v|^2) + c |u|^2 |v|^2."""
    au2 = np.real(u) ** 2 + np.imag(u) ** 2
    av2 = np.real(v) ** 2 + np.imag(v) ** 2
    return p.m * (au2 + av2) + k.c * au2 * av2


def eval_difference_terms(uA, vA, uB, vB, p: ModelParams, k: EstimateConstants, at_y=None):
    """Difference fields and their quadratic envelopes (U, V, r2, r1).

    U = uA - uB, V = vA - vB;
    r2 = |U|^2 (|vA|^2 + |vB|^2) + (|uA|^2 + |uB|^2) |V|^2, evaluated
    diagonally unless at_y = (uA_y, vA_y, uB_y, vB_y) supplies the moduli of
    a second point; r1 = m(|U|^2 + |V|^2) + c_star * r2 (diagonal form).
    """
    uA = np.asarray(uA, dtype=np.complex128)
    vA = np.asarray(vA, dtype=np.complex128)
    uB = np.asarray(uB, dtype=np.complex128)
    vB = np.asarray(vB, dtype=np.complex128)
    U = uA - uB
    V = vA - vB
    aU2 = U.real**2 + U.imag**2
    aV2 = V.real**2 + V.imag**2
    umod_x = (uA.real**2 + uA.imag**2) + (uB.real**2 + uB.imag**2)
    vmod_x = (vA.real**2 + vA.imag**2) + (vB.real**2 + vB.imag**2)
    r2_diag = aU2 * vmod_x + umod_x * aV2
    if at_y is None:
        r2 = r2_diag
    else:
        uAy, vAy, uBy, vBy = (np.asarray(z, dtype=np.complex128) for z in at_y)
        Vy = vAy - vBy
        vmod_y = (vAy.real**2 + vAy.imag**2) + (vBy.real**2 + vBy.imag**2)
        r2 = aU2 * vmod_y + umod_x * (Vy.real**2 + Vy.imag**2)
    r1 = p.m * (aU2 + aV2) + k.c_star * r2_diag
    return U, V, r2, r1


def source_charge_rate(u, v, p: ModelParams):
    """The two source contributions 2 Re(i conj(N1) u) and 2 Re(i conj(N2) v).

    Evaluated through the reduced form -4 beta s Im(u conj(v)) (with
    s = conj(u)v + u conj(v)), which is algebraically identical to the
    generic product but cancels the alpha part exactly, also in floating
    point. The two contributions sum to zero identically, which is what
    makes the charge continuity equation source-free.
    """
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    s = 2.0 * (u.real * v.real + u.imag * v.imag)
    im_uvbar = u.imag * v.real - u.real * v.imag
    ru = -4.0 * p.beta * s * im_uvbar
    return ru, -ru


# ---------------------------------------------------------------------------
# Randomized verification of the algebraic bounds


def _unit_disk(rng: np.random.Generator, n: int) -> np.ndarray:
    r = np.sqrt(rng.uniform(0.0, 1.0, n))
    th = rng.uniform(0.0, 2.0 * np.pi, n)
    return r * np.exp(1j * th)


def check_algebraic_bounds(
    samples: int, p: ModelParams, k: EstimateConstants, seed: int = 0
) -> AuditReport:
    """Verify the three pointwise bounds on random complex tuples.

    (a) |2Re(i conj(N1) u)| + |2Re(i conj(N2) v)| <= 8|beta| |u|^2 |v|^2
    (b) |u v - u' v'|^2 <= 2 r2
    (c) |DN1 conj(U)| + |DN2 conj(V)| <= (c_star / 2) r2

    Each with multiplicative slack 1 + 1e-12; the bounds are exact in reals.
    Returns the maximum measured ratio per bound in info.
    """
    if samples < 1:
        raise ConfigurationError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    worst = {"charge_rate": 0.0, "product_difference": 0.0, "difference_envelope": 0.0}
    failed_witness = None
    max_excess = 0.0
    chunk = 200_000
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        u, v, up, vp = (_unit_disk(rng, n) for _ in range(4))

        ru, rv = source_charge_rate(u, v, p)
        lhs_a = np.abs(ru) + np.abs(rv)
        rhs_a = 8.0 * abs(p.beta) * (u.real**2 + u.imag**2) * (v.real**2 + v.imag**2)

        U, V, r2, _ = eval_difference_terms(u, v, up, vp, p, k)
        lhs_b = np.abs(u * v - up * vp) ** 2
        rhs_b = 2.0 * r2

        _, N1, N2 = eval_nonlinearity(u, v, p)
        _, N1p, N2p = eval_nonlinearity(up, vp, p)
        lhs_c = np.abs((N1 - N1p) * np.conj(U)) + np.abs((N2 - N2p) * np.conj(V))
        rhs_c = 0.5 * k.c_star * r2

        for name, lhs, rhs in (
            ("charge_rate", lhs_a, rhs_a),
            ("product_difference", lhs_b, rhs_b),
            ("difference_envelope", lhs_c, rhs_c),
        ):
            excess = lhs - rhs * (1.0 + EXACT_SLACK)
            i = int(np.argmax(excess))
            if excess[i] > max_excess:
                max_excess = float(excess[i])
                failed_witness = (name, complex(u[i]), complex(v[i]), complex(up[i]), complex(vp[i]))
            pos = rhs > 0
            if np.any(pos):
                worst[name] = max(worst[name], float(np.max(lhs[pos] / rhs[pos])))
            # rhs == 0 demands lhs == 0 exactly
            zero_bad = (~pos) & (lhs > 0)
            if np.any(zero_bad):
                j = int(np.argmax(zero_bad))
                max_excess = max(max_excess, float(lhs[j]))
                failed_witness = (name, complex(u[j]), complex(v[j]), complex(up[j]), complex(vp[j]))
        done += n

    passed = max_excess <= 0.0
    return AuditReport(
        inequality="pointwise algebraic bounds (charge rate, product difference, difference envelope)",
        passed=passed,
        max_violation=max(max_excess, 0.0),
        tolerance_budget=0.0,
        witness=failed_witness if not passed else None,
        constants_used=k,
        info={f"max_ratio_{n}": r for n, r in worst.items()},
    )
