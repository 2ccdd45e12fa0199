"""Kernel backend selection.

The compiled extension is preferred when present; the pure NumPy module is
the always-available fallback with identical semantics. The active backend
is fixed at import time and can be overridden programmatically (used by the
benchmark and the cross-backend tests).
"""
from __future__ import annotations

from . import pure

try:  # pragma: no cover - depends on how the package was built
    from . import _core as compiled
except ImportError:  # pragma: no cover
    compiled = None

_active = compiled if compiled is not None else pure


def available_backends() -> tuple[str, ...]:
    return ("compiled", "pure") if compiled is not None else ("pure",)


def backend_name() -> str:
    return _active.BACKEND_NAME


def use_backend(name: str):
    """Select 'compiled' or 'pure'; returns the previously active name."""
    global _active
    before = backend_name()
    if name == "pure":
        _active = pure
    elif name == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available in this install")
        _active = compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    return before


def step_unforced(u, v, h, m, alpha, beta, periodic):
    return _active.step_unforced(u, v, h, m, alpha, beta, periodic)


def q_upper(a, b):
    return _active.q_upper(a, b)


def q_upper_naive(a, b):
    return _active.q_upper_naive(a, b)
