"""Deliberate fault injection for mutation testing of the invariant suite.

Faults are scoped with a context manager and never active by default::

    with faults.inject("star_sign"):
        results = run_invariant_suite(corpus)

A healthy suite must report at least one failed invariant under each fault.
"""
from __future__ import annotations

import contextlib
import contextvars

FAULTS = ("star_sign", "peripheral_threshold", "support_cutoff")

_active: contextvars.ContextVar[frozenset] = contextvars.ContextVar("qdfa_faults", default=frozenset())


@contextlib.contextmanager
def inject(*names: str):
    unknown = set(names) - set(FAULTS)
    if unknown:
        raise ValueError(f"unknown fault(s) {sorted(unknown)}; choose from {FAULTS}")
    token = _active.set(_active.get() | frozenset(names))
    try:
        yield
    finally:
        _active.reset(token)


def active(name: str) -> bool:
    return name in _active.get()


def star_sign() -> float:
    return -1.0 if active("star_sign") else 1.0


def peripheral_tol(tol_peripheral: float) -> float:
    return 0.5 if active("peripheral_threshold") else tol_peripheral


def support_cutoff(tol_psd: float) -> float:
    return 1e6 if active("support_cutoff") else tol_psd
