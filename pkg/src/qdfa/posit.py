"""Positivity classes: CP certification and randomized Schwarz falsification.

Complete positivity is decidable from the Choi matrix.  The operator Schwarz
inequality ``F(X^dagger X) >= F(X)^dagger F(X)`` is not tractable to certify
for general positive maps, so it is only *falsified*: seeded random probes
search for a negative eigenvalue of the defect.  A found violation is a
certificate; finding none proves nothing, and the report says so through
``status``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import faults
from .channel import Channel, heisenberg, superop_to_choi
from .errors import ConsistencyError
from .matcore import DEFAULT_TOL, Tolerances
from .spectral import PeripheralData

__all__ = [
    "Violation",
    "PositivityReport",
    "certify_cp",
    "falsify_schwarz",
    "falsify_star_schwarz",
    "positivity_report",
    "probe_operators",
]

CP_CERTIFIED = "cp_certified"
SCHWARZ_FALSIFIED = "schwarz_falsified"
UNRESOLVED = "unresolved"

PROBE_KINDS = ("gaussian", "rank_one", "hermitian", "unitary")
RECHECK_TOL = 1e-12


@dataclass(frozen=True)
class Violation:
    X: np.ndarray
    min_eig: float
    trial: int
    kind: str

    def as_dict(self) -> dict:
        return {
            "X": [[[float(z.real), float(z.imag)] for z in row] for row in self.X],
            "min_eig": self.min_eig,
            "trial": self.trial,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class PositivityReport:
    """Outcome of positivity tests on one map.

    ``status`` is ``cp_certified``, ``schwarz_falsified`` or ``unresolved``
    (no violation found but not CP either).  ``worst_*`` record the most
    negative defect eigenvalue seen, violation or not.
    """

    is_cp: bool
    choi_min_eigenvalue: float
    schwarz_violation: Violation | None = None
    star_schwarz_violation: Violation | None = None
    trials: int = 0
    seed: int = 0
    worst_schwarz: float | None = None
    worst_star_schwarz: float | None = None

    @property
    def status(self) -> str:
        if self.is_cp:
            return CP_CERTIFIED
        if self.schwarz_violation is not None:
            return SCHWARZ_FALSIFIED
        return UNRESOLVED

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "is_cp": self.is_cp,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "schwarz_violation": None if self.schwarz_violation is None else self.schwarz_violation.as_dict(),
            "star_schwarz_violation": (
                None if self.star_schwarz_violation is None else self.star_schwarz_violation.as_dict()
            ),
            "trials": self.trials,
            "seed": self.seed,
            "worst_schwarz": self.worst_schwarz,
            "worst_star_schwarz": self.worst_star_schwarz,
        }


def certify_cp(ch: Channel, tol: Tolerances = DEFAULT_TOL) -> PositivityReport:
    """Choi-matrix PSD test."""
    C = superop_to_choi(heisenberg(ch).superop)
    C = (C + C.conj().T) / 2
    lam = float(np.linalg.eigvalsh(C)[0])
    scale = max(1.0, float(np.abs(C).max()))
    return PositivityReport(is_cp=lam >= -tol.tol_psd * scale, choi_min_eigenvalue=lam)


def _probe(d: int, kind: str, rng: np.random.Generator) -> np.ndarray:
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    if kind == "gaussian":
        X = G
    elif kind == "rank_one":
        X = np.outer(G[:, 0], G[:, 1].conj())
    elif kind == "hermitian":
        X = G + G.conj().T
    else:
        Q, R = np.linalg.qr(G)
        X = Q * (np.diag(R) / np.abs(np.diag(R)))
    return X / np.linalg.norm(X, 2)


def probe_operators(d: int, trials: int, seed: int) -> tuple[np.ndarray, tuple[str, ...]]:
    """Unit-norm probes, one independent stream per trial index.

    Trial ``t`` draws from ``SeedSequence([seed, t])`` so any single trial can
    be reproduced, or the batch split, without replaying the others.
    """
    X, kinds = _cached_probes(int(d), int(trials), int(seed))
    return X.copy(), kinds


@lru_cache(maxsize=64)
def _cached_probes(d: int, trials: int, seed: int) -> tuple[np.ndarray, tuple[str, ...]]:
    kinds = tuple(PROBE_KINDS[t % len(PROBE_KINDS)] for t in range(trials))
    X = np.array(
        [_probe(d, kinds[t], np.random.default_rng(np.random.SeedSequence([seed, t]))) for t in range(trials)]
    )
    return X.reshape(trials, d, d), kinds


def _apply_batch(S: np.ndarray, X: np.ndarray) -> np.ndarray:
    d = X.shape[-1]
    cols = X.transpose(0, 2, 1).reshape(X.shape[0], -1).T
    return (S @ cols).T.reshape(-1, d, d).transpose(0, 2, 1)


def _apply_by_choi(S: np.ndarray, X: np.ndarray) -> np.ndarray:
    # F(X) = sum_ij X_ij F(E_ij), reading F(E_ij) as the (i, j) block of the Choi matrix
    d = X.shape[-1]
    blocks = superop_to_choi(S).reshape(d, d, d, d)
    return np.einsum("ij,iajb->ab", X, blocks)


def _min_eigs(D: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh((D + D.conj().transpose(0, 2, 1)) / 2)[:, 0]


def _dagger(X: np.ndarray) -> np.ndarray:
    return X.conj().swapaxes(-1, -2)


def _schwarz_defects(S: np.ndarray, X: np.ndarray) -> np.ndarray:
    FX = _apply_batch(S, X)
    return _apply_batch(S, _dagger(X) @ X) - _dagger(FX) @ FX


def _recheck(value: float, recomputed: float, what: str):
    if abs(value - recomputed) > RECHECK_TOL * max(1.0, abs(value)):
        raise ConsistencyError(
            f"{what} counterexample did not reproduce: {value!r} vs independent {recomputed!r}"
        )


def falsify_schwarz(
    ch: Channel, trials: int = 500, seed: int = 0, tol: Tolerances = DEFAULT_TOL
) -> PositivityReport:
    """Search for ``X`` with ``F(X^dagger X) - F(X)^dagger F(X)`` not PSD."""
    ch = heisenberg(ch)
    cp = certify_cp(ch, tol)
    X, kinds = probe_operators(ch.dim, trials, seed)
    lam = _min_eigs(_schwarz_defects(ch.superop, X))
    t = int(np.argmin(lam))
    worst = float(lam[t])
    violation = None
    if worst < -tol.tol_psd:
        Xt = X[t]
        FX = _apply_by_choi(ch.superop, Xt)
        D = _apply_by_choi(ch.superop, Xt.conj().T @ Xt) - FX.conj().T @ FX
        _recheck(worst, float(np.linalg.eigvalsh((D + D.conj().T) / 2)[0]), "Schwarz")
        violation = Violation(Xt, worst, t, kinds[t])
        if cp.is_cp:
            raise ConsistencyError("CP map violates the Schwarz inequality", witness=Xt)
    return PositivityReport(
        is_cp=cp.is_cp,
        choi_min_eigenvalue=cp.choi_min_eigenvalue,
        schwarz_violation=violation,
        trials=trials,
        seed=seed,
        worst_schwarz=worst,
    )


def _star_defects(S: np.ndarray, SP: np.ndarray, X: np.ndarray, apply) -> np.ndarray:
    sign = faults.star_sign()
    FX = apply(S, X)
    return sign * (apply(S, apply(SP, _dagger(X) @ X)) - apply(SP, _dagger(FX) @ FX))


def falsify_star_schwarz(
    pd: PeripheralData, trials: int = 500, seed: int = 0, tol: Tolerances | None = None
) -> PositivityReport:
    """Same protocol for ``F(X^dagger * X) - F(X)^dagger * F(X)``, ``*`` the Choi-Effros product."""
    tol = tol or pd.tol
    ch = pd.channel
    cp = certify_cp(ch, tol)
    X, kinds = probe_operators(ch.dim, trials, seed)
    lam = _min_eigs(_star_defects(ch.superop, pd.p_p.superop, X, _apply_batch))
    t = int(np.argmin(lam))
    worst = float(lam[t])
    violation = None
    if worst < -tol.tol_psd:
        D = _star_defects(ch.superop, pd.p_p.superop, X[t : t + 1], lambda S, Y: _apply_by_choi(S, Y[0])[None])
        _recheck(worst, float(_min_eigs(D)[0]), "star-Schwarz")
        violation = Violation(X[t], worst, t, kinds[t])
    return PositivityReport(
        is_cp=cp.is_cp,
        choi_min_eigenvalue=cp.choi_min_eigenvalue,
        star_schwarz_violation=violation,
        trials=trials,
        seed=seed,
        worst_star_schwarz=worst,
    )


def positivity_report(
    pd: PeripheralData, trials: int = 500, seed: int = 0, tol: Tolerances | None = None
) -> PositivityReport:
    """CP test plus both falsification searches, merged into one report."""
    tol = tol or pd.tol
    plain = falsify_schwarz(pd.channel, trials, seed, tol)
    star = falsify_star_schwarz(pd, trials, seed, tol)
    return PositivityReport(
        is_cp=plain.is_cp,
        choi_min_eigenvalue=plain.choi_min_eigenvalue,
        schwarz_violation=plain.schwarz_violation,
        star_schwarz_violation=star.star_schwarz_violation,
        trials=trials,
        seed=seed,
        worst_schwarz=plain.worst_schwarz,
        worst_star_schwarz=star.worst_star_schwarz,
    )
