"""Spectral analysis of the Heisenberg superoperator.

The peripheral projection is the spectral projector of the superoperator onto
the invariant subspace of its unimodular eigenvalues.  It is computed from a
complex Schur form ordered so the peripheral eigenvalues lead,

    S = Q [[T11, T12], [0, T22]] Q^dagger,

followed by the Sylvester solve ``T11 Y - Y T22 = -T12`` that block
diagonalizes ``T``.  In Schur coordinates the projector is
``[[1, -Y], [0, 0]]``.  This is robust to the large, degenerate eigenvalue-1
clusters that structured channels produce, where eigenvector
biorthogonalization is not.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from . import faults
from .channel import HEISENBERG, Channel, heisenberg, make_channel
from .errors import ConsistencyError, InvalidChannelError, NumericFailure
from .matcore import (
    DEFAULT_TOL,
    OperatorSubspace,
    Tolerances,
    hermitian_basis,
    null_space,
    subspace_from_spanning,
    subspace_includes,
    unvec,
    vec,
)

__all__ = [
    "SpectralDecomposition",
    "PeripheralData",
    "spectrum",
    "peripheral_projection",
    "attractor_basis",
    "fixed_point_space",
    "fixed_point_projection",
    "asymptotic_map",
]


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    peripheral_mask: np.ndarray
    schur_T: np.ndarray = field(repr=False)
    schur_Q: np.ndarray = field(repr=False)
    n_peripheral: int
    semisimplicity_residual: float
    conjugation_residual: float

    @property
    def peripheral_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.peripheral_mask]


@dataclass(frozen=True)
class PeripheralData:
    """Peripheral projection of a Heisenberg channel together with its range.

    ``channel`` is the Heisenberg channel the data was computed from and
    ``p_p`` the projection itself, wrapped as a channel.
    """

    channel: Channel = field(repr=False)
    p_p: Channel = field(repr=False)
    attractor: OperatorSubspace = field(repr=False)
    peripheral_eigenvalues: np.ndarray
    decomposition: SpectralDecomposition = field(repr=False)
    tol: Tolerances = DEFAULT_TOL
    residuals: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.channel.dim

    def apply(self, X) -> np.ndarray:
        return unvec(self.p_p.superop @ vec(np.asarray(X, dtype=complex)))

    def apply_adjoint(self, X) -> np.ndarray:
        return unvec(self.p_p.superop.conj().T @ vec(np.asarray(X, dtype=complex)))


def _sorted_eigenvalues(S: np.ndarray, tol: Tolerances) -> np.ndarray:
    # Hermiticity-preserving maps are real in a Hermitian operator basis; the real
    # eigensolver then returns exactly conjugate-paired eigenvalues.
    H = hermitian_basis(int(round(np.sqrt(S.shape[0]))))
    R = H.conj().T @ S @ H
    if np.max(np.abs(R.imag), initial=0.0) <= tol.tol_residual * max(1.0, np.max(np.abs(R))):
        eigs = np.linalg.eigvals(R.real).astype(complex)
    else:
        eigs = np.linalg.eigvals(S)
    order = np.lexsort((np.round(np.angle(eigs), 12), -np.round(np.abs(eigs), 12)))
    return eigs[order]


def _conjugation_residual(eigs: np.ndarray) -> float:
    if eigs.size == 0:
        return 0.0
    cost = np.abs(eigs[:, None] - eigs.conj()[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def _semisimplicity_residual(T11: np.ndarray, cluster_tol: float) -> float:
    """Largest of the ``m`` smallest singular values of ``T11 - lambda 1`` over eigenvalue clusters.

    Zero iff each cluster's geometric and algebraic multiplicities agree.
    The strictly-upper part of ``T11`` is not a usable proxy: a semisimple
    restriction is generally non-normal in an HS-orthonormal basis.
    """
    k = T11.shape[0]
    if k == 0:
        return 0.0
    diag = np.diag(T11)
    unassigned = list(range(k))
    worst = 0.0
    scale = max(1.0, float(np.linalg.norm(T11, 2)))
    while unassigned:
        seed = unassigned[0]
        members = [i for i in unassigned if abs(diag[i] - diag[seed]) <= cluster_tol]
        unassigned = [i for i in unassigned if i not in members]
        lam = np.mean(diag[members])
        s = np.linalg.svd(T11 - lam * np.eye(k), compute_uv=False)
        worst = max(worst, float(s[k - len(members)]) / scale)
    return worst


def spectrum(ch: Channel, tol: Tolerances = DEFAULT_TOL) -> SpectralDecomposition:
    """Eigenvalues and peripheral-leading ordered Schur form of the Heisenberg superoperator."""
    S = heisenberg(ch).superop
    eigs = _sorted_eigenvalues(S, tol)
    tol_p = faults.peripheral_tol(tol.tol_peripheral)
    threshold = 1.0 - tol_p
    radius = float(np.max(np.abs(eigs)))
    if radius > 1.0 + tol.tol_peripheral:
        raise InvalidChannelError(
            f"spectral radius {radius:.6g} exceeds 1; a positive unital map cannot have such eigenvalues"
        )
    mask = np.abs(eigs) >= threshold
    if ch.is_ucp and not np.any(np.abs(eigs - 1) <= tol.tol_peripheral):
        raise ConsistencyError("eigenvalue 1 missing from the spectrum of a unital map")
    try:
        T, Q, sdim = scipy.linalg.schur(S, output="complex", sort=lambda z: abs(z) >= threshold)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericFailure(f"ordered Schur decomposition failed: {exc}") from exc
    if sdim != int(mask.sum()):
        raise NumericFailure(
            f"peripheral count disagrees between eigensolvers ({sdim} vs {int(mask.sum())}); "
            "an eigenvalue sits on the peripheral threshold"
        )
    residual = _semisimplicity_residual(T[:sdim, :sdim], tol.tol_peripheral)
    if residual > tol.tol_residual:
        raise NumericFailure(
            f"peripheral eigenvalues are not semisimple (residual {residual:.3e}); "
            "the input is probably not unital positive within tolerance"
        )
    return SpectralDecomposition(
        eigenvalues=eigs,
        peripheral_mask=mask,
        schur_T=T,
        schur_Q=Q,
        n_peripheral=int(sdim),
        semisimplicity_residual=residual,
        conjugation_residual=_conjugation_residual(eigs),
    )


def _projector_from_schur(T: np.ndarray, Q: np.ndarray, k: int, tol: Tolerances) -> np.ndarray:
    n = T.shape[0]
    if k == n:
        return np.eye(n, dtype=complex)
    if k == 0:
        return np.zeros((n, n), dtype=complex)
    T11, T12, T22 = T[:k, :k], T[:k, k:], T[k:, k:]
    gap = float(np.min(np.abs(np.diag(T11)[:, None] - np.diag(T22)[None, :])))
    if gap < tol.tol_peripheral:
        raise NumericFailure(f"peripheral gap {gap:.3e} too small for a stable Sylvester solve")
    try:
        Y = scipy.linalg.solve_sylvester(T11, -T22, -T12)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericFailure(f"Sylvester solve failed (gap {gap:.3e}): {exc}") from exc
    P = np.zeros((n, n), dtype=complex)
    P[:k, :k] = np.eye(k)
    P[:k, k:] = -Y
    return Q @ P @ Q.conj().T


def peripheral_projection(
    ch: Channel, tol: Tolerances = DEFAULT_TOL, decomposition: SpectralDecomposition | None = None
) -> PeripheralData:
    """Spectral projector onto the peripheral eigenvalues, validated as a UCP idempotent.

    Raises
    ------
    NumericFailure
        Ordered Schur or Sylvester solve failed, or the gap to the rest of the
        spectrum is below ``tol_peripheral``.
    ConsistencyError
        The projector is not idempotent, does not commute with the channel,
        or (for UCP input) is not itself UCP.
    """
    ch = heisenberg(ch)
    sd = decomposition if decomposition is not None else spectrum(ch, tol)
    S = ch.superop
    SP = _projector_from_schur(sd.schur_T, sd.schur_Q, sd.n_peripheral, tol)
    scale = max(1.0, float(np.linalg.norm(SP, 2)))
    residuals = {
        "idempotence": float(np.linalg.norm(SP @ SP - SP, 2)) / scale,
        "commutation": float(np.linalg.norm(S @ SP - SP @ S, 2)) / scale,
    }
    p_p = make_channel(ch.dim, HEISENBERG, "superop", SP, tol, permissive=True, label="peripheral_projection")
    residuals["p_p_unitality"] = p_p.validation.unitality_residual
    residuals["p_p_choi_min_eigenvalue"] = p_p.validation.choi_min_eigenvalue
    for name in ("idempotence", "commutation"):
        if residuals[name] > tol.tol_residual:
            raise ConsistencyError(f"peripheral projection fails {name} (residual {residuals[name]:.3e})")
    if ch.is_ucp and not p_p.is_ucp:
        raise ConsistencyError(
            "peripheral projection of a UCP map is not UCP "
            f"(Choi min eigenvalue {p_p.validation.choi_min_eigenvalue:.3e}, "
            f"unitality residual {p_p.validation.unitality_residual:.3e})"
        )
    pd = PeripheralData(
        channel=ch,
        p_p=p_p,
        attractor=OperatorSubspace.zero(ch.dim),
        peripheral_eigenvalues=sd.peripheral_eigenvalues,
        decomposition=sd,
        tol=tol,
        residuals=residuals,
    )
    attractor = attractor_basis(pd)
    image = [unvec(S @ vec(b)) for b in attractor.basis]
    invariance = subspace_includes(subspace_from_spanning(image, tol, ch.dim), attractor) if image else 0.0
    residuals["attractor_invariance"] = invariance
    if invariance > tol.tol_residual:
        raise ConsistencyError(f"attractor subspace is not invariant (residual {invariance:.3e})")
    object.__setattr__(pd, "attractor", attractor)
    return pd


def attractor_basis(pd: PeripheralData) -> OperatorSubspace:
    """HS-orthonormal basis of the range of the peripheral projection."""
    d = pd.dim
    images = [unvec(pd.p_p.superop[:, k]) for k in range(d * d)]
    attractor = subspace_from_spanning(images, pd.tol, d)
    expected = len(pd.peripheral_eigenvalues)
    if attractor.dim != expected:
        raise ConsistencyError(
            f"attractor dimension {attractor.dim} differs from the peripheral multiplicity {expected}"
        )
    return attractor


def fixed_point_space(
    ch: Channel, tol: Tolerances = DEFAULT_TOL, pd: PeripheralData | None = None
) -> OperatorSubspace:
    """Eigenspace for eigenvalue 1 (within ``tol_peripheral``)."""
    ch = heisenberg(ch)
    n = ch.dim**2
    cols = null_space(ch.superop - np.eye(n), tol.tol_peripheral)
    fix = OperatorSubspace.from_columns(ch.dim, cols)
    if pd is not None:
        leak = subspace_includes(fix, pd.attractor)
        if leak > tol.tol_residual:
            raise ConsistencyError(f"fixed-point space leaves the attractor (residual {leak:.3e})")
    return fix


def fixed_point_projection(ch: Channel, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Superoperator of the spectral projector onto the eigenvalue-1 eigenspace.

    Built as ``V (W^dagger V)^{-1} W^dagger`` from right and left fixed
    vectors, which is valid because eigenvalue 1 is semisimple.  Its adjoint
    maps states to stationary states, unlike the peripheral projection when
    other unimodular eigenvalues are present.
    """
    ch = heisenberg(ch)
    n = ch.dim**2
    V = null_space(ch.superop - np.eye(n), tol.tol_peripheral)
    W = null_space(ch.superop.conj().T - np.eye(n), tol.tol_peripheral)
    if V.shape[1] != W.shape[1]:
        raise NumericFailure(f"left and right fixed spaces differ in dimension ({W.shape[1]} vs {V.shape[1]})")
    G = W.conj().T @ V
    if V.shape[1] and np.linalg.svd(G, compute_uv=False)[-1] <= tol.tol_residual:
        raise NumericFailure("eigenvalue 1 is not semisimple: left and right fixed spaces are orthogonal")
    return V @ np.linalg.solve(G, W.conj().T) if V.shape[1] else np.zeros((n, n), dtype=complex)


def asymptotic_map(ch: Channel, pd: PeripheralData, tol: Tolerances | None = None):
    """Matrix of the channel restricted to its attractor, and its inverse.

    Both are expressed in the HS-orthonormal attractor basis of ``pd``; the
    inverse comes from direct inversion.
    """
    tol = tol or pd.tol
    ch = heisenberg(ch)
    B = pd.attractor.columns
    if B.shape[1] == 0:
        raise NumericFailure("empty attractor; the peripheral cluster is mis-selected")
    M = B.conj().T @ ch.superop @ B
    smin = float(np.linalg.svd(M, compute_uv=False)[-1])
    if smin <= tol.tol_residual:
        raise NumericFailure(f"restriction to the attractor is singular (smallest singular value {smin:.3e})")
    Minv = np.linalg.inv(M)
    moduli = np.abs(np.linalg.eigvals(M))
    if np.max(np.abs(moduli - 1)) > tol.tol_peripheral:
        raise ConsistencyError(f"asymptotic map has non-unimodular eigenvalues {moduli}")
    return M, Minv
