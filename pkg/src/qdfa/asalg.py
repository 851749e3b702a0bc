"""Asymptotic algebra: Choi-Effros product, decoherence-free algebras, faithfulness.

Notation used below: ``S`` is the Heisenberg superoperator of the channel,
``P`` its peripheral projection and ``X * Y = P(XY)`` the Choi-Effros product.

* ``Attr``  range of ``P`` (a unital C*-algebra under ``*``)
* ``N``     decoherence-free algebra: where every power of the channel is a
            *-homomorphism for the composition product
* ``K``     kernel ideal ``{X : P(X^dagger X) = P(X X^dagger) = 0}``
* ``N*``    Choi-Effros decoherence-free algebra, equal to ``Attr + K``
            (direct sum)

All spaces are :class:`~qdfa.matcore.OperatorSubspace` instances.  Every
construction that relies on a structural identity is cross-checked against an
independent route and raises :class:`~qdfa.errors.ConsistencyError` when the
two disagree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import faults
from .channel import Channel, convert, heisenberg
from .errors import ConsistencyError, InvalidChannelError
from .matcore import (
    DEFAULT_TOL,
    OperatorSubspace,
    Tolerances,
    null_space,
    operator_norm,
    orth,
    projector_distance,
    spectral_radius,
    subspace_contains,
    subspace_includes,
    subspace_intersect,
    subspace_sum,
    support_projection,
    unvec,
    vec,
)
from .spectral import PeripheralData, fixed_point_projection, fixed_point_space, peripheral_projection, spectrum

__all__ = [
    "CStarPresentation",
    "AnalysisReport",
    "choi_effros",
    "algebra_presentation",
    "attractor_algebra",
    "multiplicative_domain",
    "multiplicative_domain_polarized",
    "dfa",
    "dfa_by_definition",
    "kernel_ideal",
    "ce_dfa",
    "ce_dfa_by_definition",
    "is_faithful",
    "is_peripherally_automorphic",
    "peripheral_automorphy_witness",
    "classify",
    "gns_form",
    "gns_gram",
    "seminorm_omega",
    "quotient_norm",
    "ce_unit",
    "schwarz_defect",
    "star_schwarz_defect",
]

FAITHFUL = "faithful"
PERIPHERALLY_AUTOMORPHIC = "peripherally_automorphic"
GENERIC = "generic"


# --------------------------------------------------------------------------
# products


def _vec_stack(mats: np.ndarray) -> np.ndarray:
    """Column-stack a ``(m, d, d)`` array into ``(d^2, m)``."""
    mats = np.asarray(mats)
    return mats.transpose(0, 2, 1).reshape(mats.shape[0], -1).T


def _unvec_stack(cols: np.ndarray, d: int) -> np.ndarray:
    return cols.T.reshape(-1, d, d).transpose(0, 2, 1)


def _apply_stack(superop: np.ndarray, mats: np.ndarray) -> np.ndarray:
    mats = np.asarray(mats, dtype=complex)
    if mats.shape[0] == 0:
        return mats
    return _unvec_stack(superop @ _vec_stack(mats), mats.shape[-1])


def _star_stack(pd: PeripheralData, mats: np.ndarray) -> np.ndarray:
    return faults.star_sign() * _apply_stack(pd.p_p.superop, mats)


def choi_effros(pd: PeripheralData, X, Y) -> np.ndarray:
    """Choi-Effros product ``P(XY)``; bilinear on all operators, associative on ``N*``."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.shape != (pd.dim, pd.dim) or Y.shape != X.shape:
        raise ValueError(f"operands must be {pd.dim}x{pd.dim}, got {X.shape} and {Y.shape}")
    return faults.star_sign() * pd.apply(X @ Y)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _random_ops(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))) / np.sqrt(2)


def _random_in(space: OperatorSubspace, n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, space.dim)) + 1j * rng.normal(size=(n, space.dim))
    return np.einsum("nk,kij->nij", z, space.basis) if space.dim else np.zeros((n, space.dim_h, space.dim_h), complex)


# --------------------------------------------------------------------------
# algebra presentations


@dataclass(frozen=True)
class CStarPresentation:
    """Finite-dimensional *-algebra given by a basis and structure constants.

    ``structure_constants[i, j, k]`` is the coefficient of ``b_k`` in
    ``b_i o b_j`` where ``o`` is the product named by ``product_kind``.
    ``unit_coords`` is ``None`` when no unit exists in the space.
    """

    space: OperatorSubspace = field(repr=False)
    product_kind: str
    structure_constants: np.ndarray = field(repr=False)
    unit_coords: np.ndarray | None
    axiom_residuals: dict

    @property
    def dim(self) -> int:
        return self.space.dim

    def multiply(self, x, y) -> np.ndarray:
        """Product of two elements given in basis coordinates."""
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)


def algebra_presentation(
    pd: PeripheralData, space: OperatorSubspace, product_kind: str = "choi_effros", seed=0, samples: int = 8
) -> CStarPresentation:
    """Structure constants and axiom residuals of ``space`` under a product.

    ``product_kind`` is ``"choi_effros"`` or ``"composition"``.  Residuals:
    ``closure`` (products leave the space), ``involution_closure``,
    ``associativity`` (over all basis triples), ``unit`` (unit action, ``inf``
    if no unit exists) and ``cstar_identity`` (``|  ||x^dagger x|| - ||x||^2 |``
    relative, sampled).
    """
    if product_kind not in ("choi_effros", "composition"):
        raise ValueError(f"unknown product kind {product_kind!r}")
    tol = pd.tol
    B = space.basis
    m, d = space.dim, space.dim_h
    if m == 0:
        return CStarPresentation(space, product_kind, np.zeros((0, 0, 0), complex), None, {})
    raw = np.einsum("iab,jbc->ijac", B, B).reshape(m * m, d, d)
    prods = _star_stack(pd, raw) if product_kind == "choi_effros" else raw
    cols = space.columns
    pvec = _vec_stack(prods)
    coords = cols.conj().T @ pvec
    closure = float(np.max(np.linalg.norm(pvec - cols @ coords, axis=0)))
    c = coords.T.reshape(m, m, m)

    adj = np.conj(B.transpose(0, 2, 1))
    av = _vec_stack(adj)
    involution = float(np.max(np.linalg.norm(av - cols @ (cols.conj().T @ av), axis=0)))

    left = np.einsum("ijl,lkn->ijkn", c, c)
    right = np.einsum("jkl,iln->ijkn", c, c)
    associativity = float(np.max(np.linalg.norm(left - right, axis=-1)))

    # unit: u with sum_i u_i c_ijn = delta_jn and sum_j u_j c_ijn = delta_in
    A = np.vstack([c.transpose(1, 2, 0).reshape(m * m, m), c.transpose(0, 2, 1).reshape(m * m, m)])
    target = np.concatenate([np.eye(m).ravel(), np.eye(m).ravel()])
    u, *_ = np.linalg.lstsq(A, target, rcond=None)
    unit_res = float(np.linalg.norm(A @ u - target))
    unit_coords = u if unit_res <= tol.tol_residual * max(1.0, np.sqrt(m)) else None

    rng = _rng(seed)
    xs = _random_in(space, samples, rng)
    cstar = 0.0
    for X in xs:
        XX = X.conj().T @ X
        XX = choi_effros(pd, X.conj().T, X) if product_kind == "choi_effros" else XX
        nx = operator_norm(X)
        cstar = max(cstar, abs(operator_norm(XX) - nx**2) / max(1.0, nx**2))

    residuals = {
        "closure": closure,
        "involution_closure": involution,
        "associativity": associativity,
        "unit": unit_res,
        "cstar_identity": cstar,
    }
    return CStarPresentation(space, product_kind, c, unit_coords, residuals)


def attractor_algebra(pd: PeripheralData, seed=0) -> CStarPresentation:
    """The attractor as a unital C*-algebra under the Choi-Effros product."""
    pres = algebra_presentation(pd, pd.attractor, "choi_effros", seed)
    scale = max(1.0, np.sqrt(pres.dim))
    if pres.axiom_residuals.get("closure", 0.0) > pd.tol.tol_residual * scale:
        raise ConsistencyError(
            f"Choi-Effros products leave the attractor (residual {pres.axiom_residuals['closure']:.3e})"
        )
    return pres


# --------------------------------------------------------------------------
# multiplicative domain and decoherence-free algebra


def multiplicative_domain(ch: Channel, tol: Tolerances = DEFAULT_TOL) -> OperatorSubspace:
    """Two-sided multiplicative domain of a UCP map, from its Kraus operators.

    With ``D_i = X K_i - K_i F(X)`` one has
    ``sum_i D_i^dagger D_i = F(X^dagger X) - F(X)^dagger F(X)``, so saturating
    the Schwarz inequality is the linear condition ``D_i = 0`` for all ``i``;
    the ``X X^dagger`` side gives ``K_i^dagger X = F(X) K_i^dagger``.
    Maps without a Kraus form fall back to
    :func:`multiplicative_domain_polarized`.
    """
    ch = heisenberg(ch)
    try:
        ch = convert(ch, "kraus", tol)
    except InvalidChannelError:
        return multiplicative_domain_polarized(ch, tol)
    d = ch.dim
    S = ch.superop
    eye = np.eye(d)
    blocks = []
    for K in ch.kraus:
        Kd = K.conj().T
        blocks.append(np.kron(K.T, eye) - np.kron(eye, K) @ S)
        blocks.append(np.kron(eye, Kd) - np.kron(Kd.T, eye) @ S)
    return OperatorSubspace.from_columns(d, null_space(np.vstack(blocks), tol.tol_ortho))


@lru_cache(maxsize=8)
def _unit_krons(d: int) -> tuple[np.ndarray, np.ndarray]:
    # vec(E X) = (1 (x) E) vec(X) and vec(X E) = (E^T (x) 1) vec(X), for every matrix unit E
    eye = np.eye(d)
    units = np.eye(d * d).reshape(d * d, d, d).transpose(0, 2, 1)
    return _kron_left(units, eye), _kron_right(units, eye)


def _kron_left(A: np.ndarray, eye: np.ndarray) -> np.ndarray:
    d = eye.shape[0]
    return np.einsum("ij,nab->niajb", eye, A).reshape(A.shape[0], d * d, d * d)


def _kron_right(A: np.ndarray, eye: np.ndarray) -> np.ndarray:
    d = eye.shape[0]
    return np.einsum("nji,ab->niajb", A, eye).reshape(A.shape[0], d * d, d * d)


def _product_rows(A: np.ndarray, F: np.ndarray, C: np.ndarray, d: int, B: np.ndarray | None = None) -> np.ndarray:
    """Rows of ``A(E X) = B(F(E) C(X))`` and ``A(X E) = B(C(X) F(E))`` over matrix units ``E``.

    With ``A = F = C`` and no ``B`` these say ``F`` is multiplicative against
    every ``Y``; the Choi-Effros variant puts the peripheral projection in
    ``A`` and ``B``.  Matrix unit ``n`` is column ``n`` of the identity, so
    ``F(E_n)`` is column ``n`` of ``F``.
    """
    eye = np.eye(d)
    L, R = _unit_krons(d)
    FE = F.T.reshape(d * d, d, d).transpose(0, 2, 1)
    left = _kron_left(FE, eye) @ C
    right = _kron_right(FE, eye) @ C
    if B is not None:
        left, right = B @ left, B @ right
    return np.concatenate([A @ L - left, A @ R - right]).reshape(-1, d * d)


def multiplicative_domain_polarized(ch: Channel, tol: Tolerances = DEFAULT_TOL) -> OperatorSubspace:
    """``{X : F(YX) = F(Y)F(X), F(XY) = F(X)F(Y) for all Y}``.

    For Schwarz maps this is the two-sided multiplicative domain; it needs no
    Kraus form and so also serves as an independent check of
    :func:`multiplicative_domain`.
    """
    ch = heisenberg(ch)
    S = ch.superop
    rows = _product_rows(S, S, S, ch.dim)
    return OperatorSubspace.from_columns(ch.dim, null_space(rows, tol.tol_ortho))


def _largest_invariant_subspace(S: np.ndarray, V: OperatorSubspace, tol: Tolerances) -> OperatorSubspace:
    # V_{k+1} = V_k  intersect  S^{-1}(V_k); dimensions strictly drop until the fixpoint.
    n = S.shape[0]
    while V.dim:
        B = V.columns
        c = null_space((np.eye(n) - V.projector) @ S @ B, tol.tol_ortho)
        if c.shape[1] == V.dim:
            break
        V = OperatorSubspace.from_columns(V.dim_h, orth(B @ c, tol.tol_ortho))
    return V


def _batch_norm(A: np.ndarray) -> np.ndarray:
    return np.linalg.norm(A, 2, axis=(-2, -1)) if A.shape[0] else np.zeros(0)


def _defects(S_pow: np.ndarray, X: np.ndarray, SP: np.ndarray | None = None) -> np.ndarray:
    Xd = X.conj().swapaxes(-1, -2)
    FX = _apply_stack(S_pow, X)
    FXd = FX.conj().swapaxes(-1, -2)
    if SP is None:
        a = _apply_stack(S_pow, Xd @ X) - FXd @ FX
        b = _apply_stack(S_pow, X @ Xd) - FX @ FXd
    else:
        sign = faults.star_sign()
        SnP = S_pow @ SP
        a = sign * (_apply_stack(SnP, Xd @ X) - _apply_stack(SP, FXd @ FX))
        b = sign * (_apply_stack(SnP, X @ Xd) - _apply_stack(SP, FX @ FXd))
    return np.maximum(_batch_norm(a), _batch_norm(b))


def schwarz_defect(S_pow: np.ndarray, X: np.ndarray) -> float:
    """Largest of ``||F(X^dagger X) - F(X)^dagger F(X)||`` and its ``X X^dagger`` twin."""
    return float(_defects(S_pow, np.asarray(X, dtype=complex)[None])[0])


def star_schwarz_defect(S_pow: np.ndarray, SP: np.ndarray, X: np.ndarray) -> float:
    """``||F(X^dagger * X) - F(X)^dagger * F(X)||`` and twin, ``*`` the Choi-Effros product."""
    return float(_defects(S_pow, np.asarray(X, dtype=complex)[None], SP)[0])


def _worst_defect(S: np.ndarray, probes: np.ndarray, n_max: int, SP: np.ndarray | None = None) -> float:
    scale = np.maximum(1.0, _batch_norm(probes) ** 2)
    return max((float(np.max(_defects(Sn, probes, SP) / scale)) for Sn in _powers(S, n_max)), default=0.0)


def _probe_elements(space: OperatorSubspace, rng: np.random.Generator, extra: int = 3) -> np.ndarray:
    return np.concatenate([np.asarray(space.basis), _random_in(space, extra, rng)])


def _powers(S: np.ndarray, n_max: int) -> list[np.ndarray]:
    out, cur = [], np.eye(S.shape[0], dtype=complex)
    for _ in range(n_max):
        cur = S @ cur
        out.append(cur)
    return out


def dfa(ch: Channel, tol: Tolerances = DEFAULT_TOL, seed=0) -> OperatorSubspace:
    """Decoherence-free algebra ``N`` as the largest invariant subspace of the multiplicative domain.

    If ``X`` is in ``N`` then so is ``F(X)``, and the ``n = 1`` conditions
    put ``X`` in the multiplicative domain.  Conversely an invariant subspace
    of the multiplicative domain satisfies the conditions for every power by
    induction.  The saturation conditions are re-verified directly for
    ``n = 1 .. d^2`` on basis elements and random combinations.
    """
    ch = heisenberg(ch)
    V = _largest_invariant_subspace(ch.superop, multiplicative_domain(ch, tol), tol)
    if ch.is_ucp and V.dim:
        rng = _rng(seed)
        worst = _worst_defect(ch.superop, _probe_elements(V, rng), ch.dim**2)
        if worst > tol.tol_residual:
            raise ConsistencyError(f"decoherence-free algebra fails its defining identities (residual {worst:.3e})")
    return V


def dfa_by_definition(ch: Channel, tol: Tolerances = DEFAULT_TOL, n_max: int | None = None) -> OperatorSubspace:
    """``N`` straight from its definition, truncated at ``n_max`` powers (default ``d^2``).

    Each condition ``F^n(YX) = F^n(Y) F^n(X)`` is linear in ``X``; intersecting
    their kernels over matrix units ``Y`` and ``n = 1..n_max`` is an
    independent route to :func:`dfa`.
    """
    ch = heisenberg(ch)
    n_max = n_max or ch.dim**2
    rows = [_product_rows(Sn, Sn, Sn, ch.dim) for Sn in _powers(ch.superop, n_max)]
    return OperatorSubspace.from_columns(ch.dim, null_space(np.vstack(rows), tol.tol_ortho))


# --------------------------------------------------------------------------
# kernel ideal and the Choi-Effros decoherence-free algebra


def _support(pd: PeripheralData) -> np.ndarray:
    return support_projection(pd.apply_adjoint(np.eye(pd.dim)), pd.tol)


def kernel_ideal(pd: PeripheralData) -> OperatorSubspace:
    """``K = {X : P(X^dagger X) = P(X X^dagger) = 0} = (1 - Pi) B(H) (1 - Pi)``.

    ``Pi`` is the support projection of ``P^dagger(1)``:
    ``P(X^dagger X) = 0`` iff ``tr(P^dagger(1) X^dagger X) = 0`` iff ``X Pi = 0``.
    """
    d, tol = pd.dim, pd.tol
    Pi = _support(pd)
    Q = orth(np.eye(d) - Pi, tol.tol_ortho)
    r = Q.shape[1]
    basis = np.array([np.outer(Q[:, a], Q[:, b].conj()) for a in range(r) for b in range(r)], dtype=complex)
    K = OperatorSubspace(d, basis.reshape(-1, d, d))
    if K.dim:
        left = _apply_stack(pd.p_p.superop, np.einsum("nba,nbc->nac", K.basis.conj(), K.basis))
        right = _apply_stack(pd.p_p.superop, np.einsum("nab,ncb->nac", K.basis, K.basis.conj()))
        worst = max(np.max(np.abs(left)), np.max(np.abs(right)))
        if worst > tol.tol_residual:
            raise ConsistencyError(f"kernel ideal basis is not annihilated by P (residual {worst:.3e})")
    return K


def ce_dfa(pd: PeripheralData, seed=0, kernel: OperatorSubspace | None = None) -> OperatorSubspace:
    """``N* = Attr (+) K``, with the defining saturation identities checked for ``n = 1..d^2``."""
    tol = pd.tol
    K = kernel if kernel is not None else kernel_ideal(pd)
    A = pd.attractor
    total = subspace_sum(A, K, tol)
    if total.dim != A.dim + K.dim:
        raise ConsistencyError(
            f"attractor and kernel ideal intersect (dims {A.dim} + {K.dim} span only {total.dim})",
            witness=subspace_intersect(A, K, tol),
        )
    if pd.channel.is_ucp and total.dim:
        rng = _rng(seed)
        worst = _worst_defect(pd.channel.superop, _probe_elements(total, rng), pd.dim**2, pd.p_p.superop)
        if worst > tol.tol_residual:
            raise ConsistencyError(
                f"Choi-Effros decoherence-free algebra fails its defining identities (residual {worst:.3e})"
            )
    return total


def ce_dfa_by_definition(pd: PeripheralData, n_max: int | None = None) -> OperatorSubspace:
    """``N*`` from its definition: ``F^n(Y * X) = F^n(Y) * F^n(X)`` and twin, ``n <= n_max``."""
    d = pd.dim
    n_max = n_max or d**2
    SP = faults.star_sign() * pd.p_p.superop
    rows = [_product_rows(Sn @ SP, Sn, Sn, d, SP) for Sn in _powers(pd.channel.superop, n_max)]
    return OperatorSubspace.from_columns(d, null_space(np.vstack(rows), pd.tol.tol_ortho))


# --------------------------------------------------------------------------
# faithfulness and peripheral automorphy


def is_faithful(pd: PeripheralData, kernel: OperatorSubspace | None = None) -> tuple[bool, np.ndarray]:
    """Whether the dual channel has an invertible stationary state.

    Returns ``(faithful, sigma)``.  The decision reads the support of
    ``P^dagger(1)``; the support test, the minimum eigenvalue test and
    ``dim K == 0`` must agree.  ``P^dagger(1)/d`` is only an asymptotic state
    when unimodular eigenvalues other than 1 are present, so the witness is
    ``sigma = F1^dagger(1)/d`` with ``F1`` the eigenvalue-1 spectral projector.
    It is stationary, has maximal rank, and its support must match.
    """
    d, tol = pd.dim, pd.tol
    A = pd.apply_adjoint(np.eye(d))
    Pi = _support(pd)
    by_support = bool(np.linalg.norm(Pi - np.eye(d), 2) <= tol.tol_residual)
    by_eigenvalue = bool(np.linalg.eigvalsh((A + A.conj().T) / 2)[0] > tol.tol_psd)
    K = kernel if kernel is not None else kernel_ideal(pd)
    by_kernel = K.dim == 0
    F1 = fixed_point_projection(pd.channel, tol)
    sigma = unvec(F1.conj().T @ vec(np.eye(d))) / d
    sigma = (sigma + sigma.conj().T) / 2
    if not (by_support == by_eigenvalue == by_kernel):
        raise ConsistencyError(
            f"faithfulness criteria disagree (support={by_support}, eigenvalue={by_eigenvalue}, kernel={by_kernel})",
            witness=sigma,
        )
    S_dual = pd.channel.superop.conj().T
    drift = operator_norm(unvec(S_dual @ vec(sigma)) - sigma)
    if drift > tol.tol_residual:
        raise ConsistencyError(f"sigma is not stationary under the dual channel (residual {drift:.3e})", witness=sigma)
    mismatch = operator_norm(support_projection(sigma, tol) - Pi)
    if mismatch > tol.tol_residual:
        raise ConsistencyError("stationary state and asymptotic state have different supports", witness=sigma)
    return by_support, sigma


class AutomorphyCheck(NamedTuple):
    holds: bool
    max_residual: float


def _closure_defects(pd: PeripheralData) -> np.ndarray:
    B = pd.attractor.basis
    m, d = B.shape[0], pd.dim
    if m == 0:
        return np.zeros((0, 0))
    prods = np.einsum("iab,jbc->ijac", B, B).reshape(m * m, d, d)
    diff = prods - _apply_stack(pd.p_p.superop, prods)
    return np.linalg.norm(diff.reshape(m * m, -1), axis=1).reshape(m, m)


def is_peripherally_automorphic(pd: PeripheralData, seed=0, samples: int = 6) -> AutomorphyCheck:
    """Whether the attractor is closed under composition (so ``X * Y = XY`` there).

    Decided on basis pairs; cross-checked on random attractor pairs against
    ``X * Y == XY`` directly.
    """
    tol = pd.tol
    defects = _closure_defects(pd)
    worst = float(defects.max()) if defects.size else 0.0
    holds = worst <= tol.tol_residual
    rng = _rng(seed)
    xs = _random_in(pd.attractor, samples, rng)
    ys = _random_in(pd.attractor, samples, rng)
    direct = 0.0
    for X, Y in zip(xs, ys):
        scale = max(1.0, operator_norm(X) * operator_norm(Y))
        direct = max(direct, operator_norm(choi_effros(pd, X, Y) - X @ Y) / scale)
    if holds != (direct <= tol.tol_residual * max(1.0, np.sqrt(pd.attractor.dim))):
        raise ConsistencyError(
            f"peripheral automorphy tests disagree (basis residual {worst:.3e}, sampled residual {direct:.3e})"
        )
    return AutomorphyCheck(bool(holds), worst)


def peripheral_automorphy_witness(pd: PeripheralData):
    """Attractor basis pair ``(X, Y)`` whose product leaves the attractor the most, or ``None``."""
    defects = _closure_defects(pd)
    if not defects.size or defects.max() <= pd.tol.tol_residual:
        return None
    i, j = np.unravel_index(np.argmax(defects), defects.shape)
    B = pd.attractor.basis
    return B[i], B[j]


# --------------------------------------------------------------------------
# GNS form, seminorm, quotient norm


def _require_member(space: OperatorSubspace, X, tol: Tolerances, what: str = "N*"):
    ok, res = subspace_contains(space, X, tol)
    if not ok:
        raise ValueError(f"operator is not in {what} (relative residual {res:.3e})")


def gns_form(pd: PeripheralData, X, Y, space: OperatorSubspace | None = None) -> complex:
    """``omega(X^dagger Y) = tr(P^dagger(1) X^dagger Y) / d`` for ``X, Y`` in ``N*``."""
    space = space if space is not None else ce_dfa(pd)
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    _require_member(space, X, pd.tol)
    _require_member(space, Y, pd.tol)
    A = pd.apply_adjoint(np.eye(pd.dim))
    return complex(np.trace(A @ X.conj().T @ Y) / pd.dim)


def gns_gram(pd: PeripheralData, space: OperatorSubspace) -> np.ndarray:
    """Gram matrix of the GNS form on a basis of ``space``."""
    A = pd.apply_adjoint(np.eye(pd.dim)) / pd.dim
    B = space.basis
    return np.einsum("ab,icb,jca->ij", A, B.conj(), B)


def seminorm_omega(pd: PeripheralData, X, space: OperatorSubspace | None = None) -> float:
    """C*-seminorm ``rho(X^dagger * X)^(1/2)`` on ``N*``; equals ``||P(X)||``."""
    space = space if space is not None else ce_dfa(pd)
    X = np.asarray(X, dtype=complex)
    _require_member(space, X, pd.tol)
    value = float(np.sqrt(max(spectral_radius(choi_effros(pd, X.conj().T, X)), 0.0)))
    closed = operator_norm(pd.apply(X))
    if abs(value - closed) > pd.tol.tol_residual * max(1.0, closed):
        raise ConsistencyError(f"seminorm {value:.12g} differs from ||P(X)|| = {closed:.12g}")
    return value


def quotient_norm(
    pd: PeripheralData, X, space: OperatorSubspace | None = None, kernel: OperatorSubspace | None = None,
    samples: int = 64, seed=0,
) -> float:
    """Norm of the coset ``X + K``, i.e. ``inf ||X + K||``, which equals ``||P(X)||``.

    The closed form is checked as a lower bound against sampled ``||X + K||``.
    """
    space = space if space is not None else ce_dfa(pd)
    K = kernel if kernel is not None else kernel_ideal(pd)
    X = np.asarray(X, dtype=complex)
    _require_member(space, X, pd.tol)
    value = operator_norm(pd.apply(X))
    if K.dim:
        rng = _rng(seed)
        scale = max(1.0, operator_norm(X))
        for Kk in _random_in(K, samples, rng):
            Kk = Kk * scale * rng.uniform(0.01, 2.0) / max(operator_norm(Kk), 1e-300)
            if operator_norm(X + Kk) < value - pd.tol.tol_residual * scale:
                raise ConsistencyError("sampled coset element beats the closed-form quotient norm", witness=Kk)
    return value


def ce_unit(pd: PeripheralData, space: OperatorSubspace) -> np.ndarray | None:
    """A two-sided unit of ``(space, *)`` if one exists, else ``None``."""
    pres = algebra_presentation(pd, space, "choi_effros")
    if pres.unit_coords is None:
        return None
    return space.combine(pres.unit_coords)


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class AnalysisReport:
    """Full asymptotic classification of one channel."""

    label: str
    dims: dict
    faithful: bool
    peripherally_automorphic: bool
    asymptotic_class: str
    invariant_residuals: dict
    stationary_state: np.ndarray = field(repr=False)
    support_dim: int
    eigenvalues: np.ndarray = field(repr=False)
    peripheral_eigenvalues: np.ndarray = field(repr=False)
    spaces: dict = field(repr=False, default_factory=dict)
    ce_unit_exists: bool = False
    chain_violations: tuple = ()
    peripheral: PeripheralData | None = field(repr=False, default=None)


def _inclusion(inner: OperatorSubspace, outer: OperatorSubspace, tol: Tolerances) -> tuple[bool, float]:
    r = subspace_includes(inner, outer)
    return r <= tol.tol_residual, r


def classify(ch: Channel, tol: Tolerances = DEFAULT_TOL, seed=0) -> AnalysisReport:
    """Run the whole pipeline and check the inclusion chain for the detected class.

    faithful
        ``Attr = N = N*``
    peripherally automorphic
        ``Attr <= N <= N*``
    otherwise
        ``Attr`` not inside ``N``, ``Attr`` strictly inside ``N*``, ``N <= N*``

    ``N <= N*`` and ``F(N*) <= N*`` are checked for every class.  For UCP input
    any violation raises :class:`ConsistencyError`; for maps ingested
    permissively they are only recorded in ``chain_violations``.
    """
    ch = heisenberg(ch)
    sd = spectrum(ch, tol)
    pd = peripheral_projection(ch, tol, sd)
    attr = pd.attractor
    fix = fixed_point_space(ch, tol, pd)
    n_space = dfa(ch, tol, seed)
    K = kernel_ideal(pd)
    n_star = ce_dfa(pd, seed, kernel=K)
    faithful, sigma = is_faithful(pd, kernel=K)
    pa = is_peripherally_automorphic(pd, seed)

    residuals = dict(pd.residuals)
    residuals["semisimplicity"] = sd.semisimplicity_residual
    residuals["eigenvalue_conjugation"] = sd.conjugation_residual
    residuals["peripheral_closure_defect"] = pa.max_residual
    violations = []

    def check(name: str, ok: bool):
        if not ok:
            violations.append(name)

    ok, residuals["dfa_in_ce_dfa"] = _inclusion(n_space, n_star, tol)
    check("dfa_in_ce_dfa", ok)
    image = OperatorSubspace.from_columns(ch.dim, orth(ch.superop @ n_star.columns, tol.tol_ortho))
    ok, residuals["ce_dfa_invariance"] = _inclusion(image, n_star, tol)
    check("ce_dfa_invariance", ok)
    attr_in_n, residuals["attractor_in_dfa"] = _inclusion(attr, n_space, tol)
    check("attractor_in_dfa_iff_automorphic", attr_in_n == pa.holds)
    attr_is_nstar = attr.dim == n_star.dim and projector_distance(attr, n_star) <= tol.tol_residual
    check("faithful_iff_attractor_is_ce_dfa", attr_is_nstar == faithful)
    check("faithful_implies_automorphic", pa.holds or not faithful)

    if faithful:
        cls = FAITHFUL
        check("faithful_chain", n_space.dim == attr.dim and attr_in_n and attr_is_nstar)
    elif pa.holds:
        cls = PERIPHERALLY_AUTOMORPHIC
        check("automorphic_chain", attr_in_n)
    else:
        cls = GENERIC
        check("generic_chain", not attr_in_n and attr.dim < n_star.dim)

    if violations and ch.is_ucp:
        raise ConsistencyError(f"inclusion chain violated: {', '.join(violations)}", witness=violations)

    unit = ce_unit(pd, n_star) if n_star.dim else None
    dims = {
        "attr": attr.dim,
        "fix": fix.dim,
        "dfa": n_space.dim,
        "ce_dfa": n_star.dim,
        "kernel_ideal": K.dim,
    }
    return AnalysisReport(
        label=ch.label,
        dims=dims,
        faithful=faithful,
        peripherally_automorphic=pa.holds,
        asymptotic_class=cls,
        invariant_residuals=residuals,
        stationary_state=sigma,
        support_dim=int(round(np.real(np.trace(_support(pd))))),
        eigenvalues=sd.eigenvalues,
        peripheral_eigenvalues=sd.peripheral_eigenvalues,
        spaces={"attr": attr, "fix": fix, "dfa": n_space, "ce_dfa": n_star, "kernel_ideal": K},
        ce_unit_exists=unit is not None,
        chain_violations=tuple(violations),
        peripheral=pd,
    )
