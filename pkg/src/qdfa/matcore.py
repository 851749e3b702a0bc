"""Dense complex-matrix kernel and Hilbert-Schmidt subspace geometry.

Everything here works on plain ``numpy`` arrays.  Operators on a
``d``-dimensional Hilbert space are ``(d, d)`` complex arrays; operator
subspaces are stored as an HS-orthonormal stack of such arrays.

Vectorization is column stacking throughout the package::

    vec(A @ X @ B) == np.kron(B.T, A) @ vec(X)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericFailure

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "OperatorSubspace",
    "hs_inner",
    "hs_norm",
    "operator_norm",
    "spectral_radius",
    "vec",
    "unvec",
    "rank_cutoff",
    "null_space",
    "orth",
    "support_projection",
    "hermitian_basis",
    "matrix_unit",
    "subspace_from_spanning",
    "subspace_intersect",
    "subspace_sum",
    "subspace_contains",
    "subspace_includes",
    "subspace_equal",
    "projector_distance",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used for every rank, positivity and equality decision.

    Attributes
    ----------
    tol_ortho
        Relative singular-value cutoff for rank decisions and HS-orthonormality.
    tol_psd
        Eigenvalues above ``-tol_psd`` count as nonnegative; eigenvalues above
        ``tol_psd`` count as strictly positive (support decisions).
    tol_residual
        Bound on residuals of identities that hold exactly in exact arithmetic.
    tol_peripheral
        Eigenvalues with ``|lambda| >= 1 - tol_peripheral`` are peripheral.
    """

    tol_ortho: float = 1e-10
    tol_psd: float = 1e-9
    tol_residual: float = 1e-8
    tol_peripheral: float = 1e-7

    def __post_init__(self):
        for name in ("tol_ortho", "tol_psd", "tol_residual", "tol_peripheral"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    def as_dict(self) -> dict:
        return {
            "tol_ortho": self.tol_ortho,
            "tol_psd": self.tol_psd,
            "tol_residual": self.tol_residual,
            "tol_peripheral": self.tol_peripheral,
        }


DEFAULT_TOL = Tolerances()


def _square(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    return A


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product ``tr(A^dagger B)``, conjugate-linear in ``A``."""
    A = _square(A, "A")
    B = _square(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def hs_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A)))


def operator_norm(A) -> float:
    """Largest singular value of ``A``."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def spectral_radius(A) -> float:
    A = _square(A)
    try:
        eigs = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigensolver failed: {exc}") from exc
    return float(np.max(np.abs(eigs)))


def vec(A) -> np.ndarray:
    """Column-stacking vectorization."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError(f"vec expects a matrix, got shape {A.shape}")
    return A.reshape(-1, order="F")


def unvec(v) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    v = np.asarray(v)
    if v.ndim == 2 and 1 in v.shape:
        v = v.ravel()
    if v.ndim != 1:
        raise ValueError(f"unvec expects a vector, got shape {v.shape}")
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size or d == 0:
        raise ValueError(f"length {v.size} is not a positive perfect square")
    return v.reshape((d, d), order="F")


def rank_cutoff(singular_values: np.ndarray, tol: float) -> float:
    """Absolute-plus-relative threshold ``tol * max(1, s_max)``."""
    smax = float(singular_values[0]) if len(singular_values) else 0.0
    return tol * max(1.0, smax)


def null_space(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal columns spanning the numerical kernel of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=complex)
    # tall systems: only V is needed, so skip the m x m left factor
    _, s, vh = np.linalg.svd(M, full_matrices=M.shape[0] < n)
    rank = int(np.sum(s > rank_cutoff(s, tol)))
    return vh[rank:].conj().T


def orth(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal columns spanning the numerical range of ``M``."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > rank_cutoff(s, tol)))
    return u[:, :rank]


def support_projection(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors of ``A`` with eigenvalue > ``tol_psd``.

    Raises
    ------
    ValueError
        If ``A`` is not Hermitian positive semidefinite within tolerance.
    """
    from . import faults

    A = _square(A)
    scale = max(1.0, operator_norm(A))
    if np.linalg.norm(A - A.conj().T, 2) > tol.tol_residual * scale:
        raise ValueError("support_projection: input is not Hermitian")
    w, v = np.linalg.eigh((A + A.conj().T) / 2)
    if w[0] < -tol.tol_psd * scale:
        raise ValueError(f"support_projection: input is not PSD (min eigenvalue {w[0]:.3e})")
    cutoff = faults.support_cutoff(tol.tol_psd)
    keep = v[:, w > cutoff]
    return keep @ keep.conj().T


def matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((d, d), dtype=complex)
    E[i, j] = 1.0
    return E


def hermitian_basis(d: int) -> np.ndarray:
    """HS-orthonormal basis of Hermitian ``d x d`` matrices, as columns of a unitary ``(d^2, d^2)`` array."""
    cols = []
    s = 1 / np.sqrt(2)
    for i in range(d):
        cols.append(vec(matrix_unit(d, i, i)))
    for i in range(d):
        for j in range(i + 1, d):
            cols.append(vec(s * (matrix_unit(d, i, j) + matrix_unit(d, j, i))))
            cols.append(vec(1j * s * (matrix_unit(d, i, j) - matrix_unit(d, j, i))))
    return np.array(cols).T


@dataclass(frozen=True)
class OperatorSubspace:
    """A linear subspace of ``d x d`` matrices with an HS-orthonormal basis.

    ``basis`` has shape ``(dim, d, d)``.  Build instances through
    :func:`subspace_from_spanning` or :meth:`from_columns` rather than directly,
    so orthonormality is guaranteed.
    """

    dim_h: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex).reshape(-1, self.dim_h, self.dim_h)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_columns(cls, dim_h: int, cols: np.ndarray) -> "OperatorSubspace":
        """Wrap orthonormal columns of vectorized matrices, shape ``(d^2, m)``."""
        cols = np.asarray(cols, dtype=complex)
        mats = [unvec(cols[:, k]) for k in range(cols.shape[1])]
        return cls(dim_h, np.array(mats, dtype=complex).reshape(-1, dim_h, dim_h))

    @classmethod
    def full(cls, d: int) -> "OperatorSubspace":
        return cls.from_columns(d, np.eye(d * d, dtype=complex))

    @classmethod
    def zero(cls, d: int) -> "OperatorSubspace":
        return cls(d, np.zeros((0, d, d), dtype=complex))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def columns(self) -> np.ndarray:
        """Basis as columns of vectorized matrices, shape ``(d^2, dim)``."""
        if self.dim == 0:
            return np.zeros((self.dim_h**2, 0), dtype=complex)
        return np.stack([vec(b) for b in self.basis], axis=1)

    @property
    def projector(self) -> np.ndarray:
        """Orthogonal projector on ``C^{d^2}`` onto the subspace."""
        c = self.columns
        return c @ c.conj().T

    def project(self, X) -> np.ndarray:
        return unvec(self.projector @ vec(np.asarray(X, dtype=complex)))

    def coords(self, X) -> np.ndarray:
        return self.columns.conj().T @ vec(np.asarray(X, dtype=complex))

    def combine(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.basis, axes=1)

    def gram(self) -> np.ndarray:
        c = self.columns
        return c.conj().T @ c

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
        return self.combine(z)


def subspace_from_spanning(
    mats: Sequence | np.ndarray, tol: Tolerances = DEFAULT_TOL, dim_h: int | None = None
) -> OperatorSubspace:
    """HS-orthonormal basis for the span of ``mats``; rank decided by ``tol_ortho``."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        if dim_h is None:
            raise ValueError("dim_h is required for an empty spanning set")
        return OperatorSubspace.zero(dim_h)
    d = mats[0].shape[0]
    for m in mats:
        _square(m)
        if m.shape != (d, d):
            raise ValueError(f"inconsistent shapes in spanning set: {m.shape} vs {(d, d)}")
    cols = np.stack([vec(m) for m in mats], axis=1)
    return OperatorSubspace.from_columns(d, orth(cols, tol.tol_ortho))


def _check_same(S1: OperatorSubspace, S2: OperatorSubspace):
    if S1.dim_h != S2.dim_h:
        raise ValueError(f"subspaces live in different spaces: d={S1.dim_h} vs d={S2.dim_h}")


def subspace_intersect(S1: OperatorSubspace, S2: OperatorSubspace, tol: Tolerances = DEFAULT_TOL):
    _check_same(S1, S2)
    n = S1.dim_h**2
    eye = np.eye(n)
    stacked = np.vstack([S1.projector - eye, S2.projector - eye])
    return OperatorSubspace.from_columns(S1.dim_h, null_space(stacked, tol.tol_ortho))


def subspace_sum(S1: OperatorSubspace, S2: OperatorSubspace, tol: Tolerances = DEFAULT_TOL):
    _check_same(S1, S2)
    cols = np.hstack([S1.columns, S2.columns])
    return OperatorSubspace.from_columns(S1.dim_h, orth(cols, tol.tol_ortho))


def subspace_contains(S: OperatorSubspace, X, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, float]:
    """Membership test; returns ``(inside, relative_residual)``."""
    X = _square(X, "X")
    if X.shape != (S.dim_h, S.dim_h):
        raise ValueError(f"shape mismatch: {X.shape} vs d={S.dim_h}")
    norm = hs_norm(X)
    residual = hs_norm(X - S.project(X)) / max(1.0, norm)
    return residual <= tol.tol_residual, residual


def projector_distance(S1: OperatorSubspace, S2: OperatorSubspace) -> float:
    _check_same(S1, S2)
    return float(np.linalg.norm(S1.projector - S2.projector, 2))


def subspace_includes(inner: OperatorSubspace, outer: OperatorSubspace) -> float:
    """Residual ``||(1 - P_outer) P_inner||``; zero iff ``inner`` is contained in ``outer``."""
    _check_same(inner, outer)
    if inner.dim == 0:
        return 0.0
    c = inner.columns
    return float(np.linalg.norm(c - outer.projector @ c, 2))


def subspace_equal(S1: OperatorSubspace, S2: OperatorSubspace, tol: Tolerances = DEFAULT_TOL) -> bool:
    return S1.dim == S2.dim and projector_distance(S1, S2) <= tol.tol_residual


def stack_vec(mats: Iterable) -> np.ndarray:
    return np.stack([vec(m) for m in mats], axis=1)
