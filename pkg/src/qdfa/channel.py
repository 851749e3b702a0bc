"""Channel data model: representations, conversions, validation, built-ins, JSON I/O.

A :class:`Channel` is a linear map on ``d x d`` matrices in either the
Heisenberg picture (unital, acts on observables) or the Schrödinger picture
(trace preserving, acts on states).  The Kraus list is shared between the two
pictures::

    Heisenberg:   X   -> sum_i K_i^dagger X K_i
    Schrödinger:  rho -> sum_i K_i rho K_i^dagger

so taking the adjoint only flips the picture and conjugate-transposes the
superoperator.  The Choi matrix of a map ``F`` is always
``sum_ij E_ij (x) F(E_ij)`` for the map in its own picture.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import InvalidChannelError
from .matcore import DEFAULT_TOL, Tolerances, unvec, vec

logger = logging.getLogger(__name__)

HEISENBERG = "heisenberg"
SCHRODINGER = "schrodinger"
PICTURES = (HEISENBERG, SCHRODINGER)
REPRESENTATIONS = ("kraus", "superop", "choi")

__all__ = [
    "Channel",
    "ValidationReport",
    "make_channel",
    "convert",
    "adjoint_channel",
    "heisenberg",
    "compose",
    "power",
    "apply",
    "identity_channel",
    "random_ucp",
    "random_unitary",
    "builtin",
    "BUILTINS",
    "load_channel",
    "save_channel",
    "channel_to_json",
    "channel_from_json",
    "kraus_to_superop",
    "superop_to_choi",
    "choi_to_superop",
    "choi_to_kraus",
]


@dataclass(frozen=True)
class ValidationReport:
    unitality_residual: float
    choi_min_eigenvalue: float
    hermiticity_residual: float
    is_ucp: bool

    def as_dict(self) -> dict:
        return {
            "unitality_residual": self.unitality_residual,
            "choi_min_eigenvalue": self.choi_min_eigenvalue,
            "hermiticity_residual": self.hermiticity_residual,
            "is_ucp": self.is_ucp,
        }


@dataclass(frozen=True)
class Channel:
    """Immutable channel.  ``superop`` is always populated; ``kraus``/``choi`` on demand."""

    dim: int
    picture: str
    superop: np.ndarray = field(repr=False)
    kraus: np.ndarray | None = field(default=None, repr=False)
    choi: np.ndarray | None = field(default=None, repr=False)
    label: str = ""
    validation: ValidationReport | None = None
    permissive: bool = False

    def __post_init__(self):
        for name in ("superop", "kraus", "choi"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, dtype=complex)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def is_ucp(self) -> bool:
        return bool(self.validation and self.validation.is_ucp)

    @property
    def tags(self) -> tuple[str, ...]:
        if self.validation is None or self.validation.is_ucp:
            return ()
        tags = []
        if self.validation.choi_min_eigenvalue < 0:
            tags.append("non-cp")
        tags.append("non-ucp")
        return tuple(tags)

    def __call__(self, X):
        return apply(self, X)


# --------------------------------------------------------------------------
# representation kernels


def kraus_to_superop(kraus: np.ndarray, picture: str = HEISENBERG) -> np.ndarray:
    kraus = np.asarray(kraus, dtype=complex)
    d = kraus.shape[-1]
    S = np.zeros((d * d, d * d), dtype=complex)
    for K in kraus:
        if picture == HEISENBERG:
            S += np.kron(K.T, K.conj().T)
        else:
            S += np.kron(K.conj(), K)
    return S


def _reshuffle(M: np.ndarray) -> np.ndarray:
    # superop[m + d n, i + d j] <-> choi[i d + m, j d + n]; the map is an involution
    d = int(round(np.sqrt(M.shape[0])))
    return M.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def superop_to_choi(S: np.ndarray) -> np.ndarray:
    return _reshuffle(np.asarray(S, dtype=complex))


def choi_to_superop(C: np.ndarray) -> np.ndarray:
    return _reshuffle(np.asarray(C, dtype=complex))


def choi_to_kraus(C: np.ndarray, picture: str = HEISENBERG, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Kraus operators from the eigendecomposition of a PSD Choi matrix."""
    C = np.asarray(C, dtype=complex)
    d = int(round(np.sqrt(C.shape[0])))
    w, v = np.linalg.eigh((C + C.conj().T) / 2)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] < -tol.tol_psd * scale:
        raise InvalidChannelError(f"Choi matrix is not PSD (min eigenvalue {w[0]:.3e}); no Kraus form")
    if w[0] < -1e-12 * scale:
        logger.warning("clamping Choi eigenvalue %.3e to zero during Kraus extraction", w[0])
    keep = w > tol.tol_psd * scale
    kraus = []
    for lam, col in zip(w[keep][::-1], v[:, keep].T[::-1]):
        M = col.reshape(d, d) * np.sqrt(lam)
        kraus.append(M.conj() if picture == HEISENBERG else M.T)
    if not kraus:
        kraus = [np.zeros((d, d), dtype=complex)]
    return np.array(kraus)


def _heisenberg_superop(ch: Channel) -> np.ndarray:
    return ch.superop if ch.picture == HEISENBERG else ch.superop.conj().T


def validate(superop: np.ndarray, picture: str, tol: Tolerances = DEFAULT_TOL) -> ValidationReport:
    S = superop if picture == HEISENBERG else superop.conj().T
    d = int(round(np.sqrt(S.shape[0])))
    eye = np.eye(d)
    unit = float(np.linalg.norm(unvec(S @ vec(eye)) - eye, 2))
    C = superop_to_choi(S)
    herm = float(np.linalg.norm(C - C.conj().T, 2))
    cmin = float(np.linalg.eigvalsh((C + C.conj().T) / 2)[0])
    is_ucp = unit <= tol.tol_residual and cmin >= -tol.tol_psd and herm <= tol.tol_residual
    return ValidationReport(unit, cmin, herm, bool(is_ucp))


# --------------------------------------------------------------------------
# construction


def _as_matrix_stack(matrices) -> np.ndarray:
    try:
        arr = np.asarray(matrices, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidChannelError(f"matrices are not a numeric array: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3:
        raise InvalidChannelError(f"expected a list of matrices, got array of shape {arr.shape}")
    return arr


def make_channel(
    dim: int,
    picture: str,
    representation: str,
    matrices,
    tol: Tolerances = DEFAULT_TOL,
    permissive: bool = False,
    label: str = "",
) -> Channel:
    """Build and validate a channel.

    Non-UCP inputs raise :class:`InvalidChannelError` unless ``permissive`` is
    set, in which case the channel is kept and tagged (see :attr:`Channel.tags`).
    """
    if picture not in PICTURES:
        raise InvalidChannelError(f"unknown picture {picture!r}; expected one of {PICTURES}")
    if representation not in REPRESENTATIONS:
        raise InvalidChannelError(f"unknown representation {representation!r}; expected one of {REPRESENTATIONS}")
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise InvalidChannelError(f"dim must be a positive integer, got {dim!r}")
    arr = _as_matrix_stack(matrices)
    if not np.all(np.isfinite(arr)):
        raise InvalidChannelError("matrices contain non-finite entries")
    kraus = choi = None
    if representation == "kraus":
        if arr.shape[1:] != (dim, dim):
            raise InvalidChannelError(f"Kraus operators must be {dim}x{dim}, got {arr.shape[1:]}")
        kraus = arr
        superop = kraus_to_superop(kraus, picture)
    else:
        if arr.shape != (1, dim * dim, dim * dim):
            raise InvalidChannelError(
                f"{representation} must be a single {dim * dim}x{dim * dim} matrix, got {arr.shape}"
            )
        if representation == "superop":
            superop = arr[0]
        else:
            choi = arr[0]
            superop = choi_to_superop(choi)
    report = validate(superop, picture, tol)
    if not report.is_ucp and not permissive:
        raise InvalidChannelError(
            "input is not a valid channel (unitality residual "
            f"{report.unitality_residual:.3e}, Choi min eigenvalue {report.choi_min_eigenvalue:.3e}, "
            f"hermiticity residual {report.hermiticity_residual:.3e}); pass permissive=True to keep it"
        )
    if not report.is_ucp:
        logger.info("keeping non-UCP map %r in permissive mode", label)
    return Channel(int(dim), picture, superop, kraus, choi, label, report, permissive)


def _derived(ch: Channel, superop: np.ndarray, label: str, picture: str | None = None, kraus=None) -> Channel:
    picture = picture or ch.picture
    return Channel(
        ch.dim, picture, superop, kraus, None, label, validate(superop, picture), ch.permissive
    )


def convert(ch: Channel, target_rep: str, tol: Tolerances = DEFAULT_TOL) -> Channel:
    """Return a copy of ``ch`` with ``target_rep`` populated."""
    if target_rep not in REPRESENTATIONS:
        raise InvalidChannelError(f"unknown representation {target_rep!r}")
    if target_rep == "superop":
        return ch
    choi = ch.choi if ch.choi is not None else superop_to_choi(ch.superop)
    if target_rep == "choi":
        return replace(ch, choi=choi)
    if ch.kraus is not None:
        return ch
    return replace(ch, choi=choi, kraus=choi_to_kraus(choi, ch.picture, tol))


def adjoint_channel(ch: Channel) -> Channel:
    """Hilbert-Schmidt adjoint: same Kraus list, other picture."""
    picture = SCHRODINGER if ch.picture == HEISENBERG else HEISENBERG
    return Channel(
        ch.dim, picture, ch.superop.conj().T, ch.kraus, None,
        ch.label + "^dagger" if ch.label else "", ch.validation, ch.permissive,
    )


def heisenberg(ch: Channel) -> Channel:
    return ch if ch.picture == HEISENBERG else adjoint_channel(ch)


def _check_compatible(a: Channel, b: Channel):
    if a.dim != b.dim:
        raise InvalidChannelError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.picture != b.picture:
        raise InvalidChannelError(f"picture mismatch: {a.picture} vs {b.picture}")


def compose(a: Channel, b: Channel) -> Channel:
    """The map ``X -> a(b(X))``."""
    _check_compatible(a, b)
    kraus = None
    if a.kraus is not None and b.kraus is not None and len(a.kraus) * len(b.kraus) <= a.dim**2:
        if a.picture == HEISENBERG:
            kraus = np.array([Kb @ Ka for Ka in a.kraus for Kb in b.kraus])
        else:
            kraus = np.array([Ka @ Kb for Ka in a.kraus for Kb in b.kraus])
    label = f"{a.label}*{b.label}" if a.label or b.label else ""
    return _derived(a, a.superop @ b.superop, label, kraus=kraus)


def identity_channel(dim: int, picture: str = HEISENBERG) -> Channel:
    return make_channel(dim, picture, "kraus", [np.eye(dim)], label="identity")


def power(ch: Channel, n: int) -> Channel:
    """``n``-fold composition by repeated squaring; ``power(ch, 0)`` is the identity."""
    if n < 0:
        raise ValueError("power requires n >= 0")
    if n == 0:
        return identity_channel(ch.dim, ch.picture)
    return _derived(ch, np.linalg.matrix_power(ch.superop, n), f"{ch.label}^{n}" if ch.label else "")


def apply(ch: Channel, X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.shape != (ch.dim, ch.dim):
        raise ValueError(f"operator shape {X.shape} does not match channel dimension {ch.dim}")
    return unvec(ch.superop @ vec(X))


# --------------------------------------------------------------------------
# random and built-in channels


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_ucp(dim: int, env_dim: int, seed) -> Channel:
    """Stinespring-random UCP map ``X -> V^dagger (X (x) 1_env) V``.

    ``V`` is the Q factor (phases fixed) of a seeded complex Gaussian
    ``(dim*env_dim, dim)`` matrix, so the result is deterministic in ``seed``.
    """
    if dim < 1 or env_dim < 1:
        raise ValueError("dim and env_dim must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim * env_dim, dim)) + 1j * rng.normal(size=(dim * env_dim, dim))
    q, r = np.linalg.qr(g)
    V = q * (np.diag(r) / np.abs(np.diag(r)))
    kraus = V.reshape(dim, env_dim, dim).transpose(1, 0, 2)
    return make_channel(dim, HEISENBERG, "kraus", kraus, label=f"random_ucp(d={dim},env={env_dim},seed={seed})")


def _units(d: int, pairs) -> np.ndarray:
    out = []
    for pair in pairs:
        E = np.zeros((d, d), dtype=complex)
        for i, j in pair:
            E[i, j] = 1.0
        out.append(E)
    return np.array(out)


def _block_projection() -> Channel:
    # X -> [[x11, x12, 0], [x21, x22, 0], [0, 0, x11]]
    kraus = _units(3, [[(0, 0), (1, 1)], [(0, 2)]])
    return make_channel(3, HEISENBERG, "kraus", kraus, label="block_projection")


def _diagonal_projection_kraus() -> np.ndarray:
    # X -> diag(x11, x22, x11)
    return _units(3, [[(0, 0)], [(1, 1)], [(0, 2)]])


def _relaxation() -> Channel:
    # exp(P - 1) = e^{-1} Id + (1 - e^{-1}) P for idempotent P
    a = np.exp(-1.0)
    P = _diagonal_projection_kraus()
    kraus = np.concatenate([np.sqrt(a) * np.eye(3)[None], np.sqrt(1 - a) * P])
    ch = make_channel(3, HEISENBERG, "kraus", kraus, label="relaxation")
    closed_form = a * np.eye(9) + (1 - a) * kraus_to_superop(P)
    return replace(ch, superop=closed_form)


def _diagonal_projection() -> Channel:
    return make_channel(3, HEISENBERG, "kraus", _diagonal_projection_kraus(), label="diagonal_projection")


def _trace_map(d: int = 2) -> Channel:
    kraus = np.array([np.sqrt(1 / d) * u for u in _units(d, [[(i, j)] for i in range(d) for j in range(d)])])
    return make_channel(d, HEISENBERG, "kraus", kraus, label=f"trace_map(d={d})")


def _state_contraction(rho=None) -> Channel:
    """``X -> tr(rho X) 1``."""
    rho = np.diag([1.0, 0.0]) if rho is None else np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    if w[0] < -DEFAULT_TOL.tol_psd or abs(np.sum(w) - 1) > DEFAULT_TOL.tol_residual:
        raise InvalidChannelError("state_contraction needs a density matrix")
    kraus = []
    for p, psi in zip(w, v.T):
        if p <= DEFAULT_TOL.tol_psd:
            continue
        for i in range(d):
            kraus.append(np.sqrt(p) * np.outer(psi, np.eye(d)[i]))
    return make_channel(d, HEISENBERG, "kraus", kraus, label="state_contraction")


def _unitary(U=None) -> Channel:
    """``X -> U^dagger X U``."""
    U = np.diag([1.0, np.exp(1j * np.pi * np.sqrt(2))]) if U is None else np.asarray(U, dtype=complex)
    if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-12):
        raise InvalidChannelError("unitary() needs a unitary matrix")
    return make_channel(U.shape[0], HEISENBERG, "kraus", [U], label="unitary")


def _transpose(d: int = 2) -> Channel:
    S = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            S[j + d * i, i + d * j] = 1.0
    return make_channel(d, HEISENBERG, "superop", S, permissive=True, label=f"transpose(d={d})")


BUILTINS = {
    "block_projection": _block_projection,
    "relaxation": _relaxation,
    "diagonal_projection": _diagonal_projection,
    "trace_map": _trace_map,
    "state_contraction": _state_contraction,
    "unitary": _unitary,
    "transpose": _transpose,
}


def builtin(name: str, *args, **kwargs) -> Channel:
    """Named example channels (all Heisenberg picture).

    ``block_projection``
        Idempotent qutrit map keeping the upper 2x2 block and copying ``x11``
        into the bottom corner.  Not peripherally automorphic.
    ``relaxation``
        ``exp(P - 1)`` for the idempotent ``P(X) = diag(x11, x22, x11)``,
        assembled in closed form.  Peripherally automorphic, not faithful.
    ``diagonal_projection``
        The idempotent ``P`` above.
    ``trace_map(d)``
        ``X -> tr(X)/d * 1``.
    ``state_contraction(rho)``
        ``X -> tr(rho X) * 1``; default ``rho = diag(1, 0)``.
    ``unitary(U)``
        ``X -> U^dagger X U``; default ``U = diag(1, exp(i pi sqrt 2))``.
    ``transpose(d)``
        Transposition, positive and unital but not CP (kept permissively).
    """
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise InvalidChannelError(f"unknown built-in channel {name!r}; choose from {sorted(BUILTINS)}") from None
    return factory(*args, **kwargs)


# --------------------------------------------------------------------------
# JSON


def _encode_matrix(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def _decode_matrix(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise InvalidChannelError("matrix entries must be [re, im] pairs in row-major nested arrays")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_json(ch: Channel, representation: str = "kraus") -> dict:
    if representation == "kraus":
        ch = convert(ch, "kraus")
        mats = ch.kraus
    elif representation == "choi":
        mats = [convert(ch, "choi").choi]
    else:
        mats = [ch.superop]
    return {
        "dim": ch.dim,
        "picture": ch.picture,
        "representation": representation,
        "matrices": [_encode_matrix(M) for M in mats],
        "label": ch.label,
    }


def channel_from_json(doc: dict, tol: Tolerances = DEFAULT_TOL, permissive: bool = False) -> Channel:
    if not isinstance(doc, dict):
        raise InvalidChannelError("channel document must be a JSON object")
    missing = {"dim", "picture", "representation", "matrices"} - set(doc)
    if missing:
        raise InvalidChannelError(f"channel document is missing keys {sorted(missing)}")
    try:
        mats = [_decode_matrix(m) for m in doc["matrices"]]
    except (TypeError, ValueError) as exc:
        raise InvalidChannelError(f"cannot decode matrices: {exc}") from exc
    if not mats:
        raise InvalidChannelError("matrices list is empty")
    return make_channel(
        doc["dim"], doc["picture"], doc["representation"], mats, tol, permissive, str(doc.get("label", ""))
    )


def load_channel(path, tol: Tolerances = DEFAULT_TOL, permissive: bool = False) -> Channel:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidChannelError(f"cannot read channel file {path}: {exc}") from exc
    return channel_from_json(doc, tol, permissive)


def save_channel(ch: Channel, path, representation: str = "kraus") -> None:
    Path(path).write_text(json.dumps(channel_to_json(ch, representation), indent=1) + "\n")
