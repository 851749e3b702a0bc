"""Golden fixtures, the random channel corpus, and the invariant battery.

Every structural identity the library relies on is restated here as an
executable check with a numeric bound, evaluated over a seeded corpus of
built-in and random channels.  Failures are results, never exceptions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg

from . import asalg, posit
from .channel import (
    HEISENBERG,
    Channel,
    builtin,
    compose,
    heisenberg,
    make_channel,
    random_ucp,
    random_unitary,
)
from .errors import QdfaError
from .matcore import (
    DEFAULT_TOL,
    OperatorSubspace,
    Tolerances,
    operator_norm,
    projector_distance,
    subspace_includes,
    subspace_intersect,
    unvec,
    vec,
)
from .spectral import asymptotic_map, fixed_point_space, peripheral_projection, spectrum

__all__ = [
    "ANCHORS",
    "CorpusEntry",
    "InvariantResult",
    "golden_fixtures",
    "build_corpus",
    "corpus_entry",
    "run_invariant_suite",
    "suite_report",
]


# --------------------------------------------------------------------------
# fixtures and corpus


def _swap_channel() -> Channel:
    # X -> diag(x22, x11, x22): peripheral eigenvalues +1 and -1
    kraus = np.zeros((3, 3, 3), dtype=complex)
    kraus[0, 1, 0] = kraus[1, 0, 1] = kraus[2, 1, 2] = 1.0
    return make_channel(3, HEISENBERG, "kraus", kraus, label="swap")


def golden_fixtures() -> list[tuple[Channel, dict]]:
    """Named channels with pinned expectations for their analysis."""
    return [
        (
            builtin("block_projection"),
            {"dims": {"attr": 4, "fix": 4, "dfa": 3, "ce_dfa": 5, "kernel_ideal": 1},
             "faithful": False, "peripherally_automorphic": False, "asymptotic_class": "generic"},
        ),
        (
            builtin("relaxation"),
            {"dims": {"attr": 2, "fix": 2, "dfa": 2, "ce_dfa": 3, "kernel_ideal": 1},
             "faithful": False, "peripherally_automorphic": True,
             "asymptotic_class": "peripherally_automorphic"},
        ),
        (
            builtin("trace_map", 2),
            {"dims": {"attr": 1, "fix": 1, "dfa": 1, "ce_dfa": 1, "kernel_ideal": 0},
             "faithful": True, "peripherally_automorphic": True, "asymptotic_class": "faithful"},
        ),
        (
            builtin("state_contraction", np.diag([1.0, 0.0])),
            {"dims": {"attr": 1, "fix": 1, "dfa": 2, "ce_dfa": 2, "kernel_ideal": 1},
             "faithful": False, "peripherally_automorphic": True,
             "asymptotic_class": "peripherally_automorphic"},
        ),
        (
            builtin("unitary"),
            {"dims": {"attr": 4, "fix": 2, "dfa": 4, "ce_dfa": 4, "kernel_ideal": 0},
             "faithful": True, "peripherally_automorphic": True, "asymptotic_class": "faithful"},
        ),
    ]


@dataclass(frozen=True)
class CorpusEntry:
    """A corpus channel plus what is needed to rebuild it."""

    label: str
    kind: str
    dim: int
    seed: int | None
    channel: Channel = field(repr=False)


def _unitary_channel(U: np.ndarray, label: str) -> Channel:
    return make_channel(U.shape[0], HEISENBERG, "kraus", [U], label=label)


def _conjugated(ch: Channel, W: np.ndarray) -> Channel:
    """``X -> W^dagger F(W X W^dagger) W``, unitarily equivalent to ``F``."""
    K = np.array([W.conj().T @ K @ W for K in ch.kraus])
    return make_channel(ch.dim, HEISENBERG, "kraus", K, label=ch.label)


def _split(d: int, rng: np.random.Generator) -> int:
    return int(rng.integers(1, d))


def _block_unitary_contraction(d: int, rng: np.random.Generator) -> list[np.ndarray]:
    # unitary on the first block; the second block is fed by a random isometry from all of H,
    # or, half the time, only from itself
    d1 = _split(d, rng)
    d2 = d - d1
    env = int(rng.integers(1, 4))
    K0 = np.zeros((d, d), dtype=complex)
    K0[:d1, :d1] = random_unitary(d1, rng)
    src = d if rng.random() < 0.5 else d2
    g = rng.normal(size=(src * env, d2)) + 1j * rng.normal(size=(src * env, d2))
    V = np.linalg.qr(g)[0]
    kraus = [K0]
    for k in V.reshape(src, env, d2).transpose(1, 0, 2):
        K = np.zeros((d, d), dtype=complex)
        K[d - src :, d1:] = k
        kraus.append(K)
    return kraus


def _pinching_unitary(d: int, rng: np.random.Generator) -> list[np.ndarray]:
    cuts = sorted(rng.choice(np.arange(1, d), size=int(rng.integers(0, d)), replace=False).tolist())
    edges = [0, *cuts, d]
    U = np.zeros((d, d), dtype=complex)
    for a, b in zip(edges, edges[1:]):
        U[a:b, a:b] = random_unitary(b - a, rng)
    if rng.random() < 0.5:
        U = U[:, rng.permutation(d)]
    kraus = []
    for a, b in zip(edges, edges[1:]):
        P = np.zeros((d, d))
        P[a:b, a:b] = np.eye(b - a)
        kraus.append(P @ U)
    return kraus


def _amplitude_damping(rng: np.random.Generator) -> list[np.ndarray]:
    g = rng.uniform(0.05, 0.95)
    p = rng.uniform(0.0, 0.5)
    K0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
    K1 = np.array([[0, np.sqrt(g)], [0, 0]])
    Z = np.diag([1.0, -1.0])
    return [np.sqrt(1 - p) * K0, np.sqrt(1 - p) * K1, np.sqrt(p) * Z @ K0, np.sqrt(p) * Z @ K1]


def _random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    rank = int(rng.integers(1, d + 1))
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


_BASE_BUILTINS = {
    3: ("block_projection", "relaxation", "diagonal_projection", "swap"),
}

RANDOM_KINDS = ("stinespring", "block_unitary_contraction", "stinespring", "pinching_unitary",
                "stinespring", "builtin_conjugated", "contraction")


def corpus_entry(kind: str, d: int, seed: int) -> CorpusEntry:
    """Rebuild one random corpus channel from its reproducer ``(kind, d, seed)``."""
    rng = np.random.default_rng(seed)
    label = f"{kind}(d={d},seed={seed})"
    if kind == "stinespring":
        env = 1 + seed % 3
        ch = random_ucp(d, env, rng.integers(2**32))
    elif kind == "block_unitary_contraction":
        ch = make_channel(d, HEISENBERG, "kraus", _block_unitary_contraction(d, rng))
    elif kind == "pinching_unitary":
        ch = make_channel(d, HEISENBERG, "kraus", _pinching_unitary(d, rng))
    elif kind == "builtin_conjugated":
        if d == 3:
            name = _BASE_BUILTINS[3][int(rng.integers(len(_BASE_BUILTINS[3])))]
            base = _swap_channel() if name == "swap" else builtin(name)
        else:
            base = builtin("trace_map", d) if rng.random() < 0.5 else builtin("unitary", random_unitary(d, rng))
        W = random_unitary(d, rng)
        ch = _conjugated(base, W) if rng.random() < 0.5 else compose(base, _unitary_channel(W, "W"))
        label = f"{kind}[{base.label}](d={d},seed={seed})"
    elif kind == "contraction":
        if d == 2 and rng.random() < 0.6:
            ch = make_channel(2, HEISENBERG, "kraus", _amplitude_damping(rng))
        else:
            ch = builtin("state_contraction", _random_state(d, rng))
    else:
        raise ValueError(f"unknown corpus kind {kind!r}")
    return CorpusEntry(label, kind, d, seed, replace(ch, label=label))


def build_corpus(n_random: int = 200, dims=(2, 3, 4), seed: int = 0, include_builtins: bool = True) -> list[CorpusEntry]:
    """Built-ins plus ``n_random`` seeded random channels cycling through ``dims``.

    Stinespring-random channels almost surely have a one-dimensional
    attractor, so four out of seven random entries are structured constructions
    with richer peripheral spectra.
    """
    dims = tuple(sorted(set(int(d) for d in dims)))
    if not dims or min(dims) < 2:
        raise ValueError("dims must be a non-empty list of integers >= 2")
    entries: list[CorpusEntry] = []
    if include_builtins:
        fixtures = [ch for ch, _ in golden_fixtures()] + [builtin("diagonal_projection"), _swap_channel(),
                                                          builtin("trace_map", 3)]
        for ch in fixtures:
            if ch.dim in dims:
                entries.append(CorpusEntry(ch.label, "builtin", ch.dim, None, ch))
    seeds = np.random.SeedSequence(seed).generate_state(max(n_random, 1), dtype=np.uint32)
    for i in range(n_random):
        d = dims[i % len(dims)]
        kind = RANDOM_KINDS[(i // len(dims)) % len(RANDOM_KINDS)]
        entries.append(corpus_entry(kind, d, int(seeds[i])))
    return entries


# --------------------------------------------------------------------------
# invariant registry


ANCHORS = {
    "hamana_identities": "peripheral projection: Hamana identities of an idempotent UCP map",
    "peripheral_commutation": "peripheral projection commutes with the channel",
    "peripheral_projection_valid": "peripheral projection is an idempotent UCP map",
    "eigenvalue_conjugation": "spectrum of a Hermiticity-preserving map is closed under conjugation",
    "peripheral_semisimplicity": "peripheral spectrum of a UCP map is semisimple",
    "fixed_points_in_attractor": "fixed-point space lies in the attractor",
    "asymptotic_isometry": "asymptotic map is an isometry for the operator norm",
    "asymptotic_inverse": "asymptotic map is invertible with unimodular spectrum",
    "asymptotic_limit": "powers of the channel approach the peripheral part",
    "star_automorphism": "asymptotic map is a *-automorphism of the Choi-Effros algebra",
    "star_schwarz": "Choi-Effros operator Schwarz inequality",
    "schwarz": "operator Schwarz inequality for UCP maps",
    "attractor_cstar_algebra": "attractor is a unital C*-algebra under the Choi-Effros product",
    "ce_associativity": "Choi-Effros product is associative on the Choi-Effros decoherence-free algebra",
    "ce_nonassociativity_witness": "Choi-Effros product is not associative on all operators",
    "ce_submultiplicativity": "Choi-Effros decoherence-free algebra is a Banach *-algebra",
    "ce_cstar_identity_failure": "Choi-Effros decoherence-free algebra violates the C*-identity",
    "direct_sum": "Choi-Effros decoherence-free algebra is the direct sum of attractor and kernel ideal",
    "kernel_ideal_property": "kernel ideal is a two-sided ideal of the Choi-Effros decoherence-free algebra",
    "faithfulness_equivalence": "faithful iff no kernel ideal iff attractor equals the Choi-Effros algebra",
    "faithful_dfa_equality": "faithful channels have equal decoherence-free algebras",
    "idempotent_automorphic_dfa": "peripherally automorphic idempotents have equal decoherence-free algebras",
    "qubit_peripheral_automorphism": "qubit UCP maps are peripherally automorphic",
    "qubit_nonfaithful_contraction": "non-faithful qubit maps contract onto a stationary state",
    "qubit_nonfaithful_stationary": "non-faithful qubit maps: the contraction state is stationary",
    "seminorm_laws": "omega is a C*-seminorm on the Choi-Effros decoherence-free algebra",
    "quotient_norm_agreement": "quotient norm equals the seminorm and the norm on the attractor",
    "gns_degeneracy": "GNS form degenerates exactly on the kernel ideal",
    "inclusion_chain": "inclusion chain of attractor and decoherence-free algebras by class",
    "dfa_definition": "decoherence-free algebra as the invariant part of the multiplicative domain",
    "ce_dfa_definition": "Choi-Effros decoherence-free algebra from its defining identities",
    "multiplicative_domain_routes": "multiplicative domain from Kraus operators and by polarization",
    "mode_independence": "permissive ingestion does not change the analysis",
    "schwarz_falsification_witness": "transposition is positive and unital but not Schwarz",
    "pipeline": "the analysis pipeline completes on valid channels",
}


@dataclass(frozen=True)
class InvariantResult:
    """Worst residual of one invariant over the corpus; ``passed`` iff ``worst_residual <= bound``."""

    name: str
    anchor: str
    worst_residual: float
    bound: float
    passed: bool
    evaluated: int
    witness: dict | None = None
    failures: tuple = ()

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "worst_residual": _finite(self.worst_residual),
            "bound": self.bound,
            "passed": self.passed,
            "evaluated": self.evaluated,
            "witness": self.witness,
            "failures": list(self.failures),
        }


def _finite(x: float):
    return x if math.isfinite(x) else None


class _Context:
    """Lazily computed analysis pieces for one channel, shared by all checks."""

    def __init__(self, entry: CorpusEntry, tol: Tolerances, trials: int, seed: int):
        self.entry = entry
        self.ch = heisenberg(entry.channel)
        self.tol = tol
        self.trials = trials
        self.seed = seed
        self.d = self.ch.dim

    def rng(self, name: str) -> np.random.Generator:
        return np.random.default_rng([self.seed, sum(name.encode())])

    @cached_property
    def sd(self):
        return spectrum(self.ch, self.tol)

    @cached_property
    def pd(self):
        return peripheral_projection(self.ch, self.tol, self.sd)

    @cached_property
    def kernel(self):
        return asalg.kernel_ideal(self.pd)

    @cached_property
    def nstar(self):
        return asalg.ce_dfa(self.pd, kernel=self.kernel)

    @cached_property
    def dfa(self):
        return asalg.dfa(self.ch, self.tol)

    @cached_property
    def faithful(self):
        return asalg.is_faithful(self.pd, kernel=self.kernel)

    @cached_property
    def automorphic(self):
        return asalg.is_peripherally_automorphic(self.pd)

    @cached_property
    def report(self):
        return asalg.classify(self.ch, self.tol)

    def unit_ops(self, n: int, name: str) -> np.ndarray:
        rng = self.rng(name)
        X = rng.normal(size=(n, self.d, self.d)) + 1j * rng.normal(size=(n, self.d, self.d))
        return X / np.linalg.norm(X, 2, axis=(1, 2))[:, None, None]

    def elements(self, space: OperatorSubspace, n: int, name: str) -> np.ndarray:
        rng = self.rng(name)
        out = []
        for _ in range(n):
            X = space.random_element(rng)
            nx = operator_norm(X)
            out.append(X / nx if nx > 0 else X)
        return np.array(out).reshape(n, self.d, self.d)

    def star(self, X, Y):
        return asalg.choi_effros(self.pd, X, Y)

    def phi(self, X):
        return unvec(self.ch.superop @ vec(X))


def _dist(X, space: OperatorSubspace) -> float:
    return float(np.linalg.norm(X - space.project(X)))


def _boolean(ok: bool) -> float:
    return 0.0 if ok else 1.0


def _hamana(c: _Context):
    P = c.pd.apply
    worst = 0.0
    for X, Y in zip(c.unit_ops(4, "hx"), c.unit_ops(4, "hy")):
        a = P(P(X) @ P(Y))
        b = P(P(X) @ Y)
        worst = max(worst, operator_norm(a - b), operator_norm(b - P(X @ P(Y))))
    return worst


def _commutation(c: _Context):
    S, SP = c.ch.superop, c.pd.p_p.superop
    return float(np.linalg.norm(S @ SP - SP @ S, 2))


def _p_p_valid(c: _Context):
    r = c.pd.residuals
    return max(r["idempotence"], r["p_p_unitality"], max(0.0, -r["p_p_choi_min_eigenvalue"]))


def _isometry(c: _Context):
    return max((abs(operator_norm(c.phi(X)) - 1.0) for X in c.elements(c.pd.attractor, 4, "iso")), default=0.0)


def _asymptotic_inverse(c: _Context):
    M, Minv = asymptotic_map(c.ch, c.pd)
    m = M.shape[0]
    return max(np.linalg.norm(M @ Minv - np.eye(m), 2), np.max(np.abs(np.abs(np.linalg.eigvals(M)) - 1)))


def _limit(c: _Context):
    inner = np.abs(c.sd.eigenvalues[~c.sd.peripheral_mask])
    if c.d > 3 or (inner.size and inner.max() > 0.9):
        return None
    S, SP = c.ch.superop, c.pd.p_p.superop
    cur = np.eye(S.shape[0], dtype=complex)
    best = np.inf
    for _ in range(2000):
        cur = S @ cur
        best = min(best, float(np.linalg.norm(cur - SP @ cur, 2)))
        if best <= c.tol.tol_residual:
            break
    return best


def _star_automorphism(c: _Context):
    worst = 0.0
    for X, Y in zip(c.elements(c.pd.attractor, 4, "ax"), c.elements(c.pd.attractor, 4, "ay")):
        worst = max(worst, operator_norm(c.phi(c.star(X, Y)) - c.star(c.phi(X), c.phi(Y))))
        FX = c.phi(X)
        worst = max(worst, operator_norm(c.star(FX, np.eye(c.d)) - FX))
    return worst


def _star_schwarz(c: _Context):
    r = posit.falsify_star_schwarz(c.pd, c.trials, c.seed, c.tol)
    return max(0.0, -r.worst_star_schwarz), (None if r.star_schwarz_violation is None
                                            else r.star_schwarz_violation.as_dict())


def _schwarz(c: _Context):
    r = posit.falsify_schwarz(c.ch, c.trials, c.seed, c.tol)
    return max(0.0, -r.worst_schwarz), None if r.schwarz_violation is None else r.schwarz_violation.as_dict()


def _attractor_algebra(c: _Context):
    pres = asalg.attractor_algebra(c.pd)
    res = pres.axiom_residuals
    return max(res["closure"], res["involution_closure"], res["associativity"], res["unit"], res["cstar_identity"])


def _ce_associativity(c: _Context):
    pres = asalg.algebra_presentation(c.pd, c.nstar, "choi_effros")
    return pres.axiom_residuals.get("associativity", 0.0)


def _ce_submultiplicativity(c: _Context):
    worst = 0.0
    for X, Y in zip(c.elements(c.nstar, 4, "sx"), c.elements(c.nstar, 4, "sy")):
        worst = max(worst, operator_norm(c.star(X, Y)) - operator_norm(X) * operator_norm(Y))
    return max(worst, 0.0)


def _direct_sum(c: _Context):
    A, K, N = c.pd.attractor, c.kernel, c.nstar
    inter = subspace_intersect(A, K, c.tol).dim
    return float(abs(N.dim - (A.dim + K.dim)) + inter)


def _kernel_ideal(c: _Context):
    K = c.kernel
    if K.dim == 0:
        return 0.0
    worst = 0.0
    for X in c.nstar.basis:
        for k in K.basis:
            worst = max(worst, _dist(X @ k, K), _dist(k @ X, K),
                        operator_norm(c.star(X, k)), operator_norm(c.star(k, X)))
    return worst


def _attr_equals(c: _Context, space: OperatorSubspace, other: OperatorSubspace) -> bool:
    return space.dim == other.dim and projector_distance(space, other) <= c.tol.tol_residual


def _faithfulness(c: _Context):
    faithful, _ = c.faithful
    by_space = _attr_equals(c, c.pd.attractor, c.nstar)
    return _boolean(faithful == (c.kernel.dim == 0) == by_space)


def _faithful_dfa(c: _Context):
    if not c.faithful[0]:
        return None
    return _boolean(_attr_equals(c, c.dfa, c.nstar))


def _idempotent_automorphic(c: _Context):
    if not c.automorphic.holds:
        return None
    P = c.pd.p_p
    return _boolean(_attr_equals(c, asalg.dfa(P, c.tol), c.nstar))


def _qubit_automorphic(c: _Context):
    return _boolean(c.automorphic.holds)


def _qubit_contraction(c: _Context):
    faithful, sigma = c.faithful
    if faithful:
        return None
    worst = float(abs(c.pd.attractor.dim - 1))
    for X in c.unit_ops(4, "qc"):
        worst = max(worst, operator_norm(c.pd.apply(X) - np.trace(sigma @ X) * np.eye(2)))
    return worst


def _qubit_stationary(c: _Context):
    faithful, sigma = c.faithful
    if faithful:
        return None
    return operator_norm(unvec(c.ch.superop.conj().T @ vec(sigma)) - sigma)


def _omega(c: _Context, X) -> float:
    return float(np.sqrt(max(np.max(np.abs(np.linalg.eigvals(c.star(X.conj().T, X)))), 0.0)))


def _seminorm_laws(c: _Context):
    worst = 0.0
    for X, Y in zip(c.elements(c.nstar, 4, "wx"), c.elements(c.nstar, 4, "wy")):
        wx, wy = _omega(c, X), _omega(c, Y)
        worst = max(worst, _omega(c, X + Y) - wx - wy, _omega(c, c.star(X, Y)) - wx * wy,
                    abs(_omega(c, c.star(X.conj().T, X)) - wx**2))
    return max(worst, 0.0)


def _quotient(c: _Context):
    worst = 0.0
    for X in c.elements(c.nstar, 3, "qx"):
        q = asalg.quotient_norm(c.pd, X, c.nstar, c.kernel, samples=16)
        worst = max(worst, abs(q - asalg.seminorm_omega(c.pd, X, c.nstar)))
    for X in c.elements(c.pd.attractor, 3, "qa"):
        worst = max(worst, abs(asalg.quotient_norm(c.pd, X, c.nstar, c.kernel, samples=16) - operator_norm(X)))
    return worst


def _gns(c: _Context):
    G = asalg.gns_gram(c.pd, c.nstar)
    G = (G + G.conj().T) / 2
    lam = np.linalg.eigvalsh(G) if G.size else np.zeros(0)
    null = int(np.sum(lam <= c.tol.tol_residual))
    return float(abs(null - c.kernel.dim)) + max(0.0, -float(lam.min(initial=0.0)))


def _chain(c: _Context):
    return float(len(c.report.chain_violations))


def _same_space(a: OperatorSubspace, b: OperatorSubspace) -> float:
    return 1.0 if a.dim != b.dim else projector_distance(a, b)


def _dfa_definition(c: _Context):
    return _same_space(c.dfa, asalg.dfa_by_definition(c.ch, c.tol))


def _ce_dfa_definition(c: _Context):
    return _same_space(c.nstar, asalg.ce_dfa_by_definition(c.pd))


def _md_routes(c: _Context):
    return _same_space(asalg.multiplicative_domain(c.ch, c.tol), asalg.multiplicative_domain_polarized(c.ch, c.tol))


def _mode_independence(c: _Context):
    loose = make_channel(c.d, HEISENBERG, "superop", c.ch.superop, c.tol, permissive=True, label=c.ch.label)
    a, b = c.report, asalg.classify(loose, c.tol)
    same = (a.dims == b.dims and a.asymptotic_class == b.asymptotic_class and a.faithful == b.faithful
            and a.peripherally_automorphic == b.peripherally_automorphic)
    drift = max(abs(a.invariant_residuals[k] - b.invariant_residuals.get(k, np.inf)) for k in a.invariant_residuals)
    return max(_boolean(same), float(drift) if drift > c.tol.tol_residual else 0.0)


@dataclass(frozen=True)
class _Check:
    name: str
    fn: Callable
    bound: float
    qubit_only: bool = False


def _checks(tol: Tolerances) -> list[_Check]:
    r = tol.tol_residual
    return [
        _Check("hamana_identities", _hamana, r),
        _Check("peripheral_commutation", _commutation, r),
        _Check("peripheral_projection_valid", _p_p_valid, r),
        _Check("eigenvalue_conjugation", lambda c: c.sd.conjugation_residual, r),
        _Check("peripheral_semisimplicity", lambda c: c.sd.semisimplicity_residual, tol.tol_peripheral),
        _Check("fixed_points_in_attractor",
               lambda c: subspace_includes(fixed_point_space(c.ch, c.tol, c.pd), c.pd.attractor), r),
        _Check("asymptotic_isometry", _isometry, r),
        _Check("asymptotic_inverse", _asymptotic_inverse, tol.tol_peripheral),
        _Check("asymptotic_limit", _limit, 10 * r),
        _Check("star_automorphism", _star_automorphism, r),
        _Check("star_schwarz", _star_schwarz, tol.tol_psd),
        _Check("schwarz", _schwarz, tol.tol_psd),
        _Check("attractor_cstar_algebra", _attractor_algebra, r),
        _Check("ce_associativity", _ce_associativity, r),
        _Check("ce_submultiplicativity", _ce_submultiplicativity, r),
        _Check("direct_sum", _direct_sum, 0.0),
        _Check("kernel_ideal_property", _kernel_ideal, r),
        _Check("faithfulness_equivalence", _faithfulness, 0.0),
        _Check("faithful_dfa_equality", _faithful_dfa, 0.0),
        _Check("idempotent_automorphic_dfa", _idempotent_automorphic, 0.0),
        _Check("qubit_peripheral_automorphism", _qubit_automorphic, 0.0, qubit_only=True),
        _Check("qubit_nonfaithful_contraction", _qubit_contraction, 1e-7, qubit_only=True),
        _Check("qubit_nonfaithful_stationary", _qubit_stationary, 1e-8, qubit_only=True),
        _Check("seminorm_laws", _seminorm_laws, r),
        _Check("quotient_norm_agreement", _quotient, r),
        _Check("gns_degeneracy", _gns, r),
        _Check("inclusion_chain", _chain, 0.0),
        _Check("dfa_definition", _dfa_definition, r),
        _Check("ce_dfa_definition", _ce_dfa_definition, r),
        _Check("multiplicative_domain_routes", _md_routes, r),
        _Check("mode_independence", _mode_independence, 0.0),
    ]


def _global_checks(tol: Tolerances, trials: int, seed: int) -> dict[str, tuple[float, float, dict | None]]:
    """Corpus-independent witnesses that keep the battery from being vacuous."""
    out = {}

    def guarded(name, bound, fn):
        try:
            value, witness = fn()
        except (QdfaError, np.linalg.LinAlgError, ValueError) as exc:
            value, witness = math.inf, {"error": f"{type(exc).__name__}: {exc}"}
        out[name] = (value, bound, witness)

    def nonassociativity():
        pd = peripheral_projection(builtin("trace_map", 2), tol)
        X = Y = np.diag([1.0, 0.0])
        Z = np.diag([1.0, -1.0])
        s = lambda A, B: asalg.choi_effros(pd, A, B)  # noqa: E731
        gap = operator_norm(s(s(X, Y), Z) - s(X, s(Y, Z)))
        return max(0.0, 0.2 - gap), {"gap": gap}

    def cstar_failure():
        pd = peripheral_projection(builtin("block_projection"), tol)
        X = np.diag([1.0, 1.0, 5.0])
        lhs = operator_norm(asalg.choi_effros(pd, X.conj().T, X))
        rhs = operator_norm(X) ** 2
        return abs(lhs - 1.0) + abs(rhs - 25.0), {"star_norm": lhs, "norm_squared": rhs}

    def transposition():
        r = posit.falsify_schwarz(builtin("transpose", 2), trials, seed, tol)
        return max(0.0, r.worst_schwarz + 0.1), {"min_eig": r.worst_schwarz}

    guarded("ce_nonassociativity_witness", 0.0, nonassociativity)
    guarded("ce_cstar_identity_failure", 1e-10, cstar_failure)
    guarded("schwarz_falsification_witness", 0.0, transposition)
    return out


def _reproducer(entry: CorpusEntry) -> dict:
    return {"label": entry.label, "kind": entry.kind, "dim": entry.dim, "seed": entry.seed}


def run_invariant_suite(
    corpus: list[CorpusEntry], tol: Tolerances = DEFAULT_TOL, trials: int = 500, seed: int = 0
) -> list[InvariantResult]:
    """Evaluate every invariant on every applicable corpus member; results sorted by name."""
    if not corpus:
        raise ValueError("corpus must not be empty")
    checks = _checks(tol)
    acc = {c.name: {"worst": 0.0, "n": 0, "witness": None, "failures": [], "bound": c.bound} for c in checks}
    acc["pipeline"] = {"worst": 0.0, "n": 0, "witness": None, "failures": [], "bound": 0.0}

    def record(name: str, value: float, entry: CorpusEntry, witness):
        a = acc[name]
        a["n"] += 1
        if value > a["bound"] or not math.isfinite(value):
            a["failures"].append(_reproducer(entry))
        if not math.isfinite(a["worst"]) or (value <= a["worst"] and a["witness"] is not None):
            return
        if value > a["worst"] or a["witness"] is None:
            a["worst"] = value
            a["witness"] = {**_reproducer(entry), **({"detail": witness} if witness is not None else {})}

    for entry in corpus:
        ctx = _Context(entry, tol, trials, seed)
        try:
            ctx.pd
        except (QdfaError, np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
            record("pipeline", math.inf, entry, f"{type(exc).__name__}: {exc}")
            continue
        record("pipeline", 0.0, entry, None)
        for check in checks:
            if check.qubit_only and ctx.d != 2:
                continue
            try:
                out = check.fn(ctx)
            except (QdfaError, np.linalg.LinAlgError, ValueError) as exc:
                record(check.name, math.inf, entry, f"{type(exc).__name__}: {exc}")
                continue
            if out is None:
                continue
            value, witness = out if isinstance(out, tuple) else (out, None)
            record(check.name, float(value), entry, witness)

    results = []
    for name, a in acc.items():
        results.append(InvariantResult(
            name, ANCHORS[name], float(a["worst"]), a["bound"], not a["failures"], a["n"],
            a["witness"], tuple(a["failures"]),
        ))
    for name, (value, bound, witness) in _global_checks(tol, trials, seed).items():
        results.append(InvariantResult(name, ANCHORS[name], float(value), bound, value <= bound, 1, witness))
    return sorted(results, key=lambda r: r.name)


def suite_report(results: list[InvariantResult], corpus: list[CorpusEntry], seed: int, tol: Tolerances) -> dict:
    """JSON-ready summary; contains no timestamps so equal inputs give equal documents."""
    return {
        "seed": seed,
        "tolerances": tol.as_dict(),
        "corpus": {"size": len(corpus), "by_dim": {str(d): sum(e.dim == d for e in corpus)
                                                    for d in sorted({e.dim for e in corpus})}},
        "passed": all(r.passed for r in results),
        "invariants": [r.as_dict() for r in results],
    }
