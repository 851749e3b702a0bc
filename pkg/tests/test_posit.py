import numpy as np
import pytest

from qdfa.channel import HEISENBERG, builtin, make_channel, random_ucp
from qdfa.errors import ConsistencyError
from qdfa.faults import inject
from qdfa.posit import (
    CP_CERTIFIED,
    SCHWARZ_FALSIFIED,
    UNRESOLVED,
    _recheck,
    certify_cp,
    falsify_schwarz,
    falsify_star_schwarz,
    positivity_report,
    probe_operators,
)
from qdfa.spectral import peripheral_projection


def test_probes_are_reproducible_per_trial():
    X, kinds = probe_operators(3, 12, 5)
    Y, _ = probe_operators(3, 20, 5)
    assert np.array_equal(X, Y[:12])
    assert set(kinds) == {"gaussian", "rank_one", "hermitian", "unitary"}
    assert np.allclose(np.linalg.norm(X, 2, axis=(1, 2)), 1)
    X[0] = 0
    assert not np.array_equal(probe_operators(3, 12, 5)[0], X)


def test_certify_cp():
    assert certify_cp(random_ucp(3, 2, 0)).is_cp
    rep = certify_cp(builtin("transpose", 2))
    assert not rep.is_cp and rep.choi_min_eigenvalue == pytest.approx(-1.0)


def test_transposition_violation_is_genuine():
    rep = falsify_schwarz(builtin("transpose", 2), 500, 0)
    assert rep.status == SCHWARZ_FALSIFIED
    v = rep.schwarz_violation
    assert v.min_eig <= -0.1
    X = v.X
    D = (X.conj().T @ X).T - X.conj() @ X.T
    assert np.linalg.eigvalsh(D)[0] == pytest.approx(v.min_eig, abs=1e-12)
    doc = rep.as_dict()
    assert doc["schwarz_violation"]["trial"] == v.trial
    assert len(doc["schwarz_violation"]["X"]) == 2


def test_transposition_rank_one_witness():
    # X = E21 gives (X^dagger X)^T - conj(X) X^T = E11 - E22
    X = np.array([[0, 0], [1, 0]], dtype=complex)
    D = (X.conj().T @ X).T - X.conj() @ X.T
    assert np.allclose(np.linalg.eigvalsh(D), [-1, 1])


@pytest.mark.parametrize("seed", range(5))
def test_ucp_maps_pass(seed):
    ch = random_ucp(3, 2, seed)
    rep = falsify_schwarz(ch, 200, seed)
    assert rep.status == CP_CERTIFIED and rep.schwarz_violation is None
    assert rep.worst_schwarz > -1e-12
    star = falsify_star_schwarz(peripheral_projection(ch), 200, seed)
    assert star.star_schwarz_violation is None


def test_positive_non_cp_map_without_violation_is_unresolved():
    # 0.5 * transposition + 0.5 * trace map is positive and unital but not CP, and Schwarz holds
    T = builtin("transpose", 2).superop
    R = builtin("trace_map", 2).superop
    ch = make_channel(2, HEISENBERG, "superop", [0.5 * T + 0.5 * R], permissive=True)
    rep = falsify_schwarz(ch, 300, 0)
    assert not rep.is_cp
    assert rep.status in (UNRESOLVED, SCHWARZ_FALSIFIED)


def test_sign_fault_produces_star_schwarz_violation():
    with inject("star_sign"):
        star = falsify_star_schwarz(peripheral_projection(builtin("block_projection")), 100, 0)
    assert star.star_schwarz_violation is not None


def test_recheck_rejects_irreproducible_counterexample():
    with pytest.raises(ConsistencyError):
        _recheck(-1.0, 0.0, "Schwarz")
    _recheck(-1.0, -1.0 + 1e-14, "Schwarz")


def test_positivity_report_merges():
    pd = peripheral_projection(builtin("relaxation"))
    rep = positivity_report(pd, 100, 3)
    doc = rep.as_dict()
    assert doc["status"] == CP_CERTIFIED
    assert doc["trials"] == 100 and doc["seed"] == 3
    assert doc["worst_star_schwarz"] is not None
