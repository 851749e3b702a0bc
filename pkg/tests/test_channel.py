import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdfa.channel import (
    BUILTINS,
    HEISENBERG,
    SCHRODINGER,
    adjoint_channel,
    apply,
    builtin,
    channel_from_json,
    channel_to_json,
    choi_to_kraus,
    choi_to_superop,
    compose,
    convert,
    heisenberg,
    identity_channel,
    kraus_to_superop,
    load_channel,
    make_channel,
    power,
    random_ucp,
    save_channel,
    superop_to_choi,
)
from qdfa.errors import InvalidChannelError
from qdfa.matcore import operator_norm

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "qdfa" / "data" / "fixtures"


def kraus_action(K, X):
    return sum(k.conj().T @ X @ k for k in K)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 4), st.integers(1, 3))
def test_random_ucp_is_unital_cp(seed, d, env):
    ch = random_ucp(d, env, seed)
    assert ch.is_ucp
    assert np.allclose(ch(np.eye(d)), np.eye(d))
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert np.allclose(ch(X), kraus_action(ch.kraus, X))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 4))
def test_representation_roundtrips(seed, d):
    ch = random_ucp(d, 2, seed)
    S = ch.superop
    assert np.allclose(choi_to_superop(superop_to_choi(S)), S)
    K = choi_to_kraus(superop_to_choi(S))
    assert np.allclose(kraus_to_superop(K), S)
    assert np.allclose(convert(ch, "choi").choi, superop_to_choi(S))


def test_choi_matrix_blocks(rng):
    ch = random_ucp(2, 2, 7)
    C = superop_to_choi(ch.superop).reshape(2, 2, 2, 2)
    for i in range(2):
        for j in range(2):
            Eij = np.zeros((2, 2))
            Eij[i, j] = 1
            assert np.allclose(C[i, :, j, :], ch(Eij))


def test_adjoint_is_hs_adjoint(rng):
    ch = random_ucp(3, 2, 3)
    adj = adjoint_channel(ch)
    assert adj.picture == SCHRODINGER and adj.is_ucp
    X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.isclose(np.trace(rho.conj().T @ ch(X)), np.trace(adj(rho).conj().T @ X))
    assert np.isclose(np.trace(adj(rho)), np.trace(rho))
    assert heisenberg(adj).picture == HEISENBERG
    assert np.allclose(heisenberg(adj).superop, ch.superop)


def test_compose_and_power(rng):
    a, b = random_ucp(2, 2, 1), random_ucp(2, 2, 2)
    X = rng.normal(size=(2, 2))
    assert np.allclose(compose(a, b)(X), a(b(X)))
    assert np.allclose(power(a, 3)(X), a(a(a(X))))
    assert np.allclose(power(a, 0).superop, identity_channel(2).superop)
    with pytest.raises(ValueError):
        power(a, -1)
    with pytest.raises(ValueError):
        apply(a, np.eye(3))


def test_block_projection_formula(rng):
    X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    Y = builtin("block_projection")(X)
    expected = np.zeros_like(X)
    expected[:2, :2] = X[:2, :2]
    expected[2, 2] = X[0, 0]
    assert np.allclose(Y, expected)


def test_relaxation_closed_form():
    ch = builtin("relaxation")
    P = builtin("diagonal_projection").superop
    a = np.exp(-1)
    assert np.allclose(ch.superop, a * np.eye(9) + (1 - a) * P, atol=1e-15)
    assert ch.is_ucp


def test_other_builtins(rng):
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(builtin("trace_map", 2)(X), np.trace(X) / 2 * np.eye(2))
    assert np.allclose(builtin("state_contraction")(X), X[0, 0] * np.eye(2))
    U = np.diag([1.0, np.exp(1j * np.pi * np.sqrt(2))])
    assert np.allclose(builtin("unitary")(X), U.conj().T @ X @ U)
    T = builtin("transpose", 2)
    assert np.allclose(T(X), X.T)
    assert not T.is_ucp and "non-cp" in T.tags
    with pytest.raises(InvalidChannelError):
        builtin("no_such_channel")
    with pytest.raises(InvalidChannelError):
        builtin("state_contraction", np.diag([2.0, 0.0]))
    with pytest.raises(InvalidChannelError):
        builtin("unitary", np.ones((2, 2)))


def test_non_ucp_rejected_unless_permissive():
    S = 2 * np.eye(4)
    with pytest.raises(InvalidChannelError):
        make_channel(2, HEISENBERG, "superop", [S])
    ch = make_channel(2, HEISENBERG, "superop", [S], permissive=True)
    assert not ch.is_ucp and "non-ucp" in ch.tags


@pytest.mark.parametrize("bad", [
    dict(picture="sideways"),
    dict(representation="table"),
    dict(dim=0),
    dict(matrices=[[[1.0, 0.0]]]),
    dict(matrices=[[[np.nan, 0], [0, 1]]]),
])
def test_make_channel_input_errors(bad):
    args = dict(dim=2, picture=HEISENBERG, representation="kraus", matrices=[np.eye(2)])
    args.update(bad)
    with pytest.raises(InvalidChannelError):
        make_channel(**args)


@pytest.mark.parametrize("rep", ["kraus", "superop", "choi"])
def test_json_roundtrip(tmp_path, rep):
    ch = random_ucp(3, 2, 11)
    path = tmp_path / "ch.json"
    save_channel(ch, path, rep)
    back = load_channel(path)
    assert back.dim == 3 and back.label == ch.label
    assert np.allclose(back.superop, ch.superop)
    doc = json.loads(path.read_text())
    assert all(len(z) == 2 for z in doc["matrices"][0][0])


@pytest.mark.parametrize("doc", [[], {"dim": 2}, {"dim": 2, "picture": "heisenberg", "representation": "kraus",
                                                  "matrices": [[[1, 0], [0, 1]]]},
                                 {"dim": 2, "picture": "heisenberg", "representation": "kraus", "matrices": []}])
def test_json_malformed(doc):
    with pytest.raises(InvalidChannelError):
        channel_from_json(doc)


def test_load_channel_unreadable(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(InvalidChannelError):
        load_channel(p)
    with pytest.raises(InvalidChannelError):
        load_channel(tmp_path / "missing.json")


def test_shipped_fixtures_match_builtins():
    for name, permissive in [("block_projection", False), ("relaxation", False), ("transpose_2", True)]:
        ch = load_channel(FIXTURES / f"{name}.json", permissive=permissive)
        ref = builtin("transpose", 2) if name == "transpose_2" else builtin(name)
        assert operator_norm(ch.superop - ref.superop) < 1e-12, name
    assert set(BUILTINS) >= {"block_projection", "relaxation", "trace_map", "transpose"}
    assert channel_to_json(builtin("trace_map", 2))["representation"] == "kraus"
