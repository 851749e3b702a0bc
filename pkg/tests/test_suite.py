import json

import numpy as np
import pytest

from qdfa.channel import builtin
from qdfa.faults import FAULTS, inject
from qdfa.suite import (
    ANCHORS,
    RANDOM_KINDS,
    CorpusEntry,
    build_corpus,
    corpus_entry,
    run_invariant_suite,
    suite_report,
)
from qdfa.matcore import DEFAULT_TOL


@pytest.fixture(scope="module")
def small_corpus():
    return build_corpus(24, (2, 3), 0)


@pytest.fixture(scope="module")
def small_results(small_corpus):
    return run_invariant_suite(small_corpus, trials=200)


def test_corpus_is_deterministic_and_seeded(small_corpus):
    again = build_corpus(24, (2, 3), 0)
    assert [e.label for e in again] == [e.label for e in small_corpus]
    for a, b in zip(again, small_corpus):
        assert np.array_equal(a.channel.superop, b.channel.superop)
    other = build_corpus(24, (2, 3), 1, include_builtins=False)
    assert not all(np.array_equal(a.channel.superop, b.channel.superop)
                   for a, b in zip(other, small_corpus[-24:]))


def test_corpus_entries_rebuild_from_reproducer():
    for e in build_corpus(14, (2, 3, 4), 3, include_builtins=False):
        again = corpus_entry(e.kind, e.dim, e.seed)
        assert np.array_equal(again.channel.superop, e.channel.superop)
        assert e.channel.is_ucp


def test_half_the_random_corpus_is_structured():
    corpus = build_corpus(200, (2, 3, 4), 0, include_builtins=False)
    structured = sum(e.kind != "stinespring" for e in corpus)
    assert structured >= len(corpus) // 2
    assert set(e.kind for e in corpus) == set(RANDOM_KINDS)


def test_all_invariants_pass_on_small_corpus(small_results):
    failed = {r.name: r.witness for r in small_results if not r.passed}
    assert not failed
    assert [r.name for r in small_results] == sorted(r.name for r in small_results)


def test_anchor_traceability(small_results):
    anchors = set(ANCHORS.values())
    for r in small_results:
        assert r.anchor in anchors
        assert ANCHORS[r.name] == r.anchor
    assert {r.name for r in small_results} == set(ANCHORS)


def test_passed_iff_residual_within_bound(small_results):
    for r in small_results:
        assert r.passed == (r.worst_residual <= r.bound), r.name
        assert r.evaluated >= 1


def test_block_projection_dimension_identity():
    corpus = [CorpusEntry("block_projection", "builtin", 3, 0, builtin("block_projection"))]
    results = {r.name: r for r in run_invariant_suite(corpus, trials=50)}
    assert results["direct_sum"].passed and results["direct_sum"].worst_residual == 0.0
    assert results["inclusion_chain"].passed


def test_qubit_laws_are_filtered_by_dimension():
    corpus = build_corpus(6, (3,), 0, include_builtins=False)
    results = {r.name: r for r in run_invariant_suite(corpus, trials=50)}
    assert results["qubit_peripheral_automorphism"].evaluated == 0
    assert results["hamana_identities"].evaluated == len(corpus)


def test_unitary_conjugations_satisfy_faithful_chain():
    corpus = [CorpusEntry("unitary", "builtin", 2, 0, builtin("unitary"))]
    results = {r.name: r for r in run_invariant_suite(corpus, trials=50)}
    assert results["faithful_dfa_equality"].passed and results["faithful_dfa_equality"].evaluated == 1


@pytest.mark.parametrize("fault", FAULTS)
def test_mutation_sanity(small_corpus, fault):
    with inject(fault):
        results = run_invariant_suite(small_corpus, trials=100)
    failed = {r.name for r in results if not r.passed}
    assert failed, f"fault {fault} went unnoticed"
    if fault == "star_sign":
        assert "star_automorphism" in failed


def test_faults_are_scoped():
    with inject("star_sign"):
        pass
    assert all(r.passed for r in run_invariant_suite(build_corpus(2, (2,), 0, include_builtins=False), trials=20))
    with pytest.raises(ValueError):
        with inject("no_such_fault"):
            pass


def test_report_is_json_ready(small_results, small_corpus):
    doc = suite_report(small_results, small_corpus, 0, DEFAULT_TOL)
    text = json.dumps(doc, sort_keys=True)
    assert json.loads(text)["passed"] is True
    assert doc["corpus"]["size"] == len(small_corpus)


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        run_invariant_suite([])
