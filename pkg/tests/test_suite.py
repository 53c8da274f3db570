import pytest

from hypershadow import suite
from hypershadow.chains import is_chain_mixing, is_chain_transitive
from hypershadow.mixing import is_mixing, is_transitive, is_weakly_mixing
from hypershadow.shadowing import has_shadowing
from hypershadow.space import validate_metric
from hypershadow.suite import (
    THEOREMS,
    check_relation_examples,
    check_theorem,
    constant_with_fixed_point,
    corpus,
    random_system,
    random_systems,
    run_suite,
)


def test_corpus_names():
    assert [s.name for s in corpus()] == ["const-ab", "binary01", "tent98", "perm3"]
    with pytest.raises(KeyError):
        suite.corpus_system("nope")


def test_random_system_is_deterministic():
    assert random_system(7, 4, 2) == random_system(7, 4, 2)
    assert random_systems(3, 10, 5) == random_systems(3, 10, 5)


def test_random_metric_is_valid():
    X = random_system(42, 4, 2, metric="random").space
    assert validate_metric(X.dist) is None


def test_one_point_systems_have_every_property():
    F = random_system(1, 1, 2).mmap
    for check in (is_transitive, is_weakly_mixing, is_mixing, is_chain_transitive, is_chain_mixing, has_shadowing):
        assert check(F)


def test_constant_generator_meets_the_hypothesis():
    for seed in range(30):
        F = constant_with_fixed_point(seed, 4).mmap
        c = suite._constant_pair(F)
        assert c is not None
        assert F.maps[1][c] == c


def test_constant_map_hypothesis_needs_the_fixed_point():
    # without f2(c) = c the constant-map statement fails: u = 0 never returns to {0}
    from hypershadow.multimap import MultiMap
    from hypershadow.space import FiniteMetricSpace

    X = FiniteMetricSpace.discrete("012")
    cycle = (1, 2, 0)
    assert is_transitive(MultiMap(X, (cycle,)))
    F = MultiMap(X, ((0, 0, 0), cycle))
    assert not is_transitive(F)
    assert suite._constant_pair(F) is None


def test_unknown_theorem():
    with pytest.raises(KeyError):
        check_theorem("no-such-theorem", [])


def test_counterexamples_are_reverified(monkeypatch):
    monkeypatch.setitem(suite.CHECKS, "constant-shadowing", lambda F: ("counterexample", {"why": "forced"}))
    report = check_theorem("constant-shadowing", random_systems(1, 3, 3))
    assert len(report.counterexamples) == 3
    assert all(d["reverified"] for _, d in report.counterexamples)


def test_small_suite_has_no_counterexamples():
    reports = run_suite(seed=5, count=25, max_points=4)
    assert [r.theorem for r in reports[:-1]] == list(THEOREMS)
    for r in reports[:-1]:
        assert r.counterexamples == [], r.theorem
        assert r.systems_tested >= 25
    assert reports[1].applicable > 0  # the targeted generator hits the constant-map hypothesis


def test_relation_examples():
    report = check_relation_examples(small_grid=6)
    failing = [d["property"] for _, d in report.counterexamples]
    # a lone 3-cycle on three discrete points is transitive but not weakly mixing
    assert failing == ["weakly-mixing"]
    assert report.caveats
