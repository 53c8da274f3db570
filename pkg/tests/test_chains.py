from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypershadow.chains import (
    HyperGraph,
    SpaceTooLarge,
    build_hypergraph,
    chain_length_spectrum,
    find_chain,
    is_chain_mixing,
    is_chain_mixing_at,
    is_chain_transitive,
    is_chain_transitive_at,
)
from hypershadow.multimap import MultiMap, identity, orbit, power_image, ran_masks
from hypershadow.space import CompactSet, FiniteMetricSpace, diameter, grid_interval
from hypershadow.suite import corpus_system, random_system

from conftest import hausdorff_oracle, image_oracle, subsets, systems

perm3 = corpus_system("perm3").mmap
binary = corpus_system("binary01").mmap
const = corpus_system("const-ab").mmap


def adjacency(F, delta):
    """Boolean adjacency over node masks 1..2^n-1, from the Hausdorff oracle."""
    n = 1 << F.size
    M = np.zeros((n, n), dtype=bool)
    for A in subsets(F.size):
        C = image_oracle(F, A)
        for B in subsets(F.size):
            M[A, B] = hausdorff_oracle(F.space, C, B) <= delta
    return M


def test_find_chain_examples():
    assert find_chain(perm3, Fraction(1, 2), 0, [0, 2]) is None
    chain = find_chain(binary, Fraction(1, 4), 0, [0, 1])
    assert chain.sets == (CompactSet.of([0]), CompactSet.of([0, 1]))
    assert chain.length == 1
    chain.validate(binary)


def test_find_chain_follows_the_true_orbit_at_zero():
    for n in range(5):
        target = power_image(perm3, 1, n)
        chain = find_chain(perm3, 0, 1, target)
        # BFS is shortest-first, so the chain is the orbit up to the first visit
        assert chain.length <= n
        assert chain.sets == tuple(power_image(perm3, 1, i) for i in range(chain.length + 1))
        assert chain.sets[-1] == target


def test_chain_transitivity_examples():
    v = is_chain_transitive(perm3)
    assert not v.holds
    assert v.witness == {"x": 0, "A": CompactSet.of([0, 2])}
    assert is_chain_transitive(binary)
    assert is_chain_transitive(const)
    assert is_chain_transitive_at(perm3, 1)
    assert not is_chain_transitive_at(perm3, Fraction(1, 2))


def test_chain_transitive_at_diameter():
    for seed in range(20):
        F = random_system(seed, 4, 2).mmap
        assert is_chain_transitive_at(F, diameter(F.space))


def test_length_spectrum_examples():
    spec = chain_length_spectrum(binary, Fraction(1, 4), 0, [0, 1])
    assert spec.lengths(10) == list(range(1, 11))
    assert spec.is_cofinite()
    assert chain_length_spectrum(perm3, Fraction(1, 2), 0, [0, 2]).is_empty()


def test_length_spectrum_on_exact_cycle():
    F = MultiMap(FiniteMetricSpace.discrete("abcd"), ((1, 2, 3, 1),))
    tr = orbit(F, [0])
    assert (tr.transient, tr.period) == (1, 3)
    spec = chain_length_spectrum(F, 0, 0, [2])
    assert spec.lengths(12) == [2, 5, 8, 11]


def test_chain_mixing_examples():
    assert is_chain_mixing(binary)
    assert not is_chain_mixing(perm3)
    ident = identity(FiniteMetricSpace.discrete("ab"))
    v = is_chain_mixing(ident)
    assert not v.holds
    assert not is_chain_transitive(ident)


def test_delta_zero_edges_are_the_images():
    for A in subsets(3):
        assert HyperGraph(perm3, 0).successors(A) == (perm3.image_mask(A),)


def test_hyperspace_cap(monkeypatch):
    big = MultiMap(grid_interval(12), (tuple(range(13)),))
    with pytest.raises(SpaceTooLarge, match="HYPERSPACE_NODE_CAP"):
        HyperGraph(big, 0)
    monkeypatch.setenv("HYPERSPACE_NODE_CAP", "13")
    HyperGraph(big, 0)


@settings(max_examples=60, deadline=None)
@given(systems(max_points=4), st.data())
def test_edges_match_oracle_and_grow_with_delta(F, data):
    crit = (Fraction(0),) + F.space.distances
    d1 = data.draw(st.sampled_from(crit))
    d2 = data.draw(st.sampled_from(crit))
    d1, d2 = min(d1, d2), max(d1, d2)
    g1, g2 = build_hypergraph(F, d1), build_hypergraph(F, d2)
    M = adjacency(F, d1)
    for A in g1.nodes:
        assert set(g1.successors(A)) == {B for B in g1.nodes if M[A, B]}
        assert set(g1.successors(A)) <= set(g2.successors(A))
    if is_chain_transitive_at(F, d1):
        assert is_chain_transitive_at(F, d2)
    if is_chain_mixing_at(F, d1):
        assert is_chain_mixing_at(F, d2)


@settings(max_examples=60, deadline=None)
@given(systems(max_points=4), st.data())
def test_spectrum_matches_matrix_powers(F, data):
    delta = data.draw(st.sampled_from((Fraction(0),) + F.space.distances))
    x = data.draw(st.integers(0, F.size - 1))
    A = data.draw(st.integers(1, (1 << F.size) - 1))
    spec = chain_length_spectrum(F, delta, x, A)
    M = adjacency(F, delta).astype(np.int64)
    v = np.zeros(M.shape[0], dtype=np.int64)
    v[1 << x] = 1
    direct = []
    for n in range(spec.onset + 2 * spec.period + 1):
        if v[A]:
            direct.append(n)
        v = (v @ M > 0).astype(np.int64)
    assert spec.lengths(spec.onset + 2 * spec.period) == direct


@settings(max_examples=60, deadline=None)
@given(systems(max_points=4), st.data())
def test_found_chains_revalidate(F, data):
    delta = data.draw(st.sampled_from((Fraction(0),) + F.space.distances))
    x = data.draw(st.integers(0, F.size - 1))
    for A in ran_masks(F):
        chain = find_chain(F, delta, x, A)
        spec = chain_length_spectrum(F, delta, x, A)
        assert (chain is None) == spec.is_empty()
        if chain is not None:
            chain.validate(F)
            assert chain.sets[-1].mask == A
            assert chain.length == min(spec.lengths(spec.onset + spec.period))


@settings(max_examples=80, deadline=None)
@given(systems(max_points=4))
def test_chain_mixing_implies_chain_transitive(F):
    if is_chain_mixing(F):
        assert is_chain_transitive(F)
    v = is_chain_mixing(F)
    if not v.holds:
        w = v.witness
        spec = chain_length_spectrum(F, 0, w["x"], w["A"])
        assert all(w["missing"] + k * w["period"] not in spec for k in range(5))
