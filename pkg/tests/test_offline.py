"""Exact offline optima against brute-force oracles."""

import numpy as np
import pytest

from cmatch import poisson, regular
from cmatch.offline import max_b_matching, max_matching
from cmatch.stream import DegreeSequencePair, Multigraph, build_full_graph, \
    sample_degree_sequences

from oracles import brute_force_max_b_matching, brute_force_max_matching


def _random_tiny_graph(rng):
    n_u = int(rng.integers(1, 6))
    deg_u = rng.integers(0, 4, size=n_u)
    deg_v = rng.integers(0, 4, size=int(rng.integers(1, 6)))
    seq = DegreeSequencePair.from_degrees(deg_u, deg_v)
    return build_full_graph(seq, seed=int(rng.integers(0, 10_000)))


def test_single_edge():
    g = build_full_graph(DegreeSequencePair.from_degrees([1], [1]), seed=0)
    assert max_matching(g).size == 1
    assert max_matching(g).method == "augmenting_paths"


def test_star_counts_once():
    g = build_full_graph(DegreeSequencePair.from_degrees([3], [1, 1, 1]), seed=0)
    assert max_matching(g).size == 1


def test_simple_regular_instance_has_perfect_matching():
    seq = sample_degree_sequences(regular(3), regular(3), 100, seed=2)
    g = build_full_graph(seq, seed=2, simple_only=True)
    assert max_matching(g).size == 100


def test_matches_brute_force_on_tiny_graphs():
    rng = np.random.default_rng(0)
    for _ in range(40):
        g = _random_tiny_graph(rng)
        edges = sorted(set(g.real_edges()))
        expected = brute_force_max_matching(edges, g.n_offline, g.n_arrivals)
        assert max_matching(g).size == expected


def test_b_matching_reduces_to_matching_with_unit_capacities():
    rng = np.random.default_rng(1)
    for _ in range(25):
        g = _random_tiny_graph(rng)
        ones = np.ones(g.n_offline, dtype=int)
        assert max_b_matching(g, ones).size == max_matching(g).size


def test_b_matching_simple_capacity_case():
    g = build_full_graph(DegreeSequencePair.from_degrees([2], [1, 1]), seed=0)
    assert max_b_matching(g, [2]).size == 2
    assert max_b_matching(g, [1]).size == 1
    assert max_b_matching(g, [2]).method == "max_flow"


def test_b_matching_matches_brute_force_with_capacities():
    rng = np.random.default_rng(2)
    for _ in range(25):
        g = _random_tiny_graph(rng)
        caps = rng.integers(1, 4, size=g.n_offline)
        expected = brute_force_max_b_matching(
            sorted(set(g.real_edges())), g.n_offline, g.n_arrivals, caps)
        assert max_b_matching(g, caps).size == expected


def test_b_matching_poisson_instance_with_capacity_two():
    seq = sample_degree_sequences(poisson(4.0), poisson(4.0), 8, seed=4)
    g = build_full_graph(seq, seed=4)
    caps = np.full(8, 2)
    expected = brute_force_max_b_matching(
        sorted(set(g.real_edges())), g.n_offline, g.n_arrivals, caps)
    assert max_b_matching(g, caps).size == expected


def test_balancing_edges_are_excluded():
    # offline side has 2 spare half-edges, paired to the phantom arrival
    seq = DegreeSequencePair.from_degrees([2, 2], [1, 1])
    g = build_full_graph(seq, seed=1)
    assert max_matching(g).size <= 2
    assert all(u < 2 for _, u in g.real_edges())


def test_idempotent_and_monotone():
    base = Multigraph(adjacency=((0,), (1,)), leftover=(), n_offline=3,
                      n_arrivals=2, balance_side="none", balance_degree=0)
    extended = Multigraph(adjacency=((0,), (1,), (2,)), leftover=(),
                          n_offline=3, n_arrivals=3, balance_side="none",
                          balance_degree=0)
    assert max_matching(base).size == max_matching(base).size == 2
    assert max_matching(extended).size >= max_matching(base).size


def test_capacity_array_validation():
    g = build_full_graph(DegreeSequencePair.from_degrees([1, 1], [1, 1]), seed=0)
    with pytest.raises(ValueError):
        max_b_matching(g, [1])
    with pytest.raises(ValueError):
        max_b_matching(g, [1, -1])


def test_empty_graph():
    g = Multigraph(adjacency=(), leftover=(), n_offline=2, n_arrivals=0,
                   balance_side="none", balance_degree=0)
    assert max_matching(g).size == 0
    assert max_b_matching(g, [1, 1]).size == 0
