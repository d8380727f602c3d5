"""Brute-force reference computations: z counts, longest paths, class counts."""

import math
from itertools import combinations

import pytest

from tightpath.combinatorics import JTightPath, path_vertex_count, z_ell
from tightpath.hypergraph import ExplicitHypergraph, generate_explicit
from tightpath.oracle import (
    OracleResult,
    enumerate_path_classes,
    expectation_monte_carlo,
    longest_path_exact,
    z_ell_bruteforce,
)


def complete_hypergraph(n, k):
    return ExplicitHypergraph(n, k, combinations(range(n), k))


def chain_hypergraph(n, k, j, ell):
    """Exactly the edges of one j-tight path on 0..v-1, nothing else."""
    path = JTightPath(k, j, tuple(range(path_vertex_count(k, j, ell))))
    return ExplicitHypergraph(n, k, path.edges()), path


def test_z_bruteforce_hand_checked_points():
    # ell=1: all k! orderings of a single edge share its edge set
    assert z_ell_bruteforce(2, 1, 1) == 2
    assert z_ell_bruteforce(3, 2, 1) == 6
    assert z_ell_bruteforce(4, 1, 1) == 24
    # k=3, j=2, ell=2 on vertices 0..3: the first window must be one of
    # the two edges and the last window the other, pinning the end
    # vertices; the middle pair is free. 2 directions * 2 = 4
    assert z_ell_bruteforce(3, 2, 2) == 4
    # k=4, j=2, ell=2: ends are ordered pairs, middle is the shared pair:
    # 2 directions * 2 * 2 * 2 = 16
    assert z_ell_bruteforce(4, 2, 2) == 16


def test_z_bruteforce_rejects_large_paths():
    assert path_vertex_count(6, 2, 3) > 11
    with pytest.raises(ValueError):
        z_ell_bruteforce(6, 2, 3)


def test_longest_path_empty_hypergraph():
    res = longest_path_exact(ExplicitHypergraph(5, 3, []), j=2)
    assert isinstance(res, OracleResult)
    assert res.length == 0
    assert res.witness.ell == 0
    assert not res.censored


def test_longest_path_on_a_bare_chain():
    for k, j, ell in [(3, 2, 4), (3, 1, 3), (4, 2, 3), (5, 3, 3)]:
        H, path = chain_hypergraph(path_vertex_count(k, j, ell) + 2, k, j, ell)
        res = longest_path_exact(H, j)
        assert res.length == ell
        assert res.witness.edge_sets() == path.edge_sets()


def test_longest_path_complete_small():
    H = complete_hypergraph(4, 3)
    # 4 vertices hold a 2-path for j=2 (v=4) but only a single edge for j=1
    assert longest_path_exact(H, 2).length == 2
    assert longest_path_exact(H, 1).length == 1


def test_witness_is_a_path_in_the_instance():
    for seed in range(10):
        H = generate_explicit(9, 3, 0.25, seed=seed)
        res = longest_path_exact(H, 2)
        assert res.witness.ell == res.length
        assert res.witness.edge_sets() <= {frozenset(e) for e in H.edges}


def test_dfs_and_levels_agree():
    """The two enumeration strategies are interchangeable when k-j == 1."""
    for seed in range(30):
        H = generate_explicit(10, 3, 0.2, seed=seed)
        a = longest_path_exact(H, 2, method="dfs")
        b = longest_path_exact(H, 2, method="levels")
        assert a.length == b.length
        assert not a.censored and not b.censored
        assert b.witness.edge_sets() <= {frozenset(e) for e in H.edges}


def test_method_validation():
    H = generate_explicit(8, 3, 0.3, seed=0)
    with pytest.raises(ValueError):
        longest_path_exact(H, 1, method="levels")  # k-j == 2
    with pytest.raises(ValueError):
        longest_path_exact(H, 2, method="bogus")


def test_node_budget_censors():
    H = complete_hypergraph(7, 3)
    res = longest_path_exact(H, 2, node_budget=1)
    assert res.censored
    assert res.nodes > 1 or res.length == 0
    full = longest_path_exact(H, 2)
    assert not full.censored
    assert full.length >= res.length


def test_longest_path_relabel_invariant():
    perm = [5, 9, 0, 7, 3, 8, 1, 6, 2, 4]
    for seed in range(5):
        H = generate_explicit(10, 3, 0.15, seed=seed)
        assert longest_path_exact(H, 2).length == longest_path_exact(H.relabeled(perm), 2).length


def test_class_counts_length_zero():
    H = generate_explicit(8, 3, 0.3, seed=4)
    assert enumerate_path_classes(H, 2, 0) == (math.comb(8, 2), math.perm(8, 2))


def test_class_counts_complete_pairs():
    # shared j-set (C(5,2) choices) plus an unordered pair of distinct
    # third vertices (C(3,2)): 10 * 3 = 30 two-edge paths
    H = complete_hypergraph(5, 3)
    classes, labeled = enumerate_path_classes(H, 2, 2)
    assert classes == 30
    assert labeled == 30 * z_ell(3, 2, 2)


def test_class_counts_complete_permutation_identity():
    """On a complete instance every v-sequence is a path: labeled = (n)_v."""
    for n, k, j, ell in [(6, 3, 2, 3), (6, 3, 2, 4), (8, 4, 2, 3), (7, 3, 1, 3)]:
        H = complete_hypergraph(n, k)
        classes, labeled = enumerate_path_classes(H, j, ell)
        v = path_vertex_count(k, j, ell)
        assert labeled == math.perm(n, v)
        assert classes * z_ell(k, j, ell) == labeled


def test_class_counts_random_instances_match_z():
    for seed in range(8):
        H = generate_explicit(9, 3, 0.3, seed=seed)
        for ell in (1, 2, 3):
            classes, labeled = enumerate_path_classes(H, 2, ell)
            assert labeled == classes * z_ell(3, 2, ell)
    for seed in range(4):
        H = generate_explicit(9, 4, 0.2, seed=seed)
        classes, labeled = enumerate_path_classes(H, 2, 2)
        assert labeled == classes * z_ell(4, 2, 2)


def test_class_counts_one_edge_paths_count_edges():
    for seed in range(5):
        H = generate_explicit(8, 3, 0.4, seed=seed)
        classes, labeled = enumerate_path_classes(H, 2, 1)
        assert classes == H.edge_count
        assert labeled == H.edge_count * math.factorial(3)


def test_monte_carlo_degenerate_p():
    mean, se = expectation_monte_carlo(7, 3, 2, 2, 0.0, samples=50, seed=1)
    assert (mean, se) == (0.0, 0.0)
    # p=1 is deterministic: every sample is the complete hypergraph
    mean, se = expectation_monte_carlo(6, 3, 2, 2, 1.0, samples=20, seed=1)
    assert se == 0.0
    assert mean == math.comb(6, 2) * math.comb(4, 2)


def test_monte_carlo_single_edges():
    mean, se = expectation_monte_carlo(6, 3, 2, 1, 0.5, samples=4000, seed=2)
    assert se > 0
    assert abs(mean - 0.5 * math.comb(6, 3)) <= 3 * se


def test_monte_carlo_validation():
    with pytest.raises(ValueError):
        expectation_monte_carlo(13, 3, 2, 2, 0.1, samples=10, seed=0)
    with pytest.raises(ValueError):
        expectation_monte_carlo(8, 3, 2, 2, 0.1, samples=0, seed=0)
