import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binclique.density import min_almost_complete
from binclique.graph import complete_graph, empty_graph, sample_graph
from binclique.triangles import (BudgetExceeded, CliqueSplit, Triangle, TriangleDag, audit_covering_tree,
                                 block_depth_census, block_width, build_mu, covering_tree,
                                 cp_triangle_dag_for_graph, has_transversal_clique, pair_preimage,
                                 random_triangle_dag, restricted_triangle, slice_widths,
                                 triangle_free_graph)
from oracles import brute_slice_width
from oracles import has_transversal_clique as brute_transversal


def test_split_requires_even_log():
    with pytest.raises(ValueError):
        CliqueSplit(empty_graph(8, 2))


def test_width_examples():
    split = CliqueSplit(empty_graph(4, 2))
    empty = np.zeros((split.size, split.size), dtype=bool)
    assert block_width(split, empty, 0) == 0
    R = split.rect(0, 4)
    z = int(np.flatnonzero(R.any(axis=1))[0])
    assert block_width(split, R, z) == 2
    full = np.ones_like(empty)
    assert block_width(split, full, 0, "x") == 2
    assert block_width(CliqueSplit(complete_graph(4, 2)), full, 0) == math.inf
    with pytest.raises(BudgetExceeded):
        slice_widths(split, full, split.bad, budget=1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([0.3, 0.6, 0.9]))
def test_exact_width_matches_brute_force(seed, p):
    G = sample_graph(16, 0.5, 3, seed)
    split = CliqueSplit(G)
    rng = np.random.default_rng(seed)
    mem = rng.random((split.size, split.size)) < p
    A = G.to_adjacency().tolist()
    for side in ("x", "y"):
        for z in rng.integers(split.size, size=5).tolist():
            others = np.flatnonzero(mem[z] if side == "x" else mem[:, z]).tolist()
            exact = block_width(split, mem, z, side)
            assert exact == brute_slice_width(A, 16, 3, side, z, others)
            assert exact <= block_width(split, mem, z, side, mode="greedy")


@pytest.fixture(scope="module")
def tf_instance():
    G = triangle_free_graph(16, 3, "parity")
    assert not has_transversal_clique(G)
    split = CliqueSplit(G)
    return G, split, random_triangle_dag(split, 1)


def test_triangle_free_generators():
    for method in ("parity", "greedy"):
        G = triangle_free_graph(16, 5, method)
        G.validate()
        assert not brute_transversal(G.to_adjacency().tolist(), 16, 3)
    assert has_transversal_clique(complete_graph(4, 3))


def test_random_dag_is_valid(tf_instance):
    G, split, dag = tf_instance
    dag.validate(pair_preimage(split))
    again = TriangleDag.from_json(dag.to_json())
    assert len(again) == len(dag)
    assert all((again.members(u) == dag.members(u)).all() for u in range(0, len(dag), 97))


def test_mu_with_large_q_is_empty(tf_instance):
    _, split, dag = tf_instance
    assert build_mu(dag, split, q=3).assigned == 0


def test_single_leaf_mu_by_hand():
    split = CliqueSplit(empty_graph(4, 2))
    u, v = 0, 4
    R = split.rect(u, v)
    tri = Triangle(np.where(R.any(axis=1), 0.0, math.inf), np.where(R.any(axis=0), 0.0, -math.inf))
    dag = TriangleDag([tri], [()], [(u, v)], 0)
    mu = build_mu(dag, split, q=1, check_claim=False)
    assert set(mu.mu_x) == set(np.flatnonzero(R.any(axis=1)).tolist())
    assert set(mu.mu_x.values()) == {0}


def test_mu_invariants(tf_instance):
    _, split, dag = tf_instance
    mu = build_mu(dag, split, q=1)
    assert mu.claim_violations == []
    order = dag.sinks_first()
    prev = None
    for u in order:
        Xa, Ya = mu.snapshots[u]
        if prev is not None:
            assert not (Xa & ~prev[0]).any() and not (Ya & ~prev[1]).any()
        prev = (Xa, Ya)
    for z, u in mu.mu_x.items():
        assert mu.snapshots[u][0][z]


def test_many_inputs_assigned_on_cp_dag():
    G = triangle_free_graph(16, 2, "greedy")
    dag, split, axioms, proof = cp_triangle_dag_for_graph(G)
    dag.validate(pair_preimage(split))
    s = min_almost_complete(G).s_star
    q = 1
    mu = build_mu(dag, split, q)
    assert 1 <= q <= 16 ** 0.25 / math.sqrt(max(s, 1))
    assert mu.assigned >= mu.domain / 4


def test_covering_tree_examples():
    split = CliqueSplit(empty_graph(16, 3))
    empty = np.zeros((split.size, split.size), dtype=bool)
    assert len(covering_tree(split, empty, 1)) == 1
    R = split.rect(0, 16)
    tree = covering_tree(split, R, 1)
    assert len(tree) == 2 and tree.nodes[1].label == (0, 16) and not tree.nodes[1].mem.any()
    assert audit_covering_tree(split, tree).ok
    with pytest.raises(ValueError):
        covering_tree(split, np.ones_like(empty), 0.5)


def test_covering_trees_on_restricted_triangles(tf_instance):
    G, split, dag = tf_instance
    q = 1
    mu = build_mu(dag, split, q)
    sizes = sorted(((restricted_triangle(dag, mu, u).sum(), u) for u in range(len(dag))), reverse=True)
    s = min_almost_complete(G).s_star
    for _, u in sizes[:5]:
        Tp = restricted_triangle(dag, mu, u)
        tree = covering_tree(split, Tp, q)
        assert audit_covering_tree(split, tree).ok
        census = block_depth_census(tree, 16, s)
        assert census.counts.get(0) == 1
        assert census.counts.get(1, 0) == 0
        if census.applicable:
            assert not census.violations


def test_census_requires_n16():
    split = CliqueSplit(empty_graph(4, 2))
    tree = covering_tree(split, np.zeros((split.size, split.size), dtype=bool), 1)
    with pytest.raises(ValueError):
        block_depth_census(tree, 4, 1)
