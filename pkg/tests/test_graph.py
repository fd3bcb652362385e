import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binclique.graph import (VertexId, bits_to_index, complete_graph, empty_graph, from_adjacency,
                             graph_from_json, graph_to_json, sample_graph, split_halves, vertex_bits)
from oracles import naive_common_neighborhood


def test_complete_and_empty_samples():
    assert sample_graph(4, 1.0, 3, 7).edge_count() == 48
    assert sample_graph(4, 0.0, 3, 7).edge_count() == 0


def test_sampler_rejects_bad_parameters():
    with pytest.raises(ValueError):
        sample_graph(6, 0.5, 2, 1)
    with pytest.raises(ValueError):
        sample_graph(4, 0.5, 0, 1)
    with pytest.raises(ValueError):
        sample_graph(4, 1.5, 2, 1)


def test_mean_edge_count_matches_binomial():
    counts = np.array([sample_graph(16, 0.5, 2, s).edge_count() for s in range(2000)])
    se = np.sqrt(256 * 0.25 / counts.size)
    assert abs(counts.mean() - 128) <= 3 * se


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 4, 8]), st.integers(1, 4), st.floats(0, 1), st.integers(0, 2**63 - 1))
def test_structure_and_reproducibility(n, k, p, seed):
    G = sample_graph(n, p, k, seed)
    G.validate()
    H = sample_graph(n, p, k, seed, threads=3)
    assert np.array_equal(G.adj, H.adj)


def test_vertex_bits_examples():
    assert vertex_bits(5, 8) == "101"
    assert all(bits_to_index(vertex_bits(u, 16)) == u for u in range(16))
    assert split_halves(6, 16) == ("01", "10")
    assert VertexId(2, 3).gid(4) == 11


def test_common_neighborhood_complete_and_empty_set():
    G = complete_graph(4, 3)
    assert G.common_neighborhood([(0, 1), (1, 2)], 2) == (0, 1, 2, 3)
    assert G.common_neighborhood([], 1) == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        G.common_neighborhood([(2, 0)], 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 3))
def test_common_neighborhood_matches_oracle(seed, size):
    G = sample_graph(8, 0.6, 4, seed)
    A = G.to_adjacency().tolist()
    rng = np.random.default_rng(seed)
    blocks = rng.permutation(4)[:size + 1]
    U = [int(b) * 8 + int(rng.integers(8)) for b in blocks[:-1]]
    i = int(blocks[-1])
    got = G.common_neighborhood(U, i)
    assert list(got) == naive_common_neighborhood(A, 8, U, i)
    per = [set(G.common_neighborhood([u], i)) for u in U]
    assert set(got) == (set.intersection(*per) if per else set(range(8)))


def test_json_round_trip_and_validation():
    G = sample_graph(4, 0.5, 3, 11)
    H = graph_from_json(graph_to_json(G))
    assert np.array_equal(G.adj, H.adj) and H.meta["seed"] == 11
    A = np.zeros((4, 4), dtype=bool)
    A[0, 1] = A[1, 0] = True
    with pytest.raises(ValueError):
        from_adjacency(A, 2, 2).validate()
    with pytest.raises(ValueError):
        graph_from_json('{"format": "BCLQ-1", "n": 2, "k": 2, "edges": [[0, 1]]}')


def test_with_edges_and_restrict():
    G = empty_graph(2, 3).with_edges([(0, 2), (1, 5)])
    assert G.adjacent(0, 2) and G.adjacent(5, 1) and not G.adjacent(0, 3)
    R = G.restrict_blocks([0, 2])
    assert R.k == 2 and R.adjacent(1, 3)
