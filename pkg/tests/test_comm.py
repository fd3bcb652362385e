import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binclique.comm import (ALICE, BOB, ProtoLeaf, ProtoNode, ProtocolTree, baseline_protocol,
                            distributional_error, fix_monotone, fixed_coords, leaf_census, min_entropy,
                            protocol_from_json, protocol_to_json, random_subcube_protocol, run_protocol,
                            subcube_like_check)
from binclique.density import min_almost_complete
from binclique.graph import complete_graph, empty_graph, sample_graph
from binclique.triangles import BudgetExceeded, CliqueSplit
from oracles import brute_min_entropy, brute_protocol_error


def test_min_entropy_examples():
    assert min_entropy(range(8), [0, 1, 2], 3) == 3
    assert min_entropy([5], [0, 2], 3) == 0
    with pytest.raises(ValueError):
        min_entropy([], [0], 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32))
def test_min_entropy_matches_counting(seed):
    rng = np.random.default_rng(seed)
    vals = rng.choice(256, size=64, replace=False)
    coords = sorted(rng.choice(8, size=int(rng.integers(1, 9)), replace=False).tolist())
    assert math.isclose(min_entropy(vals, coords, 8), brute_min_entropy(vals.tolist(), coords, 8))


def test_spread_examples():
    full = np.ones(16, dtype=bool)
    rep = subcube_like_check(full, full, 4, 1.0)
    assert rep.passed and rep.fix_x == () and rep.fix_y == ()
    single = np.zeros(16, dtype=bool)
    single[5] = True
    rep = subcube_like_check(single, full, 4, 0.9)
    assert rep.fix_x == (0, 1, 2, 3) and rep.passed
    X = np.zeros(4, dtype=bool)
    X[[0, 1, 2]] = True
    Y = np.ones(4, dtype=bool)
    rep = subcube_like_check(X, Y, 2, 0.9)
    assert math.isclose(rep.entropies["X"][(0,)], math.log2(1.5))
    assert not rep.passed and rep.violation[0] == "X"
    assert subcube_like_check(X, Y, 2, 0.5).passed
    with pytest.raises(BudgetExceeded):
        subcube_like_check(full, full, 4, 0.9, max_free=2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_spread_matches_brute_entropies(seed):
    rng = np.random.default_rng(seed)
    K = 6
    X = rng.random(64) < 0.6
    Y = rng.random(64) < 0.8
    if not X.any() or not Y.any():
        return
    gamma = float(rng.choice([0.3, 0.6, 0.9]))
    rep = subcube_like_check(X, Y, K, gamma)
    ok = True
    for side, M in (("X", X), ("Y", Y)):
        vals = np.flatnonzero(M).tolist()
        fixed = fixed_coords(np.array(vals), K)
        assert fixed == tuple(t for t in range(K) if len({(v >> (K - 1 - t)) & 1 for v in vals}) == 1)
        for I, H in rep.entropies[side].items():
            assert math.isclose(H, brute_min_entropy(vals, I, K))
            ok &= H >= gamma * len(I) - 1e-12
    assert rep.passed == ok


def constant_protocol(k, h, out):
    return ProtocolTree(ProtoLeaf(out), k, h)


def test_error_examples():
    split = CliqueSplit(empty_graph(4, 2))
    assert distributional_error(constant_protocol(2, 1, (0, 1)), split).error == 0
    split = CliqueSplit(complete_graph(4, 2))
    assert distributional_error(constant_protocol(2, 1, (0, 1)), split).error == 1
    with pytest.raises(ValueError):
        distributional_error(constant_protocol(2, 1, (0, 1)), split, trials=10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(4, 2), (4, 3), (16, 3)]))
def test_baseline_error_matches_recount(seed, nk):
    n, k = nk
    G = sample_graph(n, 0.3, k, seed)
    split = CliqueSplit(G)
    P = baseline_protocol(split)
    assert P.audit() == []
    A = G.to_adjacency().tolist()
    brute = brute_protocol_error(lambda x, y: run_protocol(P, x, y)[0].output,
                                 split.vertex, A, split.size)
    assert math.isclose(distributional_error(P, split).error, brute)


def test_protocol_structure_and_json():
    P = random_subcube_protocol(3, 2, 4, 7)
    assert P.audit() == [] and fix_monotone(P)
    assert P.cost() <= 4
    Q = protocol_from_json(protocol_to_json(P))
    assert protocol_to_json(Q) == protocol_to_json(P)
    for path, (X, Y) in P.rects.items():
        xs, ys = np.flatnonzero(X), np.flatnonzero(Y)
        for x in xs[:3].tolist():
            for y in ys[:3].tolist():
                assert run_protocol(P, x, y)[1].startswith(path) or not path
    with pytest.raises(ValueError):
        ProtocolTree(ProtoNode(ALICE, np.zeros(3, bool), ProtoLeaf((0, 1)), ProtoLeaf((0, 1))), 2, 1)
    with pytest.raises(ValueError):
        ProtocolTree(ProtoLeaf((0, 5)), 2, 1)


def test_traversal_matches_cached_rectangles():
    P = random_subcube_protocol(3, 2, 3, 11)
    size = 1 << P.K
    for x in range(0, size, 5):
        for y in range(0, size, 7):
            _, path = run_protocol(P, x, y)
            for d in range(len(path) + 1):
                X, Y = P.rects[path[:d]]
                assert X[x] and Y[y]


def test_census_examples():
    split = CliqueSplit(empty_graph(16, 3))
    c = leaf_census(constant_protocol(3, 2, (0, 1)), split, s=2)
    r = c.records[0]
    assert r.D == frozenset() and not r.safe
    K = 6
    # reveal every x and y coordinate of blocks 0 and 1
    def reveal(coords, side):
        if not coords:
            return ProtoLeaf((0, 1))
        t = coords[0]
        table = ((np.arange(1 << K) >> (K - 1 - t)) & 1).astype(bool)
        return ProtoNode(side, table, reveal(coords[1:], side), reveal(coords[1:], side))
    P = ProtocolTree(ProtoNode(ALICE, np.zeros(1 << K, bool), reveal([0, 1, 2, 3], BOB),
                               reveal([0, 1, 2, 3], BOB)), 3, 2)
    # fixing either side's coordinates of blocks 0 and 1 puts both blocks in D
    c = leaf_census(P, split, s=2)
    assert all(r.safe and r.D == frozenset({0, 1}) for r in c.records if r.mass > 0)
    both = ProtocolTree(reveal_both(K, [0, 1, 2, 3]), 3, 2)
    c = leaf_census(both, split, s=2)
    assert all(r.safe for r in c.records if r.mass > 0)


def reveal_both(K, coords):
    def go(rest, side):
        if not rest:
            return go(coords, BOB) if side == ALICE else ProtoLeaf((0, 1))
        t = rest[0]
        table = ((np.arange(1 << K) >> (K - 1 - t)) & 1).astype(bool)
        return ProtoNode(side, table, go(rest[1:], side), go(rest[1:], side))
    return go(coords, ALICE)


def test_census_bound_on_random_subcube_protocols():
    G = sample_graph(16, 0.95, 3, 5)
    split = CliqueSplit(G)
    s = min_almost_complete(G).s_star
    applied = 0
    for seed in range(10):
        c = leaf_census(random_subcube_protocol(3, 2, 2, seed), split, s)
        assert c.violations == []
        applied += sum(r.applies for r in c.records)
    assert applied > 0
