"""Acceptance criteria 1-10 at their stated scales and tolerances.

Each test appends one "criterion N: PASS|FAIL ..." line that the terminal
summary prints in order.
"""

import io
import math
import random
import time

import numpy as np
import pytest

import conftest
from binclique.cli import main
from binclique.cnf import encode_block_clique
from binclique.comm import (baseline_protocol, distributional_error, leaf_census, random_subcube_protocol,
                            subcube_like_check)
from binclique.density import check_bounded_cn, concentration_experiment_ac, measure_beta, min_almost_complete
from binclique.f2 import closure, form_rank, is_safe, random_system, rank_probability_experiment
from binclique.graph import complete_graph, sample_graph
from binclique.pdt import NonEdgeInstance, random_pdt, success_rate, walk_distribution_test
from binclique.proofs import resplus_to_affine_dag, verify_cp, verify_resplus
from binclique.stats import np_rng
from binclique.triangles import (CliqueSplit, Triangle, audit_covering_tree, axiom_preimage, block_depth_census,
                                 block_width, build_mu, covering_tree, cp_to_triangle_dag, pair_preimage,
                                 random_triangle_dag,
                                 restricted_triangle, slice_widths, triangle_free_graph)
from cli_cases import cases, write_inputs
from oracles import (brute_closure, brute_min_entropy, brute_sat, brute_slice_width, has_transversal_clique,
                     independent_basis, safe_by_columns, safe_by_definition, zero_blocks)
from proof_fixtures import (EDGELESS, EDGELESS_AXIOMS, HAND_CP, HAND_RES, cp_mutations, cp_rejected,
                            res_mutations, res_rejected)

pytestmark = pytest.mark.slow


def record(num: int, ok: bool, detail: str) -> None:
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_density_concentration():
    t0 = time.time()
    exp = concentration_experiment_ac(4096, 0.9, 8, graphs=20, tuples_per_graph=5000, seed=20240101)
    elapsed = time.time() - t0
    ok = exp.trials == 10 ** 5 and exp.empirical <= 0.13
    record(1, ok, f"empirical={exp.empirical:.4f} threshold=0.13 reference={exp.reference:.4f} "
                  f"tuples={exp.trials} graphs=20 runtime={elapsed:.0f}s")


def test_criterion_02_bounded_common_neighbourhoods():
    t0 = time.time()
    G = sample_graph(4096, 0.875, 4, 7)
    rep = check_bounded_cn(G, 0.875, 0.59, 8, mode="sampled", trials=1000, seed=8)
    elapsed = time.time() - t0
    record(2, rep.passed, f"sets=1000 max_deviation={rep.max_deviation:.4f} beta=0.59 "
                          f"runtime={elapsed:.0f}s")


def test_criterion_03_walk_distribution():
    G = sample_graph(16, 0.75, 6, 31)
    inst = NonEdgeInstance(G, [(5, 3)])
    tvs = []
    for t in range(10):
        T = random_pdt(6, 4, 6, random.Random(300 + t), blocks=inst.free_blocks)
        tvs.append(walk_distribution_test(inst, T, 10 ** 5, 400 + t).tv)
    passed = sum(tv <= 0.02 for tv in tvs)
    record(3, passed == 10, f"trees_within_0.02={passed}/10 max_tv={max(tvs):.4f} walks_per_tree=100000")


def test_criterion_04_walk_success_rate():
    p = 1 - 2 ** -10
    G = sample_graph(1024, p, 16, 41)
    inst = NonEdgeInstance(G)
    beta = measure_beta(G, p, 64, 1000, 42)
    reports = []
    for t in range(3):
        T = random_pdt(16, 10, 8, random.Random(4300 + t))
        reports.append(success_rate(inst, T, 10 ** 4, 4400 + t, p, beta, 64))
    complete = NonEdgeInstance(complete_graph(1024, 16))
    T = random_pdt(16, 10, 8, random.Random(4500))
    exact = success_rate(complete, T, 2000, 4501, 1.0, 0.0, 64)
    ok = all(not r.violation and r.overrun_ok for r in reports) and exact.empirical == 1.0
    worst = min(reports, key=lambda r: r.empirical)
    record(4, ok, f"beta_hat={beta:.4f} min_success={worst.empirical:.4f} reference={worst.reference:.3e} "
                  f"max_overrun={max(r.overrun for r in reports):.4f} overrun_bound={worst.overrun_bound:.4f} "
                  f"complete_graph_success={exact.empirical}")


def test_criterion_05_closure_and_safety():
    rng = np_rng(5, 0)
    agree = bound_ok = 0
    for _ in range(500):
        k = int(rng.integers(1, 7))
        m = int(rng.integers(1, 4))
        forms = [int(f) for f in rng.integers(0, 1 << (k * m), size=int(rng.integers(0, 7)))]
        basis = independent_basis(forms, k * m)
        safe_ok = is_safe(forms, k, m) == safe_by_columns(basis, k, m) == safe_by_definition(basis, m)
        S = closure(forms, k, m)
        closure_ok = S == brute_closure(forms, k, m)
        agree += safe_ok and closure_ok
        bound_ok += len(S) + form_rank(zero_blocks(forms, S, m)) <= form_rank(forms)
    record(5, agree == 500 and bound_ok == 500, f"oracle_agreement={agree}/500 dimension_bound={bound_ok}/500")


def test_criterion_06_rank_probability():
    worst = []
    ok = True
    for r in range(7):
        for rep in range(3):
            S = random_system(8, 4, r, np_rng(60 + r, rep), rank=r)
            rng = np_rng(70 + r, rep)
            allowed = [sorted(rng.permutation(16)[:11].tolist()) for _ in range(8)]
            res = rank_probability_experiment(S, allowed, 10 ** 5, 80 + 10 * r + rep)
            ok &= res.passed
            worst.append(res.empirical - res.bound)
    record(6, ok, f"systems=21 ranks=0..6 samples=100000 max(empirical-bound)={max(worst):+.4f}")


def _prefix_triangle(split):
    """Threshold triangle whose y-slices each have block width <= 2.

    x's are ordered by how many y's they share a non-edge with; each y keeps the
    longest prefix of that order it can cover with two blocks.
    """
    order = np.argsort(-(split.bad != 0).sum(axis=1), kind="stable")
    rank = np.empty(split.size)
    rank[order] = np.arange(split.size)
    b = np.empty(split.size)
    for y in range(split.size):
        lo, hi = 0, split.size
        while lo < hi:
            mid = (lo + hi + 1) // 2
            row = np.zeros(split.size, dtype=bool)
            row[order[:mid]] = True
            if slice_widths(split, row[None, :], split.bad[:, y][None, :])[0] <= 2:
                lo = mid
            else:
                hi = mid - 1
        b[y] = lo - 1
    return Triangle(rank, b).members()


def test_criterion_07_bottleneck_mechanics():
    # exact block width against set-cover enumeration
    width_ok = 0
    for g in range(20):
        G = sample_graph(16, 0.5, 3, 700 + g)
        split = CliqueSplit(G)
        A = G.to_adjacency().tolist()
        rng = np_rng(7, g)
        mem = rng.random((split.size, split.size)) < [0.3, 0.6, 0.9][g % 3]
        for t in range(50):
            side = "x" if t % 2 else "y"
            z = int(rng.integers(split.size))
            others = np.flatnonzero(mem[z] if side == "x" else mem[:, z]).tolist()
            width_ok += block_width(split, mem, z, side) == brute_slice_width(A, 16, 3, side, z, others)

    # input assignment and covering trees on 20 random DAGs
    claim_ok = tree_ok = trees = 0
    census_lines = []
    q = 1
    for d in range(20):
        G = triangle_free_graph(16, 7000 + d, "parity" if d % 2 else "greedy")
        split = CliqueSplit(G)
        dag = random_triangle_dag(split, 7100 + d)
        dag.validate(pair_preimage(split))
        mu = build_mu(dag, split, q)
        claim_ok += not mu.claim_violations
        s = min_almost_complete(G).s_star
        seen = set()
        all_ok = True
        for u in range(len(dag)):
            Tp = restricted_triangle(dag, mu, u)
            key = np.packbits(Tp).tobytes()
            if not Tp.any() or key in seen:
                continue
            seen.add(key)
            tree = covering_tree(split, Tp, q)
            all_ok &= audit_covering_tree(split, tree).ok
            census = block_depth_census(tree, 16, s)
            assert not census.applicable
            trees += 1
        tree_ok += all_ok

    # census where 2 q^2 s <= sqrt(n)/4 holds: dense n=64 graphs with s <= 1
    applicable = flagged = 0
    seed = 0
    while applicable < 5:
        G = sample_graph(64, 0.998, 3, seed)
        seed += 1
        s = min_almost_complete(G).s_star
        if s > 1:
            continue
        split = CliqueSplit(G)
        tree = covering_tree(split, _prefix_triangle(split), q)
        assert audit_covering_tree(split, tree).ok
        census = block_depth_census(tree, 64, s)
        assert census.applicable
        applicable += 1
        flagged += census.flagged
        census_lines.append(str(census.counts))
    ok = width_ok == 1000 and claim_ok == 20 and tree_ok == 20 and flagged == 0
    record(7, ok, f"width_agreement={width_ok}/1000 sink_width_ok={claim_ok}/20 tree_properties={tree_ok}/20 "
                  f"(covering_trees={trees}) census_instances={applicable} census_exceeded={flagged} "
                  f"depth_counts={' '.join(census_lines)}")


def test_criterion_08_refutation_round_trip():
    rng = np_rng(8, 0)
    agree = 0
    for t in range(50):
        k = 2 + t % 2
        G = sample_graph(2, float(rng.random()), k, 800 + t)
        F = encode_block_clique(G)
        agree += (not brute_sat(F.clauses, F.num_vars)) == (not has_transversal_clique(
            G.to_adjacency().tolist(), 2, k))
    cp_len = verify_cp(EDGELESS_AXIOMS, HAND_CP)
    res_len, res_depth = verify_resplus(EDGELESS, HAND_RES)
    cp_to_triangle_dag(EDGELESS_AXIOMS, HAND_CP, [0], [1]).validate(axiom_preimage(EDGELESS_AXIOMS, [0], [1]))
    dag = resplus_to_affine_dag(EDGELESS, HAND_RES)
    dag.validate(EDGELESS, "exhaustive")
    cp_mut = list(cp_mutations(HAND_CP))
    res_mut = list(res_mutations(HAND_RES))
    cp_rej = sum(cp_rejected(EDGELESS_AXIOMS, lines, [0], [1]) for lines in cp_mut)
    res_rej = sum(res_rejected(EDGELESS, 2, lines) for lines in res_mut)
    ok = agree == 50 and dag.depth() == res_depth and cp_rej == len(cp_mut) and res_rej == len(res_mut)
    record(8, ok, f"unsat_vs_clique={agree}/50 cp_length={cp_len} rlin_length={res_len} rlin_depth={res_depth} "
                  f"mutations_rejected cp={cp_rej}/{len(cp_mut)} rlin={res_rej}/{len(res_mut)}")


def test_criterion_09_communication_census():
    err_ok = spread_ok = graphs = 0
    applied = violations = safe_total = safe_over = 0
    for t, p in enumerate([0.5, 0.75, 0.9, 0.95, 0.98] * 2):
        G = sample_graph(16, p, 3, 900 + t)
        split = CliqueSplit(G)
        s = min_almost_complete(G).s_star
        graphs += 1
        P = baseline_protocol(split)
        exact = distributional_error(P, split).error
        est = distributional_error(P, split, trials=10 ** 5, seed=950 + t)
        sigma = math.sqrt(exact * (1 - exact) / 10 ** 5)
        err_ok += abs(est.error - exact) <= 3 * sigma + 1e-12
        protocols = [P] + [random_subcube_protocol(3, 2, depth, 960 + 3 * t + depth) for depth in (2, 3)]
        agree = True
        for Q in protocols:
            for path, _ in Q.leaves():
                X, Y = Q.rects[path]
                if not X.any() or not Y.any():
                    continue
                rep = subcube_like_check(X, Y, Q.K, 0.9, max_free=12)
                for side, M in (("X", X), ("Y", Y)):
                    vals = np.flatnonzero(M).tolist()
                    for I, H in rep.entropies[side].items():
                        agree &= math.isclose(H, brute_min_entropy(vals, I, Q.K))
            census = leaf_census(Q, split, s, gamma=0.9)
            applied += sum(r.applies for r in census.records)
            violations += len(census.violations)
            for r in census.records:
                if r.safe and r.mass > 0:
                    safe_total += 1
                    safe_over += r.p_nonedge > r.bound + 1e-12
        spread_ok += agree
    ok = err_ok == graphs and spread_ok == graphs and violations == 0
    record(9, ok, f"sampled_vs_exhaustive={err_ok}/{graphs} entropy_agreement={spread_ok}/{graphs} "
                  f"bound_leaves={applied} bound_violations={violations} "
                  f"(literal safe-leaf reading: {safe_over}/{safe_total} safe leaves above the bound)")


def test_criterion_10_cli_reproducibility(tmp_path):
    inputs = write_inputs(tmp_path)
    same = 0
    argvs = cases(inputs)
    for idx, argv in enumerate(argvs):
        outs = []
        for rep in range(2):
            path = tmp_path / f"out{idx}-{rep}"
            code = main(argv + ["--out", str(path)], io.StringIO())
            assert code == 0, argv
            outs.append(path.read_bytes())
        same += outs[0] == outs[1]
    record(10, same == len(argvs), f"byte_identical={same}/{len(argvs)} commands")
