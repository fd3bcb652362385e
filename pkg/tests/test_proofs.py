import pytest
from hypothesis import given, settings, strategies as st

from binclique.cnf import CnfFormula, encode_block_clique
from binclique.graph import sample_graph
from binclique.proofs import (CpProof, ProofError, ResLine, ResPlusProof, cp_line,
                              cp_to_text, ineq, parse_proof, resolution_to_cp, resolution_to_resplus,
                              resplus_to_affine_dag, resplus_to_text, tree_resolution, verify_cp,
                              verify_resplus)
from binclique.triangles import axiom_preimage, cp_to_triangle_dag
from oracles import brute_sat
from proof_fixtures import (EDGELESS, EDGELESS_AXIOMS, HAND_CP, HAND_RES, cp_mutations, cp_rejected,
                            res_mutations, res_rejected)

X_AXIOMS = [ineq([1], 1), ineq([-1], 0)]
X_PROOF = CpProof((cp_line([1], 1, "axiom", 0), cp_line([-1], 0, "axiom", 1), cp_line([0], 1, "from", 0, 1)))
X_CNF = CnfFormula(1, ((1,), (-1,)), 1, 1)
X_RES = ResPlusProof(1, (ResLine(frozenset({(1, 1)}), ("axiom", 0)),
                         ResLine(frozenset({(1, 0)}), ("axiom", 1)),
                         ResLine(frozenset(), ("res", 0, 1, 1))))


def test_cp_examples():
    assert verify_cp(X_AXIOMS, X_PROOF) == 3
    bad = CpProof(X_PROOF.lines[:2] + (cp_line([0], 0, "from", 0, 1),))
    with pytest.raises(ProofError) as e:
        verify_cp(X_AXIOMS, bad)
    assert e.value.step == 2
    assert verify_cp(EDGELESS_AXIOMS, HAND_CP) == 7


def test_cp_rejects_unimplied_and_forward_references():
    lines = list(HAND_CP.lines)
    lines[4] = cp_line([1, 0], 2, "from", 0, 1)
    with pytest.raises(ProofError) as e:
        verify_cp(EDGELESS_AXIOMS, CpProof(tuple(lines)))
    assert e.value.step == 4
    lines = list(HAND_CP.lines)
    lines[4] = cp_line([1, 0], 1, "from", 0, 5)
    with pytest.raises(ProofError):
        verify_cp(EDGELESS_AXIOMS, CpProof(tuple(lines)))
    with pytest.raises(ValueError, match="budget"):
        verify_cp(X_AXIOMS, X_PROOF, var_budget=0)


def test_resplus_examples():
    assert verify_resplus(X_CNF, X_RES) == (3, 1)
    wrong = ResPlusProof(1, X_RES.lines[:2] + (ResLine(frozenset(), ("res", 0, 1, 2)),))
    with pytest.raises(ProofError):
        verify_resplus(X_CNF, wrong)
    assert verify_resplus(EDGELESS, HAND_RES) == (11, 2)


def test_resplus_rejects_bad_weakening():
    lines = list(HAND_RES.lines)
    lines[4] = ResLine(frozenset({(3, 0), (2, 1)}), ("weak", 0))
    with pytest.raises(ProofError) as e:
        verify_resplus(EDGELESS, ResPlusProof(2, tuple(lines)))
    assert e.value.step == 4


def test_depth_ignores_weakening_chains():
    lines = list(X_RES.lines)
    chain = [lines[0], lines[1],
             ResLine(frozenset({(1, 1)}), ("weak", 0)),
             ResLine(frozenset({(1, 1)}), ("weak", 2)),
             ResLine(frozenset(), ("res", 3, 1, 1))]
    assert verify_resplus(X_CNF, ResPlusProof(1, tuple(chain))) == (5, 1)


def test_triangle_dag_from_cp():
    D = cp_to_triangle_dag(X_AXIOMS, X_PROOF, [0], [])
    assert len(D.triangles) == 3
    assert D.members(D.root).all()
    D.validate(axiom_preimage(X_AXIOMS, [0], []))
    D = cp_to_triangle_dag(EDGELESS_AXIOMS, HAND_CP, [0], [1])
    D.validate(axiom_preimage(EDGELESS_AXIOMS, [0], [1]))
    for u, out in enumerate(D.outputs):
        if out is not None:
            assert not (D.members(u) & ~axiom_preimage(EDGELESS_AXIOMS, [0], [1])(out)).any()


def test_affine_dag_from_resplus():
    D = resplus_to_affine_dag(X_CNF, X_RES)
    assert len(D) == 3 and D.edges[2] == (0, 1, 1)
    D.validate(X_CNF)
    D.validate(X_CNF, "exhaustive")
    E = resplus_to_affine_dag(EDGELESS, HAND_RES)
    assert len(E) == len(HAND_RES)
    E.validate(EDGELESS)
    E.validate(EDGELESS, "exhaustive")
    assert E.depth() == verify_resplus(EDGELESS, HAND_RES)[1]


def test_text_round_trip():
    assert parse_proof(cp_to_text(HAND_CP)) == HAND_CP
    assert parse_proof(resplus_to_text(HAND_RES)) == HAND_RES
    for bad in ["cp 1 0 0\n", "frob\n", "cp 1 1 axiom 0\nrlin 1 axiom 0\n", ""]:
        with pytest.raises(ValueError):
            parse_proof(bad)


def test_hand_proof_mutations_rejected():
    for lines in cp_mutations(HAND_CP):
        assert cp_rejected(EDGELESS_AXIOMS, lines, [0], [1])
    for lines in res_mutations(HAND_RES):
        assert res_rejected(EDGELESS, 2, lines)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(0, 10**9))
def test_generated_refutations_verify_and_translate(k, seed):
    G = sample_graph(2, 0.4, k, seed)
    F = encode_block_clique(G)
    if brute_sat(F.clauses, F.num_vars):
        with pytest.raises(ValueError):
            tree_resolution(F)
        return
    lines = tree_resolution(F)
    axioms, cp = resolution_to_cp(F, lines)
    assert verify_cp(axioms, cp) == len(cp)
    xs = list(range(0, F.num_vars, 2))
    ys = [t for t in range(F.num_vars) if t not in xs]
    cp_to_triangle_dag(axioms, cp, xs, ys).validate(axiom_preimage(axioms, xs, ys))
    R = resolution_to_resplus(F, lines)
    length, depth = verify_resplus(F, R)
    D = resplus_to_affine_dag(F, R)
    D.validate(F, "exhaustive")
    assert len(D) == length and D.depth() == depth
