"""Encode a clique-free graph, refute it two ways and check both shape DAGs."""

from binclique.cnf import encode_block_clique, is_satisfiable_bruteforce
from binclique.graph import sample_graph
from binclique.proofs import (resolution_to_cp, resolution_to_resplus, resplus_to_affine_dag,
                              tree_resolution, verify_cp, verify_resplus)
from binclique.triangles import axiom_preimage, cp_to_triangle_dag

seed = 0
while True:
    G = sample_graph(2, 0.4, 3, seed)
    F = encode_block_clique(G)
    if not is_satisfiable_bruteforce(F):
        break
    seed += 1
print(f"graph seed {seed}: {F.num_vars} variables, {len(F)} clauses, unsatisfiable")

lines = tree_resolution(F)
axioms, cp = resolution_to_cp(F, lines)
print(f"cutting planes refutation verified, {verify_cp(axioms, cp)} lines")
xs = list(range(0, F.num_vars, 2))
ys = [t for t in range(F.num_vars) if t not in xs]
tri = cp_to_triangle_dag(axioms, cp, xs, ys)
tri.validate(axiom_preimage(axioms, xs, ys))
print(f"triangle DAG with {len(tri)} nodes passes the validity check")

R = resolution_to_resplus(F, lines)
length, depth = verify_resplus(F, R)
aff = resplus_to_affine_dag(F, R)
aff.validate(F, "exhaustive")
print(f"Res(+) refutation: length {length}, depth {depth}; affine DAG depth {aff.depth()}")
