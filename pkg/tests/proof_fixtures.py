"""Hand-built refutations of the block formula of the edgeless graph with n=2, k=2.

Variable 1 is column 0's single bit and variable 2 is column 1's.  The four
clauses forbid every pair of choices.
"""

import dataclasses

from binclique.cnf import encode_block_clique
from binclique.graph import empty_graph
from binclique.proofs import (CpProof, ProofError, ResLine, ResPlusProof, cnf_to_inequalities, cp_line,
                              resplus_to_affine_dag, verify_cp, verify_resplus)
from binclique.triangles import axiom_preimage, cp_to_triangle_dag

EDGELESS = encode_block_clique(empty_graph(2, 2))
EDGELESS_AXIOMS = cnf_to_inequalities(EDGELESS)

# case analysis on column 0: x1 = 1 is forced by clauses 0, 1 and x1 = 0 by clauses 2, 3
HAND_CP = CpProof((
    cp_line([1, 1], 1, "axiom", 0),
    cp_line([1, -1], 0, "axiom", 1),
    cp_line([-1, 1], 0, "axiom", 2),
    cp_line([-1, -1], -1, "axiom", 3),
    cp_line([1, 0], 1, "from", 0, 1),
    cp_line([-1, 0], 0, "from", 2, 3),
    cp_line([0, 0], 1, "from", 4, 5),
))

X0, X1, PARITY = 1, 2, 3


def _c(*eqs):
    return frozenset(eqs)


# branches on the parity x1 + x2 once, then on x2 below each side
HAND_RES = ResPlusProof(2, (
    ResLine(_c((X0, 1), (X1, 1)), ("axiom", 0)),
    ResLine(_c((X0, 1), (X1, 0)), ("axiom", 1)),
    ResLine(_c((X0, 0), (X1, 1)), ("axiom", 2)),
    ResLine(_c((X0, 0), (X1, 0)), ("axiom", 3)),
    ResLine(_c((PARITY, 1), (X1, 1)), ("weak", 0)),
    ResLine(_c((PARITY, 1), (X1, 0)), ("weak", 3)),
    ResLine(_c((PARITY, 1)), ("res", 4, 5, X1)),
    ResLine(_c((PARITY, 0), (X1, 0)), ("weak", 1)),
    ResLine(_c((PARITY, 0), (X1, 1)), ("weak", 2)),
    ResLine(_c((PARITY, 0)), ("res", 8, 7, X1)),
    ResLine(_c(), ("res", 6, 9, PARITY)),
))


def cp_mutations(proof):
    for idx, line in enumerate(proof.lines):
        for t, c in enumerate(line.coeffs):
            if c:
                co = list(line.coeffs)
                co[t] = -c
                yield proof.lines[:idx] + (dataclasses.replace(line, coeffs=tuple(co)),) + proof.lines[idx + 1:]


def res_mutations(proof):
    for idx, line in enumerate(proof.lines):
        if line.just[0] == "res":
            _, j, k, piv = line.just
            for just in [("res", k, j, piv)] + [("res", j, k, p) for p in range(1, 1 << proof.n) if p != piv]:
                yield proof.lines[:idx] + (ResLine(line.clause, just),) + proof.lines[idx + 1:]
        for eq in line.clause:
            flipped = (line.clause - {eq}) | {(eq[0], 1 - eq[1])}
            yield proof.lines[:idx] + (ResLine(flipped, line.just),) + proof.lines[idx + 1:]


def cp_rejected(axioms, lines, x_vars, y_vars):
    try:
        verify_cp(axioms, CpProof(lines))
        cp_to_triangle_dag(axioms, CpProof(lines), x_vars, y_vars).validate(axiom_preimage(axioms, x_vars, y_vars))
    except (ProofError, ValueError):
        return True
    return False


def res_rejected(F, n, lines):
    try:
        P = ResPlusProof(n, lines)
        verify_resplus(F, P)
        resplus_to_affine_dag(F, P).validate(F, "exhaustive")
    except (ProofError, ValueError):
        return True
    return False
