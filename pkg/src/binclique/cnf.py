"""Binary and block CNF encodings of the k-clique formula.

Variables are numbered block-major and 1-based, ``var(i, a) = i * bits + a + 1``
for column ``i`` (0-based) and bit position ``a`` (0 = most significant).
Column ``i`` of an assignment selects a vertex; the clause literal stating
"bit a of column i is not b" is the positive literal when ``b == 0`` and the
negative one when ``b == 1``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graph import BlockGraph, is_power_of_two, log2_exact

EDGE = "edge"
FUNC = "func"


class DimacsError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """A CNF over ``columns * bits`` variables.

    ``tags[c]`` describes why clause ``c`` exists: ``("edge", u, v, i, j)`` says
    that column ``i`` may not be ``u`` while column ``j`` is ``v``, and
    ``("func", v, i, j)`` that columns ``i`` and ``j`` may not both be ``v``.
    Vertex ids in tags are global ids of the encoded graph.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    columns: int
    bits: int
    encoding: str = "custom"
    tags: tuple = ()
    meta: dict = field(default_factory=dict)

    def var(self, column: int, bit: int) -> int:
        return column * self.bits + bit + 1

    def var_map(self) -> dict[tuple[int, int], int]:
        return {(i, a): self.var(i, a) for i in range(self.columns) for a in range(self.bits)}

    def column_of(self, var: int) -> tuple[int, int]:
        return divmod(var - 1, self.bits)

    def __len__(self) -> int:
        return len(self.clauses)


def vertex_literals(column: int, vertex: int, bits: int) -> list[int]:
    """Literals of the disjunction "column != vertex", MSB first."""
    out = []
    for a in range(bits):
        b = (vertex >> (bits - 1 - a)) & 1
        v = column * bits + a + 1
        out.append(-v if b else v)
    return out


def _adjacency(G) -> np.ndarray:
    if isinstance(G, BlockGraph):
        return G.to_adjacency()
    A = np.asarray(G, dtype=bool)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    return A


def encode_bin_clique(G, k: int) -> CnfFormula:
    """Binary encoding of "G has a k-clique" over the whole vertex set.

    ``G`` is a BlockGraph (its block structure is ignored) or a square
    boolean adjacency matrix.
    """
    A = _adjacency(G)
    N = A.shape[0]
    if not is_power_of_two(N):
        raise ValueError(f"|V|={N} is not a power of 2")
    bits = log2_exact(N)
    clauses, tags = [], []
    us, vs = np.nonzero(np.triu(~A, 1))
    nonedges = sorted(zip(us.tolist(), vs.tolist()))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            for u, v in nonedges:
                clauses.append(tuple(vertex_literals(i, u, bits) + vertex_literals(j, v, bits)))
                tags.append((EDGE, u, v, i, j))
    for i, j in combinations(range(k), 2):
        for v in range(N):
            clauses.append(tuple(vertex_literals(i, v, bits) + vertex_literals(j, v, bits)))
            tags.append((FUNC, v, i, j))
    meta = dict(getattr(G, "meta", {}) or {})
    meta.update({"N": N, "k": k})
    return CnfFormula(k * bits, tuple(clauses), k, bits, "bin", tuple(tags), meta)


def encode_block_clique(G: BlockGraph) -> CnfFormula:
    """Block encoding: one clause per cross-block non-edge, no functionality axioms."""
    bits = G.log_n
    n, k = G.n, G.k
    full = G.to_adjacency()
    clauses, tags = [], []
    for i, j in combinations(range(k), 2):
        us, vs = np.nonzero(~full[i * n:(i + 1) * n, j * n:(j + 1) * n])
        for u, v in zip(us.tolist(), vs.tolist()):
            clauses.append(tuple(vertex_literals(i, u, bits) + vertex_literals(j, v, bits)))
            tags.append((EDGE, i * n + u, j * n + v, i, j))
    meta = dict(G.meta)
    meta.update({"n": n, "k": k})
    return CnfFormula(k * bits, tuple(clauses), k, bits, "block", tuple(tags), meta)


def assignment_from_vertices(F: CnfFormula, vertices) -> np.ndarray:
    """Total 0/1 assignment selecting ``vertices[i]`` (a column-local index) in column i."""
    if len(vertices) != F.columns:
        raise ValueError(f"need {F.columns} vertices, got {len(vertices)}")
    a = np.zeros(F.num_vars, dtype=np.uint8)
    for i, v in enumerate(vertices):
        if not 0 <= v < (1 << F.bits):
            raise ValueError(f"vertex {v} out of range")
        for b in range(F.bits):
            a[i * F.bits + b] = (v >> (F.bits - 1 - b)) & 1
    return a


def vertices_of(F: CnfFormula, assignment) -> list[int]:
    a = np.asarray(assignment)
    out = []
    for i in range(F.columns):
        v = 0
        for b in range(F.bits):
            v = (v << 1) | int(a[i * F.bits + b])
        out.append(v)
    return out


def clause_satisfied(clause, assignment) -> bool:
    for lit in clause:
        val = assignment[abs(lit) - 1]
        if (lit > 0) == bool(val):
            return True
    return False


def search_falsified(F: CnfFormula, assignment) -> int | None:
    """Least index of a clause falsified by a total assignment, or None."""
    a = np.asarray(assignment)
    if a.shape != (F.num_vars,):
        raise ValueError(f"assignment must have {F.num_vars} entries")
    a = a.tolist()
    for idx, clause in enumerate(F.clauses):
        if not clause_satisfied(clause, a):
            return idx
    return None


def is_satisfiable_bruteforce(F: CnfFormula, limit: int = 22) -> bool:
    if F.num_vars > limit:
        raise ValueError(f"{F.num_vars} variables exceed the brute-force limit {limit}")
    for x in range(1 << F.num_vars):
        a = [(x >> t) & 1 for t in range(F.num_vars)]
        if all(clause_satisfied(c, a) for c in F.clauses):
            return True
    return False


def block_restriction(F_bin: CnfFormula, k: int, partition=None) -> CnfFormula:
    """Restrict a binary encoding over N = n*k vertices to the block encoding.

    Fixes the top ``log k`` bits of column ``i`` to ``i`` so that column ``i``
    ranges over block ``i = {i*n, ..., (i+1)*n - 1}``.  Satisfied clauses are
    dropped, falsified literals removed and the surviving variables renumbered
    to the block numbering.  ``partition`` (a list of vertex ranges) is only
    validated.
    """
    if F_bin.columns != k:
        raise ValueError(f"formula has {F_bin.columns} columns, expected k={k}")
    N = 1 << F_bin.bits
    if not is_power_of_two(k) or N % k:
        raise ValueError("k must be a power of 2 dividing N")
    n = N // k
    top = log2_exact(k)
    low = F_bin.bits - top
    if partition is not None:
        expect = [list(range(b * n, (b + 1) * n)) for b in range(k)]
        if [list(p) for p in partition] != expect:
            raise ValueError("partition is not aligned with the high bits of the encoding")
    fixed = {}
    for i in range(k):
        for a in range(top):
            fixed[F_bin.var(i, a)] = (i >> (top - 1 - a)) & 1

    def renumber(v):
        i, a = F_bin.column_of(v)
        return i * low + (a - top) + 1

    clauses, tags = [], []
    for clause, tag in zip(F_bin.clauses, F_bin.tags or [None] * len(F_bin.clauses)):
        out, sat = [], False
        for lit in clause:
            v = abs(lit)
            if v in fixed:
                if (lit > 0) == bool(fixed[v]):
                    sat = True
                    break
                continue
            r = renumber(v)
            out.append(r if lit > 0 else -r)
        if sat:
            continue
        clauses.append(tuple(out))
        tags.append(tag)
    meta = dict(F_bin.meta)
    meta.update({"n": n, "k": k, "restricted_from": "bin"})
    return CnfFormula(k * low, tuple(clauses), k, low, "block", tuple(tags), meta)


def to_dimacs(F: CnfFormula) -> str:
    lines = [f"c encoding {F.encoding}"]
    for key in ("n", "N", "k", "p", "seed"):
        if F.meta.get(key) is not None:
            lines.append(f"c {key} {F.meta[key]}")
    lines.append(f"c varmap var(i,a) = i*{F.bits} + a + 1, columns {F.columns}, "
                 f"bits {F.bits}, a=0 is the most significant bit")
    lines.append(f"p cnf {F.num_vars} {len(F.clauses)}")
    for c in F.clauses:
        lines.append(" ".join(map(str, c)) + " 0")
    return "\n".join(lines) + "\n"


_META_RE = re.compile(r"^c (n|N|k|p|seed|encoding) (\S+)$")
_VARMAP_RE = re.compile(r"columns (\d+), bits (\d+)")


def from_dimacs(text: str) -> CnfFormula:
    header = None
    meta: dict = {}
    encoding = "custom"
    columns = bits = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            m = _META_RE.match(line)
            if m:
                key, val = m.groups()
                if key == "encoding":
                    encoding = val
                else:
                    meta[key] = float(val) if key == "p" else int(val)
            m = _VARMAP_RE.search(line)
            if m:
                columns, bits = int(m.group(1)), int(m.group(2))
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad problem line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: bad problem line {line!r}") from exc
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before problem line")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError as exc:
            raise DimacsError(f"line {lineno}: non-integer token") from exc
    if header is None:
        raise DimacsError("missing problem line")
    num_vars, num_clauses = header
    if tokens and tokens[-1] != 0:
        raise DimacsError("last clause not terminated by 0")
    clauses, cur = [], []
    for t in tokens:
        if t == 0:
            clauses.append(tuple(cur))
            cur = []
        elif abs(t) > num_vars:
            raise DimacsError(f"literal {t} exceeds {num_vars} variables")
        else:
            cur.append(t)
    if len(clauses) != num_clauses:
        raise DimacsError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    if columns is None:
        columns, bits = 1, num_vars
    if columns * bits != num_vars:
        raise DimacsError("variable map does not cover the variables")
    return CnfFormula(num_vars, tuple(clauses), columns, bits, encoding, (), meta)


def parse_solver_result(text: str) -> bool | None:
    """True for SAT, False for UNSAT, None when neither verdict line appears."""
    for line in text.splitlines():
        tok = line.strip().split()
        if not tok:
            continue
        if tok[0] == "s" and len(tok) > 1:
            tok = tok[1:]
        word = tok[0].upper()
        if word in ("SAT", "SATISFIABLE"):
            return True
        if word in ("UNSAT", "UNSATISFIABLE"):
            return False
    return None


def tags_to_json(F: CnfFormula) -> str:
    return json.dumps({"encoding": F.encoding, "tags": [list(t) for t in F.tags]})
