"""Semantic cutting-planes and Res(xor) refutations: verification and DAG translations.

Points of {0,1}^n are integers whose bit ``t`` is the value of variable ``t``
(0-based, variable ``t`` is DIMACS variable ``t + 1``).  Semantic steps are
checked by enumerating every point, so proofs are limited to ``var_budget``
variables.

Proof file grammar (one line per derivation, ``#`` starts a comment, line
indices are 0-based)::

    cp <c> <d_0> ... <d_{n-1}> axiom <i>        # d . x >= c
    cp <c> <d_0> ... <d_{n-1}> from <j> <k>
    rlin <clause> axiom <i>
    rlin <clause> res <j> <k> <pivot-bits>     # pivot = 1 in line j, = 0 in line k
    rlin <clause> weak <j>

A clause is ``[]`` or ``bits=b|bits=b|...`` where ``bits`` lists the
coefficients of variables 0..n-1.  Coefficients may be integers or ``p/q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .cnf import CnfFormula
from .f2 import InconsistentSystem, LinearSystem, reduce_basis

CHUNK = 1 << 18


class ProofError(ValueError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"line {step}: {reason}")
        self.step = step
        self.reason = reason


# --- shared helpers ---------------------------------------------------------

def _points(n: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1).astype(np.int64)


def parity_vec(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.uint64)
    for s in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(s)
    return (v & np.uint64(1)).astype(bool)


def _check_budget(n: int, budget: int) -> None:
    if n > budget:
        raise ValueError(f"{n} variables exceed the enumeration budget {budget}")


# --- cutting planes ---------------------------------------------------------

Inequality = tuple[tuple[Fraction, ...], Fraction]


@dataclass(frozen=True)
class CpLine:
    coeffs: tuple[Fraction, ...]
    const: Fraction
    # ("axiom", i) or ("from", j, k)
    just: tuple


@dataclass(frozen=True)
class CpProof:
    lines: tuple[CpLine, ...]

    def __len__(self) -> int:
        return len(self.lines)


def ineq(coeffs: Sequence, const) -> Inequality:
    return tuple(Fraction(c) for c in coeffs), Fraction(const)


def cp_line(coeffs, const, *just) -> CpLine:
    d, c = ineq(coeffs, const)
    return CpLine(d, c, tuple(just))


def cnf_to_inequalities(F: CnfFormula, bounds: bool = True) -> list[Inequality]:
    """Clause i becomes sum(pos x) + sum(1 - neg x) >= 1 at index i.

    With ``bounds`` the inequalities x_t >= 0 and -x_t >= -1 follow at
    indices ``m + 2t`` and ``m + 2t + 1``.
    """
    n = F.num_vars
    out = []
    for clause in F.clauses:
        d = [0] * n
        neg = 0
        for lit in clause:
            if lit > 0:
                d[lit - 1] += 1
            else:
                d[-lit - 1] -= 1
                neg += 1
        out.append(ineq(d, 1 - neg))
    if bounds:
        for t in range(n):
            e = [0] * n
            e[t] = 1
            out.append(ineq(e, 0))
            out.append(ineq([-v for v in e], -1))
    return out


def integer_scaled(coeffs, const) -> tuple[np.ndarray, int]:
    """Multiply through by the common denominator (a positive scalar)."""
    den = lcm(*(Fraction(c).denominator for c in (*coeffs, const)))
    d = np.array([int(Fraction(c) * den) for c in coeffs], dtype=np.int64)
    return d, int(Fraction(const) * den)


class _Satisfaction:
    """Per-line 0/1 satisfaction vectors, cached for small n."""

    def __init__(self, n: int):
        self.n = n
        self.cache: dict[int, np.ndarray] = {}
        self.small = n <= 16
        self.Z = _points(n, 0, 1 << n) if self.small else None

    def vector(self, key, coeffs, const, start=0, stop=None) -> np.ndarray:
        d, c = integer_scaled(coeffs, const)
        if self.small:
            if key not in self.cache:
                self.cache[key] = self.Z @ d >= c
            return self.cache[key]
        return _points(self.n, start, stop) @ d >= c

    def implied(self, premises, target) -> bool:
        if self.small:
            ok = np.ones(1 << self.n, dtype=bool)
            for key, (d, c) in premises:
                ok &= self.vector(key, d, c)
            return not (ok & ~self.vector(target[0], *target[1])).any()
        for start in range(0, 1 << self.n, CHUNK):
            stop = min(start + CHUNK, 1 << self.n)
            ok = np.ones(stop - start, dtype=bool)
            for key, (d, c) in premises:
                ok &= self.vector(key, d, c, start, stop)
            if (ok & ~self.vector(target[0], *target[1], start, stop)).any():
                return False
        return True


def verify_cp(axioms: Sequence[Inequality], proof: CpProof, var_budget: int = 24) -> int:
    """Check a semantic cutting-planes refutation; return its number of lines."""
    if not proof.lines:
        raise ProofError(0, "empty proof")
    n = len(proof.lines[0].coeffs)
    _check_budget(n, var_budget)
    sat = _Satisfaction(n)
    for idx, line in enumerate(proof.lines):
        if len(line.coeffs) != n:
            raise ProofError(idx, f"expected {n} coefficients")
        kind = line.just[0] if line.just else None
        if kind == "axiom":
            i = line.just[1]
            if not 0 <= i < len(axioms):
                raise ProofError(idx, f"axiom index {i} out of range")
            d, c = axioms[i]
            if tuple(Fraction(v) for v in d) != line.coeffs or Fraction(c) != line.const:
                raise ProofError(idx, f"line differs from axiom {i}")
        elif kind == "from":
            j, k = line.just[1], line.just[2]
            if not (0 <= j < idx and 0 <= k < idx):
                raise ProofError(idx, "premises must precede the line")
            prem = [(("line", p), (proof.lines[p].coeffs, proof.lines[p].const)) for p in (j, k)]
            if not sat.implied(prem, (("line", idx), (line.coeffs, line.const))):
                raise ProofError(idx, f"not implied by lines {j} and {k} over 0/1 points")
        else:
            raise ProofError(idx, f"unknown justification {line.just!r}")
    last = proof.lines[-1]
    if any(last.coeffs) or last.const != 1:
        raise ProofError(len(proof.lines) - 1, "last line is not 0 >= 1")
    return len(proof.lines)


# --- Res(xor) ---------------------------------------------------------------

# a linear clause is a frozenset of equations (mask, b), read as a disjunction
LinearClause = frozenset


def normalize_clause(eqs) -> frozenset:
    return frozenset((int(m), int(b) & 1) for m, b in eqs if not (m == 0 and (b & 1)))


def clause_from_cnf(clause: Sequence[int]) -> frozenset:
    return normalize_clause((1 << (abs(lit) - 1), 1 if lit > 0 else 0) for lit in clause)


@dataclass(frozen=True)
class ResLine:
    clause: frozenset
    # ("axiom", i) | ("res", j, k, pivot) | ("weak", j)
    just: tuple


@dataclass(frozen=True)
class ResPlusProof:
    n: int
    lines: tuple[ResLine, ...]

    def __len__(self) -> int:
        return len(self.lines)


def falsified_points(clause, n: int) -> np.ndarray:
    """Boolean vector over {0,1}^n: the points falsifying every equation."""
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.ones(1 << n, dtype=bool)
    for mask, b in clause:
        out &= parity_vec(idx & mask) != bool(b)
    return out


def verify_resplus(F: CnfFormula, proof: ResPlusProof, var_budget: int = 24) -> tuple[int, int]:
    """Check a Res(xor) refutation of ``F``; return (length, depth).

    Depth counts resolution steps only; weakenings are free.
    """
    n = proof.n
    if n != F.num_vars:
        raise ProofError(0, f"proof has {n} variables, formula {F.num_vars}")
    if not proof.lines:
        raise ProofError(0, "empty proof")
    depth: list[int] = []
    for idx, line in enumerate(proof.lines):
        clause = normalize_clause(line.clause)
        for mask, _ in clause:
            if mask >> n:
                raise ProofError(idx, "equation mentions variables beyond n")
        kind = line.just[0] if line.just else None
        if kind == "axiom":
            i = line.just[1]
            if not 0 <= i < len(F.clauses):
                raise ProofError(idx, f"axiom index {i} out of range")
            if clause != clause_from_cnf(F.clauses[i]):
                raise ProofError(idx, f"line differs from clause {i}")
            depth.append(0)
        elif kind == "res":
            _, j, k, pivot = line.just
            if not (0 <= j < idx and 0 <= k < idx):
                raise ProofError(idx, "premises must precede the line")
            if pivot == 0:
                raise ProofError(idx, "pivot must be a nonzero form")
            cj = normalize_clause(proof.lines[j].clause)
            ck = normalize_clause(proof.lines[k].clause)
            if (pivot, 1) not in cj:
                raise ProofError(idx, f"pivot = 1 not in line {j}")
            if (pivot, 0) not in ck:
                raise ProofError(idx, f"pivot = 0 not in line {k}")
            if clause != (cj - {(pivot, 1)}) | (ck - {(pivot, 0)}):
                raise ProofError(idx, "clause is not the resolvent")
            depth.append(1 + max(depth[j], depth[k]))
        elif kind == "weak":
            j = line.just[1]
            if not 0 <= j < idx:
                raise ProofError(idx, "premise must precede the line")
            _check_budget(n, var_budget)
            prem = normalize_clause(proof.lines[j].clause)
            if (falsified_points(clause, n) & ~falsified_points(prem, n)).any():
                raise ProofError(idx, f"not a semantic weakening of line {j}")
            depth.append(depth[j])
        else:
            raise ProofError(idx, f"unknown justification {line.just!r}")
    if normalize_clause(proof.lines[-1].clause):
        raise ProofError(len(proof.lines) - 1, "last line is not the empty clause")
    return len(proof.lines), depth[-1]


# --- affine DAGs ------------------------------------------------------------

@dataclass
class AffineDag:
    """Top-down affine DAG: node ``u`` is labelled by the affine space ``spaces[u]``.

    ``edges[u]`` is ``()`` for a leaf, ``(j,)`` for a unary (weakening) edge
    or ``(j, k, f)``: query ``f``, answer 0 leads to ``j`` and 1 to ``k``.
    ``outputs[u]`` is the clause index solved at a leaf.
    """

    n: int
    spaces: list[LinearSystem]
    edges: list[tuple]
    outputs: list[int | None]
    root: int

    def depth(self) -> int:
        memo: dict[int, int] = {}
        for u in range(len(self.spaces)):
            e = self.edges[u]
            if not e:
                memo[u] = 0
            elif len(e) == 1:
                memo[u] = memo[e[0]]
            else:
                memo[u] = 1 + max(memo[e[0]], memo[e[1]])
        return memo[self.root]

    def __len__(self) -> int:
        return len(self.spaces)

    def validate(self, F: CnfFormula, mode: str = "exact") -> None:
        """Raise ValueError unless the DAG solves the falsified-clause search for ``F``."""
        if mode == "exhaustive":
            return self._validate_exhaustive(F)
        root = self.spaces[self.root]
        if root.rows and root.rank() > 0 or not root.is_consistent():
            raise ValueError("root is not the full space")
        for u, e in enumerate(self.edges):
            A = self.spaces[u]
            if not e:
                c = self.outputs[u]
                if c is None:
                    raise ValueError(f"leaf {u} without output")
                for lit in F.clauses[c]:
                    t = abs(lit) - 1
                    want = (1 << t, 0 if lit > 0 else 1)
                    if not A.implies(LinearSystem(A.k, A.m, (want,))):
                        raise ValueError(f"leaf {u} not inside the falsifying set of clause {c}")
            elif len(e) == 1:
                if not A.implies(self.spaces[e[0]]):
                    raise ValueError(f"node {u} not contained in its weakening child")
            else:
                j, k, f = e
                for b, child in ((0, j), (1, k)):
                    sub = A + LinearSystem(A.k, A.m, ((f, b),))
                    if not sub.implies(self.spaces[child]):
                        raise ValueError(f"node {u} with query = {b} escapes child {child}")

    def _validate_exhaustive(self, F: CnfFormula) -> None:
        n = self.n
        _check_budget(n, 16)
        idx = np.arange(1 << n, dtype=np.int64)

        def members(sys: LinearSystem) -> np.ndarray:
            out = np.ones(1 << n, dtype=bool)
            for mask, c in sys.rows:
                out &= parity_vec(idx & mask) == bool(c)
            return out

        sets = [members(s) for s in self.spaces]
        if not sets[self.root].all():
            raise ValueError("root is not the full space")
        for u, e in enumerate(self.edges):
            if not e:
                fals = falsified_points(clause_from_cnf(F.clauses[self.outputs[u]]), n)
                if (sets[u] & ~fals).any():
                    raise ValueError(f"leaf {u} not inside the falsifying set")
            elif len(e) == 1:
                if (sets[u] & ~sets[e[0]]).any():
                    raise ValueError(f"node {u} not contained in its weakening child")
            else:
                j, k, f = e
                val = parity_vec(idx & f)
                if (sets[u] & ~val & ~sets[j]).any() or (sets[u] & val & ~sets[k]).any():
                    raise ValueError(f"node {u} escapes its children")


def resplus_to_affine_dag(F: CnfFormula, proof: ResPlusProof) -> AffineDag:
    """Node per line labelled by the points falsifying that line's clause."""
    k, m = F.columns, F.bits
    spaces, edges, outputs = [], [], []
    for line in proof.lines:
        clause = normalize_clause(line.clause)
        rows = tuple(sorted((mask, 1 - b) for mask, b in clause))
        spaces.append(LinearSystem(k, m, rows))
        kind = line.just[0]
        if kind == "axiom":
            edges.append(())
            outputs.append(line.just[1])
        elif kind == "weak":
            edges.append((line.just[1],))
            outputs.append(None)
        else:
            _, j, kk, pivot = line.just
            # falsifying line j forces pivot = 0, line kk forces pivot = 1
            edges.append((j, kk, pivot))
            outputs.append(None)
    return AffineDag(F.num_vars, spaces, edges, outputs, len(proof.lines) - 1)


# --- text format ------------------------------------------------------------

def _fmt_num(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_clause(clause, n: int) -> str:
    if not clause:
        return "[]"
    return "|".join(f"{''.join(str((mask >> t) & 1) for t in range(n))}={b}"
                     for mask, b in sorted(clause))


def _parse_bits(s: str, n: int | None, lineno: int) -> int:
    if (n is not None and len(s) != n) or set(s) - {"0", "1"}:
        raise ValueError(f"line {lineno}: bad coefficient string {s!r}")
    return sum(1 << t for t, ch in enumerate(s) if ch == "1")


def _parse_clause(tok: str, lineno: int) -> tuple[frozenset, int | None]:
    if tok == "[]":
        return frozenset(), None
    eqs, n = [], None
    for part in tok.split("|"):
        bits, _, b = part.partition("=")
        if b not in ("0", "1"):
            raise ValueError(f"line {lineno}: bad equation {part!r}")
        n = len(bits) if n is None else n
        eqs.append((_parse_bits(bits, n, lineno), int(b)))
    return frozenset(eqs), n


def cp_to_text(proof: CpProof) -> str:
    out = []
    for line in proof.lines:
        body = " ".join([_fmt_num(line.const)] + [_fmt_num(c) for c in line.coeffs])
        if line.just[0] == "axiom":
            out.append(f"cp {body} axiom {line.just[1]}")
        else:
            out.append(f"cp {body} from {line.just[1]} {line.just[2]}")
    return "\n".join(out) + "\n"


def resplus_to_text(proof: ResPlusProof) -> str:
    out = []
    n = proof.n
    for line in proof.lines:
        c = _fmt_clause(normalize_clause(line.clause), n)
        kind = line.just[0]
        if kind == "axiom":
            out.append(f"rlin {c} axiom {line.just[1]}")
        elif kind == "weak":
            out.append(f"rlin {c} weak {line.just[1]}")
        else:
            _, j, k, pivot = line.just
            out.append(f"rlin {c} res {j} {k} {''.join(str((pivot >> t) & 1) for t in range(n))}")
    return f"# n {n}\n" + "\n".join(out) + "\n"


def parse_proof(text: str, n: int | None = None) -> CpProof | ResPlusProof:
    """Parse a proof file; the first proof line decides between cp and rlin."""
    cp_lines: list[CpLine] = []
    res_lines: list[ResLine] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("# n "):
            n = int(line.split()[2])
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "cp":
                if res_lines:
                    raise ValueError("mixed cp and rlin lines")
                if "axiom" in tok:
                    pos = tok.index("axiom")
                    just = ("axiom", int(tok[pos + 1]))
                    if len(tok) != pos + 2:
                        raise ValueError("trailing tokens")
                elif "from" in tok:
                    pos = tok.index("from")
                    if len(tok) != pos + 3:
                        raise ValueError("expected two premises")
                    just = ("from", int(tok[pos + 1]), int(tok[pos + 2]))
                else:
                    raise ValueError("missing justification")
                nums = [Fraction(t) for t in tok[1:pos]]
                if len(nums) < 1:
                    raise ValueError("missing constant")
                cp_lines.append(CpLine(tuple(nums[1:]), nums[0], just))
            elif tok[0] == "rlin":
                if cp_lines:
                    raise ValueError("mixed cp and rlin lines")
                clause, width = _parse_clause(tok[1], lineno)
                if width is not None:
                    if n is None:
                        n = width
                    elif width != n:
                        raise ValueError("clause width differs from n")
                kind = tok[2]
                if kind == "axiom" and len(tok) == 4:
                    just = ("axiom", int(tok[3]))
                elif kind == "weak" and len(tok) == 4:
                    just = ("weak", int(tok[3]))
                elif kind == "res" and len(tok) == 6:
                    just = ("res", int(tok[3]), int(tok[4]), _parse_bits(tok[5], n, lineno))
                else:
                    raise ValueError(f"bad rlin justification {' '.join(tok[2:])!r}")
                res_lines.append(ResLine(clause, just))
            else:
                raise ValueError(f"unknown line type {tok[0]!r}")
        except (ValueError, IndexError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if cp_lines:
        return CpProof(tuple(cp_lines))
    if res_lines:
        if n is None:
            raise ValueError("cannot infer the number of variables")
        return ResPlusProof(n, tuple(res_lines))
    raise ValueError("no proof lines")


# --- proof generators -------------------------------------------------------

def tree_resolution(F: CnfFormula, order: Sequence[int] | None = None) -> list[tuple[frozenset, tuple]]:
    """Refute ``F`` by a branching procedure read off as a resolution proof.

    Returns lines ``(clause as signed literal set, just)`` where ``just`` is
    ``("axiom", i)`` or ``("res", j, k, var)`` with the positive literal in
    line ``j``.  Identical clauses are shared, so the proof is a DAG.
    Raises ValueError if ``F`` is satisfiable.
    """
    n = F.num_vars
    order = list(range(1, n + 1)) if order is None else list(order)
    clauses = [frozenset(c) for c in F.clauses]
    lines: list[tuple[frozenset, tuple]] = []
    index: dict[frozenset, int] = {}

    def add(clause, just) -> int:
        if clause in index:
            return index[clause]
        lines.append((clause, just))
        index[clause] = len(lines) - 1
        return index[clause]

    def falsified(assign: dict[int, bool]) -> int | None:
        for ci, c in enumerate(clauses):
            if all(abs(l) in assign and assign[abs(l)] != (l > 0) for l in c):
                return ci
        return None

    def go(assign: dict[int, bool], depth: int) -> int:
        ci = falsified(assign)
        if ci is not None:
            return add(clauses[ci], ("axiom", ci))
        if depth == len(order):
            raise ValueError("formula is satisfiable")
        v = order[depth]
        left = go({**assign, v: False}, depth + 1)
        lc = lines[left][0]
        if v not in lc:
            return left
        right = go({**assign, v: True}, depth + 1)
        rc = lines[right][0]
        if -v not in rc:
            return right
        return add((lc - {v}) | (rc - {-v}), ("res", left, right, v))

    top = go({}, 0)
    if lines[top][0]:
        raise AssertionError("branching procedure did not reach the empty clause")
    # keep only lines that feed the refutation, renumbered in order
    needed, stack = set(), [top]
    while stack:
        u = stack.pop()
        if u in needed:
            continue
        needed.add(u)
        if lines[u][1][0] == "res":
            stack.extend(lines[u][1][1:3])
    keep = sorted(needed)
    remap = {u: i for i, u in enumerate(keep)}
    out = []
    for u in keep:
        clause, just = lines[u]
        if just[0] == "res":
            just = ("res", remap[just[1]], remap[just[2]], just[3])
        out.append((clause, just))
    return out


def resolution_to_cp(F: CnfFormula, lines) -> tuple[list[Inequality], CpProof]:
    """Clause C becomes sum(pos x) + sum(1 - neg x) >= 1; resolvents are implied."""
    n = F.num_vars
    axioms = cnf_to_inequalities(F)
    out = []
    for clause, just in lines:
        d = [0] * n
        neg = 0
        for lit in clause:
            if lit > 0:
                d[lit - 1] += 1
            else:
                d[-lit - 1] -= 1
                neg += 1
        if just[0] == "axiom":
            out.append(cp_line(d, 1 - neg, "axiom", just[1]))
        else:
            out.append(cp_line(d, 1 - neg, "from", just[1], just[2]))
    return axioms, CpProof(tuple(out))


def resolution_to_resplus(F: CnfFormula, lines) -> ResPlusProof:
    out = []
    for clause, just in lines:
        lc = clause_from_cnf(tuple(clause))
        if just[0] == "axiom":
            out.append(ResLine(lc, just))
        else:
            # positive literal v in line j reads (x_v = 1)
            out.append(ResLine(lc, ("res", just[1], just[2], 1 << (just[3] - 1))))
    return ResPlusProof(F.num_vars, tuple(out))


def affine_space_points(sys: LinearSystem) -> list[int]:
    """All solutions of a small system (for debugging and tests)."""
    n = sys.num_vars
    try:
        reduce_basis(sys.rows)
    except InconsistentSystem:
        return []
    return [x for x in range(1 << n) if sys.satisfied_by(x)]
