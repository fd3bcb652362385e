"""Parity decision trees, the NonEdge search problem and the random walk simulator.

Variables follow :mod:`binclique.f2`: ``x_{i,a}`` has index ``i * m + a``
with ``m = log n`` and ``a = 0`` the most significant bit of block ``i``'s
vertex.  Assignments are int masks.
"""

from __future__ import annotations

import json
import math
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .f2 import (AffineRestriction, LinearSystem, bits_of, block_mask, blocks_mask, closure,
                 mask_to_vertex, parity, reduce_basis, safe_transversal, vertices_to_mask)
from .graph import BlockGraph, log2_exact
from .stats import binomial_se, np_rng, trial_rng


# --- trees ------------------------------------------------------------------

@dataclass(frozen=True)
class PdtLeaf:
    # ((block_a, index_a), (block_b, index_b)) or None when undetermined
    output: tuple | None = None


@dataclass(frozen=True)
class PdtNode:
    query: int
    zero: "Pdt"
    one: "Pdt"


Pdt = Union[PdtLeaf, PdtNode]


def pdt_depth(T: Pdt) -> int:
    if isinstance(T, PdtLeaf):
        return 0
    return 1 + max(pdt_depth(T.zero), pdt_depth(T.one))


def pdt_leaves(T: Pdt, path: str = "") -> list[tuple[str, PdtLeaf]]:
    if isinstance(T, PdtLeaf):
        return [(path, T)]
    return pdt_leaves(T.zero, path + "0") + pdt_leaves(T.one, path + "1")


def run_pdt(T: Pdt, x: int) -> tuple[PdtLeaf, str]:
    """Follow the queries on assignment mask ``x``; return the leaf and its path."""
    path = []
    while isinstance(T, PdtNode):
        b = parity(T.query & x)
        path.append("1" if b else "0")
        T = T.one if b else T.zero
    return T, "".join(path)


def run_pdt_batch(T: Pdt, bits: np.ndarray) -> list[str]:
    """Leaf paths for many inputs given as a 0/1 matrix (rows are assignments)."""
    out = np.empty(bits.shape[0], dtype=object)

    def go(node, rows, path):
        if rows.size == 0:
            return
        if isinstance(node, PdtLeaf):
            out[rows] = path
            return
        cols = bits_of(node.query)
        val = bits[np.ix_(rows, cols)].sum(axis=1) & 1 if cols else np.zeros(rows.size, int)
        go(node.zero, rows[val == 0], path + "0")
        go(node.one, rows[val == 1], path + "1")

    go(T, np.arange(bits.shape[0]), "")
    return out.tolist()


def random_pdt(k: int, m: int, depth: int, rng: random.Random, blocks: Sequence[int] | None = None,
               density: float | None = None) -> Pdt:
    """Complete tree of the given depth with random nonzero queries over ``blocks``.

    ``density`` is the chance that each variable enters a query; by default
    it is drawn per query from [0.05, 0.5] so that some queries are sparse.
    """
    blocks = list(range(k)) if blocks is None else list(blocks)
    pool = [i * m + a for i in blocks for a in range(m)]
    if not pool:
        raise ValueError("no variables to query")

    def query():
        dens = density if density is not None else rng.uniform(0.05, 0.5)
        while True:
            q = 0
            for t in pool:
                if rng.random() < dens:
                    q |= 1 << t
            if q:
                return q

    def build(d):
        if d == 0:
            return PdtLeaf(None)
        return PdtNode(query(), build(d - 1), build(d - 1))

    return build(depth)


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def pdt_to_sexpr(T: Pdt, num_vars: int) -> str:
    if isinstance(T, PdtLeaf):
        if T.output is None:
            return "(L ?)"
        (a, ia), (b, ib) = T.output
        return f"(L {a}:{ia} {b}:{ib})"
    bits = "".join(str((T.query >> t) & 1) for t in range(num_vars))
    return f"(Q {bits} {pdt_to_sexpr(T.zero, num_vars)} {pdt_to_sexpr(T.one, num_vars)})"


def pdt_from_sexpr(text: str) -> Pdt:
    toks = _TOKEN.findall(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            raise ValueError(f"expected {tok!r} at token {pos}")
        pos += 1

    def parse():
        nonlocal pos
        expect("(")
        kind = toks[pos]
        pos += 1
        if kind == "L":
            if toks[pos] == "?":
                pos += 1
                out = PdtLeaf(None)
            else:
                pair = []
                for _ in range(2):
                    b, _, i = toks[pos].partition(":")
                    pair.append((int(b), int(i)))
                    pos += 1
                out = PdtLeaf(tuple(pair))
        elif kind == "Q":
            bits = toks[pos]
            pos += 1
            if set(bits) - {"0", "1"}:
                raise ValueError(f"bad query {bits!r}")
            q = sum(1 << t for t, ch in enumerate(bits) if ch == "1")
            zero = parse()
            one = parse()
            out = PdtNode(q, zero, one)
        else:
            raise ValueError(f"unknown node kind {kind!r}")
        expect(")")
        return out

    T = parse()
    if pos != len(toks):
        raise ValueError("trailing tokens after the tree")
    return T


# --- NonEdge instances ------------------------------------------------------

class NonEdgeInstance:
    """Graph plus a vertex set M holding at most one vertex per block."""

    def __init__(self, G: BlockGraph, M: Sequence = ()):
        self.G = G
        self.n, self.k, self.m = G.n, G.k, log2_exact(G.n)
        self.M = tuple(sorted(G.gid(v) for v in M))
        blocks = [g // G.n for g in self.M]
        if len(set(blocks)) != len(blocks):
            raise ValueError("M may hold at most one vertex per block")
        for a in range(len(self.M)):
            for b in range(a + 1, len(self.M)):
                if not G.adjacent(self.M[a], self.M[b]):
                    raise ValueError("vertices of M must be pairwise adjacent")
        self.M_blocks = frozenset(blocks)
        self.free_blocks = tuple(i for i in range(self.k) if i not in self.M_blocks)
        self.allowed: dict[int, list[int]] = {}
        self.allowed_set: dict[int, frozenset] = {}
        for i in self.free_blocks:
            lst = list(G.common_neighborhood(self.M, i))
            self.allowed[i] = lst
            self.allowed_set[i] = frozenset(lst)

    def adjacent(self, u: int, v: int) -> bool:
        return self.G.adjacent(u, v)

    def check_tree(self, T: Pdt) -> None:
        banned = blocks_mask(self.M_blocks, self.m)
        stack = [T]
        while stack:
            node = stack.pop()
            if isinstance(node, PdtNode):
                if node.query & banned:
                    raise ValueError("tree queries variables of blocks occupied by M")
                if node.query >> (self.k * self.m):
                    raise ValueError("query mentions variables beyond k * log n")
                stack.extend((node.zero, node.one))

    def sample_input(self, rng) -> int:
        return vertices_to_mask([rng.choice(self.allowed[i]) if i in self.allowed else None
                                 for i in range(self.k)], self.m)


def nonedge_oracle(inst: NonEdgeInstance, choice: Mapping[int, int]):
    """Least block pair of selected vertices without an edge, or None."""
    for i in inst.free_blocks:
        if i not in choice:
            raise ValueError(f"no vertex chosen for free block {i}")
        if choice[i] not in inst.allowed_set[i]:
            raise ValueError(f"vertex {choice[i]} of block {i} lies outside N(M, {i})")
    blocks = inst.free_blocks
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            i, j = blocks[a], blocks[b]
            if not inst.adjacent(i * inst.n + choice[i], j * inst.n + choice[j]):
                return (i, choice[i]), (j, choice[j])
    return None


# --- the walk ---------------------------------------------------------------

@dataclass
class WalkTranscript:
    failed: bool
    path: str
    leaf: PdtLeaf
    C: list[tuple[tuple[int, int], ...]]
    L: list[tuple[int, int]]
    free: frozenset
    subst: dict[int, tuple[int, int]]
    # (query, answer) for every edge taken from the root
    path_constraints: list[tuple[int, int]]
    iterations: int
    trace: list[tuple] = field(default_factory=list)

    @property
    def outcome(self) -> str:
        return "FAIL" if self.failed else "SUCCESS"

    def restriction(self, k: int, m: int) -> AffineRestriction:
        return AffineRestriction(k, m, self.free, dict(self.subst))

    def to_json(self) -> str:
        doc = {"outcome": self.outcome, "path": self.path, "iterations": self.iterations,
               "C": [[list(v) for v in e] for e in self.C],
               "L": [[str(mask), c] for mask, c in self.L],
               "free": sorted(self.free),
               "trace": [list(t) for t in self.trace]}
        return json.dumps(doc)


def simulate_walk(inst: NonEdgeInstance, T: Pdt, rng: random.Random,
                  trace: bool = False, classify: bool = True) -> WalkTranscript:
    """Run the random walk simulator on ``T`` for the instance.

    Free blocks start as the blocks outside B(M).  Each non-constant query
    consumes its least free variable ``x_{i,j}``: a uniform ``y`` from
    ``N(M, i)`` fixes the other bits of block ``i``; if the bit-flip
    neighbour also lies in ``N(M, i)`` the query's value is a fair coin,
    otherwise bit ``j`` is fixed too and the walk stays at the node.
    """
    m = inst.m
    free = set(inst.free_blocks)
    free_mask = blocks_mask(free, m)
    ones = 0            # determined variables with constant value 1
    exprs: dict[int, tuple[int, int]] = {}   # non-constant determined variables
    consts: dict[int, int] = {}
    L: list[tuple[int, int]] = []
    C: list[tuple[tuple[int, int], ...]] = []
    path: list[str] = []
    constraints: list[tuple[int, int]] = []
    tr: list[tuple] = []
    iterations = 0
    node = T
    while isinstance(node, PdtNode):
        q = node.query
        c = parity(q & ones)
        mask = q & free_mask
        for t, (em, ec) in exprs.items():
            if (q >> t) & 1:
                mask ^= em
                c ^= ec
        if mask == 0:
            constraints.append((q, c))
            path.append("1" if c else "0")
            node = node.one if c else node.zero
            continue
        iterations += 1
        t = (mask & -mask).bit_length() - 1
        i, j = divmod(t, m)
        allowed = inst.allowed[i]
        if not allowed:
            raise ValueError(f"N(M, {i}) is empty")
        y = allowed[rng.randrange(len(allowed))]
        flip = y ^ (1 << (m - 1 - j))
        bmask = block_mask(i, m)
        yones = vertices_to_mask([None] * i + [y], m)
        tbit = 1 << t
        for a in range(m):
            if a != j:
                s = i * m + a
                v = (yones >> s) & 1
                L.append((1 << s, v))
                consts[s] = v
        if flip not in inst.allowed_set[i]:
            L.append((tbit, (yones >> t) & 1))
            consts[t] = (yones >> t) & 1
            C.append(((i, y),))
            new_expr = None
            fixed_ones = yones
            branch = None
        else:
            b = rng.getrandbits(1)
            L.append((mask, b ^ c))
            C.append(((i, y), (i, flip)))
            fixed_ones = yones & ~tbit
            rest = mask ^ tbit
            e_const = b ^ c ^ parity(rest & bmask & fixed_ones)
            new_expr = (rest & ~bmask, e_const)
            constraints.append((q, b))
            path.append("1" if b else "0")
            node = node.one if b else node.zero
            branch = b
        if trace:
            tr.append((i, j, y, branch))
        free.discard(i)
        free_mask &= ~bmask
        ones |= fixed_ones & bmask & ~tbit if new_expr is not None else fixed_ones & bmask
        # substitute block i into the remaining expressions
        for s in list(exprs):
            em, ec = exprs[s]
            if not em & bmask:
                continue
            ec ^= parity(em & bmask & fixed_ones)
            if new_expr is not None and em & tbit:
                em ^= new_expr[0]
                ec ^= new_expr[1]
            em &= ~bmask
            if em:
                exprs[s] = (em, ec)
            else:
                del exprs[s]
                consts[s] = ec
                if ec:
                    ones |= 1 << s
        if new_expr is not None:
            if new_expr[0]:
                exprs[t] = new_expr
            else:
                consts[t] = new_expr[1]
                if new_expr[1]:
                    ones |= tbit
    failed = False
    if classify and len(C) > 1:
        failed = _has_cross_nonedge(inst, C)
    subst = {s: (0, v) for s, v in consts.items()}
    subst.update(exprs)
    return WalkTranscript(failed, "".join(path), node, C, L, frozenset(free), subst,
                          constraints, iterations, tr)


def _has_cross_nonedge(inst: NonEdgeInstance, C) -> bool:
    n = inst.n
    gids, owner = [], []
    for e, entry in enumerate(C):
        for blk, v in entry:
            gids.append(blk * n + v)
            owner.append(e)
    g = np.array(gids, dtype=np.int64)
    own = np.array(owner)
    byte = inst.G.adj[np.ix_(g, g >> 3)]
    adj = (byte >> (7 - (g & 7))[None, :]) & 1
    cross = own[:, None] != own[None, :]
    return bool((cross & (adj == 0)).any())


# --- checks on transcripts --------------------------------------------------

def check_simulation_properties(inst: NonEdgeInstance, tr: WalkTranscript,
                                samples: int = 256, seed: int = 0) -> list[str]:
    """Problems with the three walk invariants (empty list when all hold)."""
    k, m = inst.k, inst.m
    problems = []
    Lsys = LinearSystem(k, m, tuple(tr.L))
    if not Lsys.is_consistent():
        return ["L is inconsistent"]
    rho = tr.restriction(k, m)
    walk_blocks = set(inst.free_blocks) - set(tr.free)
    free_vars = blocks_mask(tr.free, m)
    for b in walk_blocks:
        for a in range(m):
            s = b * m + a
            if s not in rho.subst:
                problems.append(f"variable {s} of block {b} is not determined")
    for s, (mask, c) in rho.subst.items():
        if mask & ~free_vars:
            problems.append(f"variable {s} depends on non-free variables")
    subsys = rho.as_system()
    if not Lsys.implies(subsys) or not subsys.implies(Lsys):
        problems.append("L and the substitution disagree")
    support = 0
    for mask, _ in rho.subst.values():
        support |= mask
    sup = bits_of(support)
    rng = random.Random(seed)
    pts = range(1 << len(sup)) if len(sup) <= 12 else (rng.getrandbits(len(sup)) for _ in range(samples))
    for z in pts:
        x = 0
        for p, s in enumerate(sup):
            if (z >> p) & 1:
                x |= 1 << s
        full = rho.complete(x)
        for b in walk_blocks:
            if mask_to_vertex(full, b, m) not in inst.allowed_set[b]:
                problems.append(f"completion puts block {b} outside N(M, {b})")
                break
        else:
            continue
        break
    if not Lsys.implies(LinearSystem(k, m, tuple(tr.path_constraints))):
        problems.append("L does not imply the path constraints")
    return problems


# --- experiments ------------------------------------------------------------

@dataclass
class DistributionReport:
    trials: int
    tv: float
    walk: dict[str, float]
    direct: dict[str, float]


def walk_distribution_test(inst: NonEdgeInstance, T: Pdt, trials: int, seed: int) -> DistributionReport:
    """Total variation between walk endpoints and runs on x_i ~ N(M, i)."""
    inst.check_tree(T)
    walk = Counter(simulate_walk(inst, T, trial_rng(seed, t), classify=False).path
                   for t in range(trials))
    rng = np_rng(seed, 0xD1)
    k, m = inst.k, inst.m
    bits = np.zeros((trials, k * m), dtype=np.int64)
    for i in inst.free_blocks:
        A = np.array(inst.allowed[i], dtype=np.int64)
        v = A[rng.integers(len(A), size=trials)]
        for a in range(m):
            bits[:, i * m + a] = (v >> (m - 1 - a)) & 1
    direct = Counter(run_pdt_batch(T, bits))
    keys = set(walk) | set(direct)
    pw = {p: walk[p] / trials for p in keys}
    pd = {p: direct[p] / trials for p in keys}
    tv = 0.5 * sum(abs(pw[p] - pd[p]) for p in keys)
    return DistributionReport(trials, tv, pw, pd)


@dataclass
class SuccessReport:
    trials: int
    depth: int
    empirical: float
    reference: float
    sigma: float
    overrun: float
    overrun_bound: float

    @property
    def violation(self) -> bool:
        return self.empirical + 3 * self.sigma < self.reference

    @property
    def overrun_ok(self) -> bool:
        return self.overrun <= self.overrun_bound + 3 * binomial_se(self.overrun_bound, self.trials)


def success_reference(d: int, alpha: float, beta: float) -> float:
    return math.exp(-32 * d * beta - 64 * d * d * (1 - alpha))


def success_rate(inst: NonEdgeInstance, T: Pdt, trials: int, seed: int,
                 alpha: float, beta: float, R: int) -> SuccessReport:
    """Non-FAIL frequency of the walk against exp(-32 d beta - 64 d^2 (1 - alpha))."""
    d = pdt_depth(T)
    if len(inst.M) + 8 * d > R:
        raise ValueError(f"need |M| + 8d <= R, got {len(inst.M)} + {8 * d} > {R}")
    inst.check_tree(T)
    ok = over = 0
    for t in range(trials):
        tr = simulate_walk(inst, T, trial_rng(seed, t))
        ok += not tr.failed
        over += tr.iterations > 4 * d
    emp = ok / trials if trials else 1.0
    ref = success_reference(d, alpha, beta)
    sigma = math.sqrt(emp * (1 - emp) / trials) if trials else 0.0
    return SuccessReport(trials, d, emp, ref, sigma, over / trials if trials else 0.0,
                         math.exp(-d / 4))


# --- restriction extraction -------------------------------------------------

class ExtractionInfeasible(RuntimeError):
    pass


@dataclass
class Extraction:
    free: frozenset          # F': blocks left free (B(M) is neither free nor fixed)
    fixed: frozenset
    rho: AffineRestriction
    M_prime: tuple[int, ...]  # global ids
    closure: frozenset


def _solve_for(rows, targets: Sequence[int]) -> dict[int, tuple[int, int]]:
    """Express ``targets`` through the other variables, pivoting only on targets."""
    tmask = 0
    for t in targets:
        tmask |= 1 << t
    basis: dict[int, tuple[int, int]] = {}
    for mask, c in rows:
        for piv, (bm, bc) in basis.items():
            if mask & (1 << piv):
                mask ^= bm
                c ^= bc
        tpart = mask & tmask
        if not tpart:
            if mask or c:
                raise ExtractionInfeasible("system not solvable for the chosen variables")
            continue
        piv = (tpart & -tpart).bit_length() - 1
        for p, (bm, bc) in list(basis.items()):
            if bm & (1 << piv):
                basis[p] = (bm ^ mask, bc ^ c)
        basis[piv] = (mask, c)
    if set(basis) != set(targets):
        raise ExtractionInfeasible("chosen variables are not determined by the system")
    return {piv: (bm ^ (1 << piv), bc) for piv, (bm, bc) in basis.items()}


def extract_restriction(inst: NonEdgeInstance, tr: WalkTranscript, psi: LinearSystem,
                        R: int | None = None) -> Extraction:
    """Affine restriction fixing at most rank(psi) blocks that implies ``psi``.

    Blocks of the closure are fixed first (greedy common-neighbourhood
    choices inside the walk's free blocks, completion through L elsewhere);
    then a block-distinct set of pivot variables of the restricted system is
    left open, with the other bits of each pivot block chosen so that both
    possible vertices stay in the common neighbourhood built so far.
    """
    if tr.failed:
        raise ValueError("extraction needs a successful walk")
    k, m, n = inst.k, inst.m, inst.n
    r = psi.rank()
    if R is not None and len(inst.M) + 2 * r > R:
        raise ValueError(f"need |M| + 2 rank <= R, got {len(inst.M)} + {2 * r} > {R}")
    Lsys = LinearSystem(k, m, tuple(tr.L))
    if not Lsys.implies(psi):
        raise ValueError("the walk's equations do not imply psi")
    if psi.zero_blocks(set(range(k)) - inst.M_blocks).rows and any(
            mask for mask, _ in psi.zero_blocks(set(range(k)) - inst.M_blocks).rows):
        raise ValueError("psi mentions blocks occupied by M")
    cl = closure(psi.forms(), k, m)
    walk_free = set(tr.free)
    M_hat = [b * n + v for e in tr.C for (b, v) in e if b in cl and b not in walk_free]
    chosen: dict[int, int] = {}
    for i in sorted(cl & walk_free):
        anchor = list(inst.M) + M_hat + [b * n + v for b, v in chosen.items()]
        cand = inst.G.common_neighborhood(anchor, i)
        if not cand:
            raise ExtractionInfeasible(f"no vertex of block {i} adjacent to all earlier choices")
        chosen[i] = cand[0]
    base = []
    for i in range(k):
        if i in chosen:
            base.append(chosen[i])
        elif i in walk_free:
            base.append(inst.allowed[i][0] if inst.allowed.get(i) else 0)
        else:
            base.append(None)
    x = tr.restriction(k, m).complete(vertices_to_mask(base, m))
    rho1 = {i: mask_to_vertex(x, i, m) for i in sorted(cl)}
    subst: dict[int, tuple[int, int]] = {}
    for i, v in rho1.items():
        for a in range(m):
            subst[i * m + a] = (0, (v >> (m - 1 - a)) & 1)
    partial = AffineRestriction(k, m, frozenset(set(range(k)) - set(cl)), subst)
    psi1 = psi.restrict(partial)
    if not psi1.is_consistent():
        raise AssertionError("closure assignment falsifies psi")
    rows = [(mask, c) for mask, c in reduce_basis(psi1.rows).values()]
    X = safe_transversal([mask for mask, _ in rows], k, m)
    if X is None:
        raise AssertionError("system is not safe after fixing its closure")
    anchor = list(inst.M) + [i * n + v for i, v in rho1.items()]
    M_prime = [i * n + v for i, v in rho1.items()]
    pair_blocks = []
    for t in sorted(X):
        i, j = divmod(t, m)
        bit = 1 << (m - 1 - j)
        cand = set(inst.G.common_neighborhood(anchor, i))
        w = next((w for w in range(n) if not w & bit and w in cand and (w | bit) in cand), None)
        if w is None:
            raise ExtractionInfeasible(f"no vertex pair of block {i} inside the common neighbourhood")
        for a in range(m):
            if a != j:
                subst[i * m + a] = (0, (w >> (m - 1 - a)) & 1)
        anchor += [i * n + w, i * n + (w | bit)]
        M_prime += [i * n + w, i * n + (w | bit)]
        pair_blocks.append(i)
    fixed = frozenset(cl) | frozenset(pair_blocks)
    free = frozenset(set(range(k)) - fixed - inst.M_blocks)
    stage2 = AffineRestriction(k, m, frozenset(set(range(k)) - fixed),
                               {s: v for s, v in subst.items() if s not in X})
    rows2 = [stage2.apply(mask, c) for mask, c in psi1.rows]
    subst.update(_solve_for(rows2, sorted(X)))
    rho = AffineRestriction(k, m, free | inst.M_blocks, subst)
    rho.validate()
    return Extraction(free, fixed, rho, tuple(M_prime), frozenset(cl))


def check_extraction(inst: NonEdgeInstance, psi: LinearSystem, ext: Extraction,
                     samples: int = 512, seed: int = 0) -> list[str]:
    """Problems with the three extraction conditions (empty list when all hold)."""
    m, n = inst.m, inst.n
    problems = []
    s = len(ext.fixed)
    if s > psi.rank():
        problems.append(f"fixed {s} blocks, rank is {psi.rank()}")
    if not ext.rho.as_system().implies(psi):
        problems.append("restriction does not imply psi")
    if len(ext.M_prime) > 2 * s:
        problems.append(f"|M'| = {len(ext.M_prime)} > 2s = {2 * s}")
    if set(ext.M_prime) & set(inst.M):
        problems.append("M' meets M")
    support = 0
    for mask, _ in ext.rho.subst.values():
        support |= mask
    sup = bits_of(support)
    rng = random.Random(seed)
    pts = range(1 << len(sup)) if len(sup) <= 14 else (rng.getrandbits(len(sup)) for _ in range(samples))
    Mp = set(ext.M_prime)
    for z in pts:
        x = 0
        for p, t in enumerate(sup):
            if (z >> p) & 1:
                x |= 1 << t
        full = ext.rho.complete(x)
        chosen = [i * n + mask_to_vertex(full, i, m) for i in sorted(ext.fixed)]
        if not set(chosen) <= Mp:
            problems.append("a completion leaves M'")
            break
        group = chosen + list(inst.M)
        if any(not inst.adjacent(a, b) for p, a in enumerate(group) for b in group[p + 1:]
               if a // n != b // n):
            problems.append("a completion selects non-adjacent vertices")
            break
    return problems
