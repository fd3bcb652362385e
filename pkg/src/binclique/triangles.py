"""Triangles over the X x Y input split, block width and the bottleneck machinery.

For a block graph with ``n = 2^(2h)`` vertices per block, Alice holds
``x = (x_0, ..., x_{k-1})`` and Bob ``y = (y_0, ..., y_{k-1})`` with each
coordinate in ``{0,1}^h``; ``(x_i, y_i)`` names the vertex ``x_i * 2^h + y_i``
of block ``i``.  Inputs are integers with block 0 in the most significant
``h`` bits.  A triangle is ``{(x, y) : a[x] <= b[y]}`` for score vectors
``a`` and ``b``; ``inf`` in ``a`` (or ``-inf`` in ``b``) removes an input.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .graph import BlockGraph, log2_exact

INF = math.inf
_BIG = np.iinfo(np.int64).max


class BudgetExceeded(ValueError):
    pass


class CliqueSplit:
    """The X/Y split of the block clique formula over ``G`` and its solution rectangles."""

    def __init__(self, G: BlockGraph):
        m = log2_exact(G.n)
        if m % 2:
            raise ValueError("log n must be even for the X/Y split")
        if G.k * (G.k - 1) // 2 > 63:
            raise ValueError("too many block pairs for the 64-bit pair masks")
        self.G = G
        self.n, self.k, self.m, self.h = G.n, G.k, m, m // 2
        self.sq = 1 << self.h
        self.size = self.sq ** self.k
        z = np.arange(self.size, dtype=np.int64)
        self.coord = np.stack([(z >> (self.h * (self.k - 1 - i))) & (self.sq - 1)
                               for i in range(self.k)])
        self.pairs = list(combinations(range(self.k), 2))
        full = G.to_adjacency()
        bad = np.zeros((self.size, self.size), dtype=np.uint64)
        for p, (i, j) in enumerate(self.pairs):
            ui = (self.coord[i][:, None] << self.h) | self.coord[i][None, :]
            uj = (self.coord[j][:, None] << self.h) | self.coord[j][None, :]
            A = full[i * G.n:(i + 1) * G.n, j * G.n:(j + 1) * G.n]
            bad |= (~A[ui, uj]).astype(np.uint64) << np.uint64(p)
        self.bad = bad
        self.subsets = sorted((W for r in range(self.k + 1) for W in combinations(range(self.k), r)),
                              key=lambda W: (len(W), W))
        self.pair_mask = {W: np.uint64(sum(1 << p for p, (i, j) in enumerate(self.pairs)
                                           if i in W and j in W)) for W in self.subsets}

    @property
    def x_vars(self) -> list[int]:
        """0-based block-encoding variables held by Alice, in input-bit order."""
        return [i * self.m + a for i in range(self.k) for a in range(self.h)]

    @property
    def y_vars(self) -> list[int]:
        return [i * self.m + a for i in range(self.k) for a in range(self.h, self.m)]

    def vertex(self, block: int, x: int, y: int) -> int:
        """Global id of the vertex selected in ``block`` by ``(x, y)``."""
        return block * self.n + (int(self.coord[block][x]) << self.h) + int(self.coord[block][y])

    def halves(self, gid: int) -> tuple[int, int, int]:
        block, idx = divmod(gid, self.n)
        return block, idx >> self.h, idx & (self.sq - 1)

    def rect_sides(self, u: int, v: int) -> tuple[np.ndarray, np.ndarray]:
        """``X_R`` and ``Y_R`` masks of the rectangle ``R_{u,v}``."""
        bu, xu, yu = self.halves(u)
        bv, xv, yv = self.halves(v)
        if bu == bv:
            raise ValueError("rectangle vertices must lie in distinct blocks")
        X = (self.coord[bu] == xu) & (self.coord[bv] == xv)
        Y = (self.coord[bu] == yu) & (self.coord[bv] == yv)
        return X, Y

    def rect(self, u: int, v: int) -> np.ndarray:
        X, Y = self.rect_sides(u, v)
        return X[:, None] & Y[None, :]

    def is_nonedge(self, u: int, v: int) -> bool:
        return u // self.n != v // self.n and not self.G.adjacent(u, v)


# --- block width ------------------------------------------------------------

def slice_widths(split: CliqueSplit, mem: np.ndarray, bad: np.ndarray,
                 mode: str = "exact", budget: int = 12) -> np.ndarray:
    """Block width of every row slice of ``mem`` (float array, ``inf`` if uncoverable).

    ``bad`` is the pair mask aligned with ``mem``: ``split.bad`` for x-slices
    and ``split.bad.T`` for y-slices.
    """
    if mode == "greedy":
        return np.array([_greedy_width(split, mem[r], bad[r]) for r in range(mem.shape[0])])
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if split.k > budget:
        raise BudgetExceeded(f"exact block width with k={split.k} exceeds budget {budget}")
    out = np.full(mem.shape[0], INF)
    todo = np.ones(mem.shape[0], dtype=bool)
    for W in split.subsets:
        if not todo.any():
            break
        rows = np.flatnonzero(todo)
        sub = mem[rows]
        ok = ~(sub & ((bad[rows] & split.pair_mask[W]) == 0)).any(axis=1)
        out[rows[ok]] = len(W)
        todo[rows[ok]] = False
    return out


def _greedy_width(split: CliqueSplit, row: np.ndarray, bad_row: np.ndarray) -> float:
    pts = bad_row[row]
    W: tuple[int, ...] = ()
    while True:
        if ((pts & split.pair_mask[W]) != 0).all():
            return float(len(W))
        rest = [b for b in range(split.k) if b not in W]
        if not rest:
            return INF
        W = max((tuple(sorted(W + (b,))) for b in rest),
                key=lambda V: (int(((pts & split.pair_mask[V]) != 0).sum()), [-b for b in V]))


def min_width_blocks(split: CliqueSplit, row: np.ndarray, bad_row: np.ndarray):
    """Lexicographically least block set of minimum size covering one slice."""
    pts = bad_row[row]
    for W in split.subsets:
        if ((pts & split.pair_mask[W]) != 0).all():
            return W
    return None


def block_width(split: CliqueSplit, mem: np.ndarray, z: int, side: str = "x",
                mode: str = "exact") -> float:
    """Block width of the slice of triangle ``mem`` at ``x = z`` or ``y = z``."""
    if side == "x":
        return float(slice_widths(split, mem[z:z + 1], split.bad[z:z + 1], mode)[0])
    if side == "y":
        return float(slice_widths(split, mem[:, z][None, :], split.bad[:, z][None, :], mode)[0])
    raise ValueError("side must be 'x' or 'y'")


# --- triangles and triangle-DAGs --------------------------------------------

@dataclass
class Triangle:
    a: np.ndarray
    b: np.ndarray

    def members(self) -> np.ndarray:
        return self.a[:, None] <= self.b[None, :]

    @classmethod
    def full(cls, nx: int, ny: int) -> "Triangle":
        return cls(np.zeros(nx), np.zeros(ny))

    @classmethod
    def empty(cls, nx: int, ny: int) -> "Triangle":
        return cls(np.full(nx, INF), np.zeros(ny))


@dataclass
class TriangleDag:
    """Top-down DAG of triangles with fan-out at most 2.

    ``outputs[u]`` is the solution attached to leaf ``u``; its meaning is
    fixed by the ``preimage`` callable given to :meth:`validate`.
    """

    triangles: list[Triangle]
    children: list[tuple[int, ...]]
    outputs: list
    root: int
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.triangles)

    def members(self, u: int) -> np.ndarray:
        return self.triangles[u].members()

    def sinks_first(self) -> list[int]:
        """Post-order from the root: every node after all of its children."""
        seen, order = set(), []
        stack = [(self.root, False)]
        while stack:
            u, done = stack.pop()
            if done:
                order.append(u)
                continue
            if u in seen:
                continue
            seen.add(u)
            stack.append((u, True))
            for c in reversed(self.children[u]):
                if c not in seen:
                    stack.append((c, False))
        return order

    def validate(self, preimage: Callable[[object], np.ndarray]) -> None:
        """Exhaustive check of the root, covering and leaf conditions."""
        root = self.members(self.root)
        if not root.all():
            raise ValueError("root triangle is not the full domain")
        for u in self.sinks_first():
            T = self.members(u)
            ch = self.children[u]
            if len(ch) > 2:
                raise ValueError(f"node {u} has fan-out {len(ch)}")
            if ch:
                cover = np.zeros_like(T)
                for c in ch:
                    cover |= self.members(c)
                if (T & ~cover).any():
                    raise ValueError(f"node {u} is not covered by its children")
            elif T.any():
                pre = preimage(self.outputs[u])
                if pre is None or (T & ~pre).any():
                    raise ValueError(f"leaf {u} is not inside the preimage of {self.outputs[u]!r}")

    def to_json(self) -> str:
        def enc(v):
            return [("inf" if x == INF else "-inf" if x == -INF else
                     str(np.float64(x).as_integer_ratio()[0]) + "/" +
                     str(np.float64(x).as_integer_ratio()[1])) for x in v.tolist()]
        doc = {"root": self.root, "meta": self.meta,
               "nodes": [{"a": enc(t.a), "b": enc(t.b), "children": list(c),
                          "output": o} for t, c, o in zip(self.triangles, self.children, self.outputs)]}
        return json.dumps(doc, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TriangleDag":
        from fractions import Fraction
        doc = json.loads(text)

        def dec(v):
            return np.array([math.inf if s == "inf" else -math.inf if s == "-inf"
                             else float(Fraction(s)) for s in v])
        tris = [Triangle(dec(nd["a"]), dec(nd["b"])) for nd in doc["nodes"]]
        outs = [tuple(nd["output"]) if isinstance(nd["output"], list) else nd["output"]
                for nd in doc["nodes"]]
        return cls(tris, [tuple(nd["children"]) for nd in doc["nodes"]], outs,
                   doc["root"], doc.get("meta", {}))


def split_points(num_vars: int, x_vars: Sequence[int], y_vars: Sequence[int]):
    """0/1 matrices of all X and Y inputs; column p is variable ``x_vars[p]`` (MSB first)."""
    def pts(vs):
        z = np.arange(1 << len(vs), dtype=np.int64)
        return ((z[:, None] >> np.arange(len(vs) - 1, -1, -1)[None, :]) & 1).astype(np.int64)
    return pts(x_vars), pts(y_vars)


def inequality_triangle(coeffs, const, x_vars, y_vars) -> Triangle:
    """Inputs falsifying ``d . z >= c``: ``d_X x <= c - d_Y y - 1/2`` on integer-scaled forms."""
    from .proofs import integer_scaled
    d, c = integer_scaled(coeffs, const)
    PX, PY = split_points(len(d), x_vars, y_vars)
    a = (PX @ d[list(x_vars)]).astype(np.float64) if len(x_vars) else np.zeros(1)
    dy = (PY @ d[list(y_vars)]).astype(np.float64) if len(y_vars) else np.zeros(1)
    return Triangle(a, c - dy - 0.5)


def cp_to_triangle_dag(axioms, proof, x_vars: Sequence[int], y_vars: Sequence[int]) -> TriangleDag:
    """One node per line of a verified cutting-planes refutation.

    Leaves carry the axiom index they come from; derived lines point to their
    two premises.
    """
    n = len(proof.lines[0].coeffs)
    if sorted(list(x_vars) + list(y_vars)) != list(range(n)):
        raise ValueError("x_vars and y_vars must partition the variables")
    tris, children, outputs = [], [], []
    for line in proof.lines:
        tris.append(inequality_triangle(line.coeffs, line.const, x_vars, y_vars))
        if line.just[0] == "axiom":
            children.append(())
            outputs.append(line.just[1])
        else:
            children.append((line.just[1], line.just[2]))
            outputs.append(None)
    return TriangleDag(tris, children, outputs, len(proof.lines) - 1)


def axiom_preimage(axioms, x_vars, y_vars):
    """Preimage map for cutting-planes DAG leaves: inputs falsifying the axiom."""
    def pre(i):
        if i is None:
            return None
        d, c = axioms[i]
        return inequality_triangle(d, c, x_vars, y_vars).members()
    return pre


def pair_preimage(split: CliqueSplit):
    def pre(out):
        if out is None:
            return None
        u, v = out
        if not split.is_nonedge(u, v):
            return None
        return split.rect(u, v)
    return pre


def clause_pair_outputs(dag: TriangleDag, F) -> TriangleDag:
    """Relabel axiom-index leaves of a clique-formula DAG by their non-edge pair."""
    outs = []
    for o, ch in zip(dag.outputs, dag.children):
        if ch or o is None or o >= len(F.clauses):
            outs.append(None)
        else:
            _, u, v, _, _ = F.tags[o]
            outs.append((u, v))
    return TriangleDag(dag.triangles, dag.children, outs, dag.root, dict(dag.meta))


# --- input assignment (mu map) ------------------------------------------------

@dataclass
class MuResult:
    q: float
    mu_x: dict[int, int]
    mu_y: dict[int, int]
    # node -> (alive X, alive Y) just before the node was processed
    snapshots: dict[int, tuple[np.ndarray, np.ndarray]]
    # (node, side, z, width, allowed) for survivors whose width broke the 2q claim
    claim_violations: list[tuple]
    domain: int

    @property
    def assigned(self) -> int:
        return len(self.mu_x) + len(self.mu_y)


def build_mu(dag: TriangleDag, split: CliqueSplit, q: float, mode: str = "exact",
             width_on: str = "restricted", check_claim: bool = True) -> MuResult:
    """Assign inputs of large block width to DAG nodes, sinks first.

    ``width_on="restricted"`` measures width inside ``T_u`` restricted to the
    surviving inputs; ``"full"`` uses ``T_u`` itself.
    """
    size = split.size
    Xa = np.ones(size, dtype=bool)
    Ya = np.ones(size, dtype=bool)
    mu_x: dict[int, int] = {}
    mu_y: dict[int, int] = {}
    snaps, viol = {}, []
    for u in dag.sinks_first():
        mem = dag.members(u)
        snaps[u] = (Xa.copy(), Ya.copy())
        Tp = mem & Xa[:, None] & Ya[None, :]
        wx = slice_widths(split, Tp, split.bad, mode)
        if check_claim:
            allowed = 2 * q if dag.children[u] else 2
            wy0 = slice_widths(split, Tp.T, split.bad.T, mode)
            for side, w, alive in (("x", wx, Xa), ("y", wy0, Ya)):
                for z in np.flatnonzero(alive & (w > allowed)).tolist():
                    viol.append((u, side, z, float(w[z]), allowed))
        if width_on == "full":
            wx = slice_widths(split, mem & Ya[None, :], split.bad, mode)
        elif width_on != "restricted":
            raise ValueError(f"unknown width_on {width_on!r}")
        # deleting one x leaves every other x-slice unchanged
        for z in np.flatnonzero(Xa & (wx > q)).tolist():
            mu_x[z] = u
            Xa[z] = False
        Tp = mem & Xa[:, None] & Ya[None, :]
        src = Tp if width_on == "restricted" else mem & Xa[:, None]
        wy = slice_widths(split, src.T, split.bad.T, mode)
        for z in np.flatnonzero(Ya & (wy > q)).tolist():
            mu_y[z] = u
            Ya[z] = False
    return MuResult(q, mu_x, mu_y, snaps, viol, 2 * size)


def restricted_triangle(dag: TriangleDag, mu: MuResult, u: int) -> np.ndarray:
    Xa, Ya = mu.snapshots[u]
    return dag.members(u) & Xa[:, None] & Ya[None, :]


# --- covering tree -----------------------------------------------------------

@dataclass
class CoverNode:
    mem: np.ndarray
    parent: int | None
    label: tuple[int, int] | None
    blocks: frozenset
    route: np.ndarray | None  # the x's this edge is responsible for
    y: int | None = None
    children: list[int] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.blocks)


@dataclass
class CoverTree:
    nodes: list[CoverNode]
    root_mem: np.ndarray
    q: float

    def __len__(self) -> int:
        return len(self.nodes)


def _slice_cover(split: CliqueSplit, xs: np.ndarray, y: int, W) -> list[tuple]:
    """Greedy then pruned set-minimal cover of the points (x, y), x in xs."""
    cand: dict[tuple, set] = {}
    for x in xs.tolist():
        bits = int(split.bad[x, y])
        for p, (i, j) in enumerate(split.pairs):
            if i in W and j in W and (bits >> p) & 1:
                key = (i, j, split.vertex(i, x, y), split.vertex(j, x, y))
                cand.setdefault(key, set()).add(x)
    todo = set(xs.tolist())
    chosen = []
    while todo:
        key = min(cand, key=lambda r: (-len(cand[r] & todo), r))
        if not cand[key] & todo:
            raise AssertionError("block set does not cover the slice")
        chosen.append(key)
        todo -= cand[key]
    for key in list(reversed(chosen)):
        rest = [r for r in chosen if r != key]
        if set().union(*(cand[r] for r in rest)) >= set(xs.tolist()):
            chosen = rest
    return chosen


def covering_tree(split: CliqueSplit, Tp: np.ndarray, q: float, check_pre: bool = True,
                  max_nodes: int = 200000) -> CoverTree:
    """Tree of potential coverings of every x-slice of ``Tp``.

    At each node the y with the largest slice is covered by a minimum
    block-width family of solution rectangles; the child for rectangle
    ``R_i = X_i x Y_i`` keeps ``T ∩ ((X_i minus earlier X_j) x (Y minus Y_i))``
    so every x follows exactly one path.
    """
    if check_pre:
        wy = slice_widths(split, Tp.T, split.bad.T)
        if (wy > 2 * q).any():
            raise ValueError("precondition violated: some y has block width above 2q")
    nodes = [CoverNode(Tp.copy(), None, None, frozenset(), None)]
    queue = deque([0]) if Tp.any() else deque()
    while queue:
        t = queue.popleft()
        T = nodes[t].mem
        y = int(T.sum(axis=0).argmax())
        nodes[t].y = y
        xs = np.flatnonzero(T[:, y])
        W = min_width_blocks(split, T[:, y], split.bad[:, y])
        if W is None:
            raise ValueError(f"slice at y={y} cannot be covered")
        claimed = np.zeros(split.size, dtype=bool)
        for i, j, u, v in _slice_cover(split, xs, y, W):
            XR, YR = split.rect_sides(u, v)
            route = XR & ~claimed
            claimed |= XR
            child = T & route[:, None] & ~YR[None, :]
            nodes.append(CoverNode(child, t, (u, v), nodes[t].blocks | {i, j}, route))
            nodes[t].children.append(len(nodes) - 1)
            if child.any():
                queue.append(len(nodes) - 1)
            if len(nodes) > max_nodes:
                raise BudgetExceeded("covering tree grew beyond max_nodes")
    return CoverTree(nodes, Tp, q)


@dataclass
class TreeAudit:
    coverage: bool
    nesting: bool
    unique_paths: bool
    out_degree: bool

    @property
    def ok(self) -> bool:
        return self.coverage and self.nesting and self.unique_paths and self.out_degree


def audit_covering_tree(split: CliqueSplit, tree: CoverTree) -> TreeAudit:
    Tp = tree.root_mem
    nodes = tree.nodes
    union = np.zeros_like(Tp)
    for nd in nodes[1:]:
        union |= split.rect(*nd.label)
    coverage = not (Tp & ~union).any()

    nesting = True
    for nd in nodes:
        seen = np.zeros_like(Tp)
        for c in nd.children:
            cm = nodes[c].mem
            if (cm & ~nd.mem).any() or (cm & seen).any():
                nesting = False
            seen |= cm

    unique = True
    for x in np.flatnonzero(Tp.any(axis=1)).tolist():
        t, covered = 0, np.zeros(Tp.shape[1], dtype=bool)
        while nodes[t].mem[x].any():
            nxt = [c for c in nodes[t].children if nodes[c].route[x]]
            if len(nxt) != 1:
                unique = False
                break
            t = nxt[0]
            XR, YR = split.rect_sides(*nodes[t].label)
            if XR[x]:
                covered |= YR
        if unique and (Tp[x] & ~covered).any():
            unique = False
        if not unique:
            break

    outdeg = all(len(nd.children) <= 1 or all(nodes[c].depth > nd.depth for c in nd.children)
                 for nd in nodes)
    return TreeAudit(coverage, nesting, unique, outdeg)


@dataclass
class Census:
    counts: dict[int, int]
    bound: dict[int, float]
    applicable: bool
    s: float
    q: float

    @property
    def violations(self) -> list[int]:
        return [d for d, c in self.counts.items() if c > self.bound[d]]

    @property
    def flagged(self) -> bool:
        return self.applicable and bool(self.violations)

    def to_csv(self) -> str:
        from .stats import rows_to_csv
        rows = [{"block_depth": d, "nodes": self.counts[d], "bound": self.bound[d],
                 "exceeds": self.counts[d] > self.bound[d]} for d in sorted(self.counts)]
        return rows_to_csv(rows, comments=[f"s={self.s} q={self.q} hypothesis_holds={self.applicable}"])


def block_depth_census(tree: CoverTree, n: int, s: float) -> Census:
    """Node counts per block depth after merging same-depth parent/child chains."""
    if n < 16:
        raise ValueError("census needs n >= 16")
    counts: dict[int, int] = {}
    for nd in tree.nodes:
        if any(tree.nodes[c].depth == nd.depth for c in nd.children):
            continue
        counts[nd.depth] = counts.get(nd.depth, 0) + 1
    base = math.sqrt(n) / 2
    bound = {d: base ** d for d in counts}
    applicable = 2 * tree.q ** 2 * s <= math.sqrt(n) / 4
    return Census(counts, bound, applicable, s, tree.q)


# --- instance generators ----------------------------------------------------

def triangle_free_graph(n: int, seed: int, method: str = "parity", p: float = 0.5) -> BlockGraph:
    """Three-block graph without a transversal triangle.

    ``parity``: random vertex colours, blocks 0-1 and 0-2 joined on equal
    colours and 1-2 on different colours.  ``greedy``: G(n, p, 3) with one
    edge of every remaining triangle removed.
    """
    from .graph import from_adjacency, sample_graph
    from .stats import np_rng
    rng = np_rng(seed, 0x7F)
    if method == "parity":
        col = rng.integers(2, size=3 * n).astype(bool)
        A = np.zeros((3 * n, 3 * n), dtype=bool)
        rule = {(0, 1): True, (0, 2): True, (1, 2): False}
        for (i, j), same in rule.items():
            ci, cj = col[i * n:(i + 1) * n], col[j * n:(j + 1) * n]
            blk = (ci[:, None] == cj[None, :]) if same else (ci[:, None] != cj[None, :])
            A[i * n:(i + 1) * n, j * n:(j + 1) * n] = blk
            A[j * n:(j + 1) * n, i * n:(i + 1) * n] = blk.T
        return from_adjacency(A, n, 3, {"method": "parity", "seed": seed})
    if method != "greedy":
        raise ValueError(f"unknown method {method!r}")
    A = sample_graph(n, p, 3, seed).to_adjacency()
    for a in range(n):
        for b in range(n, 2 * n):
            if not A[a, b]:
                continue
            common = A[a, 2 * n:] & A[b, 2 * n:]
            if common.any():
                A[a, b] = A[b, a] = False
    return from_adjacency(A, n, 3, {"method": "greedy", "p": p, "seed": seed})


def has_transversal_clique(G: BlockGraph) -> bool:
    A = G.to_adjacency()
    n, k = G.n, G.k

    def extend(chosen: list[int], block: int) -> bool:
        if block == k:
            return True
        for v in range(block * n, (block + 1) * n):
            if all(A[v, c] for c in chosen) and extend(chosen + [v], block + 1):
                return True
        return False
    return extend([], 0)


def _inside_rectangle(split: CliqueSplit, T: np.ndarray):
    xs, ys = np.nonzero(T)
    if xs.size == 0:
        return None
    for p, (i, j) in enumerate(split.pairs):
        ci, cj = split.coord[i], split.coord[j]
        if (np.unique(ci[xs]).size == 1 and np.unique(cj[xs]).size == 1
                and np.unique(ci[ys]).size == 1 and np.unique(cj[ys]).size == 1):
            u = split.vertex(i, int(xs[0]), int(ys[0]))
            v = split.vertex(j, int(xs[0]), int(ys[0]))
            if split.is_nonedge(u, v):
                return (u, v)
    return None


def random_triangle_dag(split: CliqueSplit, seed: int, linear_prob: float = 0.3,
                        weight: int = 2, max_nodes: int = 20000) -> TriangleDag:
    """Random top-down triangle-DAG solving the search problem of ``split.G``.

    A node either splits ``{a <= b}`` into ``{a + f <= b + g}`` and
    ``{a - f <= b - g}`` (which together cover it) for random integer linear
    ``f``, ``g``, or branches on one input bit.  Nodes with equal member sets
    are shared.  The graph must have no transversal k-clique.
    """
    from .stats import np_rng
    rng = np_rng(seed, 0xDA)
    size, k, h = split.size, split.k, split.h
    nbits = k * h
    xbits = ((np.arange(size)[:, None] >> np.arange(nbits - 1, -1, -1)[None, :]) & 1)
    tris: list[Triangle] = []
    children: list[tuple[int, ...]] = []
    outputs: list = []
    memo: dict[bytes, int] = {}

    def node_for(tri: Triangle) -> tuple[int, bool]:
        key = np.packbits(tri.members()).tobytes()
        if key in memo:
            return memo[key], False
        memo[key] = len(tris)
        tris.append(tri)
        children.append(())
        outputs.append(None)
        if len(tris) > max_nodes:
            raise BudgetExceeded("random DAG grew beyond max_nodes")
        return memo[key], True

    root, _ = node_for(Triangle.full(size, size))
    stack = [root]
    while stack:
        u = stack.pop()
        tri = tris[u]
        T = tri.members()
        if not T.any():
            continue
        out = _inside_rectangle(split, T)
        if out is not None:
            outputs[u] = out
            continue
        kids = None
        if rng.random() < linear_prob:
            f = xbits @ rng.integers(-weight, weight + 1, size=nbits)
            g = xbits @ rng.integers(-weight, weight + 1, size=nbits)
            c1 = Triangle(tri.a + f, tri.b + g)
            c2 = Triangle(tri.a - f, tri.b - g)
            m1, m2 = c1.members(), c2.members()
            # strictly smaller member sets keep the shared-node graph acyclic
            if m1.sum() < T.sum() and m2.sum() < T.sum():
                kids = (c1, c2)
        if kids is None:
            xs, ys = np.nonzero(T)
            opts = [("x", t) for t in range(nbits) if np.unique(xbits[xs, t]).size > 1]
            opts += [("y", t) for t in range(nbits) if np.unique(xbits[ys, t]).size > 1]
            side, t = opts[int(rng.integers(len(opts)))]
            bit = xbits[:, t].astype(bool)
            if side == "x":
                kids = (Triangle(np.where(bit, INF, tri.a), tri.b),
                        Triangle(np.where(bit, tri.a, INF), tri.b))
            else:
                kids = (Triangle(tri.a, np.where(bit, -INF, tri.b)),
                        Triangle(tri.a, np.where(bit, tri.b, -INF)))
        ids = []
        for c in kids:
            cid, new = node_for(c)
            ids.append(cid)
            if new:
                stack.append(cid)
        children[u] = tuple(ids)
    return TriangleDag(tris, children, outputs, root, {"generator": "random", "seed": seed})


def cp_triangle_dag_for_graph(G: BlockGraph):
    """Verified cutting-planes refutation of the block formula of ``G`` as a triangle-DAG.

    Returns ``(dag, split, axioms, proof)``; leaves are relabelled by their
    non-edge pair.
    """
    from .cnf import encode_block_clique
    from .proofs import resolution_to_cp, tree_resolution, verify_cp
    F = encode_block_clique(G)
    split = CliqueSplit(G)
    lines = tree_resolution(F)
    axioms, proof = resolution_to_cp(F, lines)
    verify_cp(axioms, proof)
    dag = cp_to_triangle_dag(axioms, proof, split.x_vars, split.y_vars)
    dag = clause_pair_outputs(dag, F)
    dag.meta["generator"] = "cutting-planes"
    return dag, split, axioms, proof
