"""Deterministic two-party protocols over the X/Y split of the block clique formula.

Alice holds the top half of every block's vertex bits and Bob the bottom
half.  An input is an int over ``K = k * h`` bits; coordinate ``t`` belongs
to block ``t // h`` and sits at bit position ``K - 1 - t`` (block 0 in the
most significant field, the same layout as :class:`CliqueSplit`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Union

import numpy as np

from .density import min_almost_complete
from .stats import np_rng, rows_to_csv
from .triangles import BudgetExceeded, CliqueSplit

ALICE, BOB = 0, 1


@dataclass(frozen=True)
class ProtoLeaf:
    output: tuple[int, int]


@dataclass(frozen=True, eq=False)
class ProtoNode:
    speaker: int
    table: np.ndarray  # bool, indexed by the speaker's input
    zero: "Proto"
    one: "Proto"


Proto = Union[ProtoLeaf, ProtoNode]


@dataclass
class ProtocolTree:
    root: Proto
    k: int
    h: int
    rects: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        size = 1 << self.K
        self.rects = {}
        stack = [(self.root, "", np.ones(size, bool), np.ones(size, bool))]
        while stack:
            node, path, X, Y = stack.pop()
            self.rects[path] = (X, Y)
            if isinstance(node, ProtoNode):
                t = np.asarray(node.table, dtype=bool)
                if t.shape != (size,):
                    raise ValueError(f"table at {path or 'root'} has {t.size} entries, expected {size}")
                if node.speaker == ALICE:
                    stack += [(node.zero, path + "0", X & ~t, Y), (node.one, path + "1", X & t, Y)]
                elif node.speaker == BOB:
                    stack += [(node.zero, path + "0", X, Y & ~t), (node.one, path + "1", X, Y & t)]
                else:
                    raise ValueError(f"unknown speaker {node.speaker}")
            else:
                a, b = node.output
                if not (0 <= a < self.k and 0 <= b < self.k):
                    raise ValueError(f"leaf output {node.output} names a missing block")

    @property
    def K(self) -> int:
        return self.k * self.h

    def nodes(self) -> list[tuple[str, Proto]]:
        out, stack = [], [("", self.root)]
        while stack:
            path, node = stack.pop()
            out.append((path, node))
            if isinstance(node, ProtoNode):
                stack += [(path + "1", node.one), (path + "0", node.zero)]
        return out

    def leaves(self) -> list[tuple[str, ProtoLeaf]]:
        return sorted((p, v) for p, v in self.nodes() if isinstance(v, ProtoLeaf))

    def cost(self) -> int:
        return max(len(p) for p, _ in self.leaves())

    def audit(self) -> list[str]:
        """Structural problems: rectangles that do not partition their parent."""
        problems = []
        size = 1 << self.K
        X, Y = self.rects[""]
        if not (X.all() and Y.all()):
            problems.append("root rectangle is not the full domain")
        for path, node in self.nodes():
            if not isinstance(node, ProtoNode):
                continue
            X, Y = self.rects[path]
            X0, Y0 = self.rects[path + "0"]
            X1, Y1 = self.rects[path + "1"]
            side = (X, X0, X1) if node.speaker == ALICE else (Y, Y0, Y1)
            other = (Y, Y0, Y1) if node.speaker == ALICE else (X, X0, X1)
            if (side[1] & side[2]).any() or not np.array_equal(side[1] | side[2], side[0]):
                problems.append(f"children of {path or 'root'} do not split the speaker's side")
            if not (np.array_equal(other[1], other[0]) and np.array_equal(other[2], other[0])):
                problems.append(f"children of {path or 'root'} change the silent side")
        cover = np.zeros((size, size), dtype=np.int64)
        for path, _ in self.leaves():
            X, Y = self.rects[path]
            cover += X[:, None] & Y[None, :]
        if not (cover == 1).all():
            problems.append("leaf rectangles do not partition the domain")
        return problems


def run_protocol(P: ProtocolTree, x: int, y: int) -> tuple[ProtoLeaf, str]:
    node, path = P.root, []
    while isinstance(node, ProtoNode):
        bit = bool(node.table[x if node.speaker == ALICE else y])
        path.append("1" if bit else "0")
        node = node.one if bit else node.zero
    return node, "".join(path)


# --- entropy and spread -----------------------------------------------------

def _project(values: np.ndarray, coords, K: int) -> np.ndarray:
    out = np.zeros(values.shape, dtype=np.int64)
    for t in coords:
        out = (out << 1) | ((values >> (K - 1 - t)) & 1)
    return out


def min_entropy(values, coords, K: int) -> float:
    """H-infinity of coordinates ``coords`` under the uniform distribution on ``values``."""
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        raise ValueError("min-entropy of an empty set")
    _, counts = np.unique(_project(v, list(coords), K), return_counts=True)
    return math.log2(v.size / counts.max())


def blocks_of_coords(coords, h: int) -> frozenset:
    return frozenset(t // h for t in coords)


def fixed_coords(values: np.ndarray, K: int) -> tuple[int, ...]:
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        raise ValueError("fixed coordinates of an empty set")
    return tuple(t for t in range(K) if np.unique((v >> (K - 1 - t)) & 1).size == 1)


@dataclass
class SpreadReport:
    gamma: float
    fix_x: tuple[int, ...]
    fix_y: tuple[int, ...]
    # side -> {coordinate subset: min-entropy}
    entropies: dict[str, dict[tuple[int, ...], float]]
    violation: tuple[str, tuple[int, ...], float] | None

    @property
    def passed(self) -> bool:
        return self.violation is None


def _side_entropies(values, K, max_free):
    fix = fixed_coords(values, K)
    free = [t for t in range(K) if t not in fix]
    if len(free) > max_free:
        raise BudgetExceeded(f"{len(free)} free coordinates exceed the budget {max_free}")
    ent = {}
    for r in range(1, len(free) + 1):
        for I in combinations(free, r):
            ent[I] = min_entropy(values, I, K)
    return fix, ent


def subcube_like_check(X: np.ndarray, Y: np.ndarray, K: int, gamma: float,
                       max_free: int = 20) -> SpreadReport:
    """Fix sets of both sides and the gamma-spread test on every free subset.

    ``X`` and ``Y`` are boolean masks over ``2**K`` inputs.
    """
    xs, ys = np.flatnonzero(X), np.flatnonzero(Y)
    fx, ex = _side_entropies(xs, K, max_free)
    fy, ey = _side_entropies(ys, K, max_free)
    violation = None
    for side, ent in (("X", ex), ("Y", ey)):
        for I, H in sorted(ent.items(), key=lambda kv: (len(kv[0]), kv[0])):
            if H < gamma * len(I) - 1e-12:
                violation = (side, I, H)
                break
        if violation:
            break
    return SpreadReport(gamma, fx, fy, {"X": ex, "Y": ey}, violation)


# --- error and census -------------------------------------------------------

def _pair_bits(split: CliqueSplit, a: int, b: int):
    """Bit selecting the pair (a, b) in ``split.bad``, or None when a == b."""
    if a == b:
        return None
    return split.pairs.index((min(a, b), max(a, b)))


def _nonedge_matrix(split: CliqueSplit, a: int, b: int) -> np.ndarray:
    p = _pair_bits(split, a, b)
    if p is None:
        return np.zeros(split.bad.shape, dtype=bool)
    return ((split.bad >> np.uint64(p)) & np.uint64(1)).astype(bool)


@dataclass
class ErrorEstimate:
    error: float
    sigma: float
    trials: int | None  # None for exhaustive evaluation


def distributional_error(P: ProtocolTree, split: CliqueSplit, trials: int | None = None,
                         seed: int | None = None) -> ErrorEstimate:
    """Probability over uniform inputs that the output pair is not a non-edge."""
    if (P.k, P.h) != (split.k, split.h):
        raise ValueError("protocol and graph disagree on k or the half width")
    if trials is None:
        wrong = 0
        for path, leaf in P.leaves():
            X, Y = P.rects[path]
            ok = _nonedge_matrix(split, *leaf.output)[np.ix_(X, Y)]
            wrong += ok.size - int(ok.sum())
        return ErrorEstimate(wrong / split.size ** 2, 0.0, None)
    if seed is None:
        raise ValueError("sampling needs a seed")
    rng = np_rng(seed, 0xC0)
    xs = rng.integers(split.size, size=trials)
    ys = rng.integers(split.size, size=trials)
    wrong = 0
    for x, y in zip(xs.tolist(), ys.tolist()):
        leaf, _ = run_protocol(P, x, y)
        p = _pair_bits(split, *leaf.output)
        wrong += p is None or not (int(split.bad[x, y]) >> p) & 1
    e = wrong / trials
    return ErrorEstimate(e, math.sqrt(e * (1 - e) / trials), trials)


@dataclass
class LeafRecord:
    path: str
    output: tuple[int, int]
    D: frozenset
    safe: bool
    mass: float
    p_nonedge: float
    spread: bool | None
    applies: bool
    bound: float

    @property
    def violates(self) -> bool:
        return self.applies and self.p_nonedge > self.bound + 1e-12


@dataclass
class Census:
    records: list[LeafRecord]
    s: int
    gamma: float

    @property
    def violations(self) -> list[LeafRecord]:
        return [r for r in self.records if r.violates]

    def to_csv(self, comments=()) -> str:
        rows = [{"leaf": r.path or "root", "a": r.output[0], "b": r.output[1],
                 "D": " ".join(map(str, sorted(r.D))), "safe": int(r.safe),
                 "mass": f"{r.mass:.10g}", "p_nonedge": f"{r.p_nonedge:.10g}",
                 "spread": "" if r.spread is None else int(r.spread),
                 "bound_applies": int(r.applies), "bound": f"{r.bound:.10g}"}
                for r in self.records]
        header = ["leaf", "a", "b", "D", "safe", "mass", "p_nonedge", "spread", "bound_applies", "bound"]
        return rows_to_csv(rows, header, comments)


def leaf_census(P: ProtocolTree, split: CliqueSplit, s: int | None = None,
                gamma: float = 0.9, max_free: int = 12) -> Census:
    """Per-leaf fixed blocks, safety and exact conditional non-edge probability.

    The density bound ``s * |Sigma|**-gamma`` (``|Sigma| = sqrt(n)``) is
    attached to leaves whose rectangle is gamma-subcube-like and where at
    least one output block has no fixed coordinate.  Spread is only tested
    when both sides have at most ``max_free`` free coordinates.
    """
    if s is None:
        s = min_almost_complete(split.G).s_star
    bound = s * split.sq ** (-gamma)
    records = []
    total = split.size ** 2
    for path, leaf in P.leaves():
        X, Y = P.rects[path]
        xs, ys = np.flatnonzero(X), np.flatnonzero(Y)
        mass = xs.size * ys.size / total
        a, b = leaf.output
        if mass == 0:
            records.append(LeafRecord(path, leaf.output, frozenset(), False, 0.0, 0.0, None, False, bound))
            continue
        fx, fy = fixed_coords(xs, P.K), fixed_coords(ys, P.K)
        D = blocks_of_coords(fx, P.h) | blocks_of_coords(fy, P.h)
        safe = {a, b} <= D
        p = float(_nonedge_matrix(split, a, b)[np.ix_(X, Y)].mean())
        try:
            spread = subcube_like_check(X, Y, P.K, gamma, max_free).passed
        except BudgetExceeded:
            spread = None
        applies = bool(spread) and not safe and a != b
        records.append(LeafRecord(path, leaf.output, D, safe, mass, p, spread, applies, bound))
    return Census(records, s, gamma)


def fix_monotone(P: ProtocolTree) -> bool:
    """Fixed blocks only grow from a node to its children."""
    def D(path):
        X, Y = P.rects[path]
        xs, ys = np.flatnonzero(X), np.flatnonzero(Y)
        if xs.size == 0 or ys.size == 0:
            return None
        return blocks_of_coords(fixed_coords(xs, P.K), P.h) | blocks_of_coords(fixed_coords(ys, P.K), P.h)
    for path, node in P.nodes():
        if isinstance(node, ProtoNode):
            here = D(path)
            for c in "01":
                sub = D(path + c)
                if here is not None and sub is not None and not here <= sub:
                    return False
    return True


# --- generators -------------------------------------------------------------

def _coord_table(K: int, t: int) -> np.ndarray:
    return ((np.arange(1 << K) >> (K - 1 - t)) & 1).astype(bool)


def baseline_protocol(split: CliqueSplit) -> ProtocolTree:
    """Alice sends her halves of blocks 0 and 1; Bob reports whether that pair is a non-edge.

    On a reported non-edge the output is blocks (0, 1); otherwise it falls
    back to (0, 2) when a third block exists.
    """
    k, h, K = split.k, split.h, split.k * split.h
    if k < 2:
        raise ValueError("need at least two blocks")
    fallback = (0, 2) if k >= 3 else (0, 1)
    sent = list(range(2 * h))
    ys = np.arange(split.size)
    nonedge01 = _nonedge_matrix(split, 0, 1)

    def build(depth, x_prefix):
        if depth == len(sent):
            # any x with the sent coordinates equals x_prefix on blocks 0 and 1
            x = x_prefix << (K - 2 * h)
            table = nonedge01[x, ys]
            return ProtoNode(BOB, table, ProtoLeaf(fallback), ProtoLeaf((0, 1)))
        t = sent[depth]
        return ProtoNode(ALICE, _coord_table(K, t), build(depth + 1, x_prefix << 1),
                         build(depth + 1, (x_prefix << 1) | 1))

    return ProtocolTree(build(0, 0), k, h)


def random_subcube_protocol(k: int, h: int, depth: int, seed: int) -> ProtocolTree:
    """Random protocol that only reveals raw input bits, so every rectangle is a subcube."""
    K = k * h
    rng = np_rng(seed, 0x5C)
    pairs = list(combinations(range(k), 2))

    def build(d, sent_x, sent_y):
        if d == depth or (len(sent_x) == K and len(sent_y) == K):
            return ProtoLeaf(pairs[int(rng.integers(len(pairs)))])
        speaker = int(rng.integers(2))
        if len((sent_x, sent_y)[speaker]) == K:
            speaker = 1 - speaker
        sent = sent_x if speaker == ALICE else sent_y
        options = [t for t in range(K) if t not in sent]
        t = options[int(rng.integers(len(options)))]
        nx, ny = (sent_x | {t}, sent_y) if speaker == ALICE else (sent_x, sent_y | {t})
        return ProtoNode(speaker, _coord_table(K, t), build(d + 1, nx, ny), build(d + 1, nx, ny))

    return ProtocolTree(build(0, frozenset(), frozenset()), k, h)


# --- serialization ----------------------------------------------------------

def protocol_to_json(P: ProtocolTree) -> str:
    def enc(node):
        if isinstance(node, ProtoLeaf):
            return {"output": list(node.output)}
        return {"speaker": "alice" if node.speaker == ALICE else "bob",
                "table": "".join("1" if b else "0" for b in np.asarray(node.table, bool)),
                "zero": enc(node.zero), "one": enc(node.one)}
    return json.dumps({"format": "BCLQ-PROTO-1", "k": P.k, "h": P.h, "root": enc(P.root)})


def protocol_from_json(text: str) -> ProtocolTree:
    doc = json.loads(text)
    if doc.get("format") != "BCLQ-PROTO-1":
        raise ValueError("not a protocol document")

    def dec(d):
        if "output" in d:
            a, b = d["output"]
            return ProtoLeaf((int(a), int(b)))
        speaker = {"alice": ALICE, "bob": BOB}[d["speaker"]]
        if set(d["table"]) - {"0", "1"}:
            raise ValueError("tables must be 0/1 strings")
        table = np.array([c == "1" for c in d["table"]], dtype=bool)
        return ProtoNode(speaker, table, dec(d["zero"]), dec(d["one"]))

    return ProtocolTree(dec(doc["root"]), int(doc["k"]), int(doc["h"]))
