"""k-partite block graphs, the G(n, p, k) sampler and vertex bit encodings.

Vertices are addressed either as ``VertexId(block, index)`` with 0-based
``block`` or by the global id ``block * n + index``.  Edge membership of a
sampled graph is a pure function of ``(seed, p, gid_u, gid_v)`` so that any
subset of the graph can be regenerated without building the rest of it.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

GRAPH_FORMAT = "BCLQ-1"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_MASK64 = (1 << 64) - 1


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def log2_exact(n: int) -> int:
    if not is_power_of_two(n):
        raise ValueError(f"{n} is not a power of 2")
    return n.bit_length() - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def splitmix64(value: int) -> int:
    """Scalar splitmix64 finalizer, used to derive child seeds."""
    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *stream: int) -> int:
    """Deterministic 64-bit child seed for ``(seed, *stream)``."""
    z = splitmix64(seed & _MASK64)
    for s in stream:
        z = splitmix64(z ^ (s & _MASK64))
    return z


def pair_uniforms(seed: int, gu, gv) -> np.ndarray:
    """Uniform [0, 1) draws keyed by the unordered pair of global ids."""
    gu = np.asarray(gu, dtype=np.uint64)
    gv = np.asarray(gv, dtype=np.uint64)
    lo = np.minimum(gu, gv)
    hi = np.maximum(gu, gv)
    key = (lo << np.uint64(32)) | hi
    with np.errstate(over="ignore"):
        z = _mix64(key + np.uint64(derive_seed(seed)) * _GOLDEN)
        z = _mix64(z ^ np.uint64(splitmix64(seed & _MASK64)))
    return (z >> _S11).astype(np.float64) * (1.0 / (1 << 53))


def edge_present(seed: int, p: float, gu, gv) -> np.ndarray:
    """Membership of the pairs ``(gu, gv)`` in the graph sampled with ``seed``.

    Does not know about blocks: callers are responsible for only asking about
    cross-block pairs.
    """
    if p >= 1.0:
        return np.ones(np.broadcast(np.asarray(gu), np.asarray(gv)).shape, dtype=bool)
    return pair_uniforms(seed, gu, gv) < p


class VertexId(NamedTuple):
    block: int
    index: int

    def gid(self, n: int) -> int:
        return self.block * n + self.index


def vertex_bits(index: int, n: int) -> str:
    """MSB-first binary representation of ``index`` with ``log n`` bits."""
    m = log2_exact(n)
    if not 0 <= index < n:
        raise ValueError(f"index {index} out of range for n={n}")
    return format(index, f"0{m}b") if m else ""


def bits_to_index(bits: str) -> int:
    return int(bits, 2) if bits else 0


def split_halves(index: int, n: int) -> tuple[str, str]:
    """The (x-half, y-half) of a vertex: first and last ``log(n)/2`` bits."""
    bits = vertex_bits(index, n)
    if len(bits) % 2:
        raise ValueError(f"log n must be even to split vertices of n={n}")
    h = len(bits) // 2
    return bits[:h], bits[h:]


@dataclass(frozen=True, eq=False)
class BlockGraph:
    """k-partite graph with ``n`` vertices per block and packed adjacency rows.

    ``adj[g]`` holds the neighbours of global vertex ``g`` as a packed bit row
    over all ``n * k`` vertices (bit order as produced by ``np.packbits``).
    """

    n: int
    k: int
    adj: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def num_vertices(self) -> int:
        return self.n * self.k

    @property
    def log_n(self) -> int:
        return log2_exact(self.n)

    def block_of(self, gid: int) -> int:
        return gid // self.n

    def gid(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            return int(v)
        b, i = v
        if not (0 <= b < self.k and 0 <= i < self.n):
            raise ValueError(f"vertex {v} outside {self.k} blocks of size {self.n}")
        return b * self.n + i

    def row(self, v) -> np.ndarray:
        return np.unpackbits(self.adj[self.gid(v)], count=self.num_vertices).astype(bool)

    def adjacent(self, u, v) -> bool:
        gu, gv = self.gid(u), self.gid(v)
        return bool((self.adj[gu, gv >> 3] >> (7 - (gv & 7))) & 1)

    def block_adjacency(self, i: int, j: int) -> np.ndarray:
        """``n x n`` boolean adjacency between block ``i`` (rows) and ``j``."""
        rows = np.unpackbits(self.adj[i * self.n:(i + 1) * self.n], axis=1,
                             count=self.num_vertices).astype(bool)
        return rows[:, j * self.n:(j + 1) * self.n]

    def to_adjacency(self) -> np.ndarray:
        return np.unpackbits(self.adj, axis=1, count=self.num_vertices).astype(bool)

    def edge_count(self) -> int:
        return int(np.unpackbits(self.adj).sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        full = self.to_adjacency()
        us, vs = np.nonzero(np.triu(full, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def common_neighborhood_mask(self, U: Iterable, i: int) -> np.ndarray:
        """Boolean mask over block ``i`` of vertices adjacent to all of ``U``."""
        gids = [self.gid(u) for u in U]
        if any(g // self.n == i for g in gids):
            raise ValueError(f"block {i} is touched by the vertex set")
        if not 0 <= i < self.k:
            raise ValueError(f"block {i} out of range")
        if not gids:
            return np.ones(self.n, dtype=bool)
        packed = np.bitwise_and.reduce(self.adj[gids], axis=0)
        row = np.unpackbits(packed, count=self.num_vertices).astype(bool)
        return row[i * self.n:(i + 1) * self.n]

    def common_neighborhood(self, U: Iterable, i: int) -> tuple[int, ...]:
        return tuple(np.flatnonzero(self.common_neighborhood_mask(U, i)).tolist())

    def restrict_blocks(self, blocks) -> "BlockGraph":
        """Induced subgraph on the listed blocks, renumbered 0..len(blocks)-1."""
        blocks = list(blocks)
        full = self.to_adjacency()
        idx = np.concatenate([np.arange(b * self.n, (b + 1) * self.n) for b in blocks])
        sub = full[np.ix_(idx, idx)]
        return BlockGraph(self.n, len(blocks), np.packbits(sub, axis=1), dict(self.meta))

    def with_edges(self, pairs, present: bool = True) -> "BlockGraph":
        """Copy with the given cross-block pairs added (or removed)."""
        full = self.to_adjacency()
        for u, v in pairs:
            gu, gv = self.gid(u), self.gid(v)
            if gu // self.n == gv // self.n:
                raise ValueError("edges must join distinct blocks")
            full[gu, gv] = full[gv, gu] = present
        return BlockGraph(self.n, self.k, np.packbits(full, axis=1), {})

    def validate(self) -> None:
        if not is_power_of_two(self.n):
            raise ValueError(f"n={self.n} is not a power of 2")
        if self.k < 1:
            raise ValueError("k must be positive")
        full = self.to_adjacency()
        if not np.array_equal(full, full.T):
            raise ValueError("adjacency is not symmetric")
        for b in range(self.k):
            sl = slice(b * self.n, (b + 1) * self.n)
            if full[sl, sl].any():
                raise ValueError(f"edge inside block {b}")


def from_adjacency(adjacency: np.ndarray, n: int, k: int, meta: dict | None = None) -> BlockGraph:
    adjacency = np.asarray(adjacency, dtype=bool)
    g = BlockGraph(n, k, np.packbits(adjacency, axis=1), dict(meta or {}))
    g.validate()
    return g


def complete_graph(n: int, k: int) -> BlockGraph:
    return sample_graph(n, 1.0, k, 0)


def empty_graph(n: int, k: int) -> BlockGraph:
    return sample_graph(n, 0.0, k, 0)


def _fill_pair(full: np.ndarray, n: int, p: float, seed: int, i: int, j: int) -> None:
    gu = np.arange(i * n, (i + 1) * n, dtype=np.uint64)[:, None]
    gv = np.arange(j * n, (j + 1) * n, dtype=np.uint64)[None, :]
    block = edge_present(seed, p, gu, gv)
    full[i * n:(i + 1) * n, j * n:(j + 1) * n] = block
    full[j * n:(j + 1) * n, i * n:(i + 1) * n] = block.T


def sample_graph(n: int, p: float, k: int, seed: int, threads: int = 1) -> BlockGraph:
    """Sample from G(n, p, k).

    Each cross-block pair is present iff its hash-derived uniform is below
    ``p``; the result does not depend on ``threads``.
    """
    if not is_power_of_two(n):
        raise ValueError(f"n={n} is not a power of 2")
    if k < 1:
        raise ValueError("k must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    N = n * k
    full = np.zeros((N, N), dtype=bool)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    if p > 0:
        if threads > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                list(ex.map(lambda ij: _fill_pair(full, n, p, seed, *ij), pairs))
        else:
            for i, j in pairs:
                _fill_pair(full, n, p, seed, i, j)
    adj = np.packbits(full, axis=1)
    return BlockGraph(n, k, adj, {"p": p, "seed": seed})


def save_graph(g: BlockGraph, path) -> None:
    Path(path).write_text(graph_to_json(g))


def graph_to_json(g: BlockGraph, extra: dict | None = None) -> str:
    doc = {"format": GRAPH_FORMAT, "n": g.n, "k": g.k,
           "p": g.meta.get("p"), "seed": g.meta.get("seed")}
    if extra:
        doc["config"] = extra
    doc["edges"] = [list(e) for e in g.edges()]
    return json.dumps(doc, separators=(",", ":")) + "\n"


def graph_from_json(text: str) -> BlockGraph:
    doc = json.loads(text)
    if doc.get("format") != GRAPH_FORMAT:
        raise ValueError(f"expected format {GRAPH_FORMAT!r}, got {doc.get('format')!r}")
    n, k = int(doc["n"]), int(doc["k"])
    if not is_power_of_two(n) or k < 1:
        raise ValueError("invalid n or k")
    N = n * k
    full = np.zeros((N, N), dtype=bool)
    prev = None
    for u, v in doc["edges"]:
        if not (0 <= u < v < N):
            raise ValueError(f"bad edge {(u, v)}")
        if u // n == v // n:
            raise ValueError(f"edge {(u, v)} inside a block")
        if prev is not None and (u, v) <= prev:
            raise ValueError("edge list must be sorted and duplicate-free")
        prev = (u, v)
        full[u, v] = full[v, u] = True
    meta = {"p": doc.get("p"), "seed": doc.get("seed")}
    return BlockGraph(n, k, np.packbits(full, axis=1), meta)


def load_graph(path) -> BlockGraph:
    return graph_from_json(Path(path).read_text())
