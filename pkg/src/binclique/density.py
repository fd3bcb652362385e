"""Exact checkers and Monte Carlo experiments for the two density properties.

* s-almost-complete: for every ordered block pair (i, j) and every choice of
  x_i, y_i, x_j (half-vertex labels in Sigma = {0,1}^{log(n)/2}) at most s
  values y_j give a non-edge between (x_i, y_i) and (x_j, y_j).
* (alpha, beta, R)-bounded common neighborhoods: every vertex set S with
  |S| <= R and every block i outside B(S) satisfy
  |N(S, i)| in [(1 - beta) alpha^|S| n, (1 + beta) alpha^|S| n].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .graph import BlockGraph, derive_seed, edge_present, log2_exact
from .stats import binomial_se, np_rng, rows_to_csv

DEFAULT_BUDGET = 10**8


@dataclass
class AlmostCompleteReport:
    s_star: int
    # (i, j, x_i, y_i, x_j, bad_count) for the worst tuple, None for k < 2
    witness: tuple | None


@dataclass
class BoundedCnReport:
    alpha: float
    beta: float
    R: int
    passed: bool
    coverage: str
    checked: int
    # (S as sorted global ids, block i, |N(S, i)|) when failing
    counterexample: tuple | None = None
    max_deviation: float = 0.0


def _half_bits(n: int) -> int:
    m = log2_exact(n)
    if m % 2:
        raise ValueError(f"log n must be even (n={n})")
    return m // 2


def min_almost_complete(G: BlockGraph) -> AlmostCompleteReport:
    """Smallest s for which ``G`` is s-almost-complete, with a worst tuple."""
    h = _half_bits(G.n)
    sq = 1 << h
    full = G.to_adjacency()
    best, witness = 0, None
    for i in range(G.k):
        for j in range(G.k):
            if i == j:
                continue
            A = full[i * G.n:(i + 1) * G.n, j * G.n:(j + 1) * G.n]
            # rows: u = (x_i, y_i); columns grouped by x_j, summed over y_j
            bad = (~A).reshape(G.n, sq, sq).sum(axis=2)
            flat = int(bad.argmax())
            u, xj = divmod(flat, sq)
            if witness is None or bad.flat[flat] > best:
                best = int(bad.flat[flat])
                witness = (i, j, u >> h, u & (sq - 1), xj, best)
    return AlmostCompleteReport(best, witness)


def is_almost_complete(G: BlockGraph, s: float) -> bool:
    return min_almost_complete(G).s_star <= s


def almost_complete_threshold(n: int, k: int, p: float) -> float:
    """max(2 sqrt(n)(1 - p), 9 e^2 ln(kn)), natural logarithm."""
    return max(2 * math.sqrt(n) * (1 - p), 9 * math.e ** 2 * math.log(k * n))


def exhaustive_cost(G: BlockGraph, R: int) -> int:
    N = G.num_vertices
    return sum(math.comb(N, r) for r in range(0, R + 1)) * G.k


def _in_interval(size: int, alpha: float, beta: float, r: int, n: int) -> bool:
    target = alpha ** r * n
    tol = 1e-9 * max(1.0, target)
    return (1 - beta) * target - tol <= size <= (1 + beta) * target + tol


def _deviation(size: int, alpha: float, r: int, n: int) -> float:
    target = alpha ** r * n
    if target == 0:
        return 0.0 if size == 0 else math.inf
    return abs(size / target - 1)


def check_bounded_cn(G: BlockGraph, alpha: float, beta: float, R: int,
                     mode: str = "auto", trials: int = 1000, seed: int | None = None,
                     budget: int = DEFAULT_BUDGET,
                     distinct_blocks: bool = True) -> BoundedCnReport:
    """Test the (alpha, beta, R)-bounded common neighborhood property.

    ``mode`` is ``"exhaustive"``, ``"sampled"`` or ``"auto"`` (exhaustive when
    the enumeration fits in ``budget`` elementary checks).  Sampled mode draws
    a uniform block subset and then a uniform vertex per block; with
    ``distinct_blocks=False`` it instead draws S uniformly among vertex sets
    avoiding the tested block.
    """
    if mode == "auto":
        mode = "exhaustive" if exhaustive_cost(G, R) <= budget else "sampled"
    if mode == "exhaustive":
        if exhaustive_cost(G, R) > budget:
            raise ValueError(f"exhaustive check needs {exhaustive_cost(G, R)} > {budget} checks")
        return _bcn_exhaustive(G, alpha, beta, R)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if seed is None:
        raise ValueError("sampled mode needs an explicit seed")
    return _bcn_sampled(G, alpha, beta, R, trials, seed, distinct_blocks)


def _bcn_exhaustive(G, alpha, beta, R) -> BoundedCnReport:
    n, k = G.n, G.k
    full = G.to_adjacency()
    N = n * k
    report = BoundedCnReport(alpha, beta, R, True, "exhaustive", 0)
    for r in range(0, min(R, N) + 1):
        for S in combinations(range(N), r):
            common = np.logical_and.reduce(full[list(S)], axis=0) if S else np.ones(N, bool)
            sizes = common.reshape(k, n).sum(axis=1)
            touched = {g // n for g in S}
            for i in range(k):
                if i in touched:
                    continue
                report.checked += 1
                size = int(sizes[i])
                report.max_deviation = max(report.max_deviation, _deviation(size, alpha, r, n))
                if not _in_interval(size, alpha, beta, r, n):
                    report.passed = False
                    report.counterexample = (tuple(S), i, size)
                    return report
    return report


def _sample_set(rng, n, k, R, distinct_blocks):
    if distinct_blocks:
        rmax = min(R, k - 1)
        r = int(rng.integers(0, rmax + 1)) if rmax >= 1 else 0
        blocks = rng.permutation(k)
        S_blocks, i = blocks[:r], int(blocks[r])
        S = sorted(int(b) * n + int(rng.integers(n)) for b in S_blocks)
    else:
        i = int(rng.integers(k))
        others = (k - 1) * n
        r = int(rng.integers(0, min(R, others) + 1))
        picks = rng.choice(others, size=r, replace=False)
        S = sorted(int(g) if g < i * n else int(g) + n for g in picks)
    return S, i


def _bcn_sampled(G, alpha, beta, R, trials, seed, distinct_blocks) -> BoundedCnReport:
    rng = np_rng(seed, 0xBC)
    report = BoundedCnReport(alpha, beta, R, True, f"sampled({trials})", 0)
    for _ in range(trials):
        S, i = _sample_set(rng, G.n, G.k, R, distinct_blocks)
        size = int(G.common_neighborhood_mask(S, i).sum())
        report.checked += 1
        report.max_deviation = max(report.max_deviation, _deviation(size, alpha, len(S), G.n))
        if report.passed and not _in_interval(size, alpha, beta, len(S), G.n):
            report.passed = False
            report.counterexample = (tuple(S), i, size)
    return report


def measure_beta(G: BlockGraph, alpha: float, R: int, trials: int, seed: int,
                 distinct_blocks: bool = False) -> float:
    """Largest observed relative deviation of |N(S, i)| from alpha^|S| n."""
    return check_bounded_cn(G, alpha, math.inf, R, mode="sampled", trials=trials,
                            seed=seed, distinct_blocks=distinct_blocks).max_deviation


@dataclass
class ACExperiment:
    n: int
    k: int
    p: float
    graphs: int
    tuples_per_graph: int
    seed: int
    threshold: float
    counts: np.ndarray
    # rows: (graph, i, j, x_i, y_i, x_j)
    tuples: np.ndarray
    log_threshold: float = field(default=0.0)

    @property
    def trials(self) -> int:
        return int(self.counts.size)

    @property
    def empirical(self) -> float:
        return float((self.counts >= self.threshold).mean()) if self.counts.size else 0.0

    @property
    def reference(self) -> float:
        """Chernoff tail exp(-sqrt(n)(1 - p) / 3) for a single tuple."""
        return math.exp(-math.sqrt(self.n) * (1 - self.p) / 3)

    @property
    def sigma(self) -> float:
        return binomial_se(self.reference, self.trials)

    def within_reference(self, sigmas: float = 3.0) -> bool:
        return self.empirical <= self.reference + sigmas * self.sigma

    def summary_row(self) -> dict:
        return {"experiment_id": "almost-complete-tail", "n": self.n, "k": self.k,
                "p": self.p, "threshold": self.threshold,
                "log_threshold_natural": self.log_threshold,
                "empirical_value": self.empirical, "reference_bound": self.reference,
                "trials": self.trials, "seed": self.seed}

    def to_csv(self, per_tuple: bool = False) -> str:
        rows = [self.summary_row()]
        text = rows_to_csv(rows)
        if per_tuple:
            tup = [{"graph": int(g), "i": int(i), "j": int(j), "x_i": int(a), "y_i": int(b),
                    "x_j": int(c), "bad_count": int(cnt)}
                   for (g, i, j, a, b, c), cnt in zip(self.tuples.tolist(), self.counts.tolist())]
            text += "\n" + rows_to_csv(tup)
        return text


def bad_counts(n: int, p: float, graph_seed: int, tuples: np.ndarray) -> np.ndarray:
    """Non-edge counts over y_j for tuples (i, j, x_i, y_i, x_j) of a hashed graph."""
    h = _half_bits(n)
    sq = 1 << h
    i, j, xi, yi, xj = (tuples[:, c].astype(np.uint64) for c in range(5))
    u = i * np.uint64(n) + (xi << np.uint64(h)) + yi
    yj = np.arange(sq, dtype=np.uint64)[None, :]
    v = (j * np.uint64(n) + (xj << np.uint64(h)))[:, None] + yj
    present = edge_present(graph_seed, p, u[:, None], v)
    return sq - present.sum(axis=1)


def concentration_experiment_ac(n: int, p: float, k: int, graphs: int,
                                tuples_per_graph: int, seed: int) -> ACExperiment:
    """Tail frequency of the per-tuple non-edge count against 2 sqrt(n)(1 - p).

    Graph ``g`` is G(n, p, k) sampled with seed ``derive_seed(seed, g)``;
    edges are evaluated lazily so the graphs are never materialized.
    """
    if k < 2:
        raise ValueError("need at least two blocks")
    h = _half_bits(n)
    sq = 1 << h
    all_counts, all_tuples = [], []
    for g in range(graphs):
        rng = np_rng(seed, g, 0xAC)
        i = rng.integers(k, size=tuples_per_graph)
        j = (i + 1 + rng.integers(k - 1, size=tuples_per_graph)) % k
        rest = rng.integers(sq, size=(tuples_per_graph, 3))
        tup = np.column_stack([i, j, rest])
        all_counts.append(bad_counts(n, p, derive_seed(seed, g), tup))
        all_tuples.append(np.column_stack([np.full(tuples_per_graph, g), tup]))
    counts = np.concatenate(all_counts) if all_counts else np.zeros(0, dtype=np.int64)
    tuples = np.concatenate(all_tuples) if all_tuples else np.zeros((0, 6), dtype=np.int64)
    return ACExperiment(n, k, p, graphs, tuples_per_graph, seed,
                        2 * math.sqrt(n) * (1 - p), counts, tuples,
                        9 * math.e ** 2 * math.log(k * n))
