"""Linear algebra over F2 for block-structured variables.

The variable ``x_{i,a}`` (block ``i``, bit ``a``, both 0-based, ``a = 0`` the
most significant bit of the block's vertex) has index ``t = i * m + a`` where
``m = log n``.  A linear form is a Python int whose bit ``t`` is the
coefficient of variable ``t``; an equation is a pair ``(mask, const)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .stats import binomial_se, np_rng


class InconsistentSystem(ValueError):
    pass


def parity(x: int) -> int:
    return x.bit_count() & 1


def block_mask(block: int, m: int) -> int:
    return ((1 << m) - 1) << (block * m)


def blocks_mask(blocks: Iterable[int], m: int) -> int:
    out = 0
    for b in blocks:
        out |= block_mask(b, m)
    return out


def blocks_of(mask: int, m: int) -> set[int]:
    out = set()
    while mask:
        t = (mask & -mask).bit_length() - 1
        b = t // m
        out.add(b)
        mask &= ~block_mask(b, m)
    return out


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def vertices_to_mask(vertices: Sequence[int | None], m: int) -> int:
    """Assignment mask selecting ``vertices[i]`` in block ``i`` (None leaves it 0)."""
    x = 0
    for i, v in enumerate(vertices):
        if v is None:
            continue
        for a in range(m):
            if (v >> (m - 1 - a)) & 1:
                x |= 1 << (i * m + a)
    return x


def mask_to_vertex(x: int, block: int, m: int) -> int:
    v = 0
    for a in range(m):
        v = (v << 1) | ((x >> (block * m + a)) & 1)
    return v


def reduce_basis(rows: Iterable[tuple[int, int]]) -> dict[int, tuple[int, int]]:
    """Fully reduced echelon basis keyed by pivot (lowest set bit).

    Raises InconsistentSystem when the rows imply ``0 = 1``.
    """
    basis: dict[int, tuple[int, int]] = {}
    for mask, c in rows:
        mask, c = _reduce(basis, mask, c & 1)
        if mask == 0:
            if c:
                raise InconsistentSystem("system implies 0 = 1")
            continue
        piv = mask & -mask
        for p, (bm, bc) in list(basis.items()):
            if bm & piv:
                basis[p] = (bm ^ mask, bc ^ c)
        basis[piv] = (mask, c)
    return basis


def _reduce(basis, mask, c):
    for piv, (bm, bc) in basis.items():
        if mask & piv:
            mask ^= bm
            c ^= bc
    return mask, c


def form_rank(forms: Iterable[int]) -> int:
    return len(reduce_basis((f, 0) for f in forms))


def independent_subset(forms: Sequence[int]) -> list[int]:
    """A basis of span(forms) made of forms from the input, in input order."""
    basis: dict[int, tuple[int, int]] = {}
    out = []
    for f in forms:
        r, _ = _reduce(basis, f, 0)
        if r:
            out.append(f)
            basis = reduce_basis(list(basis.values()) + [(r, 0)])
    return out


@dataclass(frozen=True)
class LinearSystem:
    """Equations ``<mask, x> = const`` over ``k`` blocks of ``m`` bits."""

    k: int
    m: int
    rows: tuple[tuple[int, int], ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_rows(cls, k: int, m: int, rows) -> "LinearSystem":
        return cls(k, m, tuple((int(a), int(b) & 1) for a, b in rows))

    @property
    def num_vars(self) -> int:
        return self.k * self.m

    def forms(self) -> list[int]:
        return [r[0] for r in self.rows]

    def echelon(self) -> dict[int, tuple[int, int]]:
        if "basis" not in self._cache:
            self._cache["basis"] = reduce_basis(self.rows)
        return self._cache["basis"]

    def is_consistent(self) -> bool:
        try:
            self.echelon()
        except InconsistentSystem:
            return False
        return True

    def rank(self) -> int:
        return form_rank(self.forms())

    def solve(self) -> int:
        """One solution (free variables set to 0) as an assignment mask."""
        x = 0
        for piv, (mask, c) in self.echelon().items():
            if c:
                x |= piv
        return x

    def satisfied_by(self, x: int) -> bool:
        return all(parity(mask & x) == c for mask, c in self.rows)

    def reduce(self, mask: int, const: int = 0) -> tuple[int, int]:
        return _reduce(self.echelon(), mask, const)

    def implies(self, other: "LinearSystem") -> bool:
        """True iff every solution of ``self`` satisfies ``other`` (vacuous if inconsistent)."""
        if not self.is_consistent():
            return True
        return all(self.reduce(mask, c) == (0, 0) for mask, c in other.rows)

    def zero_blocks(self, blocks: Iterable[int]) -> "LinearSystem":
        keep = ~blocks_mask(blocks, self.m)
        return LinearSystem(self.k, self.m, tuple((mask & keep, c) for mask, c in self.rows))

    def restrict(self, rho: "AffineRestriction") -> "LinearSystem":
        return LinearSystem(self.k, self.m, tuple(rho.apply(mask, c) for mask, c in self.rows))

    def __add__(self, other: "LinearSystem") -> "LinearSystem":
        return LinearSystem(self.k, self.m, self.rows + other.rows)

    def to_text(self) -> str:
        n = self.num_vars
        return "".join(f"{''.join(str((mask >> t) & 1) for t in range(n))} {c}\n"
                       for mask, c in self.rows)

    @classmethod
    def from_text(cls, text: str, k: int, m: int) -> "LinearSystem":
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2 or len(parts[0]) != k * m or set(parts[0]) - {"0", "1"} \
                    or parts[1] not in ("0", "1"):
                raise ValueError(f"line {lineno}: expected {k * m} coefficient bits and a constant bit")
            mask = sum(1 << t for t, ch in enumerate(parts[0]) if ch == "1")
            rows.append((mask, int(parts[1])))
        return cls(k, m, tuple(rows))


@dataclass(frozen=True)
class AffineRestriction:
    """Block-respecting affine restriction.

    ``subst[t] = (mask, const)`` for every variable ``t`` of a non-free block,
    with ``mask`` over free-block variables only.
    """

    k: int
    m: int
    free: frozenset
    subst: dict

    def validate(self) -> None:
        free_vars = blocks_mask(self.free, self.m)
        for b in range(self.k):
            if b in self.free:
                continue
            for a in range(self.m):
                t = b * self.m + a
                if t not in self.subst:
                    raise ValueError(f"variable {t} of fixed block {b} has no value")
        for t, (mask, _) in self.subst.items():
            if t // self.m in self.free:
                raise ValueError(f"variable {t} lies in a free block")
            if mask & ~free_vars:
                raise ValueError(f"expression for {t} uses non-free variables")

    @property
    def fixed_blocks(self) -> set[int]:
        return set(range(self.k)) - set(self.free)

    def apply(self, mask: int, const: int = 0) -> tuple[int, int]:
        out, c = mask, const
        for t in bits_of(mask):
            if t in self.subst:
                sm, sc = self.subst[t]
                out ^= (1 << t) ^ sm
                c ^= sc
        return out, c

    def as_system(self) -> LinearSystem:
        return LinearSystem(self.k, self.m,
                            tuple(((1 << t) ^ sm, sc) for t, (sm, sc) in sorted(self.subst.items())))

    def complete(self, free_assignment: int) -> int:
        """Full assignment extending the free-block values in ``free_assignment``."""
        x = free_assignment & blocks_mask(self.free, self.m)
        for t, (sm, sc) in self.subst.items():
            if parity(sm & x) ^ sc:
                x |= 1 << t
        return x


# --- matroid intersection: block partition matroid x column matroid ---------

def _columns(forms: Sequence[int], num_vars: int) -> list[int]:
    cols = [0] * num_vars
    for r, f in enumerate(forms):
        for t in bits_of(f):
            cols[t] |= 1 << r
    return cols


def _circuit(basis_cols: dict[int, tuple[int, int]], col: int) -> int | None:
    """Bitmask over positions of I expressing ``col``; None if independent."""
    rep = 0
    for piv, (bm, tag) in basis_cols.items():
        if col & piv:
            col ^= bm
            rep ^= tag
    return None if col else rep


def _column_basis(cols: list[int]) -> dict[int, tuple[int, int]]:
    basis: dict[int, tuple[int, int]] = {}
    for pos, c in enumerate(cols):
        tag = 1 << pos
        for piv, (bm, bt) in basis.items():
            if c & piv:
                c ^= bm
                tag ^= bt
        if c == 0:
            raise AssertionError("current set is not independent")
        piv = c & -c
        for p, (bm, bt) in list(basis.items()):
            if bm & piv:
                basis[p] = (bm ^ c, bt ^ tag)
        basis[piv] = (c, tag)
    return basis


@dataclass
class IntersectionResult:
    size: int
    chosen: list[int]
    # used blocks whose columns cannot reach a free block: the deficiency witness
    certificate: set[int]


def max_transversal(forms: Sequence[int], k: int, m: int,
                    capacity: dict[int, int] | None = None) -> IntersectionResult:
    """Largest set of variables, at most ``capacity[b]`` (default 1) per block,
    whose coefficient columns are linearly independent."""
    cols = _columns(forms, k * m)
    elems = [t for t in range(k * m) if cols[t]]
    cap = {b: 1 for b in range(k)}
    if capacity:
        cap.update(capacity)
    I: list[int] = []
    while True:
        inI = set(I)
        used: dict[int, int] = {}
        for t in I:
            used[t // m] = used.get(t // m, 0) + 1
        basis = _column_basis([cols[t] for t in I])
        outside = [t for t in elems if t not in inI]
        circ = {x: _circuit(basis, cols[x]) for x in outside}
        sources = [x for x in outside if circ[x] is None]
        sinks = {x for x in outside if used.get(x // m, 0) < cap[x // m]}
        # x -> y (partition exchange), y -> x (column exchange)
        prev: dict[int, int | None] = {x: None for x in sources}
        queue = deque(sources)
        end = None
        while queue:
            u = queue.popleft()
            if u not in inI:
                if u in sinks:
                    end = u
                    break
                for y in I:
                    if y not in prev and y // m == u // m:
                        prev[y] = u
                        queue.append(y)
            else:
                pos = I.index(u)
                for x in outside:
                    if x not in prev and (circ[x] is None or (circ[x] >> pos) & 1):
                        prev[x] = u
                        queue.append(x)
        if end is None:
            break
        path = []
        while end is not None:
            path.append(end)
            end = prev[end]
        new = inI.symmetric_difference(path)
        I = sorted(new)
    reach = _reach_sinks(I, elems, cols, cap, m)
    cert = {t // m for t in I if t not in reach}
    return IntersectionResult(len(I), I, cert)


def _reach_sinks(I, elems, cols, cap, m) -> set[int]:
    """Elements of the exchange graph that can reach a sink."""
    inI = set(I)
    used: dict[int, int] = {}
    for t in I:
        used[t // m] = used.get(t // m, 0) + 1
    basis = _column_basis([cols[t] for t in I])
    outside = [t for t in elems if t not in inI]
    circ = {x: _circuit(basis, cols[x]) for x in outside}
    reach = {x for x in outside if used.get(x // m, 0) < cap[x // m]}
    queue = deque(reach)
    while queue:
        u = queue.popleft()
        if u in inI:
            # predecessors of y in I are outside elements x in y's block
            for x in outside:
                if x not in reach and x // m == u // m:
                    reach.add(x)
                    queue.append(x)
        else:
            # predecessors of x outside are y in I with I - y + x independent
            for pos, y in enumerate(I):
                if y not in reach and (circ[u] is None or (circ[u] >> pos) & 1):
                    reach.add(y)
                    queue.append(y)
    return reach


def is_safe(forms: Sequence[int], k: int, m: int) -> bool:
    """Whether span(forms) admits rank-many block-distinct independent columns."""
    basis = independent_subset(list(forms))
    return max_transversal(basis, k, m).size == len(basis)


def safe_transversal(forms: Sequence[int], k: int, m: int) -> list[int] | None:
    """Block-distinct variables with independent columns for a basis of ``forms``."""
    basis = independent_subset(list(forms))
    res = max_transversal(basis, k, m)
    return res.chosen if res.size == len(basis) else None


def closure(forms: Sequence[int], k: int, m: int) -> frozenset:
    """Minimal block set S such that zeroing the blocks of S leaves a safe system.

    The minimizers of |T| + rank(columns outside T) form a lattice and the
    closure is its least element.  The augmenting-path certificate gives one
    minimizer; a block of it belongs to the closure exactly when forbidding
    that block from T (uncapping it in the partition matroid) raises the
    optimum.
    """
    basis = independent_subset(list(forms))
    r = len(basis)
    res = max_transversal(basis, k, m)
    if res.size == r:
        return frozenset()
    out = set()
    for b in sorted(res.certificate):
        if max_transversal(basis, k, m, {b: m}).size > res.size:
            out.add(b)
    return frozenset(out)


# --- rank versus satisfaction probability ----------------------------------

@dataclass
class RankProbResult:
    rank: int
    trials: int
    empirical: float
    bound: float
    sigma: float

    @property
    def passed(self) -> bool:
        return self.empirical <= self.bound + 3 * self.sigma + 1e-12


def rank_probability_experiment(system: LinearSystem, allowed: Sequence[Sequence[int]],
                                trials: int, seed: int) -> RankProbResult:
    """Frequency with which x_i ~ allowed[i] (independent, uniform) satisfies ``system``."""
    k, m = system.k, system.m
    n = 1 << m
    if len(allowed) != k:
        raise ValueError(f"need {k} allowed sets")
    for i, A in enumerate(allowed):
        if 3 * len(set(A)) < 2 * n:
            raise ValueError(f"|A_{i}| = {len(set(A))} < 2n/3")
    rng = np_rng(seed, 0x5A)
    bits = np.zeros((trials, k * m), dtype=np.uint8)
    for i, A in enumerate(allowed):
        A = np.array(sorted(set(A)), dtype=np.int64)
        v = A[rng.integers(len(A), size=trials)]
        for a in range(m):
            bits[:, i * m + a] = (v >> (m - 1 - a)) & 1
    r = system.rank()
    if system.rows:
        M = np.array([[(mask >> t) & 1 for t in range(k * m)] for mask, _ in system.rows],
                     dtype=np.int64)
        c = np.array([cc for _, cc in system.rows], dtype=np.int64)
        ok = ((bits.astype(np.int64) @ M.T) % 2 == c).all(axis=1)
        emp = float(ok.mean())
    else:
        emp = 1.0
    bound = 0.75 ** r
    return RankProbResult(r, trials, emp, bound, binomial_se(bound, trials))


def random_system(k: int, m: int, rows: int, rng, rank: int | None = None) -> LinearSystem:
    """Random consistent system; with ``rank`` given, exactly that rank."""
    while True:
        forms = [int(rng.integers(1 << 62)) & ((1 << (k * m)) - 1) if k * m <= 62
                 else int.from_bytes(rng.bytes((k * m + 7) // 8), "little") & ((1 << (k * m)) - 1)
                 for _ in range(rows)]
        if rank is None or form_rank(forms) == rank:
            break
    x = int.from_bytes(rng.bytes((k * m + 7) // 8), "little") & ((1 << (k * m)) - 1)
    return LinearSystem(k, m, tuple((f, parity(f & x)) for f in forms))
