"""
Lower-Bound Gadgets

Graph families used in the error lower bounds, with oracle-backed checks
of their counting identities:

- the tripartite triangle gadget and its k-clique generalization, whose
  k-clique count is the triangle count times (n/3)^(k-3);
- the cycle gadget G^x: K_n minus the perfect matching {2i, 2i+1}, with
  matching edge i restored when x_i = 1.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .counting import InfeasibleScaleError, count_copies_containing, exact_count
from .graph import Edge, Graph, build_graph, pair_count, pair_index
from .patterns import preset_pattern

logger = logging.getLogger(__name__)

MAX_LEMMA_K = 5
MAX_LEMMA_N = 9
MAX_CYCLE_N = 10
MAX_CYCLE_K = 5

Bits = Tuple[int, ...]


def _bits(name: str, values: Sequence[int], length: int) -> Bits:
    bits = tuple(int(v) for v in values)
    if len(bits) != length:
        raise ValueError(f"{name} must have length {length}, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"{name} must contain only 0/1 entries")
    return bits


@dataclass(frozen=True)
class CliqueGadgetSpec:
    """
    Inputs of the clique gadget.

    Attributes:
        k: Clique size (>= 3); k = 3 is the triangle gadget.
        n: Base size, divisible by 3.
        mu: Bits for the U side, length n/3.
        upsilon: Bits for the Y side, length n/3.
        X: (n/3) x (n/3) bit matrix of U-Y edges.
    """
    k: int
    n: int
    mu: Bits
    upsilon: Bits
    X: Tuple[Bits, ...]

    def __post_init__(self):
        if self.k < 3:
            raise ValueError(f"Clique gadget needs k >= 3, got {self.k}")
        if self.n <= 0 or self.n % 3:
            raise ValueError(f"Gadget base size must be a positive multiple of 3, got {self.n}")
        m = self.n // 3
        object.__setattr__(self, 'mu', _bits("mu", self.mu, m))
        object.__setattr__(self, 'upsilon', _bits("upsilon", self.upsilon, m))
        if len(self.X) != m:
            raise ValueError(f"X must have {m} rows, got {len(self.X)}")
        object.__setattr__(self, 'X', tuple(_bits(f"X[{i}]", row, m) for i, row in enumerate(self.X)))

    @property
    def block_size(self) -> int:
        return self.n // 3

    @property
    def node_count(self) -> int:
        """k * n / 3."""
        return self.k * self.block_size

    def u(self, i: int) -> int:
        return i

    def y(self, j: int) -> int:
        return self.block_size + j

    def w(self, p: int, j: int) -> int:
        """Node w_{p,j}, with p in [0, k-2) (0-based block index)."""
        return (2 + p) * self.block_size + j

    @classmethod
    def random(cls, k: int, n: int, seed: int) -> 'CliqueGadgetSpec':
        """Spec with independent uniform bits."""
        rng = np.random.default_rng(seed)
        m = n // 3
        return cls(
            k, n,
            tuple(rng.integers(0, 2, m).tolist()),
            tuple(rng.integers(0, 2, m).tolist()),
            tuple(tuple(row) for row in rng.integers(0, 2, (m, m)).tolist()),
        )


def _clique_gadget(spec: CliqueGadgetSpec) -> Graph:
    m = spec.block_size
    w_nodes = [spec.w(p, j) for p in range(spec.k - 2) for j in range(m)]
    edges: List[Edge] = []
    for i in range(m):
        for j in range(m):
            if spec.X[i][j]:
                edges.append((spec.u(i), spec.y(j)))
        if spec.mu[i]:
            edges.extend((spec.u(i), w) for w in w_nodes)
        if spec.upsilon[i]:
            edges.extend((spec.y(i), w) for w in w_nodes)
    for p in range(spec.k - 2):
        for q in range(p + 1, spec.k - 2):
            edges.extend((spec.w(p, i), spec.w(q, j)) for i in range(m) for j in range(m))
    return build_graph(spec.node_count, edges)


def build_triangle_gadget(n: int, mu: Sequence[int], upsilon: Sequence[int], X: Sequence[Sequence[int]]) -> Graph:
    """
    Tripartite gadget on U = [0, n/3), Y = [n/3, 2n/3), W = [2n/3, n):
    u_i-y_j iff X[i][j], u_i-all of W iff mu_i, y_i-all of W iff upsilon_i.

    Raises:
        ValueError: On dimension mismatch.
    """
    return _clique_gadget(CliqueGadgetSpec(3, n, tuple(mu), tuple(upsilon), tuple(map(tuple, X))))


def build_clique_gadget(k: int, n: int, mu: Sequence[int], upsilon: Sequence[int], X: Sequence[Sequence[int]]) -> Graph:
    """
    Clique gadget on k*n/3 nodes: blocks U, Y, W_1..W_{k-2} of size n/3,
    the triangle-gadget rules with W replaced by every W_p, and complete
    bipartite edges between distinct W blocks.

    Raises:
        ValueError: On dimension mismatch or k < 3.
    """
    return _clique_gadget(CliqueGadgetSpec(k, n, tuple(mu), tuple(upsilon), tuple(map(tuple, X))))


@dataclass(frozen=True)
class CliqueLemmaResult:
    holds: bool
    clique_count: int
    triangle_count: int
    multiplier: int

    @property
    def expected(self) -> int:
        """Triangle count times (n/3)^(k-3)."""
        return self.triangle_count * self.multiplier


def clique_lemma_check(k: int, n: int, mu: Sequence[int], upsilon: Sequence[int], X: Sequence[Sequence[int]]) -> CliqueLemmaResult:
    """
    Compare K_k(clique gadget) with K_3(triangle gadget) * (n/3)^(k-3) by
    exact counting.

    Raises:
        InfeasibleScaleError: If k > 5 or n > 9.
    """
    if k > MAX_LEMMA_K or n > MAX_LEMMA_N:
        raise InfeasibleScaleError(
            f"clique lemma check is limited to k <= {MAX_LEMMA_K}, n <= {MAX_LEMMA_N}"
        )
    cliques = exact_count(build_clique_gadget(k, n, mu, upsilon, X), preset_pattern("clique", k))
    triangles = exact_count(build_triangle_gadget(n, mu, upsilon, X), preset_pattern("triangle"))
    multiplier = (n // 3) ** (k - 3)
    result = CliqueLemmaResult(cliques == triangles * multiplier, cliques, triangles, multiplier)
    if not result.holds:
        logger.warning("Clique identity failed for k=%d n=%d: %d != %d",
                       k, n, cliques, result.expected)
    return result


# ==================== CYCLE GADGET ====================

def matching_pair(i: int) -> Edge:
    """The i-th matching pair (2i, 2i+1)."""
    return (2 * i, 2 * i + 1)


def build_cycle_gadget(n: int, x: Sequence[int]) -> Graph:
    """
    K_n minus the matching {(2i, 2i+1)}, with pair i restored iff x_i = 1.

    Raises:
        ValueError: On odd n or len(x) != n/2.
    """
    if n % 2:
        raise ValueError(f"Cycle gadget needs an even node count, got {n}")
    bits = _bits("x", x, n // 2)
    pair_bits = np.ones(pair_count(n), dtype=bool)
    for i, present in enumerate(bits):
        if not present:
            pair_bits[pair_index(n, *matching_pair(i))] = False
    return Graph.from_pair_bits(n, pair_bits)


def cycle_gadget_x(n: int, popcount: int, rng: np.random.Generator) -> Bits:
    """Uniformly random x of length n/2 with the given popcount."""
    half = n // 2
    if not 0 <= popcount <= half:
        raise ValueError(f"popcount must be in [0, {half}], got {popcount}")
    x = np.zeros(half, dtype=int)
    x[rng.choice(half, size=popcount, replace=False)] = 1
    return tuple(x.tolist())


@dataclass
class CycleStructureReport:
    """
    Outcome of cycle_structure_check.

    Attributes:
        c_zero: C_k(G^0).
        c_p: p -> number of k-cycles using exactly the first p matching edges.
        rows: (|x|, direct count, closed form, count for a random x of that popcount).
        lemma_pairs: Number of (x, x') pairs checked against the difference bound.
        lemma_violations: Pairs where the bound failed.
    """
    n: int
    k: int
    c_zero: int
    c_p: Dict[int, int] = field(default_factory=dict)
    rows: List[Tuple[int, int, int, int]] = field(default_factory=list)
    lemma_pairs: int = 0
    lemma_violations: int = 0

    @property
    def closed_form_holds(self) -> bool:
        return all(direct == formula for _, direct, formula, _ in self.rows)

    @property
    def popcount_invariant(self) -> bool:
        return all(direct == shuffled for _, direct, _, shuffled in self.rows)

    @property
    def lemma_holds(self) -> bool:
        return self.lemma_violations == 0

    @property
    def holds(self) -> bool:
        return self.closed_form_holds and self.popcount_invariant and self.lemma_holds

    def closed_form(self, popcount: int) -> int:
        """C_k(G^0) + sum_{p>=1} C(|x|, p) * c_p."""
        return self.c_zero + sum(
            math.comb(popcount, p) * count for p, count in self.c_p.items() if p <= popcount
        )


def cycle_structure_check(n: int, k: int, pairs: int = 100, seed: int = 0) -> CycleStructureReport:
    """
    Verify, by exact counting, that C_k(G^x) depends only on |x| through the
    closed form C_k(G^0) + sum_p C(|x|, p) * c_p, and that
    C_k(G^x) - C_k(G^x') >= (|x| - |x'|) * c_1 on sampled pairs.

    c_p is counted on the gadget holding exactly p matching edges, as the
    k-cycles containing all of them.

    Raises:
        InfeasibleScaleError: If n > 10 or k > 5.
        ValueError: On odd n, k < 3 or k > n.
    """
    if n > MAX_CYCLE_N or k > MAX_CYCLE_K:
        raise InfeasibleScaleError(
            f"cycle structure check is limited to n <= {MAX_CYCLE_N}, k <= {MAX_CYCLE_K}"
        )
    if n % 2:
        raise ValueError(f"Cycle gadget needs an even node count, got {n}")
    if not 3 <= k <= n:
        raise ValueError(f"Need 3 <= k <= n, got k={k}, n={n}")

    pattern = preset_pattern("cycle", k)
    half = n // 2
    rng = np.random.default_rng(seed)
    cache: Dict[Bits, int] = {}

    def cycles(x: Bits) -> int:
        if x not in cache:
            cache[x] = exact_count(build_cycle_gadget(n, x), pattern)
        return cache[x]

    def prefix(ones: int) -> Bits:
        return tuple([1] * ones + [0] * (half - ones))

    report = CycleStructureReport(n, k, cycles(prefix(0)))
    for p in range(1, min(k // 2, half) + 1):
        required = [matching_pair(i) for i in range(p)]
        report.c_p[p] = count_copies_containing(build_cycle_gadget(n, prefix(p)), pattern, required)

    for ones in range(half + 1):
        shuffled = cycle_gadget_x(n, ones, rng)
        report.rows.append((ones, cycles(prefix(ones)), report.closed_form(ones), cycles(shuffled)))

    c_one = report.c_p.get(1, 0)
    for _ in range(pairs):
        x = tuple(rng.integers(0, 2, half).tolist())
        x_prime = tuple(rng.integers(0, 2, half).tolist())
        if sum(x) < sum(x_prime):
            x, x_prime = x_prime, x
        report.lemma_pairs += 1
        if cycles(x) - cycles(x_prime) < (sum(x) - sum(x_prime)) * c_one:
            report.lemma_violations += 1

    logger.debug("cycle structure n=%d k=%d: c0=%d c_p=%s holds=%s",
                 n, k, report.c_zero, report.c_p, report.holds)
    return report
