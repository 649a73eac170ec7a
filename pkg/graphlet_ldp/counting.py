"""
Exact Subgraph Counting

Three independent exact counting paths for non-induced copies of a
pattern in a graph:

- tuple_count_W: brute force over all ordered k-tuples of distinct nodes.
- exact_count: backtracking over injective maps, divided by A(G).
- subset_count: vectorized sum over k-subsets and automorphism-coset
  representatives; the same engine evaluates the private estimator.
"""

import logging
import math
from functools import lru_cache, partial
from itertools import chain, combinations, islice, permutations
from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from .graph import Edge, Graph
from .patterns import GraphletPattern
from .workers import run_tasks

logger = logging.getLogger(__name__)

# Non-negative Python int; unbounded precision.
ExactCount = int

DEFAULT_CHUNK_SIZE = 65536
MAX_BRUTE_TUPLES = 5_000_000
MAX_SUBSET_WORK = 200_000_000
MAX_SEARCH_WORK = 200_000_000


class InfeasibleScaleError(ValueError):
    """Raised when a computation exceeds its configured work budget."""


# ==================== SUBSET ENGINE ====================

@lru_cache(maxsize=128)
def coset_representatives(pattern: GraphletPattern) -> Tuple[Tuple[int, ...], ...]:
    """
    One permutation per left coset of the automorphism group in S_k.

    Ordering a k-subset S as (S[p[0]], ..., S[p[k-1]]) gives the same
    pattern-edge image for p and p∘pi when pi is an automorphism, so the
    k!/A(G) representatives cover every distinct product exactly once.
    """
    k = pattern.k
    seen = set()
    representatives = []
    for perm in permutations(range(k)):
        if perm in seen:
            continue
        representatives.append(perm)
        for auto in pattern.automorphisms:
            seen.add(tuple(perm[auto[i]] for i in range(k)))
    return tuple(representatives)


def subset_work(n: int, pattern: GraphletPattern) -> int:
    """Number of (subset, representative) products the engine evaluates."""
    if pattern.k > n:
        return 0
    return math.comb(n, pattern.k) * len(coset_representatives(pattern))


def check_subset_work(n: int, pattern: GraphletPattern, budget: int = MAX_SUBSET_WORK) -> None:
    """
    Raises:
        InfeasibleScaleError: If the engine would exceed budget products.
    """
    work = subset_work(n, pattern)
    if work > budget:
        raise InfeasibleScaleError(
            f"{pattern.name} on n={n} needs {work:,} products (budget {budget:,})"
        )


def subset_chunks(n: int, k: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[np.ndarray]:
    """Yield all k-subsets of range(n) in lexicographic order, chunk_size rows at a time."""
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")
    combos = combinations(range(n), k)
    while True:
        flat = np.fromiter(chain.from_iterable(islice(combos, chunk_size)), dtype=np.int64)
        if flat.size == 0:
            return
        yield flat.reshape(-1, k)


def _chunk_sum(
    matrix: np.ndarray,
    representatives: Sequence[Tuple[int, ...]],
    edges: Sequence[Edge],
    subsets: np.ndarray
):
    total = matrix.dtype.type(0)
    for rep in representatives:
        a, b = edges[0]
        product = matrix[subsets[:, rep[a]], subsets[:, rep[b]]]
        for a, b in edges[1:]:
            product = product * matrix[subsets[:, rep[a]], subsets[:, rep[b]]]
        total += product.sum()
    return total


def subset_partials(
    matrix: np.ndarray,
    pattern: GraphletPattern,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1
) -> List:
    """
    Per-chunk sums of pattern-edge products over k-subsets of the rows of a
    symmetric matrix, in chunk order.

    The sum of the partials equals the sum over all ordered k-tuples of
    distinct nodes divided by A(G).
    """
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError(f"Expected a square matrix, got shape {matrix.shape}")
    handler = partial(_chunk_sum, matrix, coset_representatives(pattern), pattern.edge_list)
    return run_tasks(subset_chunks(n, pattern.k, chunk_size), handler, workers=workers)


def subset_count(
    graph: Graph,
    pattern: GraphletPattern,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
    budget: int = MAX_SUBSET_WORK
) -> ExactCount:
    """
    Exact copy count via the vectorized subset engine.

    Raises:
        InfeasibleScaleError: If the work exceeds budget.
    """
    if pattern.k > graph.n:
        return 0
    check_subset_work(graph.n, pattern, budget)
    matrix = graph.adjacency_matrix().astype(np.int64)
    partials = subset_partials(matrix, pattern, chunk_size, workers)
    return sum(int(p) for p in partials)


# ==================== BACKTRACKING ORACLE ====================

def _search_order(pattern: GraphletPattern) -> Tuple[List[int], List[List[int]]]:
    """
    Placement order of pattern vertices (most constrained first) and, for
    each position, the earlier vertices adjacent to it.
    """
    adjacency = {u: set() for u in range(pattern.k)}
    for i, j in pattern.edges:
        adjacency[i].add(j)
        adjacency[j].add(i)

    order: List[int] = []
    remaining = set(range(pattern.k))
    while remaining:
        placed = set(order)
        nxt = max(remaining, key=lambda u: (len(adjacency[u] & placed), len(adjacency[u]), -u))
        order.append(nxt)
        remaining.remove(nxt)

    anchors = [[w for w in order[:depth] if w in adjacency[u]] for depth, u in enumerate(order)]
    return order, anchors


def injective_maps(graph: Graph, pattern: GraphletPattern) -> Iterator[Tuple[int, ...]]:
    """
    Yield every injective map f from pattern nodes to graph nodes that sends
    each pattern edge to a graph edge, as the tuple (f(0), ..., f(k-1)).
    """
    k, n = pattern.k, graph.n
    if k > n:
        return
    order, anchors = _search_order(pattern)
    neighbors = [graph.neighbors(v) for v in range(n)]
    assignment = [-1] * k
    used = set()

    def extend(depth: int) -> Iterator[Tuple[int, ...]]:
        if depth == k:
            yield tuple(assignment)
            return
        u = order[depth]
        if anchors[depth]:
            candidates: Iterable[int] = frozenset.intersection(
                *(neighbors[assignment[w]] for w in anchors[depth])
            )
        else:
            candidates = range(n)
        for v in candidates:
            if v in used:
                continue
            assignment[u] = v
            used.add(v)
            yield from extend(depth + 1)
            used.discard(v)
        assignment[u] = -1

    yield from extend(0)


def search_work(graph: Graph, pattern: GraphletPattern) -> int:
    """
    Upper bound on the leaves of the backtracking search: an anchored
    position has at most max-degree candidates, a free one n - depth.
    """
    k, n = pattern.k, graph.n
    if k > n:
        return 0
    _, anchors = _search_order(pattern)
    max_degree = max(graph.degrees(), default=0)
    return math.prod(
        min(max_degree, n - depth) if anchors[depth] else n - depth
        for depth in range(k)
    )


def check_search_work(graph: Graph, pattern: GraphletPattern, budget: int = MAX_SEARCH_WORK) -> None:
    """
    Raises:
        InfeasibleScaleError: If the search bound exceeds budget.
    """
    work = search_work(graph, pattern)
    if work > budget:
        raise InfeasibleScaleError(
            f"{pattern.name} on n={graph.n} may visit {work:,} partial maps (budget {budget:,})"
        )


def exact_count(graph: Graph, pattern: GraphletPattern, budget: int = MAX_SEARCH_WORK) -> ExactCount:
    """
    Number of non-induced copies of pattern in graph: injective edge-preserving
    maps divided by A(G). Returns 0 when pattern.k > graph.n.

    Raises:
        InfeasibleScaleError: If the search bound exceeds budget.
    """
    check_search_work(graph, pattern, budget)
    maps = sum(1 for _ in injective_maps(graph, pattern))
    copies, remainder = divmod(maps, pattern.automorphism_count)
    assert remainder == 0, "map count must be a multiple of A(G)"
    return copies


def tuple_count_W(graph: Graph, pattern: GraphletPattern) -> ExactCount:
    """
    W(G, pattern): ordered k-tuples of distinct nodes carrying every pattern
    edge, by exhaustive enumeration of all n!/(n-k)! tuples.

    Raises:
        InfeasibleScaleError: If there are more than MAX_BRUTE_TUPLES tuples.
    """
    k, n = pattern.k, graph.n
    if k > n:
        return 0
    tuples = math.perm(n, k)
    if tuples > MAX_BRUTE_TUPLES:
        raise InfeasibleScaleError(f"{tuples:,} tuples exceed the brute-force budget")
    neighbors = [graph.neighbors(v) for v in range(n)]
    edges = pattern.edge_list
    return sum(
        1 for t in permutations(range(n), k)
        if all(t[b] in neighbors[t[a]] for a, b in edges)
    )


def count_copies_containing(
    graph: Graph,
    pattern: GraphletPattern,
    required_edges: Iterable[Edge],
    budget: int = MAX_SEARCH_WORK
) -> ExactCount:
    """Copies of pattern whose edge image contains every edge in required_edges."""
    check_search_work(graph, pattern, budget)
    required = frozenset((min(i, j), max(i, j)) for i, j in required_edges)
    edges = pattern.edge_list
    hits = 0
    for f in injective_maps(graph, pattern):
        image = {(min(f[a], f[b]), max(f[a], f[b])) for a, b in edges}
        if required <= image:
            hits += 1
    return hits // pattern.automorphism_count
