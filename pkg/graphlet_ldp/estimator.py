"""
Graphlet Count Estimators

The unbiased estimator (randomized response, debiasing, then a sum of products of
debiased entries over all ordered k-tuples divided by A(G)) and the
classical randomized-response baseline that counts copies in the noisy
graph directly.
"""

import logging
import math
import time
from dataclasses import dataclass, asdict
from itertools import permutations
from typing import Optional

import numpy as np

from .channel import NoisyAdjacency, PrivacyBudget, UnbiasedAdjacency, debias, obfuscate
from .counting import (
    DEFAULT_CHUNK_SIZE,
    MAX_BRUTE_TUPLES,
    MAX_SUBSET_WORK,
    InfeasibleScaleError,
    check_subset_work,
    subset_count,
    subset_partials,
)
from .graph import Graph
from .patterns import GraphletPattern

logger = logging.getLogger(__name__)

ALGORITHM1 = "algorithm1"
RR_BASELINE = "rr_baseline"
ESTIMATORS = (ALGORITHM1, RR_BASELINE)


@dataclass(frozen=True)
class Estimate:
    """
    One estimator run.

    Attributes:
        value: Estimated copy count; may be negative for algorithm1.
        pattern: Pattern name.
        n: Node count of the input.
        epsilon: Privacy budget (inf for the noiseless channel).
        master_seed: Seed of the randomized response, if any.
        elapsed_seconds: Wall time of the call.
        estimator: "algorithm1" or "rr_baseline".
    """
    value: float
    pattern: str
    n: int
    epsilon: float
    master_seed: Optional[int]
    elapsed_seconds: float
    estimator: str = ALGORITHM1

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"Estimate must be finite, got {self.value}")

    def clamped(self) -> float:
        """Value floored at zero, for display only."""
        return max(0.0, self.value)

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_from_unbiased(
    unbiased: UnbiasedAdjacency,
    pattern: GraphletPattern,
    master_seed: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
    budget: int = MAX_SUBSET_WORK
) -> Estimate:
    """
    Sum over ordered k-tuples of distinct nodes of the product of a_hat over
    pattern edges, divided by A(G).

    k-subsets are enumerated once; within a subset the orderings related by
    an automorphism share one product, so each coset representative's
    product stands for A(G) tuples. Chunk partial sums are combined in chunk
    order with numpy's pairwise summation, so the result depends on
    chunk_size but not on workers.

    Raises:
        InfeasibleScaleError: If the subset work exceeds budget.
    """
    start = time.perf_counter()
    if pattern.k > unbiased.n:
        logger.warning("Pattern %s has k=%d > n=%d: no tuples, estimate is 0",
                       pattern.name, pattern.k, unbiased.n)
        value = 0.0
    else:
        check_subset_work(unbiased.n, pattern, budget)
        partials = subset_partials(unbiased.matrix(), pattern, chunk_size, workers)
        value = float(np.sum(np.asarray(partials, dtype=np.float64)))
    return Estimate(
        value=value,
        pattern=pattern.name,
        n=unbiased.n,
        epsilon=unbiased.epsilon,
        master_seed=master_seed,
        elapsed_seconds=time.perf_counter() - start,
    )


def estimate_naive(unbiased: UnbiasedAdjacency, pattern: GraphletPattern) -> float:
    """
    Reference evaluation over every ordered k-tuple, kept for cross-checking
    estimate_from_unbiased.

    Raises:
        InfeasibleScaleError: If there are more than MAX_BRUTE_TUPLES tuples.
    """
    n, k = unbiased.n, pattern.k
    if k > n:
        return 0.0
    if math.perm(n, k) > MAX_BRUTE_TUPLES:
        raise InfeasibleScaleError(f"{math.perm(n, k):,} tuples exceed the brute-force budget")
    matrix = unbiased.matrix().tolist()
    edges = pattern.edge_list
    total = math.fsum(
        math.prod(matrix[t[a]][t[b]] for a, b in edges)
        for t in permutations(range(n), k)
    )
    return total / pattern.automorphism_count


def algorithm1(
    graph: Graph,
    pattern: GraphletPattern,
    budget: PrivacyBudget,
    master_seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1
) -> Estimate:
    """
    Non-interactive edge-LDP estimate: obfuscate, debias, then
    estimate_from_unbiased. Unbiased for the exact copy count.
    """
    start = time.perf_counter()
    noisy = obfuscate(graph, budget, master_seed, workers=workers)
    estimate = estimate_from_unbiased(
        debias(noisy, budget), pattern, master_seed=master_seed,
        chunk_size=chunk_size, workers=workers,
    )
    elapsed = time.perf_counter() - start
    logger.debug("algorithm1(%s, n=%d, eps=%s, seed=%d) = %.6g in %.3fs",
                 pattern.name, graph.n, budget.epsilon, master_seed, estimate.value, elapsed)
    return Estimate(estimate.value, estimate.pattern, estimate.n, estimate.epsilon,
                    master_seed, elapsed, ALGORITHM1)


def baseline_rr_count(
    noisy: NoisyAdjacency,
    pattern: GraphletPattern,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1
) -> Estimate:
    """Exact copy count of pattern in the noisy graph G~, without debiasing."""
    start = time.perf_counter()
    value = float(subset_count(noisy.to_graph(), pattern, chunk_size, workers))
    return Estimate(
        value=value,
        pattern=pattern.name,
        n=noisy.n,
        epsilon=noisy.epsilon,
        master_seed=noisy.master_seed,
        elapsed_seconds=time.perf_counter() - start,
        estimator=RR_BASELINE,
    )
