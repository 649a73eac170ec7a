"""
Synthetic Graph Generators

Two-block stochastic block model and Barabási–Albert preferential
attachment, both deterministic for a fixed 64-bit seed.
"""

import logging
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .graph import Graph, build_graph, pair_endpoints, pair_count

logger = logging.getLogger(__name__)

MODELS = ("sbm2", "ba")

DEFAULT_P_IN = 0.25
DEFAULT_P_OUT = 0.05

MAX_SEED = 2 ** 64 - 1


def ba_attachment_count(n: int) -> int:
    """Attachment count used when none is given: max(1, floor(n / 5))."""
    return max(1, n // 5)


def _check_seed(seed: int) -> None:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"Seed must be a 64-bit unsigned integer, got {seed}")


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Parameters of one synthetic graph draw.

    Attributes:
        model: "sbm2" or "ba".
        n: Node count.
        seed: 64-bit unsigned seed.
        p_in: SBM intra-block edge probability.
        p_out: SBM inter-block edge probability.
        m: BA attachment count; None means ba_attachment_count(n).
    """
    model: str
    n: int
    seed: int = 0
    p_in: float = DEFAULT_P_IN
    p_out: float = DEFAULT_P_OUT
    m: Optional[int] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"Unknown model {self.model!r}; expected one of {MODELS}")
        if self.n < 0:
            raise ValueError(f"Node count must be non-negative, got {self.n}")
        _check_seed(self.seed)
        if self.model == "sbm2":
            if self.n % 2:
                raise ValueError(f"sbm2 needs an even node count, got {self.n}")
            _check_probability("p_in", self.p_in)
            _check_probability("p_out", self.p_out)
        else:
            m = self.attachment_count
            if not 1 <= m < self.n:
                raise ValueError(f"ba needs 1 <= m < n, got m={m}, n={self.n}")

    @property
    def attachment_count(self) -> int:
        """Resolved BA attachment count."""
        return self.m if self.m is not None else ba_attachment_count(self.n)

    def with_seed(self, seed: int) -> 'GeneratorSpec':
        """Copy of this spec with another seed."""
        return GeneratorSpec(self.model, self.n, seed, self.p_in, self.p_out, self.m)

    def to_dict(self) -> dict:
        """Convert spec to a dictionary."""
        return asdict(self)


def generate_sbm2(n: int, p_in: float, p_out: float, seed: int) -> Graph:
    """
    Two equal blocks [0, n/2) and [n/2, n); each pair is an edge
    independently with p_in inside a block and p_out across blocks.

    Raises:
        ValueError: On odd n or a probability outside [0, 1].
    """
    spec = GeneratorSpec("sbm2", n, seed, p_in, p_out)
    rng = np.random.default_rng(spec.seed)
    rows, cols = pair_endpoints(n)
    half = n // 2
    same_block = (rows < half) == (cols < half)
    probabilities = np.where(same_block, p_in, p_out)
    bits = rng.random(pair_count(n)) < probabilities
    graph = Graph.from_pair_bits(n, bits)
    logger.debug("sbm2(n=%d, p_in=%s, p_out=%s, seed=%d) -> %d edges",
                 n, p_in, p_out, seed, graph.edge_count)
    return graph


def generate_ba(n: int, m: int, seed: int) -> Graph:
    """
    Barabási–Albert graph: a complete seed graph on m nodes (a single node
    when m = 1), then every further node attaches to m distinct existing
    nodes drawn without replacement with probability proportional to degree.

    Raises:
        ValueError: Unless 1 <= m < n.
    """
    spec = GeneratorSpec("ba", n, seed, m=m)
    rng = np.random.default_rng(spec.seed)
    degree = np.zeros(n, dtype=np.int64)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    degree[:m] = m - 1

    for new_node in range(m, n):
        weights = degree[:new_node].astype(float)
        total = weights.sum()
        # Only the m = 1 seed node starts with degree zero.
        p = weights / total if total > 0 else None
        targets = rng.choice(new_node, size=m, replace=False, p=p)
        for target in targets.tolist():
            edges.append((target, new_node))
            degree[target] += 1
        degree[new_node] = m

    graph = build_graph(n, edges)
    logger.debug("ba(n=%d, m=%d, seed=%d) -> %d edges", n, m, seed, graph.edge_count)
    return graph


def generate(spec: GeneratorSpec) -> Graph:
    """Draw the graph described by a GeneratorSpec."""
    if spec.model == "sbm2":
        return generate_sbm2(spec.n, spec.p_in, spec.p_out, spec.seed)
    return generate_ba(spec.n, spec.attachment_count, spec.seed)
