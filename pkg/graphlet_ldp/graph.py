"""
Graph Representation

Undirected simple graphs on n labeled nodes, stored as a bit-packed
upper triangle of the adjacency matrix, plus edge-list text I/O.
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


def pair_count(n: int) -> int:
    """Number of unordered node pairs {i, j}, i != j."""
    return n * (n - 1) // 2


def pair_index(n: int, i: int, j: int) -> int:
    """
    Position of the unordered pair {i, j} in the packed upper triangle.

    Args:
        n: Node count.
        i: One endpoint.
        j: The other endpoint, different from i.

    Returns:
        i*n - i*(i+1)/2 + (j - i - 1) after ordering so that i < j.
    """
    if i == j:
        raise ValueError(f"No pair index for self-pair ({i}, {i})")
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@lru_cache(maxsize=64)
def pair_endpoints(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Row and column arrays of all pairs i < j, in pair-index order."""
    rows, cols = np.triu_indices(n, k=1)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


@dataclass(frozen=True)
class Graph:
    """
    Immutable undirected simple graph.

    Attributes:
        n: Node count; nodes are 0..n-1.
        packed: Upper-triangle pair bits, np.packbits layout, as bytes.
    """
    n: int
    packed: bytes

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Node count must be non-negative, got {self.n}")
        expected = (pair_count(self.n) + 7) // 8
        if len(self.packed) != expected:
            raise ValueError(
                f"Packed adjacency for n={self.n} needs {expected} bytes, got {len(self.packed)}"
            )

    @classmethod
    def from_pair_bits(cls, n: int, bits: np.ndarray) -> 'Graph':
        """
        Build a graph from one boolean per unordered pair.

        Args:
            n: Node count.
            bits: Boolean array of length n*(n-1)/2 in pair-index order.
        """
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (pair_count(n),):
            raise ValueError(
                f"Expected {pair_count(n)} pair bits for n={n}, got shape {bits.shape}"
            )
        return cls(n=n, packed=np.packbits(bits).tobytes())

    @cached_property
    def pair_bits(self) -> np.ndarray:
        """Unpacked read-only boolean vector, one entry per unordered pair."""
        raw = np.frombuffer(self.packed, dtype=np.uint8)
        bits = np.unpackbits(raw, count=pair_count(self.n)).astype(bool)
        bits.setflags(write=False)
        return bits

    @cached_property
    def _neighbor_sets(self) -> Tuple[FrozenSet[int], ...]:
        rows, cols = pair_endpoints(self.n)
        present = self.pair_bits
        adjacency: List[set] = [set() for _ in range(self.n)]
        for i, j in zip(rows[present].tolist(), cols[present].tolist()):
            adjacency[i].add(j)
            adjacency[j].add(i)
        return tuple(frozenset(s) for s in adjacency)

    @property
    def edge_count(self) -> int:
        """Number of edges."""
        return int(np.count_nonzero(self.pair_bits))

    def has_edge(self, i: int, j: int) -> bool:
        """Return True if {i, j} is an edge; always False for i == j."""
        if i == j:
            return False
        self._check_node(i)
        self._check_node(j)
        return bool(self.pair_bits[pair_index(self.n, i, j)])

    def neighbors(self, i: int) -> FrozenSet[int]:
        """Neighbor set of node i."""
        self._check_node(i)
        return self._neighbor_sets[i]

    def degree(self, i: int) -> int:
        """Degree of node i."""
        return len(self.neighbors(i))

    def degrees(self) -> List[int]:
        """Degrees of all nodes."""
        return [len(s) for s in self._neighbor_sets]

    def edges(self) -> List[Edge]:
        """All edges as (i, j) with i < j, sorted lexicographically."""
        rows, cols = pair_endpoints(self.n)
        present = self.pair_bits
        return list(zip(rows[present].tolist(), cols[present].tolist()))

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric boolean matrix with a zero diagonal (read-only)."""
        return self._dense

    @cached_property
    def _dense(self) -> np.ndarray:
        matrix = np.zeros((self.n, self.n), dtype=bool)
        rows, cols = pair_endpoints(self.n)
        matrix[rows, cols] = self.pair_bits
        matrix[cols, rows] = self.pair_bits
        matrix.setflags(write=False)
        return matrix

    def relabel(self, permutation: Sequence[int]) -> 'Graph':
        """
        Return the graph with node v renamed to permutation[v].

        Raises:
            ValueError: If permutation is not a permutation of range(n).
        """
        if sorted(permutation) != list(range(self.n)):
            raise ValueError("relabel expects a permutation of range(n)")
        return build_graph(self.n, ((permutation[i], permutation[j]) for i, j in self.edges()))

    def with_edge(self, i: int, j: int) -> 'Graph':
        """Return a copy with the edge {i, j} added."""
        bits = self.pair_bits.copy()
        self._check_node(i)
        self._check_node(j)
        bits[pair_index(self.n, i, j)] = True
        return Graph.from_pair_bits(self.n, bits)

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise ValueError(f"Node {i} out of range for n={self.n}")

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def build_graph(n: int, edges: Iterable[Edge]) -> Graph:
    """
    Build a graph from unordered pairs; duplicates and reversed pairs collapse.

    Raises:
        ValueError: On a negative n, an out-of-range endpoint or a self-loop.
    """
    if n < 0:
        raise ValueError(f"Node count must be non-negative, got {n}")
    bits = np.zeros(pair_count(n), dtype=bool)
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"Edge ({i}, {j}) has an endpoint outside [0, {n})")
        if i == j:
            raise ValueError(f"Self-loop ({i}, {i}) is not allowed")
        bits[pair_index(n, i, j)] = True
    return Graph.from_pair_bits(n, bits)


def empty_graph(n: int) -> Graph:
    """Graph on n nodes with no edges."""
    return Graph.from_pair_bits(n, np.zeros(pair_count(n), dtype=bool))


def complete_graph(n: int) -> Graph:
    """Complete graph K_n."""
    return Graph.from_pair_bits(n, np.ones(pair_count(n), dtype=bool))


# ==================== EDGE-LIST I/O ====================

def _meaningful_lines(text: str) -> Iterable[Tuple[int, str]]:
    for number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if stripped and not stripped.startswith('#'):
            yield number, stripped


def read_edge_list(text: str) -> Graph:
    """
    Parse the edge-list format: a header line with n, then one "i j" per line.

    Lines starting with '#' and blank lines are ignored.

    Raises:
        ValueError: On a missing or malformed header, a malformed edge line,
            an endpoint >= n or a self-loop.
    """
    lines = _meaningful_lines(text)
    try:
        number, header = next(lines)
    except StopIteration:
        raise ValueError("Edge list is empty: missing node-count header") from None
    try:
        n = int(header)
    except ValueError:
        raise ValueError(f"Line {number}: header must be a node count, got {header!r}") from None
    if n < 0:
        raise ValueError(f"Line {number}: node count must be non-negative, got {n}")

    edges: List[Edge] = []
    for number, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"Line {number}: expected 'i j', got {line!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"Line {number}: endpoints must be integers, got {line!r}") from None
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"Line {number}: endpoint outside [0, {n}) in {line!r}")
        if i == j:
            raise ValueError(f"Line {number}: self-loop {line!r}")
        edges.append((i, j))
    return build_graph(n, edges)


def write_edge_list(graph: Graph) -> str:
    """Serialize a graph: header n, then sorted "i j" lines with i < j."""
    lines = [str(graph.n)]
    lines.extend(f"{i} {j}" for i, j in graph.edges())
    return "\n".join(lines) + "\n"


def load_graph(filepath: str) -> Graph:
    """
    Load a graph from an edge-list file.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        ValueError: If the file is malformed.
    """
    path = Path(filepath)
    if not path.exists():
        raise FileNotFoundError(f"Graph file not found: {filepath}")
    return read_edge_list(path.read_text(encoding='utf-8'))


def save_graph(graph: Graph, filepath: str) -> None:
    """Write a graph to an edge-list file (UTF-8, LF line endings)."""
    with open(filepath, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(write_edge_list(graph))
    logger.debug("Wrote %r to %s", graph, filepath)
