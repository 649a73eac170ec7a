"""
Graphlet Patterns

The k-node pattern graphs whose copies are counted, their automorphism
counts, the preset catalog and the pattern file format.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from pathlib import Path
from typing import FrozenSet, Iterable, List, Sequence, Tuple

from .graph import Edge, read_edge_list

MIN_K = 2
MAX_K = 8

PRESET_NAMES = ("triangle", "cycle", "clique", "star", "path")


def _normalize(edge: Edge) -> Edge:
    i, j = edge
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class GraphletPattern:
    """
    A pattern graph on nodes 0..k-1.

    Attributes:
        k: Number of pattern nodes (2 <= k <= 8).
        edges: Unordered pattern edges as (i, j) with i < j.
        name: Display name, e.g. "cycle:4".
    """
    k: int
    edges: FrozenSet[Edge]
    name: str = "custom"

    def __post_init__(self):
        if not MIN_K <= self.k <= MAX_K:
            raise ValueError(f"Pattern size k must be in [{MIN_K}, {MAX_K}], got {self.k}")
        normalized = frozenset(_normalize(e) for e in self.edges)
        for i, j in normalized:
            if i == j:
                raise ValueError(f"Pattern self-loop ({i}, {i})")
            if not (0 <= i < self.k and 0 <= j < self.k):
                raise ValueError(f"Pattern edge ({i}, {j}) outside [0, {self.k})")
        if not normalized:
            raise ValueError("Pattern must have at least one edge")
        covered = {v for e in normalized for v in e}
        isolated = sorted(set(range(self.k)) - covered)
        if isolated:
            raise ValueError(f"Pattern has isolated vertices {isolated}")
        object.__setattr__(self, 'edges', normalized)

    @cached_property
    def edge_list(self) -> Tuple[Edge, ...]:
        """Pattern edges in sorted order."""
        return tuple(sorted(self.edges))

    @cached_property
    def automorphisms(self) -> Tuple[Tuple[int, ...], ...]:
        """All edge-preserving permutations of range(k), identity first."""
        return tuple(
            perm for perm in permutations(range(self.k))
            if frozenset(_normalize((perm[i], perm[j])) for i, j in self.edges) == self.edges
        )

    @property
    def automorphism_count(self) -> int:
        """A(G): number of automorphisms."""
        return len(self.automorphisms)

    def relabel(self, permutation: Sequence[int]) -> 'GraphletPattern':
        """Isomorphic copy with pattern node v renamed to permutation[v]."""
        if sorted(permutation) != list(range(self.k)):
            raise ValueError("relabel expects a permutation of range(k)")
        return GraphletPattern(
            self.k,
            frozenset((permutation[i], permutation[j]) for i, j in self.edges),
            self.name,
        )

    def __repr__(self) -> str:
        return f"GraphletPattern({self.name}, k={self.k}, edges={len(self.edges)})"


def automorphism_count(pattern: GraphletPattern) -> int:
    """
    Count permutations pi of range(k) with {pi(i), pi(j)} in E iff {i, j} in E,
    by exhaustive enumeration of all k! permutations.
    """
    if pattern.k > MAX_K:
        raise ValueError(f"Automorphism enumeration is capped at k={MAX_K}")
    count = pattern.automorphism_count
    assert math.factorial(pattern.k) % count == 0
    return count


# ==================== PRESETS ====================

def _cycle_edges(k: int) -> List[Edge]:
    return [(i, (i + 1) % k) for i in range(k)]


def preset_pattern(name: str, k: int = 3) -> GraphletPattern:
    """
    Canonical labeled preset.

    Args:
        name: One of triangle, cycle, clique, star, path.
        k: Pattern size (ignored for triangle).

    Raises:
        ValueError: On an unknown name or k out of range for the preset.
    """
    if name == "triangle":
        return GraphletPattern(3, frozenset(_cycle_edges(3)), "triangle")
    if name not in PRESET_NAMES:
        raise ValueError(f"Unknown pattern {name!r}; expected one of {PRESET_NAMES}")
    low = 3 if name == "cycle" else MIN_K
    if not low <= k <= MAX_K:
        raise ValueError(f"{name} needs {low} <= k <= {MAX_K}, got {k}")

    if name == "cycle":
        edges: Iterable[Edge] = _cycle_edges(k)
    elif name == "clique":
        edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    elif name == "star":
        edges = [(0, j) for j in range(1, k)]
    else:
        edges = [(i, i + 1) for i in range(k - 1)]
    return GraphletPattern(k, frozenset(edges), f"{name}:{k}")


def read_pattern(text: str, name: str = "custom") -> GraphletPattern:
    """Parse a pattern in the edge-list format whose header is k."""
    graph = read_edge_list(text)
    return GraphletPattern(graph.n, frozenset(graph.edges()), name)


def load_pattern(filepath: str) -> GraphletPattern:
    """
    Load a pattern file.

    Raises:
        FileNotFoundError: If the file doesn't exist.
    """
    path = Path(filepath)
    if not path.exists():
        raise FileNotFoundError(f"Pattern file not found: {filepath}")
    return read_pattern(path.read_text(encoding='utf-8'), name=f"file:{path.name}")


def parse_pattern(text: str) -> GraphletPattern:
    """
    Resolve a pattern argument: "triangle", "cycle:4", "cycle(4)", ... or "file:PATH".

    Raises:
        ValueError: On an unparseable argument.
    """
    text = text.strip()
    if text.startswith("file:"):
        return load_pattern(text[len("file:"):])
    if text == "triangle":
        return preset_pattern("triangle")
    if ":" in text:
        name, _, size = text.partition(":")
    elif text.endswith(")") and "(" in text:
        name, _, size = text[:-1].partition("(")
    else:
        raise ValueError(f"Pattern {text!r} needs a size, e.g. {text}:4")
    try:
        k = int(size)
    except ValueError:
        raise ValueError(f"Pattern size must be an integer in {text!r}") from None
    return preset_pattern(name.strip(), k)
