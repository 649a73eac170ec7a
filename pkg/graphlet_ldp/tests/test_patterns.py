"""
Unit tests for graphlet patterns.

Tests automorphism counts, presets, validation and pattern parsing.
"""

import math
import unittest
import tempfile
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from graphlet_ldp.patterns import (
    GraphletPattern,
    automorphism_count,
    load_pattern,
    parse_pattern,
    preset_pattern,
    read_pattern,
)


class TestAutomorphismCount(unittest.TestCase):
    """Test A(G) on the standard shapes."""

    def test_table(self):
        """Test K3 -> 6, C4 -> 8, K4 -> 24, P4 -> 2, K(1,3) -> 6."""
        table = {
            ("triangle", 3): 6,
            ("cycle", 4): 8,
            ("clique", 4): 24,
            ("path", 4): 2,
            ("star", 4): 6,
            ("cycle", 5): 10,
            ("path", 2): 2,
            ("star", 5): 24,
        }
        for (name, k), expected in table.items():
            with self.subTest(name=name, k=k):
                self.assertEqual(automorphism_count(preset_pattern(name, k)), expected)

    def test_divides_factorial(self):
        """Test that A(G) divides k! for every preset up to k = 6."""
        for name in ("cycle", "clique", "star", "path"):
            for k in range(3, 7):
                count = automorphism_count(preset_pattern(name, k))
                self.assertGreaterEqual(count, 1)
                self.assertEqual(math.factorial(k) % count, 0)

    def test_identity_first(self):
        """Test that the identity is always an automorphism."""
        pattern = GraphletPattern(4, frozenset({(0, 1), (1, 2), (1, 3), (2, 3)}))
        self.assertEqual(pattern.automorphisms[0], (0, 1, 2, 3))
        self.assertEqual(pattern.automorphism_count, 2)

    def test_relabel_preserves_count(self):
        """Test that an isomorphic relabeling has the same A(G)."""
        pattern = preset_pattern("path", 5)
        self.assertEqual(pattern.relabel([4, 2, 0, 1, 3]).automorphism_count, 2)


class TestPresets(unittest.TestCase):
    """Test preset_pattern."""

    def test_cycle_edges(self):
        """Test cycle(4) -> {01, 12, 23, 03}."""
        pattern = preset_pattern("cycle", 4)
        self.assertEqual(pattern.edges, frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))
        self.assertEqual(pattern.name, "cycle:4")

    def test_clique_three_is_triangle(self):
        """Test clique(3) has the triangle's edges and A = 6."""
        self.assertEqual(preset_pattern("clique", 3).edges, preset_pattern("triangle").edges)
        self.assertEqual(preset_pattern("clique", 3).automorphism_count, 6)

    def test_star_edges(self):
        """Test star(4) -> K(1,3)."""
        self.assertEqual(preset_pattern("star", 4).edges, frozenset({(0, 1), (0, 2), (0, 3)}))

    def test_errors(self):
        """Test unknown names and sizes out of range."""
        with self.assertRaises(ValueError):
            preset_pattern("wheel", 5)
        with self.assertRaises(ValueError):
            preset_pattern("cycle", 2)
        with self.assertRaises(ValueError):
            preset_pattern("clique", 9)
        with self.assertRaises(ValueError):
            preset_pattern("path", 1)


class TestPatternValidation(unittest.TestCase):
    """Test GraphletPattern invariants."""

    def test_isolated_vertex_rejected(self):
        """Test that a pattern node without edges is rejected."""
        with self.assertRaises(ValueError):
            GraphletPattern(4, frozenset({(0, 1), (1, 2)}))

    def test_empty_edges_rejected(self):
        """Test that a pattern needs at least one edge."""
        with self.assertRaises(ValueError):
            GraphletPattern(2, frozenset())

    def test_self_loop_and_range(self):
        """Test self-loops and endpoints outside [0, k)."""
        with self.assertRaises(ValueError):
            GraphletPattern(3, frozenset({(0, 0), (1, 2)}))
        with self.assertRaises(ValueError):
            GraphletPattern(3, frozenset({(0, 1), (1, 3)}))

    def test_k_bounds(self):
        """Test 2 <= k <= 8."""
        with self.assertRaises(ValueError):
            GraphletPattern(9, frozenset((i, i + 1) for i in range(8)))

    def test_edges_normalized(self):
        """Test that (j, i) is stored as (i, j)."""
        pattern = GraphletPattern(3, frozenset({(1, 0), (2, 1)}))
        self.assertEqual(pattern.edge_list, ((0, 1), (1, 2)))


class TestParsePattern(unittest.TestCase):
    """Test parse_pattern and the pattern file format."""

    def test_forms(self):
        """Test the accepted argument spellings."""
        self.assertEqual(parse_pattern("triangle").k, 3)
        self.assertEqual(parse_pattern("cycle:4").edges, preset_pattern("cycle", 4).edges)
        self.assertEqual(parse_pattern("cycle(4)").edges, preset_pattern("cycle", 4).edges)
        self.assertEqual(parse_pattern(" clique:5 ").k, 5)
        self.assertEqual(parse_pattern("star:4").automorphism_count, 6)

    def test_bad_arguments(self):
        """Test that unparseable arguments are rejected."""
        for text in ("cycle", "cycle:x", "hexagon:6", "path:"):
            with self.subTest(text=text):
                with self.assertRaises(ValueError):
                    parse_pattern(text)

    def test_read_pattern(self):
        """Test the edge-list pattern format with k as header."""
        pattern = read_pattern("4\n0 1\n1 2\n2 3\n3 0\n")
        self.assertEqual(pattern.automorphism_count, 8)

    def test_file_pattern(self):
        """Test file:PATH arguments."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "paw.txt")
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write("# paw\n4\n0 1\n1 2\n0 2\n2 3\n")
            pattern = parse_pattern(f"file:{path}")
            self.assertEqual(pattern.k, 4)
            self.assertEqual(pattern.automorphism_count, 2)
            self.assertEqual(pattern.name, "file:paw.txt")

    def test_missing_file(self):
        """Test that a missing pattern file raises FileNotFoundError."""
        with self.assertRaises(FileNotFoundError):
            load_pattern("/nonexistent/pattern.txt")


if __name__ == '__main__':
    unittest.main()
