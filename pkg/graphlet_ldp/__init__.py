"""
Graphlet LDP: Graphlet Counting under Edge Local Differential Privacy

Estimates the number of copies of an arbitrary k-node pattern in a graph
whose users only reveal randomized-response reports of their adjacency bits.

Features:
- Bit-packed graphs, SBM / Barabási–Albert generators, edge-list I/O
- Graphlet patterns with automorphism counts and three exact counters
- Randomized-response channel with unbiased correction
- Unbiased estimator and the noisy-graph baseline
- Lower-bound gadget constructions with counting-identity checks
- Experiment harness emitting RMSE tables as CSV
"""

from .graph import Graph, build_graph, complete_graph, empty_graph, read_edge_list, write_edge_list
from .generators import GeneratorSpec, generate, generate_ba, generate_sbm2
from .patterns import GraphletPattern, automorphism_count, parse_pattern, preset_pattern
from .counting import InfeasibleScaleError, exact_count, subset_count, tuple_count_W
from .channel import (
    NoisyAdjacency,
    PrivacyBudget,
    UnbiasedAdjacency,
    debias,
    flip_probability,
    noiseless_channel,
    obfuscate,
)
from .estimator import Estimate, algorithm1, baseline_rr_count, estimate_from_unbiased, estimate_naive
from .gadgets import (
    CliqueGadgetSpec,
    build_clique_gadget,
    build_cycle_gadget,
    build_triangle_gadget,
    clique_lemma_check,
    cycle_structure_check,
)
from .metrics import TrialAnalyzer, rel_rmse_paper, rmse_mean, rmse_paper
from .experiment import ExperimentConfig, TrialReport, run_experiment

__all__ = [
    'Graph', 'build_graph', 'complete_graph', 'empty_graph', 'read_edge_list', 'write_edge_list',
    'GeneratorSpec', 'generate', 'generate_ba', 'generate_sbm2',
    'GraphletPattern', 'automorphism_count', 'parse_pattern', 'preset_pattern',
    'InfeasibleScaleError', 'exact_count', 'subset_count', 'tuple_count_W',
    'NoisyAdjacency', 'PrivacyBudget', 'UnbiasedAdjacency', 'debias', 'flip_probability',
    'noiseless_channel', 'obfuscate',
    'Estimate', 'algorithm1', 'baseline_rr_count', 'estimate_from_unbiased', 'estimate_naive',
    'CliqueGadgetSpec', 'build_clique_gadget', 'build_cycle_gadget', 'build_triangle_gadget',
    'clique_lemma_check', 'cycle_structure_check',
    'TrialAnalyzer', 'rel_rmse_paper', 'rmse_mean', 'rmse_paper',
    'ExperimentConfig', 'TrialReport', 'run_experiment',
]
