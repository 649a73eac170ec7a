"""
Command-Line Interface

Subcommands:
    generate      draw an SBM or Barabási–Albert graph as an edge list
    count         exact copy count of a pattern in a graph file
    estimate      one edge-LDP estimate (or the randomized-response baseline)
    experiment    accuracy sweep over n and epsilon, written as CSV
    gadget        build a lower-bound gadget graph
    gadget-check  verify a gadget counting identity

Exit codes: 0 success, 2 invalid arguments, 3 infeasible scale.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .channel import PrivacyBudget, debias, dump_noisy, obfuscate
from .counting import DEFAULT_CHUNK_SIZE, InfeasibleScaleError, exact_count, subset_count, tuple_count_W
from .estimator import ALGORITHM1, RR_BASELINE, baseline_rr_count, estimate_from_unbiased
from .experiment import (
    DEFAULT_EPSILONS,
    DEFAULT_MODEL,
    DEFAULT_NS,
    DEFAULT_PATTERN,
    DEFAULT_TRIALS,
    DEFAULT_MAX_N,
    ExperimentConfig,
    parse_estimators,
    raw_sibling_path,
    run_experiment,
)
from .gadgets import (
    CliqueGadgetSpec,
    build_clique_gadget,
    build_cycle_gadget,
    build_triangle_gadget,
    clique_lemma_check,
    cycle_gadget_x,
    cycle_structure_check,
)
from .generators import DEFAULT_P_IN, DEFAULT_P_OUT, MODELS, GeneratorSpec, generate
from .graph import Graph, load_graph, write_edge_list
from .patterns import parse_pattern

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

COUNT_METHODS = ("exact", "subset", "tuples")


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def parse_bits(text: str) -> List[int]:
    """Parse a 0/1 string such as "1011" into a bit list."""
    if not text or any(ch not in "01" for ch in text):
        raise argparse.ArgumentTypeError(f"expected a 0/1 string, got {text!r}")
    return [int(ch) for ch in text]


def parse_bit_matrix(text: str) -> List[List[int]]:
    """Parse comma-separated bit rows such as "10,01"."""
    return [parse_bits(row) for row in text.split(",")]


def emit(text: str, out: Optional[str]) -> None:
    """Write text to a file, or to stdout when out is None."""
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(text)
    logger.info("Wrote %s", out)


# ==================== SUBCOMMANDS ====================

def cmd_generate(args: argparse.Namespace) -> int:
    spec = GeneratorSpec(args.model, args.n, args.seed, args.p_in, args.p_out, args.m)
    graph = generate(spec)
    logger.info("Generated %r from %s", graph, spec.to_dict())
    emit(write_edge_list(graph), args.out)
    return EXIT_OK


def cmd_count(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    pattern = parse_pattern(args.pattern)
    if args.method == "subset":
        count = subset_count(graph, pattern, workers=args.workers)
    elif args.method == "tuples":
        count = tuple_count_W(graph, pattern) // pattern.automorphism_count
    else:
        count = exact_count(graph, pattern)
    print(count)
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    pattern = parse_pattern(args.pattern)
    budget = PrivacyBudget(args.epsilon)
    noisy = obfuscate(graph, budget, args.seed, workers=args.workers)
    if args.dump_noisy:
        Path(args.dump_noisy).write_text(dump_noisy(noisy), encoding='utf-8')
        logger.info("Dumped noisy adjacency to %s", args.dump_noisy)

    if args.baseline:
        estimate = baseline_rr_count(noisy, pattern, args.chunk_size, args.workers)
    else:
        estimate = estimate_from_unbiased(
            debias(noisy, budget), pattern, master_seed=args.seed,
            chunk_size=args.chunk_size, workers=args.workers,
        )
    value = estimate.clamped() if args.clamp_at_zero else estimate.value
    name = RR_BASELINE if args.baseline else ALGORITHM1
    print(f"{name} pattern={pattern.name} n={graph.n} epsilon={budget.epsilon} "
          f"seed={args.seed} estimate={value!r} seconds={estimate.elapsed_seconds:.3f}")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    raw_out = args.raw_out
    if raw_out == "":
        if not args.out:
            raise ValueError("--raw-out without a path needs --out to place the sibling file")
        raw_out = raw_sibling_path(args.out)

    config = ExperimentConfig(
        model=args.model,
        pattern=args.pattern,
        epsilons=tuple(args.epsilon_list),
        ns=tuple(args.n_list),
        trials=args.trials,
        master_seed=args.seed,
        estimators=parse_estimators(args.estimators),
        p_in=args.p_in,
        p_out=args.p_out,
        m=args.m,
        output=args.out,
        raw_out=raw_out,
        redraw_graph=args.redraw_graph,
        workers=args.workers,
        max_n=None if args.slow else DEFAULT_MAX_N,
    )
    report = run_experiment(config)
    if report.all_skipped:
        print("error: every experiment cell was infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not args.out:
        sys.stdout.write(report.to_csv())
    return EXIT_OK


def _clique_spec(args: argparse.Namespace, k: int) -> CliqueGadgetSpec:
    if args.mu is None and args.upsilon is None and args.x is None:
        return CliqueGadgetSpec.random(k, args.n, args.seed)
    if args.mu is None or args.upsilon is None or args.x is None:
        raise ValueError("Give all of --mu, --upsilon and --x, or none of them for random bits")
    return CliqueGadgetSpec(k, args.n, tuple(args.mu), tuple(args.upsilon), tuple(map(tuple, args.x)))


def cmd_gadget(args: argparse.Namespace) -> int:
    if args.kind == "cycle":
        if args.x is not None:
            x = args.x
        else:
            popcount = args.popcount if args.popcount is not None else args.n // 2
            x = cycle_gadget_x(args.n, popcount, np.random.default_rng(args.seed))
        graph: Graph = build_cycle_gadget(args.n, x)
    else:
        k = 3 if args.kind == "triangle" else args.k
        spec = _clique_spec(args, k)
        if args.kind == "triangle":
            graph = build_triangle_gadget(spec.n, spec.mu, spec.upsilon, spec.X)
        else:
            graph = build_clique_gadget(k, spec.n, spec.mu, spec.upsilon, spec.X)
    logger.info("Built %s gadget %r", args.kind, graph)
    emit(write_edge_list(graph), args.out)
    return EXIT_OK


def cmd_gadget_check(args: argparse.Namespace) -> int:
    if args.check == "clique-lemma":
        spec = _clique_spec(args, args.k)
        result = clique_lemma_check(spec.k, spec.n, spec.mu, spec.upsilon, spec.X)
        print(f"holds={result.holds} k={spec.k} n={spec.n} "
              f"cliques={result.clique_count} triangles={result.triangle_count} "
              f"multiplier={result.multiplier}")
        return EXIT_OK if result.holds else EXIT_FAILED_CHECK

    report = cycle_structure_check(args.n, args.k, pairs=args.pairs, seed=args.seed)
    print(f"n={report.n} k={report.k} c_zero={report.c_zero} "
          + " ".join(f"c_{p}={count}" for p, count in sorted(report.c_p.items())))
    print("popcount,direct,closed_form,shuffled")
    for row in report.rows:
        print(",".join(str(v) for v in row))
    print(f"closed_form_holds={report.closed_form_holds} "
          f"popcount_invariant={report.popcount_invariant} "
          f"difference_bound_holds={report.lemma_holds} "
          f"({report.lemma_pairs} pairs, {report.lemma_violations} violations)")
    return EXIT_OK if report.holds else EXIT_FAILED_CHECK


# ==================== PARSER ====================

def _add_clique_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="base size, divisible by 3")
    parser.add_argument("--mu", type=parse_bits, help="U-side bits, e.g. 101")
    parser.add_argument("--upsilon", type=parse_bits, help="Y-side bits")
    parser.add_argument("--x", type=parse_bit_matrix, help="U-Y bit rows, e.g. 10,01")
    parser.add_argument("--seed", type=int, default=0, help="seed for random bits when none are given")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphlet-ldp",
        description="Edge-LDP graphlet counting: estimators, exact counts, gadgets and experiments.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic graph")
    gen.add_argument("--model", choices=MODELS, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p-in", type=float, default=DEFAULT_P_IN)
    gen.add_argument("--p-out", type=float, default=DEFAULT_P_OUT)
    gen.add_argument("--m", type=int, default=None, help="BA attachment count (default max(1, n//5))")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(handler=cmd_generate)

    count = sub.add_parser("count", help="exact pattern count")
    count.add_argument("--graph", required=True)
    count.add_argument("--pattern", required=True)
    count.add_argument("--method", choices=COUNT_METHODS, default="exact")
    count.add_argument("--workers", type=int, default=1)
    count.set_defaults(handler=cmd_count)

    est = sub.add_parser("estimate", help="one private estimate")
    est.add_argument("--graph", required=True)
    est.add_argument("--pattern", required=True)
    est.add_argument("--epsilon", type=float, required=True)
    est.add_argument("--seed", type=int, required=True)
    est.add_argument("--baseline", action="store_true", help="count copies in the noisy graph instead")
    est.add_argument("--dump-noisy", default=None, metavar="PATH")
    est.add_argument("--clamp-at-zero", action="store_true", help="display max(0, estimate)")
    est.add_argument("--workers", type=int, default=1)
    est.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE)
    est.set_defaults(handler=cmd_estimate)

    exp = sub.add_parser("experiment", help="accuracy sweep")
    exp.add_argument("--model", choices=MODELS, default=DEFAULT_MODEL)
    exp.add_argument("--pattern", default=DEFAULT_PATTERN)
    exp.add_argument("--epsilon-list", type=parse_float_list, default=list(DEFAULT_EPSILONS))
    exp.add_argument("--n-list", type=parse_int_list, default=list(DEFAULT_NS))
    exp.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    exp.add_argument("--estimators", default="a1,rr")
    exp.add_argument("--p-in", type=float, default=DEFAULT_P_IN)
    exp.add_argument("--p-out", type=float, default=DEFAULT_P_OUT)
    exp.add_argument("--m", type=int, default=None)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--raw-out", nargs="?", const="", default=None, metavar="PATH",
                     help="per-trial estimates (default: <out>.raw.csv)")
    exp.add_argument("--redraw-graph", action="store_true", help="fresh graph per trial")
    exp.add_argument("--slow", action="store_true", help=f"allow n above {DEFAULT_MAX_N}")
    exp.set_defaults(handler=cmd_experiment)

    gadget = sub.add_parser("gadget", help="build a gadget graph")
    kinds = gadget.add_subparsers(dest="kind", required=True)
    tri = kinds.add_parser("triangle")
    _add_clique_inputs(tri)
    clique = kinds.add_parser("clique")
    clique.add_argument("--k", type=int, required=True)
    _add_clique_inputs(clique)
    cyc = kinds.add_parser("cycle")
    cyc.add_argument("--n", type=int, required=True)
    cyc.add_argument("--x", type=parse_bits, help="matching bits, length n/2")
    cyc.add_argument("--popcount", type=int, default=None, help="random x with this many ones")
    cyc.add_argument("--seed", type=int, default=0)
    for kind in (tri, clique, cyc):
        kind.add_argument("--out", default=None)
    gadget.set_defaults(handler=cmd_gadget)

    check = sub.add_parser("gadget-check", help="verify a gadget identity")
    checks = check.add_subparsers(dest="check", required=True)
    lemma = checks.add_parser("clique-lemma")
    lemma.add_argument("--k", type=int, required=True)
    _add_clique_inputs(lemma)
    structure = checks.add_parser("cycle-structure")
    structure.add_argument("--n", type=int, required=True)
    structure.add_argument("--k", type=int, required=True)
    structure.add_argument("--pairs", type=int, default=100)
    structure.add_argument("--seed", type=int, default=0)
    check.set_defaults(handler=cmd_gadget_check)

    return parser


def configure_logging(verbose: bool, command: str) -> None:
    if verbose:
        level = logging.DEBUG
    elif command == "experiment":
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and return its exit code.

    argparse usage errors exit with status 2 through SystemExit.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.command)
    try:
        return args.handler(args)
    except InfeasibleScaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
