"""
Experiment Harness

Sweeps (n, epsilon, estimator) cells: one generated graph per n shared by
every epsilon, an exact truth per graph, T noise re-draws per cell, and
the accuracy metrics of each cell written as CSV rows in sorted order.

Every random draw is seeded from (master_seed, n, epsilon, estimator,
trial), so results do not depend on how cells are scheduled.
"""

import csv
import io
import logging
import time
from dataclasses import dataclass, field, asdict
from functools import cached_property
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .channel import PrivacyBudget, obfuscate
from .counting import InfeasibleScaleError, subset_count
from .estimator import ALGORITHM1, ESTIMATORS, RR_BASELINE, algorithm1, baseline_rr_count
from .generators import DEFAULT_P_IN, DEFAULT_P_OUT, GeneratorSpec, generate
from .graph import Graph
from .metrics import TrialAnalyzer, loglog_slope
from .patterns import GraphletPattern, parse_pattern
from .workers import run_tasks

logger = logging.getLogger(__name__)

DEFAULT_MODEL = "sbm2"
DEFAULT_PATTERN = "cycle:4"
DEFAULT_EPSILONS = (1.0, 5.0)
DEFAULT_NS = (10, 20, 30, 40, 50, 60)
DEFAULT_TRIALS = 10
DEFAULT_MAX_N = 60

ESTIMATOR_ALIASES = {
    "a1": ALGORITHM1,
    "algorithm1": ALGORITHM1,
    "rr": RR_BASELINE,
    "rr_baseline": RR_BASELINE,
}

CSV_COLUMNS = (
    "model", "n", "epsilon", "pattern", "estimator", "trial_count", "truth",
    "estimate_mean", "rmse_paper", "rmse_mean", "rel_rmse_paper", "std_dev",
    "mean_trial_seconds", "seed",
)
RAW_COLUMNS = ("n", "epsilon", "estimator", "trial", "truth", "estimate", "trial_seed", "seconds")
TIMING_COLUMNS = ("mean_trial_seconds", "seconds")

# Stream tag for graph draws; estimator streams use 1 + ESTIMATORS.index(name).
GRAPH_STREAM = 0
EPSILON_SCALE = 1_000_000
BIT_KEY_OFFSET = 2 ** 64


def derive_seed(master_seed: int, *keys: int) -> int:
    """64-bit seed derived from the master seed and non-negative integer keys."""
    sequence = np.random.SeedSequence([master_seed, *keys])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def epsilon_key(epsilon: float) -> int:
    """
    Integer key of epsilon for seed derivation; distinct floats get distinct keys.

    Budgets with at most six decimal places keep the scaled key round(eps * 10^6);
    any other float is keyed by its IEEE-754 bit pattern, offset past 2^64.
    """
    scaled = round(epsilon * EPSILON_SCALE)
    if scaled < BIT_KEY_OFFSET and scaled / EPSILON_SCALE == epsilon:
        return scaled
    return BIT_KEY_OFFSET + int(np.float64(epsilon).view(np.uint64))


def graph_seed(master_seed: int, n: int, trial: Optional[int] = None) -> int:
    """Seed of the graph for n (of one trial's graph when graphs are redrawn)."""
    if trial is None:
        return derive_seed(master_seed, n, GRAPH_STREAM)
    return derive_seed(master_seed, n, GRAPH_STREAM, trial + 1)


def trial_seed(master_seed: int, n: int, epsilon: float, estimator: str, trial: int) -> int:
    """Randomized-response seed of one trial of one cell."""
    return derive_seed(master_seed, n, epsilon_key(epsilon), 1 + ESTIMATORS.index(estimator), trial)


def parse_estimators(text: str) -> Tuple[str, ...]:
    """
    Parse "a1,rr" style estimator lists.

    Raises:
        ValueError: On an unknown name or an empty list.
    """
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise ValueError("Estimator list is empty")
    unknown = [name for name in names if name not in ESTIMATOR_ALIASES]
    if unknown:
        raise ValueError(f"Unknown estimators {unknown}; expected {sorted(ESTIMATOR_ALIASES)}")
    return tuple(dict.fromkeys(ESTIMATOR_ALIASES[name] for name in names))


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One sweep definition.

    Attributes:
        model: Generator model, "sbm2" or "ba".
        pattern: Pattern argument, e.g. "cycle:4".
        epsilons: Privacy budgets to sweep.
        ns: Node counts to sweep.
        trials: Noise re-draws per cell (T).
        master_seed: Root of every derived seed.
        estimators: Subset of ("algorithm1", "rr_baseline").
        p_in, p_out: SBM probabilities.
        m: BA attachment count; None means max(1, n // 5) per n.
        output: CSV path, or None.
        raw_out: Per-trial CSV path, or None.
        redraw_graph: Draw a fresh graph for every trial.
        workers: Threads running sweep cells.
        max_n: Largest allowed n; None lifts the cap.
    """
    model: str = DEFAULT_MODEL
    pattern: str = DEFAULT_PATTERN
    epsilons: Tuple[float, ...] = DEFAULT_EPSILONS
    ns: Tuple[int, ...] = DEFAULT_NS
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    estimators: Tuple[str, ...] = ESTIMATORS
    p_in: float = DEFAULT_P_IN
    p_out: float = DEFAULT_P_OUT
    m: Optional[int] = None
    output: Optional[str] = None
    raw_out: Optional[str] = None
    redraw_graph: bool = False
    workers: int = 1
    max_n: Optional[int] = DEFAULT_MAX_N

    def __post_init__(self):
        object.__setattr__(self, 'epsilons', tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, 'ns', tuple(int(n) for n in self.ns))
        object.__setattr__(self, 'estimators', tuple(self.estimators))

        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if not self.epsilons:
            raise ValueError("epsilon list is empty")
        if not self.ns:
            raise ValueError("n list is empty")
        if not self.estimators:
            raise ValueError("estimator list is empty")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        for name in self.estimators:
            if name not in ESTIMATORS:
                raise ValueError(f"Unknown estimator {name!r}; expected one of {ESTIMATORS}")
        for epsilon in self.epsilons:
            PrivacyBudget(epsilon)

        k = self.resolved_pattern.k
        for n in self.ns:
            if n < k:
                raise ValueError(f"n={n} is smaller than the pattern size k={k}")
            if self.max_n is not None and n > self.max_n:
                raise InfeasibleScaleError(
                    f"n={n} exceeds the default maximum n={self.max_n}; use --slow to lift it"
                )
            self.generator_spec(n)

    @cached_property
    def resolved_pattern(self) -> GraphletPattern:
        return parse_pattern(self.pattern)

    def generator_spec(self, n: int, seed: int = 0) -> GeneratorSpec:
        """GeneratorSpec for node count n."""
        return GeneratorSpec(self.model, n, seed, self.p_in, self.p_out, self.m)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CellResult:
    """
    Aggregated trials of one (n, epsilon, estimator) cell.

    Attributes:
        truths: Exact count per trial (all equal unless graphs are redrawn).
        estimates: Estimates i_1..i_T, unclamped.
        seeds: Randomized-response seed per trial.
        trial_seconds: Wall time per trial.
    """
    model: str
    n: int
    epsilon: float
    pattern: str
    estimator: str
    master_seed: int
    truths: Tuple[int, ...]
    estimates: Tuple[float, ...]
    seeds: Tuple[int, ...]
    trial_seconds: Tuple[float, ...]

    @cached_property
    def analyzer(self) -> TrialAnalyzer:
        """Statistics over this cell's estimates and truths."""
        return TrialAnalyzer(self.estimates, self.truths)

    @property
    def trial_count(self) -> int:
        """Number of trials T."""
        return len(self.estimates)

    @property
    def truth(self):
        """Exact count, or the mean truth over redrawn graphs."""
        if len(set(self.truths)) == 1:
            return self.truths[0]
        return self.analyzer.truth

    @property
    def estimate_mean(self) -> float:
        """Mean of the estimates."""
        return self.analyzer.mean()

    @property
    def rmse_paper(self) -> float:
        """Summed-squared-error RMSE, not divided by T."""
        return self.analyzer.rmse_paper()

    @property
    def rmse_mean(self) -> float:
        """RMSE divided by T before the square root."""
        return self.analyzer.rmse_mean()

    @property
    def rel_rmse_paper(self) -> float:
        """rmse_paper relative to the truth; nan for a zero truth."""
        return self.analyzer.rel_rmse_paper()

    @property
    def rel_rmse_mean(self) -> float:
        """rmse_mean relative to the truth; nan for a zero truth."""
        return self.analyzer.rel_rmse_mean()

    @property
    def std_dev(self) -> float:
        """Sample standard deviation of the estimates (ddof = 1)."""
        return self.analyzer.std_deviation()

    @property
    def mean_trial_seconds(self) -> float:
        """Average wall time of one trial."""
        return sum(self.trial_seconds) / len(self.trial_seconds)

    @property
    def sort_key(self) -> Tuple[int, float, int]:
        """Row order: n, then epsilon, then estimator position."""
        return (self.n, self.epsilon, ESTIMATORS.index(self.estimator))

    def to_row(self) -> Dict[str, str]:
        """CSV row keyed by CSV_COLUMNS."""
        values = {
            "model": self.model,
            "n": self.n,
            "epsilon": self.epsilon,
            "pattern": self.pattern,
            "estimator": self.estimator,
            "trial_count": self.trial_count,
            "truth": self.truth,
            "estimate_mean": self.estimate_mean,
            "rmse_paper": self.rmse_paper,
            "rmse_mean": self.rmse_mean,
            "rel_rmse_paper": self.rel_rmse_paper,
            "std_dev": self.std_dev,
            "mean_trial_seconds": self.mean_trial_seconds,
            "seed": self.master_seed,
        }
        return {column: _format(values[column]) for column in CSV_COLUMNS}

    def raw_rows(self) -> List[Dict[str, str]]:
        return [
            {
                "n": str(self.n),
                "epsilon": _format(self.epsilon),
                "estimator": self.estimator,
                "trial": str(trial),
                "truth": str(truth),
                "estimate": _format(estimate),
                "trial_seed": str(seed),
                "seconds": _format(seconds),
            }
            for trial, (truth, estimate, seed, seconds) in enumerate(
                zip(self.truths, self.estimates, self.seeds, self.trial_seconds)
            )
        ]


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class TrialReport:
    """
    Outcome of run_experiment.

    Attributes:
        config: The sweep that produced it.
        cells: Completed cells sorted by (n, epsilon, estimator).
        skipped: (n, epsilon, estimator, reason) for cells that were not run.
    """
    config: ExperimentConfig
    cells: List[CellResult] = field(default_factory=list)
    skipped: List[Tuple[int, float, str, str]] = field(default_factory=list)

    def cell(self, n: int, epsilon: float, estimator: str) -> Optional[CellResult]:
        for result in self.cells:
            if result.n == n and result.epsilon == float(epsilon) and result.estimator == estimator:
                return result
        return None

    def series(self, estimator: str, epsilon: float, metric: str = "rmse_paper") -> List[Tuple[int, float]]:
        """(n, metric) points of one estimator at one epsilon, in n order."""
        return [
            (result.n, getattr(result, metric))
            for result in self.cells
            if result.estimator == estimator and result.epsilon == float(epsilon)
        ]

    def slope(self, estimator: str, epsilon: float, metric: str = "rmse_paper") -> float:
        """Log-log slope of metric against n."""
        points = self.series(estimator, epsilon, metric)
        return loglog_slope([n for n, _ in points], [value for _, value in points])

    @property
    def all_skipped(self) -> bool:
        return not self.cells and bool(self.skipped)

    def to_csv(self) -> str:
        return _csv_text(CSV_COLUMNS, [result.to_row() for result in self.cells])

    def to_raw_csv(self) -> str:
        return _csv_text(RAW_COLUMNS, [row for result in self.cells for row in result.raw_rows()])


def _csv_text(columns: Sequence[str], rows: List[Dict[str, str]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def raw_sibling_path(output: str) -> str:
    """Default per-trial file next to the CSV: results.csv -> results.raw.csv."""
    path = Path(output)
    return str(path.with_name(f"{path.stem}.raw{path.suffix or '.csv'}"))


def write_csv(report: TrialReport, filepath: str) -> None:
    with open(filepath, 'w', encoding='utf-8', newline='') as handle:
        handle.write(report.to_csv())
    logger.info("Wrote %d rows to %s", len(report.cells), filepath)


def write_raw_csv(report: TrialReport, filepath: str) -> None:
    with open(filepath, 'w', encoding='utf-8', newline='') as handle:
        handle.write(report.to_raw_csv())
    logger.info("Wrote per-trial estimates to %s", filepath)


# ==================== RUNNER ====================

class SweepCell(NamedTuple):
    """One (n, epsilon, estimator) task of a sweep."""
    n: int
    epsilon: float
    estimator: str


@dataclass(frozen=True)
class _Instance:
    """Graph and exact truth for one n (one entry per trial when redrawn)."""
    graphs: Tuple[Graph, ...]
    truths: Tuple[int, ...]

    def for_trial(self, trial: int) -> Tuple[Graph, int]:
        index = trial if len(self.graphs) > 1 else 0
        return self.graphs[index], self.truths[index]


def _build_instance(config: ExperimentConfig, n: int) -> _Instance:
    pattern = config.resolved_pattern
    if config.redraw_graph:
        seeds = [graph_seed(config.master_seed, n, trial) for trial in range(config.trials)]
    else:
        seeds = [graph_seed(config.master_seed, n)]
    graphs = tuple(generate(config.generator_spec(n, seed)) for seed in seeds)
    truths = tuple(subset_count(graph, pattern) for graph in graphs)
    logger.info("n=%d: %d graph(s), truth %s", n, len(graphs),
                truths[0] if len(truths) == 1 else f"mean {sum(truths) / len(truths):.1f}")
    return _Instance(graphs, truths)


def _run_trial(graph: Graph, pattern: GraphletPattern, budget: PrivacyBudget,
               estimator: str, seed: int) -> float:
    if estimator == ALGORITHM1:
        return algorithm1(graph, pattern, budget, seed).value
    return baseline_rr_count(obfuscate(graph, budget, seed), pattern).value


def _run_cell(config: ExperimentConfig, instance: _Instance, n: int,
              epsilon: float, estimator: str) -> CellResult:
    pattern = config.resolved_pattern
    budget = PrivacyBudget(epsilon)
    truths, estimates, seeds, seconds = [], [], [], []
    for trial in range(config.trials):
        graph, truth = instance.for_trial(trial)
        seed = trial_seed(config.master_seed, n, epsilon, estimator, trial)
        start = time.perf_counter()
        value = _run_trial(graph, pattern, budget, estimator, seed)
        seconds.append(time.perf_counter() - start)
        truths.append(truth)
        estimates.append(value)
        seeds.append(seed)
        logger.debug("n=%d eps=%s %s trial %d: %.6g (truth %d)",
                     n, epsilon, estimator, trial, value, truth)

    result = CellResult(
        config.model, n, epsilon, pattern.name, estimator, config.master_seed,
        tuple(truths), tuple(estimates), tuple(seeds), tuple(seconds),
    )
    logger.info("n=%d eps=%s %s: rmse_paper=%.6g rel=%.4g (%.3fs/trial)",
                n, epsilon, estimator, result.rmse_paper, result.rel_rmse_paper,
                result.mean_trial_seconds)
    return result


def run_experiment(config: ExperimentConfig) -> TrialReport:
    """
    Run every (n, epsilon, estimator) cell of config.

    Cells whose n is infeasible for the exact counter or the estimator are
    skipped with a warning and recorded in TrialReport.skipped. Writes the
    CSV (and the per-trial file) when config.output / config.raw_out are set.
    Any other error stops the sweep: cells not yet started are cancelled and
    the error of the earliest failing cell is raised.
    """
    report = TrialReport(config)
    instances: Dict[int, _Instance] = {}
    for n in sorted(set(config.ns)):
        try:
            instances[n] = _build_instance(config, n)
        except InfeasibleScaleError as exc:
            logger.warning("Skipping n=%d: %s", n, exc)
            report.skipped.extend(
                (n, epsilon, estimator, str(exc))
                for epsilon in config.epsilons for estimator in config.estimators
            )

    cells = sorted(
        {SweepCell(n, epsilon, estimator)
         for n in instances for epsilon in config.epsilons for estimator in config.estimators},
        key=lambda cell: (cell.n, cell.epsilon, ESTIMATORS.index(cell.estimator)),
    )

    def handle(cell: SweepCell) -> Optional[CellResult]:
        n, epsilon, estimator = cell
        try:
            return _run_cell(config, instances[n], n, epsilon, estimator)
        except InfeasibleScaleError as exc:
            logger.warning("Skipping n=%d eps=%s %s: %s", n, epsilon, estimator, exc)
            report.skipped.append((n, epsilon, estimator, str(exc)))
            return None

    results = run_tasks(cells, handle, workers=config.workers)
    report.cells = sorted((r for r in results if r is not None), key=lambda r: r.sort_key)
    report.skipped.sort(key=lambda s: (s[0], s[1], ESTIMATORS.index(s[2])))

    if config.output:
        write_csv(report, config.output)
    if config.raw_out:
        write_raw_csv(report, config.raw_out)
    return report
