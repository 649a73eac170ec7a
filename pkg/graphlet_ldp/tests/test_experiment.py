"""
Unit tests for the experiment harness.

Tests seed derivation, sweep validation, CSV output, determinism and the
accuracy trends of the estimators on synthetic graphs.
"""

import csv
import io
import math
import unittest
import tempfile
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import numpy as np

from graphlet_ldp.counting import InfeasibleScaleError
from graphlet_ldp.estimator import ALGORITHM1, RR_BASELINE
from graphlet_ldp.experiment import (
    CSV_COLUMNS,
    RAW_COLUMNS,
    TIMING_COLUMNS,
    ExperimentConfig,
    derive_seed,
    epsilon_key,
    graph_seed,
    parse_estimators,
    raw_sibling_path,
    run_experiment,
    trial_seed,
)

SLOW_TESTS = os.environ.get("GRAPHLET_LDP_SLOW_TESTS") == "1"


def read_rows(text: str):
    return list(csv.DictReader(io.StringIO(text)))


def without_timing(text: str):
    return [
        {key: value for key, value in row.items() if key not in TIMING_COLUMNS}
        for row in read_rows(text)
    ]


class TestSeeds(unittest.TestCase):
    """Test seed derivation."""

    def test_deterministic(self):
        """Test that the same keys give the same seed."""
        self.assertEqual(derive_seed(7, 10, 3), derive_seed(7, 10, 3))
        self.assertNotEqual(derive_seed(7, 10, 3), derive_seed(7, 10, 4))
        self.assertLess(derive_seed(7, 1), 2 ** 64)

    def test_trial_seed_keys(self):
        """Test that every key of a trial changes its seed."""
        base = trial_seed(1, 20, 1.0, ALGORITHM1, 0)
        self.assertNotEqual(base, trial_seed(2, 20, 1.0, ALGORITHM1, 0))
        self.assertNotEqual(base, trial_seed(1, 30, 1.0, ALGORITHM1, 0))
        self.assertNotEqual(base, trial_seed(1, 20, 5.0, ALGORITHM1, 0))
        self.assertNotEqual(base, trial_seed(1, 20, 1.0, RR_BASELINE, 0))
        self.assertNotEqual(base, trial_seed(1, 20, 1.0, ALGORITHM1, 1))

    def test_close_epsilons_get_distinct_streams(self):
        """Test that epsilons differing below one part in a million do not share seeds."""
        for epsilon in (1.0, 0.3, 5.0):
            nearby = np.nextafter(epsilon, np.inf)
            for other in (epsilon + 1e-9, float(nearby)):
                with self.subTest(epsilon=epsilon, other=other):
                    self.assertNotEqual(epsilon_key(epsilon), epsilon_key(other))
                    self.assertNotEqual(
                        trial_seed(1, 20, epsilon, ALGORITHM1, 0),
                        trial_seed(1, 20, other, ALGORITHM1, 0),
                    )
        self.assertEqual(epsilon_key(1.0), 1_000_000)
        self.assertEqual(epsilon_key(0.3), 300_000)

    def test_graph_seed_independent_of_epsilon(self):
        """Test that the graph seed depends on n and trial only."""
        self.assertEqual(graph_seed(3, 40), graph_seed(3, 40))
        self.assertNotEqual(graph_seed(3, 40), graph_seed(3, 40, trial=0))
        self.assertNotEqual(graph_seed(3, 40, trial=0), graph_seed(3, 40, trial=1))


class TestParseEstimators(unittest.TestCase):
    """Test parse_estimators."""

    def test_aliases(self):
        """Test short and long names, deduplicated in order."""
        self.assertEqual(parse_estimators("a1,rr"), (ALGORITHM1, RR_BASELINE))
        self.assertEqual(parse_estimators("rr_baseline, algorithm1"), (RR_BASELINE, ALGORITHM1))
        self.assertEqual(parse_estimators("a1,algorithm1"), (ALGORITHM1,))

    def test_invalid(self):
        """Test unknown and empty lists."""
        with self.assertRaises(ValueError):
            parse_estimators("a1,mle")
        with self.assertRaises(ValueError):
            parse_estimators(" , ")


class TestExperimentConfig(unittest.TestCase):
    """Test ExperimentConfig validation."""

    def test_defaults(self):
        """Test the default sweep."""
        config = ExperimentConfig()
        self.assertEqual(config.ns, (10, 20, 30, 40, 50, 60))
        self.assertEqual(config.epsilons, (1.0, 5.0))
        self.assertEqual(config.trials, 10)
        self.assertEqual(config.resolved_pattern.name, "cycle:4")
        self.assertEqual(config.to_dict()["model"], "sbm2")

    def test_invalid_values(self):
        """Test rejected sweeps."""
        bad = [
            dict(trials=0),
            dict(epsilons=()),
            dict(ns=()),
            dict(estimators=()),
            dict(workers=0),
            dict(estimators=("mle",)),
            dict(epsilons=(0.0,)),
            dict(ns=(3,)),
            dict(ns=(11,)),
            dict(pattern="hexagon:6"),
        ]
        for kwargs in bad:
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ValueError):
                    ExperimentConfig(**kwargs)

    def test_max_n(self):
        """Test that n above the default cap needs max_n=None."""
        with self.assertRaises(InfeasibleScaleError):
            ExperimentConfig(ns=(70,))
        self.assertEqual(ExperimentConfig(ns=(70,), max_n=None).ns, (70,))

    def test_ba_model(self):
        """Test that BA sweeps accept odd n."""
        self.assertEqual(ExperimentConfig(model="ba", ns=(11,)).generator_spec(11).attachment_count, 2)


class TestRunExperiment(unittest.TestCase):
    """Test run_experiment on a small sweep."""

    @classmethod
    def setUpClass(cls):
        cls.config = ExperimentConfig(ns=(10, 20), epsilons=(1.0,), trials=3, master_seed=5)
        cls.report = run_experiment(cls.config)

    def test_cells_sorted(self):
        """Test one cell per (n, epsilon, estimator), in sorted order."""
        keys = [(c.n, c.epsilon, c.estimator) for c in self.report.cells]
        self.assertEqual(keys, [
            (10, 1.0, ALGORITHM1), (10, 1.0, RR_BASELINE),
            (20, 1.0, ALGORITHM1), (20, 1.0, RR_BASELINE),
        ])
        self.assertEqual(self.report.skipped, [])

    def test_csv_header(self):
        """Test the column order of the results CSV."""
        header = self.report.to_csv().splitlines()[0]
        self.assertEqual(header, ",".join(CSV_COLUMNS))
        rows = read_rows(self.report.to_csv())
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[0]["model"], "sbm2")
        self.assertEqual(rows[0]["pattern"], "cycle:4")
        self.assertEqual(rows[0]["trial_count"], "3")
        self.assertEqual(rows[0]["seed"], "5")

    def test_truth_shared_across_estimators(self):
        """Test that both estimators see the same graph and truth."""
        a1 = self.report.cell(20, 1.0, ALGORITHM1)
        rr = self.report.cell(20, 1.0, RR_BASELINE)
        self.assertEqual(a1.truth, rr.truth)
        self.assertEqual(len(set(a1.truths)), 1)

    def test_baseline_values_are_counts(self):
        """Test that rr_baseline estimates are non-negative integers."""
        for cell in self.report.cells:
            if cell.estimator == RR_BASELINE:
                for value in cell.estimates:
                    self.assertGreaterEqual(value, 0.0)
                    self.assertTrue(value.is_integer())

    def test_metric_consistency(self):
        """Test rmse_paper == rmse_mean * sqrt(T) in every row."""
        for cell in self.report.cells:
            self.assertAlmostEqual(
                cell.rmse_paper, cell.rmse_mean * math.sqrt(cell.trial_count),
                delta=1e-9 * max(1.0, cell.rmse_paper),
            )

    def test_seeds_recorded(self):
        """Test that per-trial seeds come from trial_seed."""
        cell = self.report.cell(10, 1.0, RR_BASELINE)
        self.assertEqual(cell.seeds, tuple(trial_seed(5, 10, 1.0, RR_BASELINE, t) for t in range(3)))

    def test_deterministic(self):
        """Test identical CSVs modulo timing for identical configs."""
        again = run_experiment(self.config)
        self.assertEqual(without_timing(again.to_csv()), without_timing(self.report.to_csv()))

    def test_workers_do_not_change_results(self):
        """Test that cell scheduling does not affect estimates."""
        threaded = run_experiment(ExperimentConfig(
            ns=(10, 20), epsilons=(1.0,), trials=3, master_seed=5, workers=3,
        ))
        self.assertEqual(
            [c.estimates for c in threaded.cells], [c.estimates for c in self.report.cells]
        )

    def test_raw_rows(self):
        """Test one raw row per trial."""
        rows = read_rows(self.report.to_raw_csv())
        self.assertEqual(list(rows[0]), list(RAW_COLUMNS))
        self.assertEqual(len(rows), 4 * 3)
        cell = self.report.cells[0]
        self.assertEqual(float(rows[1]["estimate"]), cell.estimates[1])

    def test_series(self):
        """Test the (n, metric) series of one estimator."""
        series = self.report.series(ALGORITHM1, 1.0)
        self.assertEqual([n for n, _ in series], [10, 20])


class TestExperimentOutput(unittest.TestCase):
    """Test file output and graph redraws."""

    def test_writes_files(self):
        """Test the CSV and the per-trial sibling file."""
        with tempfile.TemporaryDirectory() as tmp:
            output = os.path.join(tmp, "results.csv")
            raw = raw_sibling_path(output)
            self.assertEqual(raw, os.path.join(tmp, "results.raw.csv"))
            config = ExperimentConfig(ns=(10,), epsilons=(2.0,), trials=2, output=output, raw_out=raw)
            report = run_experiment(config)
            with open(output, encoding='utf-8') as handle:
                self.assertEqual(handle.read(), report.to_csv())
            with open(raw, encoding='utf-8') as handle:
                self.assertEqual(len(read_rows(handle.read())), 2 * 2)

    def test_sibling_path_without_suffix(self):
        """Test results -> results.raw.csv."""
        self.assertEqual(raw_sibling_path("results"), "results.raw.csv")

    def test_redraw_graph(self):
        """Test one truth per trial when graphs are redrawn."""
        config = ExperimentConfig(ns=(20,), epsilons=(1.0,), trials=4,
                                  estimators=(ALGORITHM1,), redraw_graph=True)
        cell = run_experiment(config).cells[0]
        self.assertEqual(len(cell.truths), 4)
        self.assertAlmostEqual(cell.analyzer.truth, sum(cell.truths) / 4, places=12)

    def test_infeasible_cells_skipped(self):
        """Test that cells beyond the counting budget are skipped, not fatal."""
        config = ExperimentConfig(pattern="clique:8", ns=(10, 60), epsilons=(1.0,), trials=1)
        with self.assertLogs("graphlet_ldp.experiment", level="WARNING"):
            report = run_experiment(config)
        self.assertEqual([c.n for c in report.cells], [10, 10])
        self.assertEqual([(s[0], s[2]) for s in report.skipped], [(60, ALGORITHM1), (60, RR_BASELINE)])
        self.assertFalse(report.all_skipped)

    def test_all_skipped(self):
        """Test that a sweep with no feasible cell reports all_skipped."""
        config = ExperimentConfig(pattern="clique:8", ns=(60,), epsilons=(1.0,), trials=1)
        with self.assertLogs("graphlet_ldp.experiment", level="WARNING"):
            report = run_experiment(config)
        self.assertTrue(report.all_skipped)
        self.assertEqual(len(read_rows(report.to_csv())), 0)


class TestAccuracyTrends(unittest.TestCase):
    """Test the error scaling of both estimators on the default SBM sweep."""

    @classmethod
    def setUpClass(cls):
        cls.report = run_experiment(ExperimentConfig(
            ns=(10, 20, 30, 40, 50, 60), epsilons=(1.0,), trials=10, master_seed=0,
        ))

    def test_unbiased_beats_baseline(self):
        """Test algorithm1 has lower rmse_paper than rr_baseline at every n >= 30."""
        wins = sum(
            self.report.cell(n, 1.0, ALGORITHM1).rmse_paper < self.report.cell(n, 1.0, RR_BASELINE).rmse_paper
            for n in (30, 40, 50, 60)
        )
        self.assertEqual(wins, 4)

    def test_error_growth(self):
        """Test the log-log rmse slope of algorithm1 near k - 1 = 3 and the steeper baseline."""
        a1 = self.report.slope(ALGORITHM1, 1.0)
        rr = self.report.slope(RR_BASELINE, 1.0)
        self.assertGreaterEqual(a1, 2.3)
        self.assertLessEqual(a1, 3.7)
        self.assertGreater(rr, a1)

    def test_relative_error_at_high_budget(self):
        """Test per-trial relative error below 0.1 at n = 60, epsilon = 5."""
        report = run_experiment(ExperimentConfig(
            ns=(60,), epsilons=(5.0,), trials=10, estimators=(ALGORITHM1,),
        ))
        cell = report.cells[0]
        self.assertGreater(cell.truth, 0)
        self.assertLess(cell.rel_rmse_mean, 0.1)
        self.assertAlmostEqual(cell.rel_rmse_paper, cell.rel_rmse_mean * math.sqrt(10), places=9)

    def test_no_systematic_bias(self):
        """Test |mean - truth| < 2 std / sqrt(T) in at least 80% of 50 cells."""
        epsilons = (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 3.0)
        report = run_experiment(ExperimentConfig(
            ns=(12, 16, 20, 24, 28), epsilons=epsilons, trials=10,
            estimators=(ALGORITHM1,), master_seed=11,
        ))
        self.assertEqual(len(report.cells), 50)
        within = sum(
            abs(cell.estimate_mean - cell.truth) < 2 * cell.std_dev / math.sqrt(cell.trial_count)
            for cell in report.cells
        )
        self.assertGreaterEqual(within, 40)


class TestBarabasiAlbertSweep(unittest.TestCase):
    """Test both estimators on preferential-attachment graphs."""

    @classmethod
    def setUpClass(cls):
        cls.report = run_experiment(ExperimentConfig(
            model="ba", ns=(30, 40, 50), epsilons=(1.0,), trials=10, master_seed=3,
        ))

    def test_cells(self):
        """Test finite metrics for every (n, estimator) cell."""
        self.assertEqual(len(self.report.cells), 6)
        self.assertEqual({row["model"] for row in read_rows(self.report.to_csv())}, {"ba"})
        self.assertEqual(self.report.skipped, [])
        for cell in self.report.cells:
            self.assertGreater(cell.truth, 0)
            self.assertTrue(math.isfinite(cell.rmse_paper))
            self.assertTrue(math.isfinite(cell.rel_rmse_paper))

    def test_unbiased_beats_baseline_at_largest_n(self):
        """Test algorithm1 rmse_paper below rr_baseline at n = 50."""
        a1 = self.report.cell(50, 1.0, ALGORITHM1)
        rr = self.report.cell(50, 1.0, RR_BASELINE)
        self.assertLess(a1.rmse_paper, rr.rmse_paper)

    def test_error_rises_with_n(self):
        """Test that algorithm1 rmse_paper grows along the sweep."""
        errors = [self.report.cell(n, 1.0, ALGORITHM1).rmse_paper for n in (30, 40, 50)]
        self.assertEqual(errors, sorted(errors))
        self.assertGreater(errors[-1], errors[0])


@unittest.skipUnless(SLOW_TESTS, "set GRAPHLET_LDP_SLOW_TESTS=1 to run")
class TestLargeGraph(unittest.TestCase):
    """Test the n = 100 grid point."""

    def test_improvement_over_baseline(self):
        """Test a wide rmse gap at n = 100, epsilon = 1 and low relative error at epsilon = 5."""
        report = run_experiment(ExperimentConfig(
            ns=(100,), epsilons=(1.0, 5.0), trials=10, max_n=None,
        ))
        a1 = report.cell(100, 1.0, ALGORITHM1)
        rr = report.cell(100, 1.0, RR_BASELINE)
        self.assertGreater(rr.rmse_paper / a1.rmse_paper, 10)
        self.assertLess(report.cell(100, 5.0, ALGORITHM1).rel_rmse_mean, 0.05)


if __name__ == '__main__':
    unittest.main()
