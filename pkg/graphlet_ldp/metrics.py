"""
Accuracy Metrics

Error measures over the T estimates of one experiment cell:
- rmse_paper: sqrt of the SUM of squared errors over the trials
- rmse_mean: sqrt of the MEAN of squared errors
- rel_rmse_paper: rmse_paper / truth (nan when truth is 0)
plus a per-cell TrialAnalyzer and a log-log slope for scaling checks.
"""

import logging
import math
from functools import reduce
from typing import Any, Dict, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

Truth = Union[float, Sequence[float]]


def _errors(estimates: Sequence[float], truth: Truth) -> np.ndarray:
    if len(estimates) == 0:
        raise ValueError("Need at least one estimate")
    values = np.asarray(estimates, dtype=np.float64)
    truths = np.broadcast_to(np.asarray(truth, dtype=np.float64), values.shape)
    return values - truths


def _mean_truth(truth: Truth) -> float:
    return float(np.mean(np.asarray(truth, dtype=np.float64)))


def rmse_paper(estimates: Sequence[float], truth: Truth) -> float:
    """
    sqrt(sum_t (i_t - S)^2), without division by the trial count.

    Raises:
        ValueError: If estimates is empty.
    """
    errors = _errors(estimates, truth)
    return math.sqrt(reduce(lambda acc, e: acc + e * e, errors.tolist(), 0.0))


def rmse_mean(estimates: Sequence[float], truth: Truth) -> float:
    """sqrt((1/T) * sum_t (i_t - S)^2)."""
    errors = _errors(estimates, truth)
    return rmse_paper(estimates, truth) / math.sqrt(len(errors))


def rel_rmse_paper(estimates: Sequence[float], truth: Truth) -> float:
    """
    rmse_paper / S. Returns nan (and logs a warning) when S == 0; the caller
    keeps the row.
    """
    scale = _mean_truth(truth)
    if scale == 0:
        logger.warning("Relative error undefined: true count is 0")
        return math.nan
    return rmse_paper(estimates, truth) / abs(scale)


def rel_rmse_mean(estimates: Sequence[float], truth: Truth) -> float:
    """rmse_mean / S, nan when S == 0."""
    scale = _mean_truth(truth)
    if scale == 0:
        return math.nan
    return rmse_mean(estimates, truth) / abs(scale)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """
    Least-squares slope of log(y) against log(x).

    Raises:
        ValueError: With fewer than two points or non-positive values.
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size < 2 or x.shape != y.shape:
        raise ValueError("Need at least two (x, y) points of equal length")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log regression needs positive values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


class TrialAnalyzer:
    """
    Summary statistics of the T estimates of one (n, epsilon, estimator) cell.
    """

    def __init__(self, estimates: Sequence[float], truth: Truth):
        """
        Args:
            estimates: Estimates i_1..i_T.
            truth: True count S, or one true count per trial.

        Raises:
            ValueError: If estimates is empty.
        """
        if len(estimates) == 0:
            raise ValueError("Need at least one estimate")
        self._estimates = [float(e) for e in estimates]
        self._truth = truth

    @property
    def count(self) -> int:
        """Number of trials T."""
        return len(self._estimates)

    @property
    def truth(self) -> float:
        """True count (mean over trials when per-trial truths are given)."""
        return _mean_truth(self._truth)

    def mean(self) -> float:
        """Mean estimate over the T trials."""
        return reduce(lambda acc, e: acc + e, self._estimates, 0.0) / self.count

    def bias(self) -> float:
        """Mean estimate minus the true count; near 0 for an unbiased estimator."""
        return self.mean() - self.truth

    def std_deviation(self) -> float:
        """Sample standard deviation (ddof = 1); 0.0 for a single trial."""
        if self.count < 2:
            return 0.0
        mean = self.mean()
        squares = reduce(lambda acc, e: acc + (e - mean) ** 2, self._estimates, 0.0)
        return math.sqrt(squares / (self.count - 1))

    def rmse_paper(self) -> float:
        """Square root of the summed squared errors, not divided by T."""
        return rmse_paper(self._estimates, self._truth)

    def rmse_mean(self) -> float:
        """Root of the mean squared error."""
        return rmse_mean(self._estimates, self._truth)

    def rel_rmse_paper(self) -> float:
        """rmse_paper over the true count; nan when the truth is 0."""
        return rel_rmse_paper(self._estimates, self._truth)

    def rel_rmse_mean(self) -> float:
        """rmse_mean over the true count; nan when the truth is 0."""
        return rel_rmse_mean(self._estimates, self._truth)

    def summary(self) -> Dict[str, Any]:
        """Every statistic above, keyed by name."""
        return {
            "trial_count": self.count,
            "truth": self.truth,
            "estimate_mean": self.mean(),
            "rmse_paper": self.rmse_paper(),
            "rmse_mean": self.rmse_mean(),
            "rel_rmse_paper": self.rel_rmse_paper(),
            "rel_rmse_mean": self.rel_rmse_mean(),
            "std_dev": self.std_deviation(),
        }
