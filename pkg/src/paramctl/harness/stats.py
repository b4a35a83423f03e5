"""Summary statistics and oracle comparisons."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BOOTSTRAP_RESAMPLES = 2000


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    std: float
    median: float
    q05: float
    q95: float
    ci_low: float
    ci_high: float
    success_rate: float

    def __str__(self):
        return (f"n={self.count} mean={self.mean:.6g} sd={self.std:.4g} median={self.median:.6g} "
                f"q05={self.q05:.6g} q95={self.q95:.6g} ci95=[{self.ci_low:.6g}, {self.ci_high:.6g}] "
                f"success={self.success_rate:.3f}")


def _values(outcomes, field):
    vals, succ = [], []
    for o in outcomes:
        if isinstance(o, (int, float, np.integer, np.floating)):
            vals.append(float(o))
            succ.append(True)
            continue
        o = getattr(o, "outcome", o)
        vals.append(float(getattr(o, field)))
        succ.append(bool(o.success))
    return np.asarray(vals, dtype=float), np.asarray(succ)


def summarize(outcomes, field: str = "evaluations", resamples: int = BOOTSTRAP_RESAMPLES,
              seed: int = 0) -> SummaryStats:
    """Statistics of one numeric field over runs (or of plain numbers).

    The confidence interval is a percentile bootstrap of the mean, widened
    if necessary so that it contains the sample mean.
    """
    x, succ = _values(list(outcomes), field)
    if x.size == 0:
        raise ValueError("no outcomes to summarize")
    mean = float(x.mean())
    std = float(x.std(ddof=1)) if x.size > 1 else 0.0
    q05, median, q95 = (float(v) for v in np.quantile(x, [0.05, 0.5, 0.95]))
    if std == 0.0:
        lo = hi = mean
    else:
        gen = np.random.default_rng(seed)
        means = x[gen.integers(0, x.size, size=(resamples, x.size))].mean(axis=1)
        lo, hi = (float(v) for v in np.quantile(means, [0.025, 0.975]))
        lo, hi = min(lo, mean), max(hi, mean)
    return SummaryStats(int(x.size), mean, std, median, q05, q95, lo, hi, float(succ.mean()))


@dataclass(frozen=True)
class OracleComparison:
    passed: bool
    mean: float
    oracle: float
    relative_error: float
    tolerance: float

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} mean={self.mean:.6g} oracle={self.oracle:.6g} "
                f"rel.err={self.relative_error:.4f} tol={self.tolerance}")


def compare_to_oracle(stats: SummaryStats, oracle, tolerance: float) -> OracleComparison:
    ref = float(oracle)
    if ref == 0:
        raise ValueError("relative comparison against a zero oracle")
    err = abs(stats.mean - ref) / abs(ref)
    return OracleComparison(bool(err <= tolerance), stats.mean, ref, float(err), tolerance)
