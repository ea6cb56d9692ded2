"""Column-resampling bootstrap for repeated shot experiments."""
from __future__ import annotations

import numpy as np


def bootstrap_ci(samples, resamples: int = 1000, confidence: float = 0.95, seed: int | None = 0):
    """Percentile intervals for the mean count of each outcome.

    ``samples`` is ``(n_outcomes, n_experiments)``: one column per repetition
    of the experiment, so every column sums to the same shot total. Whole
    columns are drawn with replacement, which keeps each bootstrap sample
    consistent with that total.

    Returns ``(mean, lo, hi)`` arrays of length ``n_outcomes``.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError("need a 2-D array with at least two experiment columns")
    totals = data.sum(axis=0)
    if not np.allclose(totals, totals[0]):
        raise ValueError("columns have different shot totals")
    if not 0 < confidence < 1:
        raise ValueError("confidence must be in (0, 1)")
    rng = np.random.default_rng(seed)
    k = data.shape[1]
    picks = rng.integers(0, k, size=(resamples, k))
    boot_means = data[:, picks].mean(axis=2)
    tail = 100 * (1 - confidence) / 2
    lo, hi = np.percentile(boot_means, [tail, 100 - tail], axis=1)
    return data.mean(axis=1), lo, hi
