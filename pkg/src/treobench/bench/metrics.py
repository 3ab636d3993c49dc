"""Run metrics: pooled performance scores and first-success generations."""
from __future__ import annotations

import math

import numpy as np

from ..core import ContractError


def performance_score(values) -> np.ndarray:
    """Pooled z-score average per solver.

    `values` holds one row per solver (repetition lists may differ in length
    when repetitions failed). Mean and population standard deviation are pooled
    over every value of every solver; each solver's score is the mean of its
    standardized values. All-equal values give all-zero scores.
    """
    rows = [np.asarray(row, dtype=np.float64) for row in values]
    if not rows or any(row.size == 0 for row in rows):
        raise ContractError("performance_score needs at least one value per solver")
    pooled = np.concatenate(rows)
    mu = pooled.mean()
    sigma = pooled.std()  # population std, pooled over all solvers and repetitions
    if sigma == 0.0:
        return np.zeros(len(rows))
    return np.array([((row - mu) / sigma).mean() for row in rows])


def gen_gt0(trace) -> int | None:
    """1-based index of the first recorded best-so-far above zero.

    Row 1 is the evaluated initialization, row 2 the first offspring
    generation, and so on. None when the run never crosses zero.
    """
    series = getattr(trace, "best_so_far", trace)
    for i, value in enumerate(series):
        if value > 0.0:
            return i + 1
    return None


def median_gen_gt0(values: list[int | None]) -> float:
    """Median with never-succeeded runs counted as +inf."""
    if not values:
        return math.inf
    return float(np.median([math.inf if v is None else v for v in values]))
