"""0/1 knapsack: instance generation, greedy repair, evaluation.

Instance categories follow the usual correlation/capacity taxonomy:
value categories uc (uncorrelated), wc (weakly correlated: v = w + U[-5,5]
with the offset redrawn until v >= 0), sc (strongly correlated: v = w + 5);
capacity categories rk (restrictive, C = 20) and ak (average, C = 0.5*sum(w)).

Over-capacity selections are repaired greedily: repeatedly drop the selected
item with the lowest value/weight ratio (ties to the lower index) until
feasible. Repair is Lamarckian — the repaired genome replaces the original.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import ContractError, RngStream

VALUE_CATEGORIES = ("uc", "wc", "sc")
CAPACITY_CATEGORIES = ("rk", "ak")
RESTRICTIVE_CAPACITY = 20.0


@dataclass(frozen=True)
class KnapsackInstance:
    values: np.ndarray
    weights: np.ndarray
    capacity: float
    value_category: str
    capacity_category: str
    # item indices in ascending value/weight ratio, ties by lower index;
    # precomputed because repair walks this order for every evaluation
    ratio_order: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        if v.shape != w.shape or v.ndim != 1 or v.size == 0:
            raise ContractError("values and weights must be matching non-empty vectors")
        if self.value_category not in VALUE_CATEGORIES:
            raise ContractError(f"unknown value category {self.value_category!r}")
        if self.capacity_category not in CAPACITY_CATEGORIES:
            raise ContractError(f"unknown capacity category {self.capacity_category!r}")
        order = np.lexsort((np.arange(v.size), v / w))
        object.__setattr__(self, "ratio_order", order)

    @property
    def n(self) -> int:
        return int(self.values.size)


def generate_knapsack(
    value_category: str, capacity_category: str, n: int, rng: RngStream
) -> KnapsackInstance:
    if n < 1:
        raise ContractError("n must be at least 1")
    g = rng.generator
    w = g.uniform(1.0, 10.0, n)
    if value_category == "uc":
        v = g.uniform(1.0, 10.0, n)
    elif value_category == "sc":
        v = w + 5.0
    elif value_category == "wc":
        v = w + g.uniform(-5.0, 5.0, n)
        bad = np.flatnonzero(v < 0.0)
        while bad.size:  # redraw only the offset, keeping w
            v[bad] = w[bad] + g.uniform(-5.0, 5.0, bad.size)
            bad = bad[v[bad] < 0.0]
    else:
        raise ContractError(f"unknown value category {value_category!r}")
    if capacity_category == "rk":
        capacity = RESTRICTIVE_CAPACITY
    else:
        capacity = 0.5 * float(w.sum())
    return KnapsackInstance(v, w, capacity, value_category, capacity_category)


def repair_batch(instance: KnapsackInstance, genes: np.ndarray) -> np.ndarray:
    """Greedy repair of a (m, n) bit matrix; feasible rows pass through unchanged.

    Dropping selected items one at a time in ascending ratio order until
    feasible equals zeroing the minimal prefix (in that order) whose selected
    weight covers the capacity excess.
    """
    order = instance.ratio_order
    w_sorted = instance.weights[order]
    picked = genes[:, order]
    dropped_weight = np.cumsum(picked * w_sorted, axis=1)
    total = dropped_weight[:, -1]
    excess = total - instance.capacity
    over = excess > 0.0
    if not np.any(over):
        return genes
    cut = np.argmax(dropped_weight >= excess[:, None], axis=1)
    keep = np.arange(order.size)[None, :] > cut[:, None]
    repaired_sorted = np.where(over[:, None], picked * keep, picked)
    repaired = np.empty_like(genes)
    repaired[:, order] = repaired_sorted
    return repaired


def dantzig_repair(instance: KnapsackInstance, genes: np.ndarray) -> np.ndarray:
    """Repair a single genome vector."""
    return repair_batch(instance, np.asarray(genes, dtype=np.float64)[None, :])[0]


def evaluate_batch(instance: KnapsackInstance, genes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Total value of each repaired row; returns (fitness, repaired genes)."""
    if genes.shape[1] != instance.n:
        raise ContractError("genome length must equal the item count")
    repaired = repair_batch(instance, genes)
    return repaired @ instance.values, repaired


def knapsack_evaluate(instance: KnapsackInstance, genes: np.ndarray) -> float:
    fitness, _ = evaluate_batch(instance, np.asarray(genes, dtype=np.float64)[None, :])
    return float(fitness[0])


def selection_weight(instance: KnapsackInstance, genes: np.ndarray) -> np.ndarray:
    return np.atleast_2d(genes) @ instance.weights
