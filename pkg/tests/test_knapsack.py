"""Instance generator categories and greedy ratio repair, against hand traces
and a brute-force oracle."""

import numpy as np
import pytest

from treobench import RngStream
from treobench.problems.knapsack import (
    KnapsackInstance,
    dantzig_repair,
    evaluate_batch,
    generate_knapsack,
    knapsack_evaluate,
    repair_batch,
)


def _hand_instance():
    return KnapsackInstance(
        values=np.array([6.0, 5.0, 9.0, 7.0]),
        weights=np.array([2.0, 3.0, 5.0, 4.0]),
        capacity=9.0,
        value_category="uc",
        capacity_category="ak",
    )


def exhaustive_optimum(inst, chunk=1 << 18):
    """Best feasible value by full enumeration; fine for n <= 20."""
    n = inst.n
    best = 0.0
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n), dtype=np.uint32)
        bits = ((codes[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(np.float64)
        weight = bits @ inst.weights
        value = bits @ inst.values
        feasible = value[weight <= inst.capacity]
        if feasible.size:
            best = max(best, float(feasible.max()))
    return best


def test_repair_hand_trace_drops_worst_ratio_items():
    inst = _hand_instance()
    # ratios 3.0, 1.67, 1.8, 1.75; all-ones overweight by 5, so the repair
    # drops items 1 then 3 and stops
    repaired = dantzig_repair(inst, np.array([1.0, 1.0, 1.0, 1.0]))
    assert np.array_equal(repaired, [1.0, 0.0, 1.0, 0.0])
    assert repaired @ inst.weights == 7.0


def test_feasible_genome_is_untouched():
    inst = _hand_instance()
    genome = np.array([1.0, 1.0, 0.0, 1.0])  # weight 9 == capacity
    assert np.array_equal(dantzig_repair(inst, genome), genome)
    assert knapsack_evaluate(inst, genome) == pytest.approx(18.0)


def test_repair_batch_matches_single_row_repair():
    rng = RngStream(17)
    inst = generate_knapsack("wc", "rk", 15, rng.split(0))
    genes = (rng.split(1).generator.random((64, 15)) < 0.7).astype(float)
    batch = repair_batch(inst, genes)
    for row, expected in zip(genes, batch):
        assert np.array_equal(dantzig_repair(inst, row), expected)


def test_repaired_values_never_beat_exhaustive_optimum():
    rng = RngStream(99)
    for i in range(8):
        n = int(rng.split(i).generator.integers(5, 13))
        inst = generate_knapsack("uc", "ak", n, rng.split(i).split(0))
        opt = exhaustive_optimum(inst)
        genes = (rng.split(i).split(1).generator.random((100, n)) < 0.5).astype(float)
        fitness, repaired = evaluate_batch(inst, genes)
        assert np.all(repaired @ inst.weights <= inst.capacity + 1e-9)
        assert np.all(fitness <= opt + 1e-9)


@pytest.mark.parametrize("cap_cat", ["rk", "ak"])
def test_value_categories(cap_cat):
    rng = RngStream(31)
    n = 200
    uc = generate_knapsack("uc", cap_cat, n, rng.split(0))
    assert np.all((uc.values >= 1.0) & (uc.values <= 10.0))
    assert np.all((uc.weights >= 1.0) & (uc.weights <= 10.0))
    sc = generate_knapsack("sc", cap_cat, n, rng.split(1))
    assert np.allclose(sc.values, sc.weights + 5.0)
    wc = generate_knapsack("wc", cap_cat, n, rng.split(2))
    assert np.all(np.abs(wc.values - wc.weights) <= 5.0)
    assert np.all(wc.values > 0.0)  # negative draws are redrawn


def test_capacity_categories():
    rng = RngStream(32)
    rk = generate_knapsack("uc", "rk", 100, rng.split(0))
    assert rk.capacity == pytest.approx(20.0)
    ak = generate_knapsack("uc", "ak", 100, rng.split(1))
    assert ak.capacity == pytest.approx(0.5 * ak.weights.sum())


def test_generator_is_deterministic():
    a = generate_knapsack("wc", "ak", 50, RngStream(5).split(1))
    b = generate_knapsack("wc", "ak", 50, RngStream(5).split(1))
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.weights, b.weights)
    assert a.capacity == b.capacity


def test_unknown_categories_rejected():
    from treobench import ContractError

    with pytest.raises(ContractError):
        generate_knapsack("xx", "ak", 10, RngStream(0))
    with pytest.raises(ContractError):
        generate_knapsack("uc", "xx", 10, RngStream(0))


def test_ratio_order_is_ascending_with_stable_ties():
    inst = KnapsackInstance(
        values=np.array([2.0, 1.0, 4.0, 2.0]),
        weights=np.array([1.0, 1.0, 2.0, 1.0]),
        capacity=3.0,
        value_category="uc",
        capacity_category="ak",
    )
    # ratios 2, 1, 2, 2: item 1 first, then the tied 2s in index order
    assert list(inst.ratio_order) == [1, 0, 2, 3]
