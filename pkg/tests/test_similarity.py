"""Relatedness protocols: the (L, alpha) heatmap and the seeding vote."""

import math

import numpy as np
import pytest

from treobench import ContractError, Family, RngStream, RunBudget, SourceArchive, TaskSpec
from treobench.core.genome import Population
from treobench.problems.arm import ArmTask
from treobench.problems.attack import evaluate_batch, make_toy_task
from treobench.similarity import (
    RelatednessVerdict,
    attack_relatedness,
    build_heatmap,
    classify_arm_source,
    heatmap_axes,
    heatmap_from_csv,
    heatmap_to_csv,
    verdicts_to_csv,
)

SQRT2 = math.sqrt(2.0)


def _arm(length, alpha, joints=4):
    return TaskSpec(Family.PLANAR_ARM, ArmTask(length, alpha, joints), joints)


def test_heatmap_axes_cover_the_documented_ranges():
    l_axis, alpha_axis = heatmap_axes(20)
    assert len(l_axis) == len(alpha_axis) == 20
    # lengths are cell midpoints of (0, sqrt(2)]; alphas end exactly at 1
    assert l_axis[0] == pytest.approx(SQRT2 / 40.0)
    assert l_axis[-1] == pytest.approx(SQRT2 * 39.0 / 40.0)
    assert alpha_axis[0] == pytest.approx(0.05)
    assert alpha_axis[-1] == 1.0
    assert np.all(np.diff(l_axis) > 0) and np.all(np.diff(alpha_axis) > 0)


def test_classification_bands():
    assert classify_arm_source(_arm(0.7, 1.0)) == "strong"
    assert classify_arm_source(_arm(0.7, 0.22)) == "weak"
    assert classify_arm_source(_arm(0.7, 0.5)) == "unclassified"
    assert classify_arm_source(_arm(0.7, 0.18)) == "unclassified"  # open band
    assert classify_arm_source(_arm(SQRT2, 1.0)) == "unclassified"  # L band is open too
    attack = make_toy_task(11, 5, 12, 12, 4, 1)
    with pytest.raises(ContractError):
        classify_arm_source(TaskSpec(Family.ATTACK, attack, attack.dimension))


def test_heatmap_build_is_deterministic_and_round_trips():
    grid = build_heatmap(3, 2, 4, RunBudget(40, 10), RngStream(50))
    again = build_heatmap(3, 2, 4, RunBudget(40, 10), RngStream(50))
    assert np.array_equal(grid.cells, again.cells)
    assert grid.cells.shape == (2, 2)

    parsed = heatmap_from_csv(heatmap_to_csv(grid))
    assert np.array_equal(parsed.cells, grid.cells)
    assert np.array_equal(parsed.l_axis, grid.l_axis)
    assert parsed.d == 3 and parsed.samples_per_cell == 4


def test_verdict_consistency_is_enforced():
    RelatednessVerdict("s", 0.6, True, 3)
    RelatednessVerdict("s", 0.59, False, 3)
    with pytest.raises(ContractError):
        RelatednessVerdict("s", 0.59, True, 3)
    with pytest.raises(ContractError):
        RelatednessVerdict("s", 0.61, False, 3)


def test_verdict_csv_layout():
    text = verdicts_to_csv([RelatednessVerdict("src-7", 0.75, True, 5, False)])
    lines = text.strip().split("\n")
    assert lines[0] == "source_id,positive_fraction,related,repeats,unreliable"
    assert lines[1] == "src-7,0.75,1,5,0"


def test_attack_relatedness_votes_deterministically():
    target = make_toy_task(11, 5, 12, 12, 4, 1)
    task = TaskSpec(Family.ATTACK, target, target.dimension)
    genes = RngStream(51).generator.random((4, task.dimension))
    fit = evaluate_batch(target, genes)
    pop = Population.from_matrix(task.representation, genes, fit, 0)
    archive = SourceArchive(task, pop, pop, seed=9)

    budget = RunBudget(60, 10)
    v1 = attack_relatedness(archive, task, 3, RngStream(52), budget=budget)
    v2 = attack_relatedness(archive, task, 3, RngStream(52), budget=budget)
    assert v1.positive_fraction == v2.positive_fraction
    assert v1.related == (v1.positive_fraction >= 0.6)
    assert v1.source_id == "src-9"
    assert 0.0 <= v1.positive_fraction <= 1.0


def test_attack_relatedness_guards():
    target = make_toy_task(11, 5, 12, 12, 4, 1)
    task = TaskSpec(Family.ATTACK, target, target.dimension)
    genes = RngStream(53).generator.random((2, task.dimension))
    fit = evaluate_batch(target, genes)
    pop = Population.from_matrix(task.representation, genes, fit, 0)
    archive = SourceArchive(task, pop, pop, seed=0)
    with pytest.raises(ContractError):
        attack_relatedness(archive, task, 0, RngStream(54))
    arm = _arm(1.0, 1.0)
    with pytest.raises(ContractError):
        attack_relatedness(archive, arm, 3, RngStream(54))
