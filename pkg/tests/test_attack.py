"""Perturbation decoding and the flip objective on the toy policy."""

import numpy as np
import pytest

from treobench import ContractError, RngStream
from treobench.problems.attack import (
    AttackTask,
    decode_perturbation,
    evaluate_batch,
    make_related_task,
    make_toy_task,
    perturbed_states,
    related_frame,
    task_from_recipe,
    toy_frame,
    toy_policy,
)


class _ScriptedPolicy:
    """Fixed output distributions regardless of input; clean vs perturbed."""

    def __init__(self, clean, perturbed, height=4, width=4):
        self.height = height
        self.width = width
        self.action_count = len(clean)
        self._clean = np.asarray(clean, dtype=np.float64)
        self._perturbed = np.asarray(perturbed, dtype=np.float64)

    def query(self, state):
        return self._clean

    def query_batch(self, states):
        states = np.asarray(states, dtype=np.float64)
        m = 1 if states.ndim == 2 else states.shape[0]
        return np.tile(self._perturbed, (m, 1))


def _scripted_task(clean, perturbed, pixel_budget=1):
    policy = _ScriptedPolicy(clean, perturbed)
    frame = np.zeros((4, 4))
    return AttackTask(policy, frame, pixel_budget)


def test_unmoved_distribution_scores_runner_up_gap():
    # pi = (0.7, 0.2, 0.1), original action 0: best non-original minus
    # original is 0.2 - 0.7
    task = _scripted_task([0.7, 0.2, 0.1], [0.7, 0.2, 0.1])
    fitness = evaluate_batch(task, np.full((1, 3), 0.5))
    assert fitness[0] == pytest.approx(-0.5, abs=1e-12)


def test_flipped_distribution_scores_positive():
    task = _scripted_task([0.7, 0.2, 0.1], [0.3, 0.5, 0.2])
    fitness = evaluate_batch(task, np.full((1, 3), 0.5))
    assert fitness[0] == pytest.approx(0.2, abs=1e-12)
    # positive fitness is exactly the argmax-flipped condition
    assert fitness[0] > 0.0


def test_decode_triples_and_boundary_clamp():
    task = _scripted_task([0.6, 0.4], [0.6, 0.4], pixel_budget=2)
    genes = np.array([1.0, 1.0, 1.0, 0.3, 0.6, 0.4])
    triples = decode_perturbation(task, genes)
    # gene exactly 1.0 would index one past the edge without the clamp
    assert triples[0] == (3, 3, 255.0)
    assert triples[1] == (1, 2, pytest.approx(0.4 * 255.0))


def test_perturbed_states_apply_in_genome_order():
    task = _scripted_task([0.6, 0.4], [0.6, 0.4], pixel_budget=2)
    # both pixels land on (x=2, y=1); the later intensity must win
    genes = np.array([0.5, 0.25, 0.2, 0.5, 0.25, 0.8])
    state = perturbed_states(task, genes)[0]
    assert state[1, 2] == pytest.approx(0.8 * 255.0)
    changed = np.argwhere(state != task.base_state)
    assert changed.tolist() == [[1, 2]]


def test_wrong_genome_length_rejected():
    task = _scripted_task([0.6, 0.4], [0.6, 0.4], pixel_budget=2)
    with pytest.raises(ContractError):
        evaluate_batch(task, np.full((1, 5), 0.5))


def test_blob_pixel_moves_a_logit():
    policy = toy_policy(11, 84, 84, 6)
    frame = toy_frame(5, 84, 84)
    cy, cx = policy.blob_center
    hit = frame.copy()
    # push the pixel to whichever extreme is farther away
    hit[cy, cx] = 0.0 if frame[cy, cx] > 127.5 else 255.0
    before = policy.logits(frame)[0]
    after = policy.logits(hit)[0]
    assert np.max(np.abs(after - before)) >= 0.1


def test_random_pixel_attacks_sometimes_flip_the_action():
    task = make_toy_task(11, 5, 84, 84, 6, 4)
    genes = RngStream(123).generator.random((1000, task.dimension))
    fitness = evaluate_batch(task, genes)
    flips = int((fitness > 0.0).sum())
    # the policy must be attackable but not trivially broken
    assert 1 <= flips <= 500


def test_related_frame_stays_in_intensity_range():
    frame = related_frame(5, 9, 3.0, 84, 84)
    assert frame.min() >= 0.0 and frame.max() <= 255.0
    base = toy_frame(5, 84, 84)
    assert np.max(np.abs(frame - base)) <= 3.0 + 1e-9


def test_recipes_rebuild_identical_tasks():
    t1 = make_toy_task(11, 5, 32, 32, 4, 2)
    t2 = task_from_recipe(11, 32, 32, 4, 2, t1.recipe)
    assert np.array_equal(t1.base_state, t2.base_state)
    assert t1.original_action == t2.original_action

    r1 = make_related_task(11, 5, 9, 3.0, 32, 32, 4, 2)
    r2 = task_from_recipe(11, 32, 32, 4, 2, r1.recipe)
    assert np.array_equal(r1.base_state, r2.base_state)

    with pytest.raises(ContractError):
        task_from_recipe(11, 32, 32, 4, 2, ("mystery", 1))
