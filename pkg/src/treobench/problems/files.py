"""Plain-text instance files, one format per family.

Every file is a sequence of `key value...` lines; floats are written with
repr() so a save/load round-trip is bit-exact. Attack tasks are stored as
their construction recipe (seeds + shape) when built through the descriptor
helpers, falling back to raw frame rows otherwise.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..core import ContractError, Family, TaskSpec
from . import arm, attack, knapsack


def task_to_text(task: TaskSpec) -> str:
    if task.family is Family.KNAPSACK:
        inst: knapsack.KnapsackInstance = task.parameters
        lines = [
            "family knapsack",
            f"value_category {inst.value_category}",
            f"capacity_category {inst.capacity_category}",
            f"n {inst.n}",
            f"capacity {float(inst.capacity)!r}",
        ]
        lines += [
            f"item {float(v)!r} {float(w)!r}" for v, w in zip(inst.values, inst.weights)
        ]
    elif task.family is Family.PLANAR_ARM:
        t: arm.ArmTask = task.parameters
        lines = [
            "family arm",
            f"joints {t.joints}",
            f"length {float(t.length)!r}",
            f"alpha_max {float(t.alpha_max)!r}",
            f"target {float(t.target[0])!r} {float(t.target[1])!r}",
        ]
    elif task.family is Family.ATTACK:
        at: attack.AttackTask = task.parameters
        pol = at.policy
        lines = [
            "family attack",
            f"height {pol.height}",
            f"width {pol.width}",
            f"actions {pol.action_count}",
            f"pixel_budget {at.pixel_budget}",
            f"policy_seed {pol.seed}",
        ]
        recipe = getattr(at, "recipe", None)
        if recipe is not None:
            lines.append("frame " + " ".join(str(part) for part in recipe))
        else:
            for row in at.base_state:
                lines.append("frame_row " + " ".join(repr(float(v)) for v in row))
    else:  # pragma: no cover
        raise ContractError(f"unknown family {task.family}")
    return "\n".join(lines) + "\n"


def task_from_text(text: str) -> TaskSpec:
    fields: dict[str, list[list[str]]] = {}
    for line in text.strip().splitlines():
        parts = line.split()
        if parts:
            fields.setdefault(parts[0], []).append(parts[1:])
    family = fields["family"][0][0]
    if family == "knapsack":
        items = np.array([[float(v), float(w)] for v, w in fields["item"]])
        inst = knapsack.KnapsackInstance(
            items[:, 0],
            items[:, 1],
            float(fields["capacity"][0][0]),
            fields["value_category"][0][0],
            fields["capacity_category"][0][0],
        )
        if inst.n != int(fields["n"][0][0]):
            raise ContractError("corrupt knapsack record: item count mismatch")
        return TaskSpec(Family.KNAPSACK, inst, inst.n)
    if family == "arm":
        tx, ty = (float(v) for v in fields["target"][0])
        t = arm.ArmTask(
            float(fields["length"][0][0]),
            float(fields["alpha_max"][0][0]),
            int(fields["joints"][0][0]),
            (tx, ty),
        )
        return TaskSpec(Family.PLANAR_ARM, t, t.joints)
    if family == "attack":
        height = int(fields["height"][0][0])
        width = int(fields["width"][0][0])
        actions = int(fields["actions"][0][0])
        budget = int(fields["pixel_budget"][0][0])
        policy_seed = int(fields["policy_seed"][0][0])
        if "frame" in fields:
            recipe = fields["frame"][0]
            at = attack.task_from_recipe(policy_seed, height, width, actions, budget, recipe)
        else:
            frame = np.array([[float(v) for v in row] for row in fields["frame_row"]])
            pol = attack.toy_policy(policy_seed, height, width, actions)
            at = attack.AttackTask(pol, frame, budget)
        return TaskSpec(Family.ATTACK, at, at.dimension)
    raise ContractError(f"unknown family {family!r}")


def save_task(task: TaskSpec, path: str | Path) -> None:
    Path(path).write_text(task_to_text(task))


def load_task(path: str | Path) -> TaskSpec:
    return task_from_text(Path(path).read_text())
