"""Scenario composition: build the target task and optimized source archives.

Many-to-one composition allocates exactly ceil(ratio*count) sources to the
family's related class and splits the remainder evenly over its unrelated
classes (leftovers go to the earlier classes). Every source is optimized with
the family-default CGA and archived (first + final generation).

Related/unrelated classes per family:
  knapsack  related sc_ak (capacity-class match with the ak target);
            unrelated uc_rk, sc_rk, wc_rk
  arm       related strong band (alpha_max=1) with psi-scaled geometry
            (d_s = psi*d_T, L_s = L_T/psi, psi in {2..9});
            unrelated weak band (0.18 < alpha_max < 0.26), same psi scaling
  attack    related: target frame plus low-amplitude smooth noise;
            unrelated: independent random frames
"""
from __future__ import annotations

import math
import warnings

from ..core import (
    ContractError,
    Family,
    RngStream,
    RunBudget,
    SourceArchive,
    TaskSpec,
)
from ..problems.arm import ArmTask
from ..problems.attack import make_related_task, make_toy_task
from ..problems.knapsack import generate_knapsack
from ..transfer import SolverSettings, cga_run
from .config import ExperimentConfig, related_source_count

SQRT2 = math.sqrt(2.0)

KNAPSACK_RELATED = ("sc", "ak")
KNAPSACK_UNRELATED = (("uc", "rk"), ("sc", "rk"), ("wc", "rk"))
RELATED_FRAME_AMPLITUDE = 3.0

FAMILY_SOURCE_BUDGET = {
    Family.KNAPSACK: (5000, 50),
    Family.PLANAR_ARM: (5000, 50),
    Family.ATTACK: (1000, 10),
}


def source_budget_for(config: ExperimentConfig) -> RunBudget:
    if config.source_budget is not None:
        return config.source_budget
    evals, pop = FAMILY_SOURCE_BUDGET[config.family]
    return RunBudget(evals, pop)


def make_target(config: ExperimentConfig) -> TaskSpec:
    rng = RngStream(config.seed).split_label("target")
    t = config.target
    if config.family is Family.KNAPSACK:
        d = int(t["dimension"])
        inst = generate_knapsack(t["value_category"], t["capacity_category"], d, rng)
        return TaskSpec(Family.KNAPSACK, inst, d)
    if config.family is Family.PLANAR_ARM:
        joints = int(t["joints"])
        arm = ArmTask(float(t.get("length", SQRT2)), float(t.get("alpha_max", 1.0)), joints)
        return TaskSpec(Family.PLANAR_ARM, arm, joints)
    task = make_toy_task(
        int(t["policy_seed"]),
        int(t["frame_seed"]),
        int(t["height"]),
        int(t["width"]),
        int(t["actions"]),
        int(t["pixel_budget"]),
    )
    return TaskSpec(Family.ATTACK, task, task.dimension)


def _many_to_one_labels(config: ExperimentConfig) -> list[str]:
    count = int(config.sources["count"])
    ratio = float(config.sources["related_ratio"])
    n_related = related_source_count(ratio, count)
    if ratio > 0 and math.ceil(ratio * count - 1e-9) < 1:
        warnings.warn("related ratio rounds below one source; bumped to 1", stacklevel=2)
    if config.family is Family.KNAPSACK:
        unrelated = ["{}_{}".format(*c) for c in KNAPSACK_UNRELATED]
        related = "{}_{}".format(*KNAPSACK_RELATED)
    elif config.family is Family.PLANAR_ARM:
        unrelated = ["weak"]
        related = "strong"
    else:
        unrelated = ["unrelated"]
        related = "related"
    labels = [related] * n_related
    remainder = count - n_related
    base, extra = divmod(remainder, len(unrelated))
    for j, cls in enumerate(unrelated):
        labels += [cls] * (base + (1 if j < extra else 0))
    return labels


def _knapsack_source(label: str, dimension: int, rng: RngStream) -> TaskSpec:
    vc, cc = label.split("_")
    inst = generate_knapsack(vc, cc, dimension, rng)
    return TaskSpec(Family.KNAPSACK, inst, dimension)


def _arm_source(label: str, target_arm: ArmTask, rng: RngStream) -> TaskSpec:
    g = rng.generator
    psi = int(g.integers(2, 10))
    joints = psi * target_arm.joints
    length = target_arm.length / psi
    if label == "strong":
        alpha = 1.0
    else:
        alpha = 0.18 + 0.08 * float(g.random())
        if alpha <= 0.18:
            alpha = 0.22
    return TaskSpec(Family.PLANAR_ARM, ArmTask(length, alpha, joints), joints)


def _attack_source(label: str, config: ExperimentConfig, rng: RngStream, amplitude: float) -> TaskSpec:
    t = config.target
    g = rng.generator
    common = (int(t["height"]), int(t["width"]), int(t["actions"]), int(t["pixel_budget"]))
    if label == "related":
        noise_seed = int(g.integers(2**31))
        task = make_related_task(
            int(t["policy_seed"]), int(t["frame_seed"]), noise_seed, amplitude, *common
        )
    else:
        # a different agent entirely: its attackable pixels are a property of
        # the policy weights, so sharing the target policy would make every
        # frame's attacks transferable
        policy_seed = int(t["policy_seed"]) + 1 + int(g.integers(2**31))
        frame_seed = int(g.integers(2**31))
        task = make_toy_task(policy_seed, frame_seed, *common)
    return TaskSpec(Family.ATTACK, task, task.dimension)


def _explicit_source(entry: dict, config: ExperimentConfig, rng: RngStream) -> tuple[TaskSpec, str]:
    if config.family is Family.KNAPSACK:
        vc = entry["value_category"]
        cc = entry["capacity_category"]
        d = int(entry.get("dimension", config.target["dimension"]))
        label = f"{vc}_{cc}"
        return _knapsack_source(label, d, rng), label
    if config.family is Family.PLANAR_ARM:
        if "band" in entry:
            label = entry["band"]
            if label not in ("strong", "weak"):
                raise ContractError(f"unknown arm band {label!r}")
            target_arm = ArmTask(
                float(config.target.get("length", SQRT2)),
                float(config.target.get("alpha_max", 1.0)),
                int(config.target["joints"]),
            )
            return _arm_source(label, target_arm, rng), label
        joints = int(entry["joints"])
        arm = ArmTask(float(entry["length"]), float(entry["alpha_max"]), joints)
        return TaskSpec(Family.PLANAR_ARM, arm, joints), "explicit"
    label = entry.get("kind", "unrelated")
    if label not in ("related", "unrelated"):
        raise ContractError(f"unknown attack source kind {label!r}")
    amplitude = float(entry.get("amplitude", RELATED_FRAME_AMPLITUDE))
    return _attack_source(label, config, rng, amplitude), label


def source_task_specs(config: ExperimentConfig) -> tuple[list[TaskSpec], list[str]]:
    """Source tasks plus their class labels, before any optimization."""
    base_rng = RngStream(config.seed).split_label("sources")
    tasks: list[TaskSpec] = []
    labels: list[str] = []
    if config.sources["mode"] == "explicit":
        for i, entry in enumerate(config.sources["list"]):
            task, label = _explicit_source(entry, config, base_rng.split(i))
            tasks.append(task)
            labels.append(label)
        return tasks, labels
    labels = _many_to_one_labels(config)
    target_arm = None
    if config.family is Family.PLANAR_ARM:
        target_arm = ArmTask(
            float(config.target.get("length", SQRT2)),
            float(config.target.get("alpha_max", 1.0)),
            int(config.target["joints"]),
        )
    for i, label in enumerate(labels):
        rng = base_rng.split(i)
        if config.family is Family.KNAPSACK:
            tasks.append(_knapsack_source(label, int(config.target["dimension"]), rng))
        elif config.family is Family.PLANAR_ARM:
            tasks.append(_arm_source(label, target_arm, rng))
        else:
            tasks.append(_attack_source(label, config, rng, RELATED_FRAME_AMPLITUDE))
    return tasks, labels


def compose_sources(
    config: ExperimentConfig,
) -> tuple[list[SourceArchive], list[str]]:
    """Generate and optimize every source task; archive first + final populations."""
    tasks, labels = source_task_specs(config)
    budget = source_budget_for(config)
    base_rng = RngStream(config.seed).split_label("optimize-sources")
    archives: list[SourceArchive] = []
    for i, task in enumerate(tasks):
        settings = SolverSettings.for_family(task.family)
        _best, trace = cga_run(task, settings, budget, base_rng.split(i))
        archives.append(
            SourceArchive(
                task,
                trace.first_population,
                trace.final_population,
                seed=i,
                solver_settings_id="cga-default",
            )
        )
    return archives, labels
