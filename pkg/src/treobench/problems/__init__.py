from . import arm, attack, files, knapsack
from .arm import ArmTask, arm_evaluate, arm_forward_kinematics
from .attack import (
    AttackTask,
    ToyPolicy,
    attack_evaluate,
    decode_perturbation,
    make_related_task,
    make_toy_task,
    toy_frame,
    toy_policy,
)
from .knapsack import (
    KnapsackInstance,
    dantzig_repair,
    generate_knapsack,
    knapsack_evaluate,
)

__all__ = [
    "arm",
    "attack",
    "files",
    "knapsack",
    "ArmTask",
    "arm_evaluate",
    "arm_forward_kinematics",
    "AttackTask",
    "ToyPolicy",
    "attack_evaluate",
    "decode_perturbation",
    "make_related_task",
    "make_toy_task",
    "toy_frame",
    "toy_policy",
    "KnapsackInstance",
    "dantzig_repair",
    "generate_knapsack",
    "knapsack_evaluate",
]
