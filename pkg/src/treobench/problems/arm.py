"""Planar robotic arm reaching objective.

A genome of d joint values in [0,1] decodes to joint angles
alpha_i = 2*pi*alpha_max*(g_i - 0.5); the arm has d links of length L/d and
the tip position is the planar rotation chain
tip = sum_i (L/d) * (cos Theta_i, sin Theta_i) with Theta_i the cumulative
angle of the first i joints. Fitness is the negative Euclidean distance from
the tip to the target point (default (1,1)), so 0 is a perfect reach.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import ContractError


@dataclass(frozen=True)
class ArmTask:
    length: float
    alpha_max: float
    joints: int
    target: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if not 0.0 < self.length <= math.sqrt(2.0) + 1e-12:
            raise ContractError("arm length must lie in (0, sqrt(2)]")
        if not 0.0 < self.alpha_max <= 1.0:
            raise ContractError("alpha_max must lie in (0, 1]")
        if self.joints < 1:
            raise ContractError("need at least one joint")

    @property
    def link_length(self) -> float:
        return self.length / self.joints


def tip_positions(task: ArmTask, genes: np.ndarray) -> np.ndarray:
    """Forward kinematics for a (m, d) matrix of genomes; returns (m, 2) tips."""
    genes = np.atleast_2d(genes)
    if genes.shape[1] != task.joints:
        raise ContractError("genome length must equal the joint count")
    angles = 2.0 * math.pi * task.alpha_max * (genes - 0.5)
    theta = np.cumsum(angles, axis=1)
    lp = task.link_length
    x = lp * np.cos(theta).sum(axis=1)
    y = lp * np.sin(theta).sum(axis=1)
    return np.stack([x, y], axis=1)


def arm_forward_kinematics(task: ArmTask, genes: np.ndarray) -> tuple[float, float]:
    tip = tip_positions(task, np.asarray(genes, dtype=np.float64)[None, :])[0]
    return float(tip[0]), float(tip[1])


def evaluate_batch(task: ArmTask, genes: np.ndarray) -> np.ndarray:
    tips = tip_positions(task, genes)
    target = np.asarray(task.target, dtype=np.float64)
    return -np.linalg.norm(tips - target, axis=1)


def arm_evaluate(task: ArmTask, genes: np.ndarray) -> float:
    return float(evaluate_batch(task, np.asarray(genes, dtype=np.float64)[None, :])[0])
