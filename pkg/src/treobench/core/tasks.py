"""Task records, evaluation dispatch, and the counting problem boundary.

`evaluate` is the single entry point for fitness: it dispatches to the family
objective and applies feasibility repair where the family defines one
(knapsack). Evaluation counting lives in `Evaluator` so "function evaluations"
means exactly one thing everywhere in the suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .genome import (
    ContractError,
    EvaluationError,
    Genome,
    Population,
    Representation,
)
from .rng import RngStream


class Family(str, Enum):
    KNAPSACK = "knapsack"
    PLANAR_ARM = "arm"
    ATTACK = "attack"


FAMILY_REPRESENTATION = {
    Family.KNAPSACK: Representation.BINARY,
    Family.PLANAR_ARM: Representation.REAL,
    Family.ATTACK: Representation.REAL,
}


@dataclass(frozen=True)
class TaskSpec:
    family: Family
    parameters: object
    dimension: int

    @property
    def representation(self) -> Representation:
        return FAMILY_REPRESENTATION[self.family]


@dataclass(frozen=True)
class RunBudget:
    max_function_evaluations: int
    population_size: int
    repetitions: int = 1
    success_tolerance: float | None = None  # carried, unused: success is per-family

    def __post_init__(self):
        if self.max_function_evaluations < 1 or self.population_size < 1:
            raise ContractError("budget fields must be positive")
        if self.population_size > self.max_function_evaluations:
            raise ContractError("population_size must not exceed max_function_evaluations")
        if self.repetitions < 1:
            raise ContractError("repetitions must be positive")
        if self.success_tolerance is not None and self.success_tolerance < 0:
            raise ContractError("success_tolerance must be non-negative")


@dataclass(frozen=True)
class SourceArchive:
    task: TaskSpec
    first_generation: Population
    final_generation: Population
    seed: int
    solver_settings_id: str = "default"

    def __post_init__(self):
        for pop in (self.first_generation, self.final_generation):
            if len(pop) == 0:
                raise ContractError("archived populations must be non-empty")
            if pop.dimension != self.task.dimension:
                raise ContractError("archived population dimension must match task")


def evaluate_batch(task: TaskSpec, genes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate a (m, d) gene matrix. Returns (fitness, possibly-repaired genes)."""
    from .. import problems

    genes = np.atleast_2d(np.asarray(genes, dtype=np.float64))
    if genes.shape[1] != task.dimension:
        raise ContractError(
            f"genome dimension {genes.shape[1]} does not match task dimension {task.dimension}"
        )
    if task.family is Family.KNAPSACK:
        fitness, genes = problems.knapsack.evaluate_batch(task.parameters, genes)
    elif task.family is Family.PLANAR_ARM:
        fitness = problems.arm.evaluate_batch(task.parameters, genes)
    else:
        fitness = problems.attack.evaluate_batch(task.parameters, genes)
    if not np.all(np.isfinite(fitness)):
        raise EvaluationError(f"{task.family.value} objective produced non-finite fitness")
    return fitness, genes


def evaluate(task: TaskSpec, genome: Genome) -> float:
    """Fitness of one genome (maximization for all families)."""
    if genome.representation is not task.representation:
        raise ContractError("genome representation does not match task family")
    fitness, _ = evaluate_batch(task, genome.genes[None, :])
    return float(fitness[0])


class Evaluator:
    """The problem boundary: counts every evaluation, applies Lamarckian repair."""

    def __init__(self, task: TaskSpec):
        self.task = task
        self.evaluations = 0

    def __call__(self, genes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        fitness, genes = evaluate_batch(self.task, genes)
        self.evaluations += genes.shape[0]
        return fitness, genes


def random_genes(task: TaskSpec, count: int, rng: RngStream) -> np.ndarray:
    """Uniform-random initial genomes for the task's representation."""
    g = rng.generator
    if task.representation is Representation.BINARY:
        return (g.random((count, task.dimension)) < 0.5).astype(np.float64)
    return g.random((count, task.dimension))
