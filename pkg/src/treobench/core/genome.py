"""Candidate-solution containers shared by every module.

Genomes are binary (bits stored as 0.0/1.0 floats) or real-coded in [0,1].
Individuals and populations are immutable after construction; operators build
new objects rather than mutating, so a cached fitness can never go stale.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class ContractError(ValueError):
    """A caller violated a documented precondition."""


class EvaluationError(RuntimeError):
    """An objective produced a non-finite or malformed result."""


class Representation(str, Enum):
    BINARY = "binary"
    REAL = "real"


def check_genes(representation: Representation, genes: np.ndarray) -> np.ndarray:
    genes = np.ascontiguousarray(genes, dtype=np.float64)
    if genes.ndim != 1 or genes.size == 0:
        raise ContractError("genes must be a non-empty 1-d vector")
    if representation is Representation.BINARY:
        if not np.all((genes == 0.0) | (genes == 1.0)):
            raise ContractError("binary genes must be exactly 0 or 1")
    else:
        if genes.min() < 0.0 or genes.max() > 1.0:
            raise ContractError("real genes must lie in [0, 1]")
    return genes


@dataclass(frozen=True)
class Genome:
    representation: Representation
    genes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "genes", check_genes(self.representation, self.genes))

    @property
    def dimension(self) -> int:
        return int(self.genes.size)


@dataclass(frozen=True)
class Individual:
    genome: Genome
    fitness: float | None = None


@dataclass(frozen=True)
class Population:
    members: tuple[Individual, ...]
    generation: int = 0

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_genes_cache", None)
        object.__setattr__(self, "_fitness_cache", None)
        if members:
            rep = members[0].genome.representation
            dim = members[0].genome.dimension
            for m in members[1:]:
                if m.genome.representation is not rep or m.genome.dimension != dim:
                    raise ContractError(
                        "population members must share representation and dimension"
                    )

    def __len__(self) -> int:
        return len(self.members)

    def _require_members(self) -> None:
        if not self.members:
            raise ContractError("population is empty")

    @property
    def representation(self) -> Representation:
        self._require_members()
        return self.members[0].genome.representation

    @property
    def dimension(self) -> int:
        self._require_members()
        return self.members[0].genome.dimension

    def genes_matrix(self) -> np.ndarray:
        # members never change, so the stacked matrix is built once; it is
        # returned read-only and callers that mutate must copy
        self._require_members()
        cached = self._genes_cache
        if cached is None:
            cached = np.stack([m.genome.genes for m in self.members])
            cached.flags.writeable = False
            object.__setattr__(self, "_genes_cache", cached)
        return cached

    def fitness_array(self) -> np.ndarray:
        cached = self._fitness_cache
        if cached is None:
            values = [m.fitness for m in self.members]
            if any(v is None for v in values):
                raise ContractError("population has unevaluated members")
            cached = np.asarray(values, dtype=np.float64)
            cached.flags.writeable = False
            object.__setattr__(self, "_fitness_cache", cached)
        return cached

    def mean_fitness(self) -> float:
        return float(self.fitness_array().mean())

    def best(self) -> Individual:
        fits = self.fitness_array()
        return self.members[int(np.argmax(fits))]

    @classmethod
    def from_matrix(
        cls,
        representation: Representation,
        genes: np.ndarray,
        fitness: np.ndarray | None = None,
        generation: int = 0,
    ) -> "Population":
        rows = np.asarray(genes, dtype=np.float64)
        if rows.ndim == 1:
            rows = rows[None, :]
        members = []
        for i in range(rows.shape[0]):
            fit = None if fitness is None else float(fitness[i])
            members.append(Individual(Genome(representation, rows[i].copy()), fit))
        pop = cls(tuple(members), generation)
        # the row matrix is exactly what genes_matrix() would re-stack; copy so
        # freezing the cache cannot make a caller's own array read-only
        cache = rows.copy()
        cache.flags.writeable = False
        object.__setattr__(pop, "_genes_cache", cache)
        return pop
