"""Solver catalog: one run of target-task optimization over archived sources.

Seven configurations share a single generational engine (binary tournament,
family operator bundle, 1-elitism, exact evaluation budget):

* ``cga``            no transfer.
* ``ekt``            half the initial population seeded with best archived
                     members of randomly chosen sources.
* ``amtea``          every transfer_interval-th generation the offspring are
                     sampled from a stacked mixture (frozen source models +
                     a model of the tournament-picked parent pool) whose
                     weights are EM-learned.
* ``streo_lite``     amtea with warm-started EM and a bounded working set of
                     sources per event; non-working weights stay frozen, so
                     per-event cost scales with the capacity, not the archive
                     count.
* ``mapped_lls`` / ``mapped_affine`` / ``mapped_dv``
                     every transfer_interval-th generation the best-scoring
                     source is mapped through a fitted adapter and its top
                     members injected over the worst of the population.

Every fitness evaluation goes through one counting boundary, so the budget is
exact: a final short generation is truncated and merged back elitist-style.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..core import (
    ContractError,
    Evaluator,
    Family,
    Genome,
    Individual,
    Population,
    Representation,
    RngStream,
    RunBudget,
    SourceArchive,
    TaskSpec,
    random_genes,
)
from ..models import BernoulliModel, MixtureModel, em_fit_weights, fit_model, sample_genes
from .mapping import clip_pad_align, fit_mapping
from .operators import binary_tournament, make_offspring

SOLVER_NAMES = (
    "cga",
    "ekt",
    "amtea",
    "streo_lite",
    "mapped_lls",
    "mapped_affine",
    "mapped_dv",
)

MAPPED_SOLVER_KINDS = {
    "mapped_lls": "linear_lsq",
    "mapped_affine": "affine_distribution",
    "mapped_dv": "direction_vector",
}


@dataclass(frozen=True)
class SolverSettings:
    """Operator bundle plus transfer knobs; defaults follow the task family."""

    crossover: str
    mutation: str
    crossover_rate: float = 1.0
    mutation_rate: float | None = None  # None -> 1/dimension
    eta_c: float = 10.0
    eta_m: float = 10.0
    sigma: float = 0.5
    selection: str = "binary_tournament"
    elitism: int = 1
    transfer_interval: int = 2
    model_lam: float = 1e-6
    em_max_iters: int = 100
    em_tol: float = 1e-6
    scoring_samples: int = 5
    injection_fraction: float = 0.25

    def __post_init__(self):
        for name in ("crossover_rate",):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ContractError(f"{name} must lie in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ContractError("mutation_rate must lie in [0, 1]")
        if self.transfer_interval < 1:
            raise ContractError("transfer_interval must be at least 1")
        if self.selection != "binary_tournament":
            raise ContractError("only binary_tournament selection is implemented")
        if self.elitism < 0:
            raise ContractError("elitism must be non-negative")

    @classmethod
    def for_family(cls, family: Family | str, **overrides) -> "SolverSettings":
        family = Family(family)
        if family is Family.KNAPSACK:
            base = dict(crossover="uniform", mutation="bit_flip")
        elif family is Family.PLANAR_ARM:
            # model_lam: one gene step of ~0.05 moves the arm tip by less than
            # the distances that separate final outcomes, so a sigma floor at
            # that scale costs nothing in resolution while stopping the target
            # model from collapsing onto a near-duplicate elite pool (and, as
            # with the pixel family, it lets aligned source pools register in
            # EM instead of being annihilated by a 1e-6 ridge)
            base = dict(crossover="sbx", mutation="polynomial", model_lam=3e-3)
        else:
            # model_lam: converged attack populations are tight relative to
            # the blob scale, and a 1e-6 ridge annihilates any point off the
            # population's own spread; a 0.015 floor (sigma ~0.12 per gene)
            # lets genuinely overlapping populations register during EM and
            # keeps the target model exploring at mixture events
            base = dict(
                crossover="single_point",
                mutation="gaussian",
                mutation_rate=0.1,
                model_lam=0.015,
            )
        base.update(overrides)
        return cls(**base)


@dataclass
class RunTrace:
    """Per-generation run record; row 0 captures the evaluated initialization."""

    generations: list[int] = field(default_factory=list)
    evaluations: list[int] = field(default_factory=list)
    best_so_far: list[float] = field(default_factory=list)
    mean_fitness: list[float] = field(default_factory=list)
    elapsed_s: list[float] = field(default_factory=list)
    # transfer-event extras, keyed by generation index
    weights: dict[int, np.ndarray] = field(default_factory=dict)
    event_seconds: dict[int, float] = field(default_factory=dict)
    weight_count: int = 0  # columns in trace.csv: sources then target, 0 if none
    first_population: Population | None = None
    final_population: Population | None = None

    def __len__(self) -> int:
        return len(self.generations)


class _RunState:
    """Budget counter, best-so-far tracker, and trace writer for one run."""

    def __init__(self, task: TaskSpec, budget: RunBudget):
        self.task = task
        self.budget = budget
        self.evaluator = Evaluator(task)
        self.best_fitness = -math.inf
        self.best_genes: np.ndarray | None = None
        self.trace = RunTrace()
        self.t0 = time.perf_counter()

    @property
    def remaining(self) -> int:
        return self.budget.max_function_evaluations - self.evaluator.evaluations

    def evaluate(self, genes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        fitness, genes = self.evaluator(genes)
        i = int(np.argmax(fitness))
        if float(fitness[i]) > self.best_fitness:
            self.best_fitness = float(fitness[i])
            self.best_genes = genes[i].copy()
        return fitness, genes

    def record(
        self,
        generation: int,
        pop: Population,
        weights: np.ndarray | None = None,
        event_s: float | None = None,
    ) -> None:
        tr = self.trace
        tr.generations.append(generation)
        tr.evaluations.append(self.evaluator.evaluations)
        tr.best_so_far.append(self.best_fitness)
        tr.mean_fitness.append(pop.mean_fitness())
        tr.elapsed_s.append(time.perf_counter() - self.t0)
        if weights is not None:
            tr.weights[generation] = np.array(weights, dtype=np.float64)
        if event_s is not None:
            tr.event_seconds[generation] = float(event_s)


def _replace(
    task: TaskSpec,
    pop: Population,
    child_genes: np.ndarray,
    child_fit: np.ndarray,
    generation: int,
    pop_size: int,
    elitism: int,
) -> Population:
    """Generational replacement; short batches merge mu+k style instead."""
    if child_genes.shape[0] < pop_size:
        merged_genes = np.concatenate([pop.genes_matrix(), child_genes])
        merged_fit = np.concatenate([pop.fitness_array(), child_fit])
        order = np.argsort(-merged_fit, kind="stable")[:pop_size]
        return Population.from_matrix(
            task.representation, merged_genes[order], merged_fit[order], generation
        )
    genes = child_genes.copy()
    fit = child_fit.copy()
    if elitism > 0:
        parent_fit = pop.fitness_array()
        parent_genes = pop.genes_matrix()
        top = np.argsort(-parent_fit, kind="stable")[: min(elitism, pop_size)]
        for pi in top:
            j = int(np.argmin(fit))
            if parent_fit[pi] <= fit[j]:
                break
            genes[j] = parent_genes[pi]
            fit[j] = parent_fit[pi]
    return Population.from_matrix(task.representation, genes, fit, generation)


# an event callback returns None to fall back to a plain GA generation, or
# (next population, full weight vector or None, machinery seconds or None)
_EventOutcome = "tuple[Population, np.ndarray | None, float | None] | None"


def _evolve(
    task: TaskSpec,
    settings: SolverSettings,
    budget: RunBudget,
    rng: RngStream,
    initial_genes: np.ndarray | None = None,
    event_fn=None,
    weight_count: int = 0,
) -> tuple[Individual, RunTrace]:
    state = _RunState(task, budget)
    pop_size = budget.population_size
    genes = initial_genes if initial_genes is not None else random_genes(task, pop_size, rng)
    fitness, genes = state.evaluate(genes)
    pop = Population.from_matrix(task.representation, genes, fitness, generation=0)
    state.trace.weight_count = weight_count
    state.trace.first_population = pop
    state.record(0, pop)
    t = 0
    while state.remaining > 0:
        t += 1
        outcome = None
        if event_fn is not None and t % settings.transfer_interval == 0:
            outcome = event_fn(state, t, pop)
        if outcome is None:
            k = min(pop_size, state.remaining)
            children = make_offspring(
                pop.genes_matrix(),
                pop.fitness_array(),
                k,
                settings.crossover,
                settings.mutation,
                rng,
                settings.crossover_rate,
                settings.mutation_rate,
                settings.eta_c,
                settings.eta_m,
                settings.sigma,
            )
            child_fit, child_genes = state.evaluate(children)
            pop = _replace(task, pop, child_genes, child_fit, t, pop_size, settings.elitism)
            state.record(t, pop)
        else:
            pop, weights, event_s = outcome
            state.record(t, pop, weights, event_s)
    state.trace.final_population = pop
    best = Individual(Genome(task.representation, state.best_genes), state.best_fitness)
    return best, state.trace


class _SourceModels:
    """Per-source frozen models, fitted lazily on clip/pad-aligned archives.

    Laziness matters: streo_lite must never pay for models outside its working
    set, which is what keeps its transfer events capacity-bound.
    """

    def __init__(self, task: TaskSpec, sources: tuple[SourceArchive, ...], rng: RngStream, lam: float):
        self.task = task
        self.sources = sources
        self.base_rng = rng
        self.lam = lam
        self._cache: dict[int, object] = {}

    def model(self, index: int):
        if index not in self._cache:
            src = self.sources[index]
            genes = src.final_generation.genes_matrix()
            if genes.shape[1] != self.task.dimension:
                genes = clip_pad_align(
                    genes,
                    self.task.dimension,
                    self.task.representation,
                    self.base_rng.split(index),
                )
            self._cache[index] = fit_model(self.task.representation, genes, self.lam)
        return self._cache[index]

    def ensure(self, indices) -> None:
        """Fit any uncached Bernoulli models in one stacked pass per shape.

        A rotating working set fits tens of fresh models per event; doing the
        column means on a stacked block keeps that cost out of the event floor.
        Results are bit-identical to the one-at-a-time path.
        """
        missing = [i for i in indices if i not in self._cache]
        if not missing or self.task.representation is not Representation.BINARY:
            for i in missing:
                self.model(i)
            return
        groups: dict[int, list[int]] = {}
        for i in missing:
            genes = self.sources[i].final_generation.genes_matrix()
            if genes.shape[1] != self.task.dimension:
                self.model(i)  # needs padding; rare, keep the slow path
            else:
                groups.setdefault(genes.shape[0], []).append(i)
        for n_rows, idx in groups.items():
            eps = 1.0 / (2.0 * n_rows)
            for at in range(0, len(idx), 256):  # bound the stacked block size
                chunk = idx[at : at + 256]
                stack = np.stack(
                    [self.sources[i].final_generation.genes_matrix() for i in chunk]
                )
                probs = np.clip(stack.mean(axis=1), eps, 1.0 - eps)
                for row, i in enumerate(chunk):
                    self._cache[i] = BernoulliModel(probs[row], eps)


def _sample_by_weights(weights, model_of, dimension, rng: RngStream, count: int) -> np.ndarray:
    g = rng.generator
    picks = g.choice(weights.size, size=count, p=weights)
    out = np.empty((count, dimension))
    for comp in np.unique(picks):
        rows = np.flatnonzero(picks == comp)
        out[rows] = sample_genes(model_of(int(comp)), rng, rows.size)
    return out


def _mixture_run(
    task: TaskSpec,
    sources: tuple[SourceArchive, ...],
    settings: SolverSettings,
    budget: RunBudget,
    rng: RngStream,
    capacity: int | None,
    warm_start: bool,
) -> tuple[Individual, RunTrace]:
    if not sources:
        raise ContractError("model-based transfer requires at least one source archive")
    n_src = len(sources)
    models = _SourceModels(task, sources, rng.split_label("source-models"), settings.model_lam)
    cap = n_src if capacity is None else min(max(capacity, 1), n_src)
    # full weight vector: sources then target; mass starts on the target
    full_w = np.zeros(n_src + 1)
    full_w[-1] = 1.0
    working: list[int] = []
    seen = np.zeros(n_src, dtype=bool)
    pop_size = budget.population_size

    def pick_working_set(g: np.random.Generator) -> list[int]:
        # EM never zeroes a weight exactly, so survivorship needs a mass
        # floor; members below it are dead and holding them would stall the
        # sweep through the archive whenever nothing has stuck yet
        alive = [i for i in working if full_w[i] > 1e-3]
        keep = sorted(alive, key=lambda i: (-full_w[i], i))[: math.ceil(cap / 2)]
        chosen = list(keep)
        unseen = np.flatnonzero(~seen)
        slots = cap - len(chosen)
        if slots > 0 and unseen.size:
            take = min(slots, unseen.size)
            idx = g.choice(unseen.size, size=take, replace=False)
            chosen += [int(unseen[j]) for j in idx]
        if len(chosen) < cap:  # unseen pool exhausted: revisit dropped sources
            mask = np.ones(n_src, dtype=bool)
            mask[chosen] = False
            rest = np.flatnonzero(mask)
            take = min(cap - len(chosen), rest.size)
            if take > 0:
                idx = g.choice(rest.size, size=take, replace=False)
                chosen += [int(rest[j]) for j in idx]
        return sorted(chosen)

    def event(state: _RunState, t: int, pop: Population):
        nonlocal working
        k = min(pop_size, state.remaining)
        start = time.perf_counter()
        # the mixture replaces variation only; parents are still tournament
        # picked, so a transfer generation carries the same selection pressure
        # as a plain one (otherwise every event is a drift step and transfer
        # generations systematically lose ground to the baseline GA)
        picked = binary_tournament(pop.fitness_array(), pop_size, rng)
        genes = pop.genes_matrix()[picked]
        target_model = fit_model(task.representation, genes, settings.model_lam)
        if cap < n_src:
            working = pick_working_set(rng.generator)
        else:
            working = list(range(n_src))
        seen[working] = True
        models.ensure(working)
        comps = tuple(models.model(i) for i in working) + (target_model,)
        ids = tuple(f"source_{i}" for i in working) + ("target",)
        m = len(comps)
        if warm_start:
            prev = np.append(full_w[working], full_w[-1])
            total = prev.sum()
            base = prev / total if total > 0 else np.full(m, 1.0 / m)
            init = 0.9 * base + 0.1 * np.full(m, 1.0 / m)
            init /= init.sum()
        else:
            init = np.full(m, 1.0 / m)
        mixture = MixtureModel(comps, ids, init, target_index=m - 1)
        fitted, _report = em_fit_weights(mixture, genes, settings.em_max_iters, settings.em_tol)
        frozen = [i for i in range(n_src) if i not in working]
        frozen_mass = float(full_w[frozen].sum()) if frozen else 0.0
        scale = 1.0 - frozen_mass
        full_w[working] = fitted.weights[:-1] * scale
        full_w[-1] = fitted.weights[-1] * scale

        def model_of(index: int):
            return target_model if index == n_src else models.model(index)

        children = _sample_by_weights(full_w, model_of, task.dimension, rng, k)
        event_s = time.perf_counter() - start  # model/EM machinery only
        child_fit, child_genes = state.evaluate(children)
        new_pop = _replace(task, pop, child_genes, child_fit, t, pop_size, settings.elitism)
        return new_pop, full_w.copy(), event_s

    return _evolve(task, settings, budget, rng, event_fn=event, weight_count=n_src + 1)


# ---------------------------------------------------------------------------
# public solver entry points


def cga_run(
    task: TaskSpec, settings: SolverSettings, budget: RunBudget, rng: RngStream
) -> tuple[Individual, RunTrace]:
    return _evolve(task, settings, budget, rng)


def seeded_cga_run(
    task: TaskSpec,
    seed_genes: np.ndarray,
    settings: SolverSettings,
    budget: RunBudget,
    rng: RngStream,
) -> tuple[Individual, RunTrace]:
    """cga_run with the given rows planted in the initial population."""
    seed_genes = np.atleast_2d(np.asarray(seed_genes, dtype=np.float64))
    if seed_genes.shape[0] > budget.population_size:
        raise ContractError("more seed rows than population slots")
    rest = random_genes(task, budget.population_size - seed_genes.shape[0], rng)
    return _evolve(task, settings, budget, rng, initial_genes=np.concatenate([seed_genes, rest]))


def ekt_run(
    task: TaskSpec,
    sources: tuple[SourceArchive, ...],
    settings: SolverSettings,
    budget: RunBudget,
    rng: RngStream,
) -> tuple[Individual, RunTrace]:
    if not sources:
        raise ContractError("ekt_run requires at least one source archive")
    pop_size = budget.population_size
    n_seed = pop_size // 2
    order = rng.generator.permutation(len(sources))
    pad_rng = rng.split_label("ekt-pad")
    rows = []
    for j in range(n_seed):
        src = sources[int(order[j % len(sources)])]
        best = src.final_generation.best().genome.genes[None, :]
        rows.append(clip_pad_align(best, task.dimension, task.representation, pad_rng)[0])
    rest = random_genes(task, pop_size - n_seed, rng)
    initial = np.concatenate([np.stack(rows), rest]) if rows else rest
    return _evolve(task, settings, budget, rng, initial_genes=initial)


def amtea_run(
    task: TaskSpec,
    sources: tuple[SourceArchive, ...],
    settings: SolverSettings,
    budget: RunBudget,
    rng: RngStream,
) -> tuple[Individual, RunTrace]:
    return _mixture_run(task, sources, settings, budget, rng, capacity=None, warm_start=False)


def streo_lite_run(
    task: TaskSpec,
    sources: tuple[SourceArchive, ...],
    settings: SolverSettings,
    budget: RunBudget,
    rng: RngStream,
    capacity: int = 10,
) -> tuple[Individual, RunTrace]:
    if capacity < 1:
        raise ContractError("capacity must be at least 1")
    return _mixture_run(task, sources, settings, budget, rng, capacity=capacity, warm_start=True)


def mapped_injection_run(
    task: TaskSpec,
    sources: tuple[SourceArchive, ...],
    settings: SolverSettings,
    budget: RunBudget,
    rng: RngStream,
    kind: str,
) -> tuple[Individual, RunTrace]:
    if kind not in MAPPED_SOLVER_KINDS.values():
        raise ContractError(f"mapped injection does not support kind {kind!r}")
    if not sources:
        raise ContractError("mapped injection requires at least one source archive")
    pop_size = budget.population_size
    inject = math.ceil(pop_size * settings.injection_fraction)
    futile = 0
    live = True

    def event(state: _RunState, t: int, pop: Population):
        nonlocal futile, live
        if not live:
            return None  # transfer abandoned: sources proved useless on this target
        probe = settings.scoring_samples
        cost = probe * len(sources) + max(inject - probe, 0)
        if state.remaining < cost:
            return None  # tail budget too thin: fall back to a plain generation
        best_before = state.best_fitness
        best_score = -math.inf
        best = None  # (adapter, source index, probe fitness, probe genes)
        for i, src in enumerate(sources):
            adapter = fit_mapping(kind, src.final_generation, pop, rng)
            final_genes = src.final_generation.genes_matrix()
            top = np.argsort(-src.final_generation.fitness_array(), kind="stable")
            picks = np.resize(top[: min(probe, top.size)], probe)  # cycle tiny archives
            mapped = adapter.apply(final_genes[picks], rng)
            fit, genes = state.evaluate(mapped)
            score = float(fit.mean())
            if score > best_score:
                best_score, best = score, (adapter, i, fit, genes)
        adapter, idx, probe_fit, probe_genes = best
        src = sources[idx]
        final_genes = src.final_generation.genes_matrix()
        top = np.argsort(-src.final_generation.fitness_array(), kind="stable")
        rows = np.resize(top[: min(inject, top.size)], inject)
        # the winner's probe covered its top members under the same adapter,
        # and both batches cycle the same elite prefix, so the first
        # min(probe, inject) injection rows reuse the probe's evaluations
        q = min(probe, inject)
        m_fit, m_genes = probe_fit[:q], probe_genes[:q]
        if inject > q:
            extra = adapter.apply(final_genes[rows[q:]], rng)
            e_fit, e_genes = state.evaluate(extra)
            m_fit = np.concatenate([m_fit, e_fit])
            m_genes = np.concatenate([m_genes, e_genes])
        # elitist merge: incoming members displace the worst only when they beat
        # them, so a bad source cannot corrupt the population.  Usefulness is
        # judged by strict best-so-far improvement because any softer bar is
        # gameable: a least-squares map fitted against the current population
        # can clone its own elites out of pure noise, and clones tie the best
        # but never beat it.  Two fruitless events in a row and the archives
        # are written off for the rest of the run, which stops the probe cost
        # from bleeding the budget dry.
        if state.best_fitness > best_before:
            futile = 0
        else:
            futile += 1
            if futile >= 2:
                live = False
        all_genes = np.concatenate([pop.genes_matrix(), m_genes])
        all_fit = np.concatenate([pop.fitness_array(), m_fit])
        keep = np.argsort(-all_fit, kind="stable")[:pop_size]
        new_pop = Population.from_matrix(task.representation, all_genes[keep], all_fit[keep], t)
        return new_pop, None, None

    return _evolve(task, settings, budget, rng, event_fn=event)


def run_solver(
    name: str,
    task: TaskSpec,
    sources: tuple[SourceArchive, ...],
    settings: SolverSettings | None,
    budget: RunBudget,
    rng: RngStream,
    capacity: int = 10,
) -> tuple[Individual, RunTrace]:
    """Dispatch by catalog name; `sources` is ignored by cga."""
    if settings is None:
        settings = SolverSettings.for_family(task.family)
    if name == "cga":
        return cga_run(task, settings, budget, rng)
    if name == "ekt":
        return ekt_run(task, sources, settings, budget, rng)
    if name == "amtea":
        return amtea_run(task, sources, settings, budget, rng)
    if name == "streo_lite":
        return streo_lite_run(task, sources, settings, budget, rng, capacity)
    if name in MAPPED_SOLVER_KINDS:
        return mapped_injection_run(task, sources, settings, budget, rng, MAPPED_SOLVER_KINDS[name])
    raise ContractError(f"unknown solver {name!r}")
