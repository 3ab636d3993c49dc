"""Solver loop contracts: budget exactness, elitism, transfer bookkeeping."""

import math

import numpy as np
import pytest

from treobench import (
    ContractError,
    Family,
    Population,
    RngStream,
    RunBudget,
    SourceArchive,
    TaskSpec,
    evaluate_batch,
    random_genes,
)
from treobench.problems.knapsack import KnapsackInstance, generate_knapsack
from treobench.transfer.solvers import (
    MAPPED_SOLVER_KINDS,
    SOLVER_NAMES,
    SolverSettings,
    amtea_run,
    cga_run,
    ekt_run,
    mapped_injection_run,
    run_solver,
    seeded_cga_run,
    streo_lite_run,
)

POP = 10
BUDGET = 103  # deliberately not a multiple of the population size


def _task(n=15, seed=100):
    inst = generate_knapsack("uc", "ak", n, RngStream(seed).split_label("task"))
    return TaskSpec(Family.KNAPSACK, inst, inst.n)


def _archives(task, count=2, seed=200, budget=200):
    settings = SolverSettings.for_family(task.family)
    out = []
    for i in range(count):
        _, trace = cga_run(
            task, settings, RunBudget(budget, POP), RngStream(seed).split(i)
        )
        out.append(
            SourceArchive(task, trace.first_population, trace.final_population, seed=i)
        )
    return tuple(out)


def _null_archives(task, count, seed=300, rows=20):
    out = []
    for i in range(count):
        g = RngStream(seed).split(i).generator
        genes = (g.random((rows, task.dimension)) < 0.5).astype(float)
        fit, genes = evaluate_batch(task, genes)
        pop = Population.from_matrix(task.representation, genes, fit, 0)
        out.append(SourceArchive(task, pop, pop, seed=i))
    return tuple(out)


def _run(name, task, sources, rng, budget=None, **kwargs):
    budget = budget or RunBudget(BUDGET, POP)
    return run_solver(name, task, sources, None, budget, rng, **kwargs)


# --- settings ---------------------------------------------------------------


def test_for_family_accepts_names_and_enums():
    by_enum = SolverSettings.for_family(Family.KNAPSACK)
    by_name = SolverSettings.for_family("knapsack")
    assert by_enum == by_name
    assert by_name.crossover == "uniform" and by_name.mutation == "bit_flip"
    assert SolverSettings.for_family("arm").crossover == "sbx"
    assert SolverSettings.for_family("attack").mutation == "gaussian"
    with pytest.raises(ValueError):
        SolverSettings.for_family("sudoku")


def test_for_family_overrides_fields():
    s = SolverSettings.for_family("knapsack", transfer_interval=5, model_lam=0.5)
    assert s.transfer_interval == 5 and s.model_lam == 0.5


def test_settings_validation():
    with pytest.raises(ContractError):
        SolverSettings(crossover="uniform", mutation="bit_flip", crossover_rate=1.5)
    with pytest.raises(ContractError):
        SolverSettings(crossover="uniform", mutation="bit_flip", transfer_interval=0)
    with pytest.raises(ContractError):
        SolverSettings(crossover="uniform", mutation="bit_flip", selection="rank")


# --- shared loop invariants --------------------------------------------------


@pytest.mark.parametrize("name", SOLVER_NAMES)
def test_budget_exactness_and_monotone_best(name):
    task = _task()
    sources = _archives(task)
    _, trace = _run(name, task, sources, RngStream(1).split_label(name))
    evals = np.array(trace.evaluations)
    assert evals[-1] == BUDGET, name
    assert np.all(np.diff(evals) > 0)
    best = np.array(trace.best_so_far)
    assert np.all(np.diff(best) >= 0.0), name
    assert len(trace.generations) == len(best) == len(evals)


@pytest.mark.parametrize("name", SOLVER_NAMES)
def test_rerun_is_bit_identical(name):
    task = _task()
    sources = _archives(task)
    _, t1 = _run(name, task, sources, RngStream(2).split_label(name))
    _, t2 = _run(name, task, sources, RngStream(2).split_label(name))
    assert t1.best_so_far == t2.best_so_far
    assert t1.evaluations == t2.evaluations
    assert t1.mean_fitness == t2.mean_fitness
    assert sorted(t1.weights) == sorted(t2.weights)
    for gen, w in t1.weights.items():
        assert np.array_equal(w, t2.weights[gen])
    assert np.array_equal(
        t1.final_population.genes_matrix(), t2.final_population.genes_matrix()
    )


def test_budget_equal_to_population_is_a_pure_init():
    task = _task()
    best, trace = cga_run(
        task,
        SolverSettings.for_family(task.family),
        RunBudget(POP, POP),
        RngStream(3),
    )
    assert trace.evaluations == [POP]
    assert trace.best_so_far == [best.fitness]


def test_budget_below_population_is_rejected():
    with pytest.raises(ContractError):
        RunBudget(POP - 1, POP)


def test_unknown_solver_name_is_rejected():
    task = _task()
    with pytest.raises(ContractError):
        run_solver("simulated_annealing", task, (), None, RunBudget(50, POP), RngStream(0))


def test_transfer_solvers_require_sources():
    task = _task()
    settings = SolverSettings.for_family(task.family)
    budget = RunBudget(50, POP)
    with pytest.raises(ContractError):
        ekt_run(task, (), settings, budget, RngStream(0))
    with pytest.raises(ContractError):
        amtea_run(task, (), settings, budget, RngStream(0))


# --- seeding ----------------------------------------------------------------


def test_seeded_run_rejects_overfull_seeding():
    task = _task()
    seeds = random_genes(task, POP + 1, RngStream(4))
    with pytest.raises(ContractError):
        seeded_cga_run(task, seeds, SolverSettings.for_family(task.family), RunBudget(50, POP), RngStream(5))


def test_ekt_seeds_half_the_population_with_source_bests():
    # trivially solvable instance: every item fits, so all-ones is optimal
    n = 12
    inst = KnapsackInstance(np.ones(n), np.ones(n), float(n), "uc", "ak")
    task = TaskSpec(Family.KNAPSACK, inst, n)
    genes = np.concatenate([np.ones((1, n)), np.zeros((4, n))])
    fit, genes = evaluate_batch(task, genes)
    pop = Population.from_matrix(task.representation, genes, fit, 0)
    archive = SourceArchive(task, pop, pop, seed=0)

    _, trace = ekt_run(
        task,
        (archive,),
        SolverSettings.for_family(task.family),
        RunBudget(40, POP),
        RngStream(6),
    )
    first = trace.first_population.genes_matrix()
    planted = (first == 1.0).all(axis=1).sum()
    assert planted >= POP // 2  # the seeded half, plus any lucky random rows
    assert trace.best_so_far[0] == pytest.approx(float(n))


# --- mixture solvers ----------------------------------------------------------


def test_amtea_weights_stay_on_the_simplex():
    task = _task()
    _, trace = amtea_run(
        task,
        _archives(task, count=3),
        SolverSettings.for_family(task.family),
        RunBudget(200, POP),
        RngStream(7),
    )
    assert trace.weights  # at least one transfer event fired
    for w in trace.weights.values():
        assert w.shape == (4,)
        assert w.min() >= 0.0
        assert w.sum() == pytest.approx(1.0, abs=1e-9)


def test_amtea_keeps_junk_sources_quiet():
    task = _task(n=30)
    _, trace = amtea_run(
        task,
        _null_archives(task, 4),
        SolverSettings.for_family(task.family),
        RunBudget(400, POP),
        RngStream(8),
    )
    events = [w for _, w in sorted(trace.weights.items())]
    assert len(events) > 5
    late_mass = [w[:-1].sum() for w in events[5:]]
    assert np.mean(late_mass) <= 0.3


def test_streo_capacity_covering_all_sources_is_degenerate():
    task = _task()
    sources = _archives(task, count=3)
    settings = SolverSettings.for_family(task.family)
    budget = RunBudget(200, POP)
    _, a = streo_lite_run(task, sources, settings, budget, RngStream(9), capacity=3)
    _, b = streo_lite_run(task, sources, settings, budget, RngStream(9), capacity=99)
    assert a.best_so_far == b.best_so_far
    for gen, w in a.weights.items():
        assert np.array_equal(w, b.weights[gen])


def test_streo_rejects_nonpositive_capacity():
    task = _task()
    with pytest.raises(ContractError):
        streo_lite_run(
            task,
            _archives(task),
            SolverSettings.for_family(task.family),
            RunBudget(50, POP),
            RngStream(10),
            capacity=0,
        )


def test_streo_simplex_survives_working_set_rotation():
    task = _task()
    _, trace = streo_lite_run(
        task,
        _archives(task, count=6),
        SolverSettings.for_family(task.family),
        RunBudget(400, POP),
        RngStream(11),
        capacity=2,
    )
    for w in trace.weights.values():
        assert w.min() >= 0.0
        assert w.sum() == pytest.approx(1.0, abs=1e-9)


# --- mapped injection ---------------------------------------------------------


def test_mapped_event_evaluation_accounting():
    # pop 28 makes the injection count (ceil(28/4) = 7) exceed the 5-row
    # probe, so the first event must cost 5 * n_sources + 2 evaluations
    task = _task()
    sources = _archives(task, count=2)
    pop_size = 28
    settings = SolverSettings.for_family(task.family)
    _, trace = mapped_injection_run(
        task, sources, settings, RunBudget(300, pop_size), RngStream(12), "linear_lsq"
    )
    deltas = np.diff(np.array(trace.evaluations))
    event_cost = 5 * len(sources) + (math.ceil(pop_size / 4) - 5)
    assert deltas[1] == event_cost  # generation 2 is the first transfer event
    assert set(deltas.tolist()) <= {pop_size, event_cost, int(deltas[-1])}


def test_mapped_injection_gives_up_on_useless_sources():
    # 3 sources make the 15-evaluation event cost distinguishable from the
    # 10-evaluation plain generations in the trace
    task = _task(n=40)
    sources = _null_archives(task, 3)
    settings = SolverSettings.for_family(task.family)
    _, trace = mapped_injection_run(
        task, sources, settings, RunBudget(1200, POP), RngStream(13), "linear_lsq"
    )
    deltas = np.diff(np.array(trace.evaluations)).tolist()
    event_cost = 5 * len(sources)
    event_gens = [i for i, d in enumerate(deltas) if d == event_cost]
    # two fruitless events in a row end the transfer for good
    assert 0 < len(event_gens) <= 6
    assert all(d != event_cost for d in deltas[event_gens[-1] + 1 :])
    # abandonment must stick for the rest of the run
    assert len(deltas) > event_gens[-1] + 20


def test_mapped_injection_rejects_unknown_kind():
    task = _task()
    with pytest.raises(ContractError):
        mapped_injection_run(
            task,
            _archives(task),
            SolverSettings.for_family(task.family),
            RunBudget(50, POP),
            RngStream(14),
            "clip_pad",
        )


def test_run_solver_dispatches_every_name():
    task = _task()
    sources = _archives(task)
    for name in SOLVER_NAMES:
        best, trace = _run(name, task, sources, RngStream(15).split_label(name))
        assert best.fitness == trace.best_so_far[-1]
    assert set(MAPPED_SOLVER_KINDS) <= set(SOLVER_NAMES)
