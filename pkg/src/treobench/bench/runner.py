"""Experiment orchestration: (solver, repetition) jobs over shared archives.

Each job owns an RngStream split keyed by solver name and repetition index, so
results are identical for any worker count and any execution order. Wall-clock
is measured around the solver call only.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor

from ..core import Family, RngStream, RunBudget
from ..transfer import SolverSettings, run_solver
from .compose import compose_sources, make_target
from .config import ExperimentConfig
from .metrics import gen_gt0
from .results import ResultsBundle, RunRecord


class PartialFailure(RuntimeError):
    """One or more repetitions crashed and --allow-partial was not set."""

    def __init__(self, bundle: ResultsBundle):
        failures = bundle.failures()
        super().__init__(
            f"{len(failures)} repetition(s) failed, first: "
            f"{failures[0].solver}#{failures[0].repetition}: {failures[0].error}"
        )
        self.bundle = bundle


def experiment_settings(config: ExperimentConfig) -> SolverSettings:
    return SolverSettings.for_family(config.family, **config.solver_settings)


def run_experiment(
    config: ExperimentConfig,
    archives=None,
    labels=None,
    workers: int = 1,
    allow_partial: bool = False,
) -> ResultsBundle:
    target = make_target(config)
    if archives is None:
        archives, labels = compose_sources(config)
    archives = tuple(archives)
    labels = list(labels) if labels else [""] * len(archives)
    settings = experiment_settings(config)
    rep_budget = RunBudget(
        config.budget.max_function_evaluations, config.budget.population_size
    )
    jobs = [(solver, rep) for solver in config.solvers for rep in range(config.budget.repetitions)]

    def execute(job: tuple[str, int]) -> RunRecord:
        solver, rep = job
        rng = RngStream(config.seed).split_label(f"run/{solver}").split(rep)
        start = time.perf_counter()
        try:
            best, trace = run_solver(
                solver, target, archives, settings, rep_budget, rng, config.capacity
            )
        except Exception as exc:  # recorded, surfaced via PartialFailure or meta
            return RunRecord(
                solver,
                rep,
                math.nan,
                time.perf_counter() - start,
                None,
                None,
                failed=True,
                error=f"{type(exc).__name__}: {exc}",
            )
        wall = time.perf_counter() - start
        first_success = gen_gt0(trace) if config.family is Family.ATTACK else None
        return RunRecord(solver, rep, best.fitness, wall, first_success, trace)

    if workers <= 1:
        records = [execute(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(execute, jobs))

    bundle = ResultsBundle(config, records, labels)
    if bundle.failures() and not allow_partial:
        raise PartialFailure(bundle)
    return bundle
