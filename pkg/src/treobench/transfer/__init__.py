from .mapping import MAPPING_KINDS, MappingAdapter, clip_pad_align, fit_mapping
from .operators import (
    binary_tournament,
    bit_flip_mutation,
    gaussian_mutation,
    make_offspring,
    polynomial_mutation,
    sbx_crossover,
    single_point_crossover,
    uniform_crossover,
)
from .solvers import (
    MAPPED_SOLVER_KINDS,
    SOLVER_NAMES,
    RunTrace,
    SolverSettings,
    amtea_run,
    cga_run,
    ekt_run,
    mapped_injection_run,
    run_solver,
    seeded_cga_run,
    streo_lite_run,
)

__all__ = [
    "MAPPING_KINDS",
    "MAPPED_SOLVER_KINDS",
    "MappingAdapter",
    "RunTrace",
    "SOLVER_NAMES",
    "SolverSettings",
    "amtea_run",
    "binary_tournament",
    "bit_flip_mutation",
    "cga_run",
    "clip_pad_align",
    "ekt_run",
    "fit_mapping",
    "gaussian_mutation",
    "make_offspring",
    "mapped_injection_run",
    "polynomial_mutation",
    "run_solver",
    "sbx_crossover",
    "seeded_cga_run",
    "single_point_crossover",
    "streo_lite_run",
    "uniform_crossover",
]
