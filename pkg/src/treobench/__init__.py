"""Transfer-optimization benchmark suite.

Three problem families (0/1 knapsack, planar arm, pixel attacks), a stacked
density-mixture transfer mechanism, seven solver configurations, and an
experiment harness with CSV outputs.
"""
from .core import (
    ContractError,
    EvaluationError,
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
    evaluate,
    evaluate_batch,
    random_genes,
)
from .models import (
    BernoulliModel,
    EmReport,
    GaussianModel,
    MixtureModel,
    em_fit_weights,
    fit_model,
    sample_mixture,
    uniform_mixture,
)
from .transfer import (
    MAPPING_KINDS,
    SOLVER_NAMES,
    MappingAdapter,
    RunTrace,
    SolverSettings,
    amtea_run,
    cga_run,
    clip_pad_align,
    ekt_run,
    fit_mapping,
    mapped_injection_run,
    run_solver,
    seeded_cga_run,
    streo_lite_run,
)

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "EvaluationError",
    "Evaluator",
    "Family",
    "Genome",
    "Individual",
    "Population",
    "Representation",
    "RngStream",
    "RunBudget",
    "SourceArchive",
    "TaskSpec",
    "evaluate",
    "evaluate_batch",
    "random_genes",
    "BernoulliModel",
    "EmReport",
    "GaussianModel",
    "MixtureModel",
    "em_fit_weights",
    "fit_model",
    "sample_mixture",
    "uniform_mixture",
    "MAPPING_KINDS",
    "SOLVER_NAMES",
    "MappingAdapter",
    "RunTrace",
    "SolverSettings",
    "amtea_run",
    "cga_run",
    "clip_pad_align",
    "ekt_run",
    "fit_mapping",
    "mapped_injection_run",
    "run_solver",
    "seeded_cga_run",
    "streo_lite_run",
    "__version__",
]
