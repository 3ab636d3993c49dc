from .genome import (
    ContractError,
    EvaluationError,
    Genome,
    Individual,
    Population,
    Representation,
    check_genes,
)
from .rng import RngStream, split_stream
from .tasks import (
    FAMILY_REPRESENTATION,
    Evaluator,
    Family,
    RunBudget,
    SourceArchive,
    TaskSpec,
    evaluate,
    evaluate_batch,
    random_genes,
)

__all__ = [
    "ContractError",
    "EvaluationError",
    "Genome",
    "Individual",
    "Population",
    "Representation",
    "check_genes",
    "RngStream",
    "split_stream",
    "FAMILY_REPRESENTATION",
    "Evaluator",
    "Family",
    "RunBudget",
    "SourceArchive",
    "TaskSpec",
    "evaluate",
    "evaluate_batch",
    "random_genes",
]
