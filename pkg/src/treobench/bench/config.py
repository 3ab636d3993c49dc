"""Declarative experiment configuration (JSON) plus presets and hashing.

One config file fully determines an experiment: scenario, family, target task
parameters, source composition, solver list, budget, and master seed. The
config hash is the SHA-256 of the canonical JSON encoding, so semantically
identical configs share output identity.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from ..core import ContractError, Family, RunBudget
from ..transfer import SOLVER_NAMES

SCENARIOS = ("multi_to_one", "many_to_one")
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    family: Family
    seed: int
    solvers: tuple[str, ...]
    budget: RunBudget
    target: dict
    sources: dict
    solver_settings: dict = field(default_factory=dict)
    capacity: int = 10
    source_budget: RunBudget | None = None  # None -> family defaults

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ContractError(f"unknown scenario {self.scenario!r}")
        if not self.solvers:
            raise ContractError("at least one solver is required")
        for name in self.solvers:
            if name not in SOLVER_NAMES:
                raise ContractError(f"unknown solver {name!r}")
        if self.capacity < 1:
            raise ContractError("capacity must be at least 1")
        mode = self.sources.get("mode")
        if mode == "ratio":
            count = self.sources.get("count", 0)
            ratio = self.sources.get("related_ratio")
            if count < 1:
                raise ContractError("source count must be at least 1")
            if ratio is None or not 0.0 <= ratio <= 1.0:
                raise ContractError("related_ratio must lie in [0, 1]")
        elif mode == "explicit":
            if not self.sources.get("list"):
                raise ContractError("explicit source composition needs a non-empty list")
        else:
            raise ContractError("sources.mode must be 'ratio' or 'explicit'")
        _validate_target(self.family, self.target)


def _validate_target(family: Family, target: dict) -> None:
    if family is Family.KNAPSACK:
        needed = {"dimension", "value_category", "capacity_category"}
    elif family is Family.PLANAR_ARM:
        needed = {"joints"}
    else:
        needed = {"height", "width", "actions", "pixel_budget", "policy_seed", "frame_seed"}
    missing = needed - set(target)
    if missing:
        raise ContractError(f"target spec missing keys: {sorted(missing)}")


def related_source_count(ratio: float, count: int) -> int:
    """ceil(ratio*count) with float-product noise absorbed; >=1 whenever ratio>0."""
    if ratio <= 0.0:
        return 0
    exact = ratio * count
    n = math.ceil(exact - 1e-9)
    return max(1, min(n, count))


# ---------------------------------------------------------------------------
# JSON round-trip


def config_to_dict(config: ExperimentConfig) -> dict:
    out = {
        "scenario": config.scenario,
        "family": config.family.value,
        "seed": config.seed,
        "solvers": list(config.solvers),
        "budget": {
            "max_function_evaluations": config.budget.max_function_evaluations,
            "population_size": config.budget.population_size,
            "repetitions": config.budget.repetitions,
        },
        "target": config.target,
        "sources": config.sources,
        "solver_settings": config.solver_settings,
        "capacity": config.capacity,
    }
    if config.source_budget is not None:
        out["source_budget"] = {
            "max_function_evaluations": config.source_budget.max_function_evaluations,
            "population_size": config.source_budget.population_size,
        }
    return out


def config_from_dict(raw: dict) -> ExperimentConfig:
    try:
        budget = RunBudget(
            raw["budget"]["max_function_evaluations"],
            raw["budget"]["population_size"],
            raw["budget"].get("repetitions", 1),
        )
        source_budget = None
        if "source_budget" in raw:
            source_budget = RunBudget(
                raw["source_budget"]["max_function_evaluations"],
                raw["source_budget"]["population_size"],
            )
        return ExperimentConfig(
            scenario=raw["scenario"],
            family=Family(raw["family"]),
            seed=int(raw["seed"]),
            solvers=tuple(raw["solvers"]),
            budget=budget,
            target=dict(raw["target"]),
            sources=dict(raw["sources"]),
            solver_settings=dict(raw.get("solver_settings", {})),
            capacity=int(raw.get("capacity", 10)),
            source_budget=source_budget,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ContractError):
            raise
        raise ContractError(f"malformed config: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(raw)


def save_config(config: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_hash(config: ExperimentConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# presets: desk-scale defaults run on one core; paper-scale kept runnable


def preset_knapsack_many(
    ratio: float = 0.10,
    dimension: int = 500,
    count: int = 200,
    seed: int = 2024,
    repetitions: int = 30,
    solvers: tuple[str, ...] = ("cga", "ekt", "amtea", "streo_lite"),
) -> ExperimentConfig:
    return ExperimentConfig(
        scenario="many_to_one",
        family=Family.KNAPSACK,
        seed=seed,
        solvers=solvers,
        budget=RunBudget(5000, 50, repetitions),
        target={"dimension": dimension, "value_category": "uc", "capacity_category": "ak"},
        sources={"mode": "ratio", "count": count, "related_ratio": ratio},
        capacity=20,
    )


def preset_knapsack_multi(
    configuration: str = "A",
    dimension: int = 500,
    seed: int = 2024,
    repetitions: int = 30,
    solvers: tuple[str, ...] = ("cga", "ekt", "amtea", "streo_lite"),
) -> ExperimentConfig:
    tables = {
        "A": (("uc", "rk"), ("sc", "rk"), ("wc", "rk"), ("sc", "ak")),
        "B": (("uc", "rk"), ("sc", "rk"), ("wc", "rk"), ("uc", "ak")),
        "C": (("uc", "rk"), ("sc", "rk"), ("wc", "rk"), ("wc", "ak")),
    }
    targets = {"A": "uc", "B": "wc", "C": "sc"}
    if configuration not in tables:
        raise ContractError("multi-to-one configuration must be A, B, or C")
    entries = [
        {"value_category": vc, "capacity_category": cc} for vc, cc in tables[configuration]
    ]
    return ExperimentConfig(
        scenario="multi_to_one",
        family=Family.KNAPSACK,
        seed=seed,
        solvers=solvers,
        budget=RunBudget(5000, 50, repetitions),
        target={
            "dimension": dimension,
            "value_category": targets[configuration],
            "capacity_category": "ak",
        },
        sources={"mode": "explicit", "list": entries},
        capacity=10,
    )


def preset_arm_multi(
    joints: int = 10,
    seed: int = 2024,
    repetitions: int = 30,
    solvers: tuple[str, ...] = (
        "cga",
        "ekt",
        "mapped_lls",
        "mapped_dv",
        "mapped_affine",
        "amtea",
        "streo_lite",
    ),
) -> ExperimentConfig:
    entries = [{"band": "weak"}, {"band": "weak"}, {"band": "weak"}, {"band": "strong"}]
    return ExperimentConfig(
        scenario="multi_to_one",
        family=Family.PLANAR_ARM,
        seed=seed,
        solvers=solvers,
        budget=RunBudget(5000, 50, repetitions),
        target={"joints": joints, "length": SQRT2, "alpha_max": 1.0},
        sources={"mode": "explicit", "list": entries},
        capacity=10,
    )


def preset_arm_many(
    joints: int = 10,
    ratio: float = 0.02,
    count: int = 100,
    seed: int = 2024,
    repetitions: int = 30,
    solvers: tuple[str, ...] = ("cga", "ekt", "amtea", "streo_lite"),
) -> ExperimentConfig:
    return ExperimentConfig(
        scenario="many_to_one",
        family=Family.PLANAR_ARM,
        seed=seed,
        solvers=solvers,
        budget=RunBudget(5000, 50, repetitions),
        target={"joints": joints, "length": SQRT2, "alpha_max": 1.0},
        sources={"mode": "ratio", "count": count, "related_ratio": ratio},
        capacity=10,
    )


def preset_attack_many(
    ratio: float = 0.24,
    count: int = 200,
    seed: int = 2024,
    repetitions: int = 30,
    solvers: tuple[str, ...] = ("cga", "ekt", "amtea", "streo_lite"),
) -> ExperimentConfig:
    return ExperimentConfig(
        scenario="many_to_one",
        family=Family.ATTACK,
        seed=seed,
        solvers=solvers,
        budget=RunBudget(1000, 10, repetitions),
        target={
            "height": 84,
            "width": 84,
            "actions": 6,
            "pixel_budget": 1,
            "policy_seed": 11,
            "frame_seed": 5,
        },
        sources={"mode": "ratio", "count": count, "related_ratio": ratio},
        capacity=10,
    )


PRESETS = {
    "knapsack-many": preset_knapsack_many,
    "knapsack-multi": preset_knapsack_multi,
    "arm-multi": preset_arm_multi,
    "arm-many": preset_arm_many,
    "attack-many": preset_attack_many,
}
