"""Source-target relatedness protocols.

Two empirical protocols, one per continuous family:

* Arm heatmap: optimize a grid of (L, alpha_max) source tasks, fit a Gaussian
  to each final population, sample it, and score the samples with the target
  T_{sqrt2,1} objective. Bright cells = related sources. Band membership
  (alpha_max = 1 strong, 0.18 < alpha_max < 0.26 weak) doubles as the rule-based
  classifier used when composing scenarios.
* Attack vote: a source is related when at least 60% of its archived final
  population individually speeds up the attack, i.e. seeding a run with that
  single member beats the unseeded median first-success generation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ContractError,
    Family,
    RngStream,
    RunBudget,
    SourceArchive,
    TaskSpec,
    evaluate_batch,
)
from .models import fit_gaussian, sample_genes
from .problems.arm import ArmTask
from .transfer import SolverSettings, cga_run, clip_pad_align, seeded_cga_run
from .bench.metrics import gen_gt0

SQRT2 = math.sqrt(2.0)
STRONG_ALPHA_TOL = 1e-9
WEAK_ALPHA_LOW = 0.18
WEAK_ALPHA_HIGH = 0.26
RELATED_THRESHOLD = 0.6


# ---------------------------------------------------------------------------
# arm heatmap


@dataclass(frozen=True)
class HeatmapGrid:
    l_axis: np.ndarray  # ascending, inside (0, sqrt2)
    alpha_axis: np.ndarray  # ascending, inside (0, 1]
    cells: np.ndarray  # cells[i, j] = mean target fitness for (L_i, alpha_j)
    d: int
    samples_per_cell: int

    def __post_init__(self):
        l_axis = np.ascontiguousarray(self.l_axis, dtype=np.float64)
        alpha_axis = np.ascontiguousarray(self.alpha_axis, dtype=np.float64)
        cells = np.ascontiguousarray(self.cells, dtype=np.float64)
        object.__setattr__(self, "l_axis", l_axis)
        object.__setattr__(self, "alpha_axis", alpha_axis)
        object.__setattr__(self, "cells", cells)
        if np.any(np.diff(l_axis) <= 0) or np.any(np.diff(alpha_axis) <= 0):
            raise ContractError("heatmap axes must be strictly increasing")
        if cells.shape != (l_axis.size, alpha_axis.size):
            raise ContractError("cell matrix shape must match the axes")


def heatmap_axes(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Cell-midpoint L grid over (0, sqrt2); alpha grid over (0, 1] ending at 1."""
    if resolution < 2:
        raise ContractError("grid resolution must be at least 2 per axis")
    idx = np.arange(resolution)
    l_axis = SQRT2 * (2 * idx + 1) / (2 * resolution)
    alpha_axis = (idx + 1) / resolution
    return l_axis, alpha_axis


def build_heatmap(
    d: int,
    grid_resolution: int,
    samples_per_cell: int,
    budget: RunBudget,
    rng: RngStream,
) -> HeatmapGrid:
    """Mean target fitness of model samples from each optimized (L, alpha) source.

    Every cell owns a split stream keyed by its index, so serial and parallel
    construction produce the same grid.
    """
    if samples_per_cell < 1:
        raise ContractError("samples_per_cell must be positive")
    l_axis, alpha_axis = heatmap_axes(grid_resolution)
    target = TaskSpec(Family.PLANAR_ARM, ArmTask(SQRT2, 1.0, d), d)
    settings = SolverSettings.for_family(Family.PLANAR_ARM)
    cells = np.empty((grid_resolution, grid_resolution))
    for i, length in enumerate(l_axis):
        for j, alpha in enumerate(alpha_axis):
            cell_rng = rng.split(i * grid_resolution + j)
            source = TaskSpec(Family.PLANAR_ARM, ArmTask(float(length), float(alpha), d), d)
            _best, trace = cga_run(source, settings, budget, cell_rng.split_label("optimize"))
            model = fit_gaussian(trace.final_population)
            samples = sample_genes(model, cell_rng.split_label("samples"), samples_per_cell)
            fitness, _ = evaluate_batch(target, samples)
            cells[i, j] = float(fitness.mean())
    return HeatmapGrid(l_axis, alpha_axis, cells, d, samples_per_cell)


def classify_arm_source(task: TaskSpec) -> str:
    """Band label used for scenario composition: strong / weak / unclassified."""
    if task.family is not Family.PLANAR_ARM:
        raise ContractError("classification applies to arm tasks only")
    arm: ArmTask = task.parameters
    in_l_band = 0.0 < arm.length < SQRT2
    if in_l_band and abs(arm.alpha_max - 1.0) <= STRONG_ALPHA_TOL:
        return "strong"
    if in_l_band and WEAK_ALPHA_LOW < arm.alpha_max < WEAK_ALPHA_HIGH:
        return "weak"
    return "unclassified"


def classify_arm_sources(tasks: list[TaskSpec]) -> list[str]:
    return [classify_arm_source(t) for t in tasks]


def heatmap_to_csv(grid: HeatmapGrid) -> str:
    lines = [f"# arm heatmap d={grid.d} samples_per_cell={grid.samples_per_cell}"]
    lines.append("alpha_max," + ",".join(repr(float(a)) for a in grid.alpha_axis))
    for length, row in zip(grid.l_axis, grid.cells):
        lines.append(repr(float(length)) + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def heatmap_from_csv(text: str) -> HeatmapGrid:
    d = 0
    samples = 0
    rows = []
    alpha_axis = None
    l_values = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line.lstrip("# ").split():
                if token.startswith("d="):
                    d = int(token[2:])
                elif token.startswith("samples_per_cell="):
                    samples = int(token.split("=", 1)[1])
            continue
        parts = line.split(",")
        if parts[0] == "alpha_max":
            alpha_axis = np.array([float(v) for v in parts[1:]])
            continue
        l_values.append(float(parts[0]))
        rows.append([float(v) for v in parts[1:]])
    if alpha_axis is None or not rows:
        raise ContractError("malformed heatmap csv")
    return HeatmapGrid(np.array(l_values), alpha_axis, np.array(rows), d, samples)


def save_heatmap(grid: HeatmapGrid, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(heatmap_to_csv(grid))


def load_heatmap(path) -> HeatmapGrid:
    with open(path, "r", encoding="utf-8") as fh:
        return heatmap_from_csv(fh.read())


# ---------------------------------------------------------------------------
# attack relatedness vote


@dataclass(frozen=True)
class RelatednessVerdict:
    source_id: str
    positive_fraction: float
    related: bool
    repeats: int
    unreliable: bool = False  # baseline failed to attack in more than half the repeats

    def __post_init__(self):
        if not 0.0 <= self.positive_fraction <= 1.0:
            raise ContractError("positive_fraction must lie in [0, 1]")
        if self.related is not (self.positive_fraction >= RELATED_THRESHOLD):
            raise ContractError("related flag must follow the 60% rule")


def _median_first_success(gen_values: list[int | None]) -> float:
    return float(np.median([math.inf if g is None else g for g in gen_values]))


def attack_relatedness(
    source: SourceArchive,
    target: TaskSpec,
    repeats: int,
    rng: RngStream,
    budget: RunBudget | None = None,
    settings: SolverSettings | None = None,
    source_id: str | None = None,
) -> RelatednessVerdict:
    """Per-individual seeding vote: positive members beat the unseeded baseline.

    Baseline = median first-success generation of `repeats` plain runs. Each
    archived member is planted alone into fresh runs; it votes positive when
    its median first-success generation is strictly smaller.
    """
    if repeats < 1:
        raise ContractError("repeats must be at least 1")
    if target.family is not Family.ATTACK:
        raise ContractError("relatedness protocol applies to attack tasks")
    if budget is None:
        budget = RunBudget(1000, 10)
    if settings is None:
        settings = SolverSettings.for_family(Family.ATTACK)
    if source_id is None:
        source_id = f"src-{source.seed}"

    base_rng = rng.split_label("baseline")
    baseline_gens: list[int | None] = []
    for r in range(repeats):
        _best, trace = cga_run(target, settings, budget, base_rng.split(r))
        baseline_gens.append(gen_gt0(trace))
    baseline = _median_first_success(baseline_gens)
    unsolved = sum(1 for g in baseline_gens if g is None)
    unreliable = unsolved * 2 > repeats

    members = source.final_generation.genes_matrix()
    pad_rng = rng.split_label("align")
    members = clip_pad_align(members, target.dimension, target.representation, pad_rng)
    positives = 0
    for i in range(members.shape[0]):
        ind_rng = rng.split(i)
        gens: list[int | None] = []
        for r in range(repeats):
            _best, trace = seeded_cga_run(
                target, members[i : i + 1], settings, budget, ind_rng.split(r)
            )
            gens.append(gen_gt0(trace))
        if _median_first_success(gens) < baseline:
            positives += 1
    fraction = positives / members.shape[0]
    return RelatednessVerdict(
        source_id, fraction, fraction >= RELATED_THRESHOLD, repeats, unreliable
    )


def verdicts_to_csv(verdicts: list[RelatednessVerdict]) -> str:
    lines = ["source_id,positive_fraction,related,repeats,unreliable"]
    for v in verdicts:
        lines.append(
            f"{v.source_id},{float(v.positive_fraction)!r},"
            f"{int(v.related)},{v.repeats},{int(v.unreliable)}"
        )
    return "\n".join(lines) + "\n"


def save_verdicts(verdicts: list[RelatednessVerdict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(verdicts_to_csv(verdicts))
