"""Result records, per-solver summaries, and the CSV/JSON output files.

Float cells are written with repr(), which round-trips float64 exactly, so a
rerun with the same seeds produces byte-identical files (elapsed_s is physical
time and is the one deliberately non-reproducible column).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import Family
from ..transfer import RunTrace
from .config import ExperimentConfig, config_hash, config_to_dict
from .metrics import median_gen_gt0, performance_score

SUITE_VERSION = "0.1.0"


@dataclass
class RunRecord:
    solver: str
    repetition: int
    final_objective: float
    wallclock_s: float
    gen_gt0: int | None
    trace: RunTrace | None
    failed: bool = False
    error: str = ""


@dataclass
class ResultsBundle:
    config: ExperimentConfig
    records: list[RunRecord]
    source_labels: list[str] = field(default_factory=list)

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def solver_records(self, solver: str) -> list[RunRecord]:
        return [r for r in self.records if r.solver == solver and not r.failed]

    def failures(self) -> list[RunRecord]:
        return [r for r in self.records if r.failed]


def summarize(bundle: ResultsBundle) -> list[dict]:
    """One summary row per solver: averaged objective, pooled score, timing."""
    solvers = list(bundle.config.solvers)
    values = [[r.final_objective for r in bundle.solver_records(s)] for s in solvers]
    scores = performance_score(values)
    rows = []
    for i, solver in enumerate(solvers):
        records = bundle.solver_records(solver)
        avg = sum(r.final_objective for r in records) / len(records)
        wall = sum(r.wallclock_s for r in records) / len(records)
        row = {
            "solver": solver,
            "avg_objective": avg,
            "perf_score": float(scores[i]),
            "mean_wallclock_s": wall,
            "gen_gt0_median": None,
        }
        if bundle.config.family is Family.ATTACK:
            row["gen_gt0_median"] = median_gen_gt0([r.gen_gt0 for r in records])
        rows.append(row)
    return rows


def quality_efficiency(bundle: ResultsBundle) -> list[tuple[str, float, float]]:
    """Per-solver (name, quality, mean wall-clock); attack quality is 100-Gen_gt0."""
    out = []
    for row in summarize(bundle):
        if bundle.config.family is Family.ATTACK:
            quality = 100.0 - row["gen_gt0_median"]
        else:
            quality = row["avg_objective"]
        out.append((row["solver"], quality, row["mean_wallclock_s"]))
    return out


# ---------------------------------------------------------------------------
# file emission


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def trace_csv_text(bundle: ResultsBundle) -> str:
    weight_cols = max((r.trace.weight_count for r in bundle.records if r.trace), default=0)
    header = "solver,repetition,generation,evaluations,best_so_far,mean_fitness,elapsed_s"
    header += "".join(f",w_{j}" for j in range(weight_cols))
    lines = [header]
    for record in bundle.records:
        if record.trace is None:
            continue
        tr = record.trace
        for i, gen in enumerate(tr.generations):
            cells = [
                record.solver,
                str(record.repetition),
                str(gen),
                str(tr.evaluations[i]),
                repr(float(tr.best_so_far[i])),
                repr(float(tr.mean_fitness[i])),
                repr(float(tr.elapsed_s[i])),
            ]
            weights = tr.weights.get(gen)
            for j in range(weight_cols):
                if weights is not None and j < weights.size:
                    cells.append(repr(float(weights[j])))
                else:
                    cells.append("")
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def summary_csv_text(bundle: ResultsBundle) -> str:
    lines = ["solver,avg_objective,perf_score,mean_wallclock_s,gen_gt0_median"]
    for row in summarize(bundle):
        lines.append(
            ",".join(
                [
                    row["solver"],
                    _fmt(row["avg_objective"]),
                    _fmt(row["perf_score"]),
                    _fmt(row["mean_wallclock_s"]),
                    _fmt(row["gen_gt0_median"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def qe_csv_text(bundle: ResultsBundle) -> str:
    lines = ["solver,quality,mean_wallclock_s"]
    for solver, quality, wall in quality_efficiency(bundle):
        lines.append(f"{solver},{_fmt(quality)},{_fmt(wall)}")
    return "\n".join(lines) + "\n"


def meta_dict(bundle: ResultsBundle) -> dict:
    return {
        "suite_version": SUITE_VERSION,
        "config_hash": bundle.config_hash,
        "config": config_to_dict(bundle.config),
        "source_labels": list(bundle.source_labels),
        "repetition_count": bundle.config.budget.repetitions,
        "failed_repetitions": [
            {"solver": r.solver, "repetition": r.repetition, "error": r.error}
            for r in bundle.failures()
        ],
        "wallclock_policy": "per repetition, around the solver call only; "
        "source composition excluded",
    }


def write_outputs(bundle: ResultsBundle, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "trace": out / "trace.csv",
        "summary": out / "summary.csv",
        "qe": out / "qe.csv",
        "meta": out / "meta.json",
    }
    paths["trace"].write_text(trace_csv_text(bundle), encoding="utf-8")
    paths["summary"].write_text(summary_csv_text(bundle), encoding="utf-8")
    paths["qe"].write_text(qe_csv_text(bundle), encoding="utf-8")
    with open(paths["meta"], "w", encoding="utf-8") as fh:
        json.dump(meta_dict(bundle), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def read_summary_csv(path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        row = dict(zip(header, cells))
        for key in ("avg_objective", "perf_score", "mean_wallclock_s", "gen_gt0_median"):
            row[key] = float(row[key]) if row.get(key) else None
        rows.append(row)
    return rows
