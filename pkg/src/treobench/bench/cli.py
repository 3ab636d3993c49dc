"""Command-line interface.

Subcommands: generate (config presets / instance files), optimize-sources,
run, heatmap, relatedness, report. Exit codes: 0 success, 2 config error,
3 partial failure.
"""
from __future__ import annotations

import argparse
import inspect
import sys
from pathlib import Path

from ..core import ContractError, Family, RngStream, RunBudget
from ..problems.files import save_task
from ..similarity import attack_relatedness, build_heatmap, save_heatmap, save_verdicts
from .archives import load_archives, save_archives
from .compose import compose_sources, make_target, source_task_specs
from .config import PRESETS, config_hash, load_config, save_config
from .results import read_summary_csv, write_outputs
from .runner import PartialFailure, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treobench",
        description="Transfer-optimization benchmark suite: knapsack, planar arm, pixel attacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit a preset config or the task instance files")
    gen.add_argument("--preset", choices=sorted(PRESETS), help="write a preset config.json")
    gen.add_argument("--config", help="existing config: emit its target/source task files")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--ratio", type=float, help="related-source ratio (ratio presets)")
    gen.add_argument("--count", type=int, help="source count (ratio presets)")
    gen.add_argument("--dimension", type=int, help="knapsack item count")
    gen.add_argument("--joints", type=int, help="arm joint count")
    gen.add_argument("--repetitions", type=int)
    gen.add_argument("--configuration", help="multi-to-one table row (A, B, or C)")

    opt = sub.add_parser("optimize-sources", help="compose and archive the source tasks")
    opt.add_argument("--config", required=True)
    opt.add_argument("--out", required=True, help="directory for .archive files")

    run = sub.add_parser("run", help="run an experiment config end to end")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="directory for trace/summary/qe/meta files")
    run.add_argument("--archives", help="reuse archives from optimize-sources")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--allow-partial", action="store_true")

    heat = sub.add_parser("heatmap", help="arm source-target relatedness grid")
    heat.add_argument("--joints", type=int, default=10)
    heat.add_argument("--resolution", type=int, default=20)
    heat.add_argument("--samples", type=int, default=50)
    heat.add_argument("--evals", type=int, default=5000, help="per-cell optimization budget")
    heat.add_argument("--pop", type=int, default=50)
    heat.add_argument("--seed", type=int, default=2024)
    heat.add_argument("--out", required=True, help="heatmap csv path")

    rel = sub.add_parser("relatedness", help="attack per-individual relatedness votes")
    rel.add_argument("--config", required=True, help="attack-family config (target + budget)")
    rel.add_argument("--archives", required=True)
    rel.add_argument("--repeats", type=int, default=30)
    rel.add_argument("--out", required=True, help="verdict csv path")

    rep = sub.add_parser("report", help="merge summary.csv files from run directories")
    rep.add_argument("runs", nargs="+", help="run output directories")
    rep.add_argument("--out", required=True, help="combined csv path")
    return parser


def _preset_config(args):
    builder = PRESETS[args.preset]
    accepted = set(inspect.signature(builder).parameters)
    overrides = {}
    for key in ("seed", "ratio", "count", "dimension", "joints", "repetitions", "configuration"):
        value = getattr(args, key, None)
        if value is None:
            continue
        if key not in accepted:
            raise ContractError(f"preset {args.preset!r} does not take --{key}")
        overrides[key] = value
    return builder(**overrides)


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.preset:
        config = _preset_config(args)
        save_config(config, out / "config.json")
        print(f"wrote {out / 'config.json'} (hash {config_hash(config)})")
        return EXIT_OK
    if not args.config:
        raise ContractError("generate needs --preset or --config")
    config = load_config(args.config)
    target = make_target(config)
    save_task(target, out / "target.task")
    tasks, labels = source_task_specs(config)
    src_dir = out / "sources"
    src_dir.mkdir(exist_ok=True)
    for i, task in enumerate(tasks):
        save_task(task, src_dir / f"source_{i:05d}.task")
    (src_dir / "labels.csv").write_text(
        "index,label\n" + "".join(f"{i},{lab}\n" for i, lab in enumerate(labels)),
        encoding="utf-8",
    )
    print(f"wrote target + {len(tasks)} source task files under {out}")
    return EXIT_OK


def _cmd_optimize_sources(args) -> int:
    config = load_config(args.config)
    archives, labels = compose_sources(config)
    save_archives(archives, labels, args.out)
    print(f"archived {len(archives)} optimized sources under {args.out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    config = load_config(args.config)
    archives = labels = None
    if args.archives:
        archives, labels = load_archives(args.archives)
    try:
        bundle = run_experiment(
            config,
            archives=archives,
            labels=labels,
            workers=args.workers,
            allow_partial=args.allow_partial,
        )
    except PartialFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    paths = write_outputs(bundle, args.out)
    print(f"wrote {', '.join(str(p) for p in paths.values())}")
    if bundle.failures():
        print(f"{len(bundle.failures())} repetition(s) failed; see meta.json", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_heatmap(args) -> int:
    grid = build_heatmap(
        args.joints,
        args.resolution,
        args.samples,
        RunBudget(args.evals, args.pop),
        RngStream(args.seed).split_label("heatmap"),
    )
    save_heatmap(grid, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_relatedness(args) -> int:
    config = load_config(args.config)
    if config.family is not Family.ATTACK:
        raise ContractError("relatedness protocol applies to attack-family configs")
    target = make_target(config)
    archives, _labels = load_archives(args.archives)
    budget = RunBudget(config.budget.max_function_evaluations, config.budget.population_size)
    verdicts = []
    for i, archive in enumerate(archives):
        rng = RngStream(config.seed).split_label("relatedness").split(i)
        verdicts.append(
            attack_relatedness(
                archive, target, args.repeats, rng, budget, source_id=f"src-{i:05d}"
            )
        )
    save_verdicts(verdicts, args.out)
    print(f"wrote {args.out} ({sum(v.related for v in verdicts)}/{len(verdicts)} related)")
    return EXIT_OK


def _cmd_report(args) -> int:
    lines = ["run,solver,avg_objective,perf_score,mean_wallclock_s,gen_gt0_median"]
    for run_dir in args.runs:
        path = Path(run_dir) / "summary.csv"
        if not path.exists():
            raise ContractError(f"no summary.csv under {run_dir}")
        for row in read_summary_csv(path):
            cells = [
                Path(run_dir).name,
                row["solver"],
                "" if row["avg_objective"] is None else repr(row["avg_objective"]),
                "" if row["perf_score"] is None else repr(row["perf_score"]),
                "" if row["mean_wallclock_s"] is None else repr(row["mean_wallclock_s"]),
                "" if row["gen_gt0_median"] is None else repr(row["gen_gt0_median"]),
            ]
            lines.append(",".join(cells))
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "optimize-sources": _cmd_optimize_sources,
    "run": _cmd_run,
    "heatmap": _cmd_heatmap,
    "relatedness": _cmd_relatedness,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ContractError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
