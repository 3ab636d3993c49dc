"""Plain-text persistence for source archives.

One file per archive: the task record (embedded with a line count), then the
first- and final-generation populations. Binary genomes serialize as bit
strings, real genomes as repr() floats, so a save/load round trip is
bit-exact.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..core import ContractError, Population, Representation, SourceArchive
from ..problems.files import task_from_text, task_to_text


def _format_member(representation: Representation, genes: np.ndarray, fitness: float) -> str:
    if representation is Representation.BINARY:
        body = "".join("1" if v else "0" for v in genes.astype(bool))
    else:
        body = " ".join(repr(float(v)) for v in genes)
    return f"{float(fitness)!r} {body}"


def _parse_member(representation: Representation, line: str) -> tuple[float, np.ndarray]:
    parts = line.split()
    fitness = float(parts[0])
    if representation is Representation.BINARY:
        genes = np.array([1.0 if c == "1" else 0.0 for c in parts[1]])
    else:
        genes = np.array([float(v) for v in parts[1:]])
    return fitness, genes


def _population_lines(tag: str, pop: Population) -> list[str]:
    rep = pop.representation
    lines = [f"{tag} {len(pop)} {pop.generation}"]
    for member in pop.members:
        lines.append(_format_member(rep, member.genome.genes, member.fitness))
    return lines


def archive_to_text(archive: SourceArchive, label: str = "") -> str:
    task_text = task_to_text(archive.task)
    task_lines = task_text.strip("\n").splitlines()
    lines = [
        "archive 1",
        f"seed {archive.seed}",
        f"settings {archive.solver_settings_id}",
        f"label {label}" if label else "label -",
        f"task {len(task_lines)}",
        *task_lines,
        *_population_lines("first", archive.first_generation),
        *_population_lines("final", archive.final_generation),
    ]
    return "\n".join(lines) + "\n"


def archive_from_text(text: str) -> tuple[SourceArchive, str]:
    lines = text.strip("\n").splitlines()
    if not lines or lines[0].split() != ["archive", "1"]:
        raise ContractError("not an archive record")
    seed = int(lines[1].split()[1])
    settings_id = lines[2].split(maxsplit=1)[1]
    label_parts = lines[3].split(maxsplit=1)
    label = label_parts[1] if len(label_parts) > 1 and label_parts[1] != "-" else ""
    n_task = int(lines[4].split()[1])
    cursor = 5
    task = task_from_text("\n".join(lines[cursor : cursor + n_task]))
    cursor += n_task
    rep = task.representation
    pops = {}
    for tag in ("first", "final"):
        head = lines[cursor].split()
        if head[0] != tag:
            raise ContractError(f"expected {tag} population block")
        count, generation = int(head[1]), int(head[2])
        cursor += 1
        genes = []
        fits = []
        for line in lines[cursor : cursor + count]:
            fitness, row = _parse_member(rep, line)
            fits.append(fitness)
            genes.append(row)
        cursor += count
        pops[tag] = Population.from_matrix(rep, np.stack(genes), np.array(fits), generation)
    archive = SourceArchive(task, pops["first"], pops["final"], seed, settings_id)
    return archive, label


def save_archives(archives, labels, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, (archive, label) in enumerate(zip(archives, labels)):
        path = directory / f"source_{i:05d}.archive"
        path.write_text(archive_to_text(archive, label), encoding="utf-8")


def load_archives(directory) -> tuple[list[SourceArchive], list[str]]:
    directory = Path(directory)
    paths = sorted(directory.glob("source_*.archive"))
    if not paths:
        raise ContractError(f"no archives found under {directory}")
    archives = []
    labels = []
    for path in paths:
        archive, label = archive_from_text(path.read_text(encoding="utf-8"))
        archives.append(archive)
        labels.append(label)
    return archives, labels
