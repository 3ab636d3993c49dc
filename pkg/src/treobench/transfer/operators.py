"""Variation and selection operators, vectorized over gene matrices.

Per-family bundles: knapsack uses uniform crossover + bit-flip mutation, the
arm uses SBX + polynomial mutation (eta 10/10), attacks use single-point
crossover + Gaussian mutation (sigma 0.5). Real genes are clamped (not
reflected) to [0,1]. Selection is binary tournament; ties go to the first
contestant drawn so runs are deterministic.
"""
from __future__ import annotations

import numpy as np

from ..core import ContractError, RngStream


def binary_tournament(fitness: np.ndarray, count: int, rng: RngStream) -> np.ndarray:
    g = rng.generator
    n = fitness.shape[0]
    a = g.integers(0, n, size=count)
    b = g.integers(0, n, size=count)
    return np.where(fitness[a] >= fitness[b], a, b)


def uniform_crossover(
    pa: np.ndarray, pb: np.ndarray, rng: RngStream, rate: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    g = rng.generator
    crossed = g.random(pa.shape[0]) < rate
    swap = (g.random(pa.shape) < 0.5) & crossed[:, None]
    ca = np.where(swap, pb, pa)
    cb = np.where(swap, pa, pb)
    return ca, cb


def single_point_crossover(
    pa: np.ndarray, pb: np.ndarray, rng: RngStream, rate: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    g = rng.generator
    m, d = pa.shape
    if d < 2:
        return pa.copy(), pb.copy()
    crossed = g.random(m) < rate
    cuts = g.integers(1, d, size=m)
    tail = np.arange(d)[None, :] >= cuts[:, None]
    tail &= crossed[:, None]
    ca = np.where(tail, pb, pa)
    cb = np.where(tail, pa, pb)
    return ca, cb


def sbx_crossover(
    pa: np.ndarray,
    pb: np.ndarray,
    rng: RngStream,
    eta: float = 10.0,
    rate: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    g = rng.generator
    crossed = g.random(pa.shape[0]) < rate
    u = g.random(pa.shape)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    # each gene participates with probability 0.5, as in the usual SBX variant
    active = (g.random(pa.shape) < 0.5) & crossed[:, None]
    ca = np.where(active, 0.5 * ((1 + beta) * pa + (1 - beta) * pb), pa)
    cb = np.where(active, 0.5 * ((1 - beta) * pa + (1 + beta) * pb), pb)
    return np.clip(ca, 0.0, 1.0), np.clip(cb, 0.0, 1.0)


def bit_flip_mutation(genes: np.ndarray, pm: float, rng: RngStream) -> np.ndarray:
    g = rng.generator
    flip = g.random(genes.shape) < pm
    return np.where(flip, 1.0 - genes, genes)


def polynomial_mutation(
    genes: np.ndarray, pm: float, rng: RngStream, eta: float = 10.0
) -> np.ndarray:
    """Bounded polynomial mutation on [0,1] genes."""
    g = rng.generator
    mutate = g.random(genes.shape) < pm
    u = g.random(genes.shape)
    mut_pow = 1.0 / (eta + 1.0)
    low_side = u < 0.5
    val_low = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - genes) ** (eta + 1.0)
    val_high = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * genes ** (eta + 1.0)
    delta = np.where(low_side, val_low**mut_pow - 1.0, 1.0 - val_high**mut_pow)
    out = np.where(mutate, genes + delta, genes)
    return np.clip(out, 0.0, 1.0)


def gaussian_mutation(
    genes: np.ndarray, pm: float, rng: RngStream, sigma: float = 0.5
) -> np.ndarray:
    g = rng.generator
    mutate = g.random(genes.shape) < pm
    noise = g.normal(0.0, sigma, genes.shape)
    return np.clip(np.where(mutate, genes + noise, genes), 0.0, 1.0)


CROSSOVERS = {
    "uniform": uniform_crossover,
    "single_point": single_point_crossover,
    "sbx": sbx_crossover,
}


def make_offspring(
    genes: np.ndarray,
    fitness: np.ndarray,
    count: int,
    crossover: str,
    mutation: str,
    rng: RngStream,
    crossover_rate: float = 1.0,
    mutation_rate: float | None = None,
    eta_c: float = 10.0,
    eta_m: float = 10.0,
    sigma: float = 0.5,
) -> np.ndarray:
    """Tournament parents -> crossover -> mutation, truncated to `count` rows."""
    pairs = (count + 1) // 2
    parents = binary_tournament(fitness, 2 * pairs, rng)
    pa = genes[parents[:pairs]]
    pb = genes[parents[pairs:]]
    if crossover == "uniform":
        ca, cb = uniform_crossover(pa, pb, rng, crossover_rate)
    elif crossover == "single_point":
        ca, cb = single_point_crossover(pa, pb, rng, crossover_rate)
    elif crossover == "sbx":
        ca, cb = sbx_crossover(pa, pb, rng, eta_c, crossover_rate)
    else:
        raise ContractError(f"unknown crossover {crossover!r}")
    children = np.concatenate([ca, cb])[:count]
    pm = mutation_rate if mutation_rate is not None else 1.0 / genes.shape[1]
    if mutation == "bit_flip":
        children = bit_flip_mutation(children, pm, rng)
    elif mutation == "polynomial":
        children = polynomial_mutation(children, pm, rng, eta_m)
    elif mutation == "gaussian":
        children = gaussian_mutation(children, pm, rng, sigma)
    else:
        raise ContractError(f"unknown mutation {mutation!r}")
    return children
