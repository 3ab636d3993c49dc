"""Search-space mapping adapters for cross-task solution injection.

Four kinds, fitted from a source population onto a target population:

* ``clip_pad``: dimension alignment only. Extra genes are truncated; missing
  genes are padded with fresh uniform draws (random bits for binary genomes).
* ``linear_lsq``: linear map M minimizing sum ||M s_i - t_i||^2 + ridge*||M||^2
  over rank-paired members (i-th fittest source member onto i-th fittest
  target member). Solved in the dual (an n x n system), which is what makes
  thousand-gene tasks affordable.
* ``affine_distribution``: x -> A (x - mu_S) + mu_T with A = chol(Sigma_T)
  chol(Sigma_S)^-1, matching first and second moments of the two populations.
* ``direction_vector``: x -> x + (mu_T - mu_S).

Mapped outputs are clamped to [0,1]; binary targets are rounded to bits.
Inputs whose dimension differs from the fitted source dimension are clip/pad
aligned first, so adapters accept any population of the source family.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from ..core import ContractError, Population, Representation, RngStream

MAPPING_KINDS = ("clip_pad", "linear_lsq", "affine_distribution", "direction_vector")


def clip_pad_align(
    genes: np.ndarray,
    dimension: int,
    representation: Representation,
    rng: RngStream,
) -> np.ndarray:
    """Truncate or randomly pad gene rows to the requested dimension."""
    m, d = genes.shape
    if d == dimension:
        return genes
    if d > dimension:
        return np.ascontiguousarray(genes[:, :dimension])
    pad = rng.generator.random((m, dimension - d))
    if representation is Representation.BINARY:
        pad = (pad < 0.5).astype(np.float64)
    return np.concatenate([genes, pad], axis=1)


@dataclass(frozen=True)
class MappingAdapter:
    kind: str
    input_dimension: int
    output_dimension: int
    representation: Representation
    matrix: np.ndarray | None = None  # (d_in, d_out), applied as X @ matrix
    source_mean: np.ndarray | None = None
    target_mean: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in MAPPING_KINDS:
            raise ContractError(f"unknown mapping kind {self.kind!r}")

    def apply(self, genes: np.ndarray, rng: RngStream) -> np.ndarray:
        genes = np.asarray(genes, dtype=np.float64)
        genes = clip_pad_align(genes, self.input_dimension, self.representation, rng)
        if self.kind == "clip_pad":
            out = clip_pad_align(
                genes, self.output_dimension, self.representation, rng
            )
        elif self.kind == "linear_lsq":
            out = genes @ self.matrix
        elif self.kind == "affine_distribution":
            out = (genes - self.source_mean) @ self.matrix + self.target_mean
        elif self.kind == "direction_vector":
            out = genes + (self.target_mean - self.source_mean)
        out = np.clip(out, 0.0, 1.0)
        if self.representation is Representation.BINARY and self.kind != "clip_pad":
            out = np.where(out >= 0.5, 1.0, 0.0)
        return np.ascontiguousarray(out)


def _moments(genes: np.ndarray, ridge: float) -> tuple[np.ndarray, np.ndarray]:
    mu = genes.mean(axis=0)
    centered = genes - mu
    cov = centered.T @ centered / genes.shape[0]
    cov[np.diag_indices_from(cov)] += ridge
    return mu, cov


def fit_mapping(
    kind: str,
    source: Population,
    target: Population,
    rng: RngStream,
    ridge: float = 1e-6,
) -> MappingAdapter:
    if kind not in MAPPING_KINDS:
        raise ContractError(f"unknown mapping kind {kind!r}")
    rep = target.representation
    d_in = source.dimension
    d_out = target.dimension
    if kind == "clip_pad":
        return MappingAdapter(kind, d_in, d_out, rep)

    s_genes = source.genes_matrix()
    t_genes = target.genes_matrix()
    if kind == "direction_vector" or kind == "affine_distribution":
        # moment matching needs a common dimension; align source onto target
        s_genes = clip_pad_align(s_genes, d_out, rep, rng)
        mu_s = s_genes.mean(axis=0)
        mu_t = t_genes.mean(axis=0)
        if kind == "direction_vector":
            return MappingAdapter(
                kind, d_out, d_out, rep, source_mean=mu_s, target_mean=mu_t
            )
        mu_s, cov_s = _moments(s_genes, max(ridge, 1e-6))
        mu_t, cov_t = _moments(t_genes, max(ridge, 1e-6))
        l_s = cholesky(cov_s, lower=True)
        l_t = cholesky(cov_t, lower=True)
        # A = L_T L_S^-1, stored transposed for row-matrix application
        a_t = solve_triangular(l_s.T, l_t.T, lower=False)
        return MappingAdapter(
            kind, d_out, d_out, rep,
            matrix=a_t, source_mean=mu_s, target_mean=mu_t,
        )

    # linear_lsq: rank-pair by fitness, best onto best
    s_order = np.argsort(-source.fitness_array(), kind="stable")
    t_order = np.argsort(-target.fitness_array(), kind="stable")
    n = min(len(s_order), len(t_order))
    s_mat = clip_pad_align(s_genes[s_order[:n]], d_out, rep, rng)
    t_mat = t_genes[t_order[:n]]
    if n <= d_out:
        gram = s_mat @ s_mat.T
        gram[np.diag_indices_from(gram)] += ridge
        matrix = s_mat.T @ np.linalg.solve(gram, t_mat)
    else:
        normal = s_mat.T @ s_mat
        normal[np.diag_indices_from(normal)] += ridge
        matrix = np.linalg.solve(normal, s_mat.T @ t_mat)
    return MappingAdapter(kind, d_out, d_out, rep, matrix=matrix)
