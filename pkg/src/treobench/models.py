"""Search-distribution models and the stacked-density mixture.

A mixture stacks frozen source models plus a target model; only the weights
(the transfer coefficients) are learned, by EM against the current target
population. All density work happens in log space to avoid underflow; batch
entry points operate on gene matrices because solvers evaluate hundreds of
components per transfer event.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.special import logsumexp

from .core import ContractError, Population, Representation, RngStream

LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# component models


@dataclass(frozen=True)
class BernoulliModel:
    """Factored Bernoulli: independent per-bit frequencies clamped away from 0/1."""

    p: np.ndarray
    eps_p: float

    def __post_init__(self):
        p = np.ascontiguousarray(self.p, dtype=np.float64)
        object.__setattr__(self, "p", p)
        if p.ndim != 1 or p.size == 0:
            raise ContractError("p must be a non-empty vector")
        if p.min() <= 0.0 or p.max() >= 1.0:
            raise ContractError("Bernoulli probabilities must lie strictly inside (0, 1)")

    @property
    def dimension(self) -> int:
        return int(self.p.size)


@dataclass(frozen=True)
class GaussianModel:
    """Multivariate Gaussian with ridge-regularized covariance."""

    mean: np.ndarray
    cov: np.ndarray
    lam: float
    # lower Cholesky factor of cov, computed once at construction
    chol: np.ndarray = field(init=False, repr=False, compare=False)
    log_det: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mean = np.ascontiguousarray(self.mean, dtype=np.float64)
        cov = np.ascontiguousarray(self.cov, dtype=np.float64)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if cov.shape != (mean.size, mean.size):
            raise ContractError("covariance shape must match mean dimension")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ContractError("covariance must be symmetric")
        try:
            chol = cholesky(cov, lower=True)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - regularized upstream
            raise ContractError("covariance is not positive definite") from exc
        object.__setattr__(self, "chol", chol)
        object.__setattr__(self, "log_det", float(2.0 * np.log(np.diag(chol)).sum()))

    @property
    def dimension(self) -> int:
        return int(self.mean.size)


Model = BernoulliModel | GaussianModel


# ---------------------------------------------------------------------------
# fitting


def fit_bernoulli_genes(genes: np.ndarray, fit_sample_size: int | None = None) -> BernoulliModel:
    genes = np.atleast_2d(genes)
    n = fit_sample_size if fit_sample_size is not None else genes.shape[0]
    if n < 1:
        raise ContractError("need at least one member to fit a Bernoulli model")
    eps = 1.0 / (2.0 * n)
    p = np.clip(genes.mean(axis=0), eps, 1.0 - eps)
    return BernoulliModel(p, eps)


def fit_bernoulli(pop: Population) -> BernoulliModel:
    """p_j = clamp(mean of bit j, eps, 1-eps) with eps = 1/(2*len(pop))."""
    if pop.representation is not Representation.BINARY:
        raise ContractError("Bernoulli model requires a binary population")
    return fit_bernoulli_genes(pop.genes_matrix(), len(pop))


def fit_gaussian_genes(genes: np.ndarray, lam: float = 1e-6) -> GaussianModel:
    genes = np.atleast_2d(genes)
    n = genes.shape[0]
    if n < 2:
        raise ContractError("need at least two members to fit a Gaussian model")
    mean = genes.mean(axis=0)
    centered = genes - mean
    cov = (centered.T @ centered) / n + lam * np.eye(genes.shape[1])
    return GaussianModel(mean, cov, lam)


def fit_gaussian(pop: Population, lam: float = 1e-6) -> GaussianModel:
    """Sample mean and (denominator n) covariance plus lam*I ridge."""
    if pop.representation is not Representation.REAL:
        raise ContractError("Gaussian model requires a real-coded population")
    return fit_gaussian_genes(pop.genes_matrix(), lam)


def fit_model(representation: Representation, genes: np.ndarray, lam: float = 1e-6) -> Model:
    if representation is Representation.BINARY:
        return fit_bernoulli_genes(genes)
    return fit_gaussian_genes(genes, lam)


# ---------------------------------------------------------------------------
# densities


def log_density_batch(model: Model, genes: np.ndarray) -> np.ndarray:
    """Log density of each row of a (m, d) matrix under the model."""
    genes = np.atleast_2d(genes)
    if genes.shape[1] != model.dimension:
        raise ContractError("genome dimension does not match model")
    if isinstance(model, BernoulliModel):
        return genes @ np.log(model.p) + (1.0 - genes) @ np.log1p(-model.p)
    diff = genes - model.mean
    z = solve_triangular(model.chol, diff.T, lower=True)
    quad = np.einsum("ij,ij->j", z, z)
    return -0.5 * (model.dimension * LOG_2PI + model.log_det + quad)


def log_density(model: Model, x: np.ndarray) -> float:
    return float(log_density_batch(model, np.asarray(x, dtype=np.float64)[None, :])[0])


def density(model: Model, x: np.ndarray) -> float:
    return float(np.exp(log_density(model, x)))


def stacked_log_density(models: list[Model], genes: np.ndarray) -> np.ndarray:
    """(m, k) matrix of log densities; one matmul for Bernoulli stacks."""
    genes = np.atleast_2d(genes)
    if not models:
        return np.empty((genes.shape[0], 0))
    if all(isinstance(m, BernoulliModel) for m in models):
        logp = np.log(np.stack([m.p for m in models]))
        log1mp = np.log1p(-np.stack([m.p for m in models]))
        return genes @ logp.T + (1.0 - genes) @ log1mp.T
    cols = [log_density_batch(m, genes) for m in models]
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# sampling


def sample_genes(model: Model, rng: RngStream, count: int) -> np.ndarray:
    if count < 0:
        raise ContractError("count must be non-negative")
    g = rng.generator
    if isinstance(model, BernoulliModel):
        return (g.random((count, model.dimension)) < model.p).astype(np.float64)
    z = g.standard_normal((count, model.dimension))
    draws = model.mean + z @ model.chol.T
    return np.clip(draws, 0.0, 1.0)


def sample(model: Model, rng: RngStream, count: int) -> Population:
    if count < 1:
        raise ContractError("count must be at least 1")
    rep = Representation.BINARY if isinstance(model, BernoulliModel) else Representation.REAL
    return Population.from_matrix(rep, sample_genes(model, rng, count))


# ---------------------------------------------------------------------------
# mixture


@dataclass(frozen=True)
class MixtureModel:
    """Frozen component stack (sources + target) with learnable weights."""

    components: tuple[Model, ...]
    source_ids: tuple[str, ...]
    weights: np.ndarray
    target_index: int

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "source_ids", tuple(self.source_ids))
        if len(self.components) != w.size or len(self.source_ids) != w.size:
            raise ContractError("components, ids and weights must align")
        if not 0 <= self.target_index < w.size:
            raise ContractError("target_index out of range")
        if w.min() < 0 or abs(w.sum() - 1.0) > 1e-9:
            raise ContractError("weights must form a simplex")
        dims = {c.dimension for c in self.components}
        if len(dims) != 1:
            raise ContractError("all mixture components must share the target dimension")

    @property
    def dimension(self) -> int:
        return self.components[0].dimension

    def log_density_matrix(self, genes: np.ndarray) -> np.ndarray:
        return stacked_log_density(list(self.components), genes)


def uniform_mixture(
    components: list[Model], source_ids: list[str], target_index: int
) -> MixtureModel:
    k = len(components)
    return MixtureModel(tuple(components), tuple(source_ids), np.full(k, 1.0 / k), target_index)


@dataclass
class EmReport:
    iterations: int
    log_likelihoods: list[float]
    dropped: int
    aborted: bool


def em_weights(
    log_dens: np.ndarray,
    init_weights: np.ndarray,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> tuple[np.ndarray, EmReport]:
    """EM over mixture weights only; component densities are a fixed matrix.

    log_dens is (n_data, k). Data rows with zero density under every component
    are dropped (counted); the fit aborts, keeping init_weights, if more than
    half the data drops out.
    """
    w = np.asarray(init_weights, dtype=np.float64).copy()
    n_total = log_dens.shape[0]
    dead = ~np.isfinite(np.max(log_dens, axis=1))
    dropped = int(dead.sum())
    if dropped > 0:
        log_dens = log_dens[~dead]
    if dropped * 2 > n_total or log_dens.shape[0] == 0:
        return w, EmReport(0, [], dropped, True)

    lls: list[float] = []
    with np.errstate(divide="ignore"):  # zero weights stay zero through log space
        log_w = np.log(w)
        for it in range(max_iters):
            joint = log_dens + log_w[None, :]
            norm = logsumexp(joint, axis=1)
            lls.append(float(norm.sum()))
            resp = np.exp(joint - norm[:, None])
            w_new = resp.mean(axis=0)
            delta = float(np.max(np.abs(w_new - w)))
            w = w_new
            log_w = np.log(w)
            if delta < tol:
                break
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    return w, EmReport(len(lls), lls, dropped, False)


def em_fit_weights(
    mixture: MixtureModel,
    data: Population | np.ndarray,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> tuple[MixtureModel, EmReport]:
    """Learn transfer coefficients from target-population data; components stay frozen."""
    genes = data.genes_matrix() if isinstance(data, Population) else np.atleast_2d(data)
    if genes.shape[0] == 0:
        raise ContractError("EM needs non-empty data")
    log_dens = mixture.log_density_matrix(genes)
    w, report = em_weights(log_dens, mixture.weights, max_iters, tol)
    fitted = MixtureModel(mixture.components, mixture.source_ids, w, mixture.target_index)
    return fitted, report


def sample_mixture_genes(mixture: MixtureModel, rng: RngStream, count: int) -> np.ndarray:
    """Categorical component pick per member, then a draw from that component."""
    if count == 0:
        return np.empty((0, mixture.dimension))
    g = rng.generator
    picks = g.choice(len(mixture.components), size=count, p=mixture.weights)
    out = np.empty((count, mixture.dimension))
    for comp in np.unique(picks):
        rows = np.flatnonzero(picks == comp)
        out[rows] = sample_genes(mixture.components[comp], rng, rows.size)
    return out


def sample_mixture(mixture: MixtureModel, rng: RngStream, count: int) -> Population:
    rep = (
        Representation.BINARY
        if isinstance(mixture.components[0], BernoulliModel)
        else Representation.REAL
    )
    genes = sample_mixture_genes(mixture, rng, count)
    if count == 0:
        return Population(())
    return Population.from_matrix(rep, genes)


# ---------------------------------------------------------------------------
# plain-text serialization (bit-exact: repr round-trips float64)


def model_to_text(model: Model) -> str:
    lines = []
    if isinstance(model, BernoulliModel):
        lines.append("model bernoulli")
        lines.append(f"d {model.dimension}")
        lines.append(f"eps_p {float(model.eps_p)!r}")
        lines.append("p " + " ".join(repr(float(v)) for v in model.p))
    else:
        lines.append("model gaussian")
        lines.append(f"d {model.dimension}")
        lines.append(f"lam {float(model.lam)!r}")
        lines.append("mu " + " ".join(repr(float(v)) for v in model.mean))
        for row in model.cov:
            lines.append("sigma " + " ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def model_from_text(text: str) -> Model:
    rows = [line.split() for line in text.strip().splitlines() if line.strip()]
    fields = {}
    sigma_rows = []
    for parts in rows:
        if parts[0] == "sigma":
            sigma_rows.append([float(v) for v in parts[1:]])
        else:
            fields[parts[0]] = parts[1:]
    kind = fields["model"][0]
    d = int(fields["d"][0])
    if kind == "bernoulli":
        p = np.array([float(v) for v in fields["p"]])
        if p.size != d:
            raise ContractError("corrupt Bernoulli record")
        return BernoulliModel(p, float(fields["eps_p"][0]))
    if kind == "gaussian":
        mean = np.array([float(v) for v in fields["mu"]])
        cov = np.array(sigma_rows)
        if mean.size != d or cov.shape != (d, d):
            raise ContractError("corrupt Gaussian record")
        return GaussianModel(mean, cov, float(fields["lam"][0]))
    raise ContractError(f"unknown model kind {kind!r}")
