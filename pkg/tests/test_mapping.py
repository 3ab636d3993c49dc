"""Cross-dimension genome adapters: alignment, moment matching, least squares."""

import numpy as np
import pytest

from treobench import ContractError, Population, RngStream
from treobench.core.genome import Representation
from treobench.transfer.mapping import MAPPING_KINDS, clip_pad_align, fit_mapping


def _pop(genes, representation=Representation.REAL, fitness=None):
    genes = np.asarray(genes, dtype=np.float64)
    if fitness is None:
        fitness = np.arange(genes.shape[0], dtype=np.float64)
    return Population.from_matrix(representation, genes, np.asarray(fitness, float))


def test_clip_pad_align_truncates_longer_genomes():
    genes = RngStream(1).generator.random((6, 10))
    out = clip_pad_align(genes, 4, Representation.REAL, RngStream(2))
    assert out.shape == (6, 4)
    assert np.array_equal(out, genes[:, :4])


def test_clip_pad_align_pads_shorter_genomes():
    rng = RngStream(3)
    genes = (rng.split(0).generator.random((6, 4)) < 0.5).astype(float)
    out = clip_pad_align(genes, 9, Representation.BINARY, rng.split(1))
    assert out.shape == (6, 9)
    assert np.array_equal(out[:, :4], genes)
    assert set(np.unique(out[:, 4:])) <= {0.0, 1.0}
    # padding is random, not constant
    assert 0.0 < out[:, 4:].mean() < 1.0


def test_clip_pad_align_same_dimension_is_identity():
    genes = RngStream(4).generator.random((3, 5))
    out = clip_pad_align(genes, 5, Representation.REAL, RngStream(5))
    assert np.array_equal(out, genes)


def test_direction_vector_shift_then_clamp():
    source = _pop(np.zeros((6, 2)))
    target = _pop(np.ones((6, 2)))
    adapter = fit_mapping("direction_vector", source, target, RngStream(6))
    out = adapter.apply(np.array([[0.2, 0.3]]), RngStream(7))
    # unclamped shift lands at (1.2, 1.3)
    assert np.allclose(out, [[1.0, 1.0]])


def test_affine_with_equal_covariances_reduces_to_mean_shift():
    rng = RngStream(8)
    base = 0.1 + 0.5 * rng.split(0).generator.random((40, 3))
    source = _pop(base)
    target = _pop(base + 0.3)  # same covariance by construction
    adapter = fit_mapping("affine_distribution", source, target, rng.split(1))
    probe = 0.1 + 0.5 * rng.split(2).generator.random((10, 3))
    out = adapter.apply(probe, rng.split(3))
    assert np.allclose(out, probe + 0.3, atol=1e-9)


def test_least_squares_self_map_is_near_identity():
    rng = RngStream(9)
    genes = rng.split(0).generator.random((5, 30))
    pop = _pop(genes, fitness=rng.split(1).generator.random(5))
    adapter = fit_mapping("linear_lsq", pop, pop, rng.split(2))
    out = adapter.apply(genes, rng.split(3))
    residual = np.linalg.norm(out - genes, axis=1)
    assert residual.max() <= 1e-6


def test_binary_outputs_are_rounded_to_bits():
    rng = RngStream(10)
    genes = (rng.split(0).generator.random((12, 6)) < 0.5).astype(float)
    source = _pop(genes, Representation.BINARY, rng.split(1).generator.random(12))
    tgt_genes = (rng.split(2).generator.random((12, 6)) < 0.5).astype(float)
    target = _pop(tgt_genes, Representation.BINARY, rng.split(3).generator.random(12))
    for kind in ("linear_lsq", "affine_distribution", "direction_vector"):
        adapter = fit_mapping(kind, source, target, rng.split(4))
        out = adapter.apply(genes, rng.split(5))
        assert set(np.unique(out)) <= {0.0, 1.0}, kind


def test_adapters_align_source_dimension_first():
    rng = RngStream(11)
    src_genes = rng.split(0).generator.random((8, 10))
    tgt_genes = rng.split(1).generator.random((8, 4))
    source = _pop(src_genes)
    target = _pop(tgt_genes)
    for kind in ("linear_lsq", "affine_distribution", "direction_vector"):
        adapter = fit_mapping(kind, source, target, rng.split(2))
        out = adapter.apply(src_genes, rng.split(3))
        assert out.shape == (8, 4)
        assert out.min() >= 0.0 and out.max() <= 1.0


def test_mapping_kinds_tuple_is_stable():
    assert MAPPING_KINDS == (
        "clip_pad",
        "linear_lsq",
        "affine_distribution",
        "direction_vector",
    )
    with pytest.raises(ContractError):
        fit_mapping("mystery", _pop(np.zeros((3, 2))), _pop(np.zeros((3, 2))), RngStream(0))


def test_single_member_affine_degenerates_to_a_shift():
    # covariance collapses to the ridge scale, so the map is a pure mean shift
    single = _pop(np.array([[0.1, 0.2]]))
    target = _pop(np.array([[0.5, 0.7]]))
    adapter = fit_mapping("affine_distribution", single, target, RngStream(12))
    out = adapter.apply(np.array([[0.1, 0.2]]), RngStream(13))
    assert np.allclose(out, [[0.5, 0.7]], atol=1e-9)


def test_empty_population_cannot_fit_a_mapping():
    empty = Population([])
    filled = _pop(np.array([[0.1, 0.2]]))
    with pytest.raises(ContractError):
        fit_mapping("direction_vector", empty, filled, RngStream(14))
