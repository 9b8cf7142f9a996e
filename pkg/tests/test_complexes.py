import numpy as np
import pytest

from torushom.complexes import (ComplexParams, Convention, adjacency_matrix,
                                boundary_matrix, build_complex, phi_k,
                                simplex_counts)
from torushom.sampling import Binomial, PointConfiguration, SeedSpec, sample
from torushom.torus import Metric, TorusSpec

SPEC1 = TorusSpec(d=1, a=1.0)
SPEC2 = TorusSpec(d=2, a=1.0)


def config_1d(*xs):
    return PointConfiguration(spec=SPEC1, points=np.array(xs).reshape(-1, 1))


def test_params_validation():
    with pytest.raises(ValueError):
        ComplexParams(epsilon=0.0)
    with pytest.raises(ValueError):
        ComplexParams(epsilon=float("inf"))


def test_threshold_conventions():
    rips = ComplexParams(epsilon=0.1)
    sub = ComplexParams(epsilon=0.1, convention=Convention.SUBCOMPLEX_EPS)
    assert rips.threshold() == pytest.approx(0.2)
    assert sub.threshold() == pytest.approx(0.1)
    assert rips.ball_radius == pytest.approx(0.1)
    assert sub.ball_radius == pytest.approx(0.05)
    # rips is half-open at 2 eps; subcomplex is closed at eps
    assert not rips.adjacent(0.2)
    assert rips.adjacent(0.2 - 1e-12)
    assert sub.adjacent(0.1)
    assert not sub.adjacent(0.1 + 1e-12)


def test_adjacency_matrix_boundary_cases():
    cfg = config_1d(0.0, 0.2, 0.5)
    adj = adjacency_matrix(cfg, ComplexParams(epsilon=0.1))
    # pairs: d(0,0.2)=0.2 (not < 0.2), d(0.2,0.5)=0.3, d(0.5,0)=0.5
    assert not adj.any()
    adj2 = adjacency_matrix(
        cfg, ComplexParams(epsilon=0.2, convention=Convention.SUBCOMPLEX_EPS))
    assert adj2[0, 1] and adj2[1, 0]
    assert not adj2[1, 2] and not adj2[0, 2]
    assert not adj2.diagonal().any()


def test_wraparound_adjacency():
    cfg = config_1d(0.02, 0.98)
    adj = adjacency_matrix(cfg, ComplexParams(epsilon=0.05))
    assert adj[0, 1]


def test_counts_path_on_path_graph():
    # 0.0 - 0.15 - 0.30: a path, two edges, no triangle
    cfg = config_1d(0.0, 0.15, 0.30)
    gc = simplex_counts(cfg, ComplexParams(epsilon=0.1))
    assert gc.counts.tolist() == [3, 2]
    assert gc.N(1) == 3 and gc.N(2) == 2 and gc.N(3) == 0
    assert gc.euler_characteristic_counts() == 1
    assert not gc.truncated


def test_build_matches_counts():
    cfg = sample(Binomial(n=25), SPEC2, SeedSpec(17))
    params = ComplexParams(epsilon=0.1)
    counted = simplex_counts(cfg, params)
    built = build_complex(cfg, params)
    assert built.counts.tolist() == counted.counts.tolist()
    for dim, simplices in built.simplices.items():
        assert len(simplices) == built.counts[dim]
        assert simplices == sorted(simplices)


def test_homology_mode_radius_guard():
    cfg = config_1d(0.1, 0.2)
    big = ComplexParams(epsilon=0.25)  # ball radius 0.25 = a/4
    with pytest.raises(ValueError):
        simplex_counts(cfg, big, homology_mode=True)
    with pytest.warns(UserWarning):
        simplex_counts(cfg, big, homology_mode=False)
    # subcomplex convention halves the radius, so eps=0.25 is fine
    ok = ComplexParams(epsilon=0.25, convention=Convention.SUBCOMPLEX_EPS)
    simplex_counts(cfg, ok, homology_mode=True)


def test_empty_configuration():
    cfg = PointConfiguration(spec=SPEC1, points=np.zeros((0, 1)))
    gc = simplex_counts(cfg, ComplexParams(epsilon=0.1))
    assert gc.counts.size == 0
    assert gc.euler_characteristic_counts() == 0


def test_max_dim_truncates_dimensions():
    cfg = sample(Binomial(n=30), SPEC1, SeedSpec(23))
    params = ComplexParams(epsilon=0.1)
    full = simplex_counts(cfg, params)
    only_edges = simplex_counts(cfg, params, max_dim=1)
    assert only_edges.counts.tolist() == full.counts[:2].tolist()
    assert not only_edges.truncated


def test_phi_k_indicator():
    params = ComplexParams(epsilon=0.1)
    assert phi_k(np.array([[0.0], [0.15]]), params, SPEC1) == 1
    assert phi_k(np.array([[0.0], [0.25]]), params, SPEC1) == 0
    assert phi_k(np.array([[0.0], [0.15], [0.30]]), params, SPEC1) == 0
    assert phi_k(np.array([[0.0], [0.1], [0.19]]), params, SPEC1) == 1


def test_euclidean_metric_changes_adjacency():
    # diagonal separation 0.15 in each coordinate: max-norm 0.15,
    # euclidean 0.15*sqrt(2) = 0.212
    cfg = PointConfiguration(
        spec=SPEC2, points=np.array([[0.1, 0.1], [0.25, 0.25]]))
    assert adjacency_matrix(cfg, ComplexParams(epsilon=0.1))[0, 1]
    assert not adjacency_matrix(
        cfg, ComplexParams(epsilon=0.1, metric=Metric.EUCLIDEAN))[0, 1]


def test_boundary_matrix_triangle():
    # three mutually close points: one triangle
    cfg = config_1d(0.0, 0.05, 0.10)
    gc = build_complex(cfg, ComplexParams(epsilon=0.1))
    assert gc.counts.tolist() == [3, 3, 1]
    d1 = boundary_matrix(gc, 1)
    d2 = boundary_matrix(gc, 2)
    assert d1.shape == (3, 3) and d2.shape == (3, 1)
    assert d1.sum(axis=0).tolist() == [2, 2, 2]
    assert d2.sum() == 3
    # d1 @ d2 = 0 over GF(2)
    assert not ((d1 @ d2) % 2).any()


def test_boundary_composition_random():
    cfg = sample(Binomial(n=20), SPEC2, SeedSpec(31))
    gc = build_complex(cfg, ComplexParams(epsilon=0.12))
    for dim in range(2, gc.max_dim_built + 1):
        lo = boundary_matrix(gc, dim - 1)
        hi = boundary_matrix(gc, dim)
        assert not ((lo.astype(int) @ hi.astype(int)) % 2).any()
