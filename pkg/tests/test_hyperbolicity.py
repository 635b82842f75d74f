from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circuma.domain import Disc, DomainSpec, HalfPlane
from circuma.hyperbolicity import (EXHAUSTIVE_MAX, delta_four_point, delta_thin_triangles, farthest_point_sample,
                                   four_point_delta, gromov_product, sample_tuples)
from circuma.qh_metric import build_graph

HALF_PLANE = DomainSpec((HalfPlane(0, 1j),), False)


def test_gromov_product_on_a_line():
    d = lambda a, b: abs(a - b)
    assert gromov_product(d, 0, 4, 1) == 0.0
    assert gromov_product(d, 0, 4, 5) == pytest.approx(1.0)
    assert gromov_product(d, 2, 3, 0) == pytest.approx(2.0)


def test_four_cycle_has_delta_one():
    D = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], float)
    delta, wit = four_point_delta(D, sample_tuples(4, np.random.default_rng(0)))
    assert delta == 1.0
    assert sorted(wit) == [0, 1, 2, 3]


@given(st.lists(st.floats(-100, 100), min_size=4, max_size=12, unique=True))
def test_line_metric_has_delta_zero(xs):
    x = np.array(xs)
    D = np.abs(x[:, None] - x[None, :])
    delta, _ = four_point_delta(D, sample_tuples(len(xs), np.random.default_rng(0)))
    assert delta <= 1e-12 * max(1.0, np.abs(x).max())


@given(st.integers(4, 30), st.integers(0, 2**32 - 1))
def test_tree_metric_has_delta_zero(n, seed):
    rng = np.random.default_rng(seed)
    parent = [int(rng.integers(k)) if k else -1 for k in range(n)]
    w = rng.uniform(0.1, 2.0, n)
    depth = np.zeros(n)
    anc = [[k] for k in range(n)]
    for k in range(1, n):
        depth[k] = depth[parent[k]] + w[k]
        anc[k] = anc[parent[k]] + [k]
    D = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        common = [a for a, b in zip(anc[i], anc[j]) if a == b][-1]
        D[i, j] = D[j, i] = depth[i] + depth[j] - 2 * depth[common]
    delta, _ = four_point_delta(D, sample_tuples(n, rng))
    assert delta <= 1e-9


def test_sample_tuples():
    with pytest.raises(ValueError):
        sample_tuples(3, np.random.default_rng(0))
    assert len(sample_tuples(10, np.random.default_rng(0))) == math.comb(10, 4)
    t = sample_tuples(EXHAUSTIVE_MAX + 5, np.random.default_rng(0), limit=5000)
    assert t.shape == (5000, 4)
    assert (np.diff(t, axis=1) > 0).all()


def test_farthest_point_sample_is_spread_out():
    pts = np.exp(2j * np.pi * np.arange(12) / 12)
    idx = farthest_point_sample(pts, 4)
    assert len(set(idx.tolist())) == 4
    assert np.abs(pts[idx[0]] - pts[idx[1]]) == pytest.approx(2.0)


def test_delta_four_point_validation_and_fields():
    dom = DomainSpec((Disc(0, 1, outer=True),), False)
    with pytest.raises(ValueError):
        delta_four_point(dom, 3)
    est = delta_four_point(dom, 12, h=0.05, seed=1)
    assert est.sample_size == 12 and est.tuples_scanned == math.comb(12, 4)
    assert est.delta_four_point >= 0 and len(est.witness) == 4


def test_thin_triangles_in_half_plane():
    graph = build_graph(HALF_PLANE, 0.05, (-6, 1e-9, 6, 8))
    tri = [(1j, 3 + 1j, 1.5 + 4j), (0.5j, 2 + 2j, -2 + 2j)]
    a = delta_thin_triangles(HALF_PLANE, tri, graph=graph)
    b = delta_thin_triangles(HALF_PLANE, tri, graph=graph)
    # hyperbolic plane triangles are log(1 + sqrt 2)-thin; graph paths add O(h)
    assert 0 <= a == b <= math.log(1 + math.sqrt(2)) + 0.3
