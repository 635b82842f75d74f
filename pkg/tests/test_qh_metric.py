from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circuma.domain import Curve, Disc, DomainSpec, HalfPlane, Segment
from circuma.errors import Disconnected, EmptyWindow, InfinityInDomain, PointOutsideDomain
from circuma.qh_metric import (build_graph, comparison_bounds, density, graph_pair_distances, graph_path,
                               path_qh_length, qh_distance, segment_qh_length, verify_comparison)

HALF_PLANE = DomainSpec((HalfPlane(0, 1j),), False, "half-plane")
DISC = DomainSpec((Disc(0, 1, outer=True),), False, "disc")


def hyperbolic_half_plane(z, w):
    return math.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def test_densities():
    z = np.array([0.5 + 0j])
    assert density(DISC, z)[0] == pytest.approx(2.0)
    assert density(DISC, z, "spherical")[0] == pytest.approx(2 / (1.25 * 2 * math.atan2(0.5, 1.5)))
    assert density(DISC, z, "length")[0] == 1.0
    with pytest.raises(ValueError):
        density(DISC, z, "taxicab")


def test_segment_quadrature_on_vertical_segment():
    # density 1/y integrates to log(2) from i to 2i
    val = segment_qh_length(HALF_PLANE, np.array([1j]), np.array([2j]), pieces=16)[0]
    assert val == pytest.approx(math.log(2), rel=1e-8)
    assert path_qh_length(HALF_PLANE, Curve(np.array([1j, 1.5j, 2j]))) == pytest.approx(math.log(2), rel=1e-8)


def test_radial_disc_distance():
    for r in (0.5, 0.9):
        k = qh_distance(DISC, 0, r, h=2e-3).value
        assert k == pytest.approx(-math.log(1 - r), rel=5e-3)


@given(st.floats(-2, 2), st.floats(0.2, 3), st.floats(-2, 2), st.floats(0.2, 3))
@settings(max_examples=8, deadline=None)
def test_half_plane_matches_hyperbolic_metric(x1, y1, x2, y2):
    z, w = complex(x1, y1), complex(x2, y2)
    if abs(z - w) < 1e-3:
        return
    k = qh_distance(HALF_PLANE, z, w).value
    exact = hyperbolic_half_plane(z, w)
    # the computed value is the length of an actual curve, hence an upper bound
    assert exact * (1 - 1e-9) <= k <= exact * 1.01


def test_spherical_flavor_beats_straight_segment():
    res = qh_distance(DISC, 0, 0.6 + 0.3j, "spherical")
    straight = path_qh_length(DISC, Curve(np.array([0, 0.6 + 0.3j])), "spherical")
    assert 0 < res.value <= straight * (1 + 1e-9)
    assert res.flavor == "spherical"


def test_query_errors():
    with pytest.raises(PointOutsideDomain):
        qh_distance(DISC, 0, 2)
    with pytest.raises(ValueError):
        qh_distance(DISC, 0, 0.5, "hyperbolic")
    assert qh_distance(DISC, 0.3, 0.3).value == 0.0


def test_graph_errors():
    with pytest.raises(ValueError):
        build_graph(DISC, 0.0)
    with pytest.raises(EmptyWindow):
        build_graph(DISC, 0.1, (0, 0, 0, 0))
    with pytest.raises(EmptyWindow):
        build_graph(DISC, 0.1, (5, 5, 6, 6))


def test_split_window_is_disconnected():
    wall = DomainSpec((Segment(-5j, 5j),), True, "wall")
    graph = build_graph(wall, 0.05, (-1, -1, 1, 1))
    with pytest.raises(Disconnected):
        graph_path(graph, -0.5, 0.5, "euclidean")
    with pytest.raises(Disconnected):
        graph_pair_distances(graph, [(-0.5, 0.5)], "euclidean")


def test_batched_distances_match_single_queries():
    graph = build_graph(DISC, 0.02, (-1, -1, 1, 1))
    pairs = [(0, 0.5), (0.2j, -0.7), (0.5, -0.5j), (0.1 + 0.1j, 0.8j)]
    batch = graph_pair_distances(graph, pairs, "euclidean")
    single = [graph_path(graph, complex(a), complex(b), "euclidean")[0] for a, b in pairs]
    assert np.allclose(batch, single, rtol=1e-12)


def test_comparison_bounds_and_report():
    lo, hi, D = comparison_bounds(DISC)
    assert lo == pytest.approx(1 / (math.pi * math.sqrt(2)))
    assert (hi, D) == (pytest.approx(9.0), pytest.approx(1.0))
    rep = verify_comparison(DISC, [(0, 0.5), (0.3j, -0.4)], h=0.02)
    assert rep.violations == []
    assert lo <= rep.worst_low <= rep.worst_high <= hi
    lo_d, hi_d = rep.density_ratio_range
    assert 0 < lo_d <= hi_d
    with pytest.raises(InfinityInDomain):
        verify_comparison(DomainSpec((Disc(0, 1),), True), [(2, 3)])
