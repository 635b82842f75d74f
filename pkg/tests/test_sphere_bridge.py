from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circuma.domain import Curve, Disc, DomainSpec, Segment
from circuma.errors import CaseUndetermined, ComplementNotContained, PointOutsideDomain, PreconditionFailed
from circuma.koebe import koebe_iterate
from circuma.sphere_bridge import (bilipschitz_probe, check_distance_lemma, complement_radius, distance_constant,
                                   length_constant, minor_arc, outer_connector, spherical_to_euclidean_surgery)

SLIT = DomainSpec((Segment(-0.5, 0.5),), True, "small-slit")


def test_constants():
    assert length_constant(1.0) == 5.0
    assert distance_constant(2.0) == pytest.approx(2 * math.pi)
    assert distance_constant(0.1) == 1.0


def test_complement_radius():
    assert complement_radius(SLIT) == pytest.approx(0.5)
    assert complement_radius(DomainSpec((Disc(3, 1),), True)) == pytest.approx(4)
    assert complement_radius(DomainSpec((Disc(0, 1, outer=True),), False)) == math.inf


def test_distance_lemma_example():
    rep = check_distance_lemma(SLIT, 1.0, [0.9 + 0j, 0.5j, -0.7 + 0.1j])
    assert rep.all_hold
    assert np.all(rep.d_sigma_plane <= rep.d_sigma_full)


@given(st.floats(0.55, 3.0), st.floats(0, 1), st.floats(0, 2 * math.pi))
@settings(max_examples=200)
def test_distance_lemma_holds_everywhere(a, s, th):
    dom = DomainSpec((Segment(-0.5, 0.5),), True)
    z = a * s * complex(math.cos(th), math.sin(th))
    if not dom.contains_point(z) or dom.boundary_distance(np.array([z]))[0] < 1e-9:
        return
    assert check_distance_lemma(dom, a, [z]).all_hold


def test_distance_lemma_errors():
    with pytest.raises(ComplementNotContained):
        check_distance_lemma(SLIT, 0.3, [0.2j])
    with pytest.raises(PointOutsideDomain):
        check_distance_lemma(SLIT, 1.0, [0.0])
    with pytest.raises(PreconditionFailed):
        check_distance_lemma(SLIT, 1.0, [2.0])


def test_minor_arc_length():
    arc, length = minor_arc(3 + 0j, 3j, 3.0)
    assert length == pytest.approx(1.5 * math.pi)
    assert np.allclose(np.abs(arc), 3.0)
    assert Curve(arc).length == pytest.approx(length, rel=1e-5)


def test_outer_connector_avoids_the_disc():
    assert len(outer_connector(2, 2j, 1.0)) == 2
    path = outer_connector(2, -2, 1.0)
    assert np.abs(path).min() > 1.0


def test_case_classification():
    assert spherical_to_euclidean_surgery(np.array([0.8, 0.8 + 1j, -0.8]), SLIT, 1.0).case == "case2a"
    assert spherical_to_euclidean_surgery(np.array([4, 6j, -4]), SLIT, 1.0).case == "case1"
    rep = spherical_to_euclidean_surgery(np.array([0.8j, 5 + 5j, 6]), SLIT, 1.0)
    assert rep.case == "case3"
    assert abs(abs(rep.pivot) - 2) < 1e-12
    assert rep.output.start == 0.8j and rep.output.end == 6
    with pytest.raises(CaseUndetermined):
        spherical_to_euclidean_surgery(np.array([2, 3j]), SLIT, 1.0)


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(3.2, 10))
@settings(max_examples=100, deadline=None)
def test_arc_replacements_never_exceed_chord_bound(t1, t2, R):
    x = 1.5 * complex(math.cos(t1), math.sin(t1))
    y = 1.5 * complex(math.cos(t2), math.sin(t2))
    curve = np.array([x, R * x / 1.5, R * y / 1.5, y])
    if np.any(SLIT.segment_hits(curve[:-1], curve[1:])):
        return
    rep = spherical_to_euclidean_surgery(curve, SLIT, 1.0, verify=False)
    for _, _, length, bound in rep.replacements:
        assert length <= bound * (1 + 1e-12) + 1e-12
    assert np.abs(rep.output.vertices).max() <= 3 * (1 + 1e-12)


def test_surgery_output_is_verified_uniform():
    rep = spherical_to_euclidean_surgery(np.array([1.5, 4 + 0.5j, -4 + 1j, -1.5]), SLIT, 1.0)
    assert rep.case == "case2b"
    assert rep.A_verified >= rep.A_cigar >= 1
    assert math.isfinite(rep.A_verified)


def test_bilipschitz_identity_and_koebe_map():
    dom = DomainSpec((Segment(-2, 2),), True)
    pairs = [(3j, 2 + 2j), (-3 + 1j, 1 - 2j)]
    res = koebe_iterate(dom)
    ident = bilipschitz_probe(lambda z: z, dom, dom, pairs, 0.05)
    assert ident.L_est == pytest.approx(1.0)
    img = res.circle_domain.to_domain()
    rep = bilipschitz_probe(res.chain, dom, img, pairs, 0.05)
    assert 1.0 <= rep.L_est < 2.0
    with pytest.raises(PointOutsideDomain):
        bilipschitz_probe(lambda z: 0 * z, dom, img, pairs, 0.05)
