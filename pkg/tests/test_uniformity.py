from __future__ import annotations

import math

import numpy as np
import pytest

from circuma.domain import Curve, Disc, DomainSpec, Point, Polyline, Segment
from circuma.errors import CurveExitsDomain, DegenerateComponent, LargeComponentHit, PreconditionFailed
from circuma.qh_metric import build_graph
from circuma.uniformity import (avoid_boundary, check_cigar, check_llc, concatenate_with_cigar, concatenation_constant,
                                count_large_components, estimate_uniformity, find_uniform_curve, inner_distances,
                                llc_samples, rho_bracket, separation_constant, verify_bounded_turning,
                                verify_separation)
from conftest import domain

DISC = DomainSpec((Disc(0, 1, outer=True),), False, "disc")
SLIT = DomainSpec((Segment(-1j, 1j),), True, "vertical-slit")


def test_constants():
    assert separation_constant(1.0) == 8.0
    assert concatenation_constant(2.0) == 10.0


def test_inner_distances_around_a_slit():
    # shortest path from -1 to 1 bends over a slit tip: 2 sqrt 2
    res = inner_distances(SLIT, -1, 1, h=0.01)
    assert res.lam == pytest.approx(2 * math.sqrt(2), rel=2e-3)
    assert 2 <= res.rho_lo <= res.rho_hi <= 2 * res.rho_lo
    assert res.rho_hi <= res.lam + 1e-12


def test_rho_bracket_convex_domain_is_euclidean():
    lo, hi = rho_bracket(DISC, -0.5, 0.5j, h=0.02)
    assert lo == pytest.approx(abs(-0.5 - 0.5j))
    assert lo <= hi <= 2 * lo


def test_cigar_of_a_diameter_in_the_disc():
    rep = check_cigar(np.array([-0.5, 0.5]), DISC)
    # at the midpoint: side 0.5, boundary distance 1
    assert rep.A_length == pytest.approx(0.5, rel=1e-12)
    assert rep.A_diam <= rep.A_length
    passed = check_cigar(np.array([-0.5, 0.5]), DISC, A=1.0)
    assert passed.passes == {"length": True, "diameter": True}


def test_cigar_rejects_curves_leaving_the_domain():
    with pytest.raises(CurveExitsDomain):
        check_cigar(np.array([-1.5, 1.5]), SLIT)


def test_find_uniform_curve_in_the_disc_is_the_chord():
    rep = find_uniform_curve(DISC, -0.5, 0.5, h=0.02)
    assert rep.A == pytest.approx(1.0, abs=1e-6)
    assert rep.curve.length == pytest.approx(1.0, rel=1e-9)


def test_estimate_uniformity_table():
    A, table = estimate_uniformity(SLIT, [(-1, 1), (-0.5 + 2j, 0.5 - 2j)], h=0.02)
    assert A == max(r["A"] for r in table)
    assert all(r["A"] >= 1 and r["length"] >= r["lambda"] * (1 - 1e-12) for r in table)
    with pytest.raises(ValueError):
        estimate_uniformity(SLIT, [])


def test_separation_report():
    dom = domain("close_discs")
    rep = verify_separation(dom)
    assert rep.worst_ratio == pytest.approx(2 / 0.1)
    assert rep.implied_A_lower == pytest.approx(math.sqrt(10) - 1)
    flagged = verify_separation(dom, A_est=1.0)
    assert flagged.threshold == separation_constant(2.0)
    assert flagged.violations and flagged.violations[0][:2] == (0, 1)


def test_counting_uses_open_ball_and_strict_diameter():
    dom = domain("disc_grid")
    assert count_large_components(dom, 0.1, 0.05).count == 1
    assert count_large_components(dom, 0.2, 2.0).count == 0
    rep = count_large_components(dom, 0.1, 2.0, A_est=1.0)
    assert rep.theory_bound == pytest.approx(8 * 64 * (1 + 400))
    with pytest.raises(ValueError):
        count_large_components(dom, 0, 1)


def test_bounded_turning():
    assert verify_bounded_turning(Segment(0, 1), 8).L_est == 1.0
    disc = verify_bounded_turning(Disc(0, 1), 16)
    assert 1.0 <= disc.L_est <= 1.5
    # joining the tips of a thin U means reaching the far corners near x = 3
    u = Polyline((0, 3, 3 + 3j, 0 + 3j, 0 + 2.8j, 2.8 + 2.8j, 2.8 + 0.2j, 0.2j))
    L = verify_bounded_turning(u, [(0.1j, 2.9j)]).L_est
    assert abs(2.8 + 1.4j - 1.5j) / 1.4 <= L <= abs(3 + 3j - 1.5j) / 1.4 + 0.05
    with pytest.raises(DegenerateComponent):
        verify_bounded_turning(Point(0))


def test_concatenation():
    g1 = Curve(np.array([-0.5, 0]))
    g2 = Curve(np.array([0, 0.5j]))
    rep = concatenate_with_cigar(g1, g2, DISC, 1.0)
    assert rep.passes["diameter"]
    assert rep.A == concatenation_constant(1.0)
    with pytest.raises(PreconditionFailed):
        concatenate_with_cigar(g1, Curve(np.array([0.1, 0.5j])), DISC, 1.0)


def test_llc_on_disc_grid():
    dom = domain("disc_grid")
    samples = llc_samples(dom, 10, seed=4)
    assert {s.kind for s in samples} == {1, 2}
    rep = check_llc(dom, samples, M=2.0)
    assert len(rep.results) == 10
    assert rep.failures == [] and 0 < rep.worst_M1 <= 2 and 0 < rep.worst_M2 <= 2
    assert all(r.curve is not None for r in rep.results if r.passed)


def test_avoid_boundary_raises_for_large_components():
    dom = domain("disc_grid")
    with pytest.raises(LargeComponentHit) as info:
        avoid_boundary(np.array([-1.5 - 0.5j, 1.5 + 0.5j]), dom, 0.1)
    assert info.value.components
    out = avoid_boundary(np.array([-1.5 + 0j, 1.5 + 0j]), dom, 0.3)
    assert dom.contains(out.vertices).all()


def test_graph_reuse_gives_same_answer():
    graph = build_graph(SLIT, 0.02, (-3, -3, 3, 3))
    a = rho_bracket(SLIT, -1, 1, graph=graph)
    b = rho_bracket(SLIT, -1, 1, graph=graph)
    assert a == b


def test_counting_grid_with_spacing_three():
    grid = DomainSpec(tuple(Disc(complex(3 * i, 3 * j), 0.5) for i in (-1, 0, 1) for j in (-1, 0, 1)), True)
    rep = count_large_components(grid, 0.5, 10.0)
    assert rep.count == 9 and rep.bound >= 9
    assert count_large_components(grid, 1.0, 10.0).count == 0
