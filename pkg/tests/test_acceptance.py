"""Acceptance criteria 1-12 with every tolerance pinned.

Run ``pytest tests/test_acceptance.py`` for the per-criterion summary lines.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from circuma import koebe
from circuma.approximation import approximation_sequence
from circuma.domain import (Curve, DomainSpec, Segment, point_segment_distance, sample_domain_points,
                            sigma)
from circuma.errors import InvalidDomain
from circuma.hyperbolicity import delta_four_point, four_point_delta, sample_tuples
from circuma.qh_metric import build_graph, graph_pair_distances, qh_distance, verify_comparison
from circuma.sphere_bridge import spherical_to_euclidean_surgery
from circuma.uniformity import (avoid_boundary, check_cigar, count_large_components, estimate_uniformity,
                                rho_bracket, verify_separation)
from conftest import domain

LN2 = math.log(2.0)
PROPERTY_CASES = 10_000


# 1 -------------------------------------------------------------------------


@pytest.mark.criterion(1)
@pytest.mark.parametrize("h, rel", [(1e-3, 0.01), (2.5e-4, 0.0025)])
@pytest.mark.parametrize("name, x, y", [("half_plane", 1j, 2j), ("unit_disc", 0j, 0.5 + 0j)])
def test_qh_closed_forms(name, x, y, h, rel):
    k = qh_distance(domain(name), x, y, h=h).value
    assert abs(k - LN2) <= rel * LN2


# 2 -------------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_flavor_comparison_has_no_violations():
    total = 0
    for seed, name in enumerate(("unit_disc", "translated_disc", "disc_with_slit")):
        dom = domain(name)
        pts = sample_domain_points(dom, 27, np.random.default_rng(seed), min_dist=1e-3)
        pairs = list(itertools.combinations(pts.tolist(), 2))
        rep = verify_comparison(dom, pairs, h=0.02, slack=0.02)
        assert rep.violations == [], name
        total += len(rep.ratios)
    assert total >= 1000


# 3-6 -----------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_koebe_fixpoint_on_circle_domain():
    res = koebe.koebe_iterate(domain("two_discs"))
    assert res.trace.sweeps == 1
    assert max(res.trace.residuals[-1]) < 1e-6
    assert abs(res.a1) < 1e-6


@pytest.mark.criterion(4)
def test_koebe_slit_matches_inverse_joukowski():
    t0 = time.perf_counter()
    res = koebe.koebe_iterate(domain("slit"))
    elapsed = time.perf_counter() - t0
    (center, radius), = res.circle_domain.discs
    assert abs(center) <= 1e-3
    assert abs(radius - 1) <= 1e-3
    assert abs(res.a1 + 1) <= 1e-3
    # independent oracle: the chain agrees with the closed-form inverse map
    probes = np.array([3 + 1j, -2.5j, 0.3 + 0.4j, -4 + 2j])
    oracle = 0.5 * (probes + np.sqrt(probes - 2) * np.sqrt(probes + 2))
    assert np.abs(res.chain(probes) - oracle).max() <= 1e-3
    assert elapsed < 10.0


@pytest.mark.criterion(5)
def test_rigidity_under_permuted_order():
    dom = domain("two_slit")
    f = koebe.koebe_iterate(dom, order=[0, 1]).chain
    g = koebe.koebe_iterate(dom, order=[1, 0]).chain
    probes = sample_domain_points(dom, 64, np.random.default_rng(5), window=(-4, -3, 4, 3), min_dist=0.2)
    assert koebe.mobius_rigidity_check(f, g, probes) < 1e-3


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name", ["slit_and_disc", "two_slit"])
def test_modulus_invariance(name):
    dom = domain(name)
    before = koebe.ring_modulus(dom)
    res = koebe.koebe_iterate(dom)
    after = koebe.circle_domain_modulus(res.circle_domain)
    assert abs(after - before) <= 0.03 * before


# 7-9 -----------------------------------------------------------------------


@pytest.mark.criterion(7)
@pytest.mark.parametrize("name", ["two_discs", "two_slit", "slit_and_disc", "disc_grid", "multi_scale",
                                  "close_discs"])
def test_separation_consistent_with_uniformity(name):
    dom = domain(name)
    pts = sample_domain_points(dom, 8, np.random.default_rng(7), min_dist=0.02)
    pairs = list(zip(pts[:4], pts[4:]))
    A_est, _ = estimate_uniformity(dom, pairs)
    sep = verify_separation(dom, A_est)
    assert sep.implied_A_lower <= A_est + 1


@pytest.mark.criterion(8)
def test_counting_bound_on_disc_grid():
    rep = count_large_components(domain("disc_grid"), 0.1, 2.0)
    assert rep.count == 9
    assert rep.bound >= 9


@pytest.mark.criterion(9)
def test_approximation_sequence_invariants():
    dom = domain("multi_scale")
    thresholds = (1.5, 0.75, 0.3)
    seq = approximation_sequence(dom, thresholds)
    assert seq.counts == (1, 2, 3)
    base = set(dom.components)
    for n, (stage, t) in enumerate(zip(seq.domains, thresholds)):
        comps = set(stage.components)
        assert comps <= base
        if n + 1 < len(seq.domains):
            assert comps <= set(seq.domains[n + 1].components)
        assert all(c.diameter > t for c in comps)
        assert all(c.diameter <= t for c in base - comps)
    pts = sample_domain_points(seq.domains[-1], 8, np.random.default_rng(2), min_dist=0.05)
    pairs = list(zip(pts[:4], pts[4:]))
    A = [estimate_uniformity(stage, pairs)[0] for stage in seq.domains]
    bound = max(A)
    print(f"A_est per stage {A}, reported bound {bound:.4g}")
    assert A[-1] <= 1.1 * A[0]
    assert all(a <= bound for a in A)


# 10 ------------------------------------------------------------------------


@pytest.mark.criterion(10)
def test_delta_vanishes_on_geodesic_line():
    dom = domain("half_plane")
    graph = build_graph(dom, 0.01, (-8, 1e-9, 8, 16))
    ys = 2.0 ** np.arange(-3, 4)
    idx = list(itertools.combinations(range(ys.size), 2))
    Dg = graph_pair_distances(graph, [(1j * ys[i], 1j * ys[j]) for i, j in idx], "euclidean")
    M = np.zeros((ys.size, ys.size))
    E = np.zeros_like(M)
    for (i, j), v in zip(idx, Dg):
        M[i, j] = M[j, i] = v
        E[i, j] = E[j, i] = abs(math.log(ys[i] / ys[j]))
    delta, _ = four_point_delta(M, sample_tuples(ys.size, np.random.default_rng(0)))
    eps_h = np.abs(M - E).max()
    assert delta <= 2 * eps_h
    assert eps_h < 1e-2


@pytest.mark.criterion(10)
def test_disc_delta_stable_under_halving():
    dom = domain("unit_disc")
    coarse = delta_four_point(dom, 40, h=0.02, seed=3).delta_four_point
    fine = delta_four_point(dom, 40, h=0.01, seed=3).delta_four_point
    assert coarse > 0
    assert abs(fine - coarse) <= 0.1 * coarse


@pytest.mark.criterion(10)
def test_delta_deterministic_under_seed():
    dom = domain("two_slit")
    runs = [delta_four_point(dom, 30, h=0.05, window=dom.bbox(pad=1.0), seed=11) for _ in range(2)]
    assert runs[0].delta_four_point == runs[1].delta_four_point
    assert runs[0].witness == runs[1].witness


# 11 ------------------------------------------------------------------------


SMALL_SLIT = DomainSpec((Segment(-0.5, 0.5),), True, "small-slit")


@pytest.mark.criterion(11)
def test_case_2b_length_bound():
    curve = np.array([1.5, 4 + 0.5j, 2 + 4j, -4 + 1j, -1.5])
    rep = spherical_to_euclidean_surgery(curve, SMALL_SLIT, 1.0)
    assert rep.case == "case2b"
    assert rep.output.length <= 2 * rep.K * Curve(curve).spherical_length
    assert rep.length_ratio_bound_ok


@pytest.mark.criterion(11)
def test_antipodal_arc_attains_chord_bound():
    curve = np.array([1.5, 4, 4 + 4j, -4 + 4j, -4, -1.5], dtype=complex)
    rep = spherical_to_euclidean_surgery(curve, SMALL_SLIT, 1.0)
    (z1, z2, length, bound), = rep.replacements
    assert abs(z1 - 3) < 1e-12 and abs(z2 + 3) < 1e-12
    assert abs(length - bound) <= 1e-9 * bound


# 12 ------------------------------------------------------------------------


@pytest.mark.criterion(12)
def test_property_sigma_metric_axioms():
    rng = np.random.default_rng(12)
    n = PROPERTY_CASES
    scale = 10.0 ** rng.uniform(-3, 3, (3, n))
    z, w, u = (s * np.exp(2j * np.pi * rng.random(n)) for s in scale)
    dzw, dwu, dzu = sigma(z, w), sigma(w, u), sigma(z, u)
    assert np.all(dzw >= 0) and np.all(dzw <= math.pi + 1e-15)
    assert np.all(sigma(z, z) == 0)
    assert np.allclose(dzw, sigma(w, z), rtol=0, atol=1e-14)
    assert np.all(dzu <= dzw + dwu + 1e-12)


@pytest.mark.criterion(12)
def test_property_cigar_inclusion():
    dom = domain("unit_disc")
    rng = np.random.default_rng(121)
    for _ in range(PROPERTY_CASES):
        k = int(rng.integers(2, 7))
        v = 0.95 * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
        rep = check_cigar(v, dom)
        assert rep.A_diam <= rep.A_length * (1 + 1e-12)


@pytest.mark.criterion(12)
@pytest.mark.parametrize("name, convex", [("unit_disc", True), ("two_slit", False)])
def test_property_rho_bracket(name, convex):
    dom = domain(name)
    window = (-1, -1, 1, 1) if convex else (-3, -2, 3, 2)
    graph = build_graph(dom, 0.05, window)
    rng = np.random.default_rng(122)
    inner = tuple(0.9 * t for t in window)
    pts = sample_domain_points(dom, PROPERTY_CASES, rng, window=inner, min_dist=0.01)
    for a, b in zip(pts[: PROPERTY_CASES // 2], pts[PROPERTY_CASES // 2 :]):
        lo, hi = rho_bracket(dom, a, b, graph=graph)
        d = abs(a - b)
        assert d <= lo <= hi <= 2 * lo * (1 + 1e-12)
        if convex:
            assert lo == d


@pytest.mark.criterion(12)
def test_property_avoid_boundary_containment():
    dom = domain("disc_grid")
    r = 0.3
    rng = np.random.default_rng(123)
    pts = sample_domain_points(dom, 2 * PROPERTY_CASES, rng, window=(-1.5, -1.5, 1.5, 1.5), min_dist=0.02)
    for a, b in zip(pts[:PROPERTY_CASES], pts[PROPERTY_CASES:]):
        out = avoid_boundary(np.array([a, b]), dom, r).vertices
        assert dom.contains(out).all()
        assert not dom.segment_hits(out[:-1], out[1:]).any()
        assert np.all(point_segment_distance(out, a, b) <= r)
        assert Curve(out).diameter < abs(a - b) + 2 * r


@pytest.mark.criterion(12)
def test_property_circle_domain_disjointness():
    rng = np.random.default_rng(124)
    built = rejected = 0
    for _ in range(PROPERTY_CASES):
        k = int(rng.integers(2, 5))
        discs = tuple(zip(rng.uniform(-3, 3, k) + 1j * rng.uniform(-3, 3, k), rng.uniform(0.1, 1.5, k)))
        overlap = any(abs(c1 - c2) <= r1 + r2 for (c1, r1), (c2, r2) in itertools.combinations(discs, 2))
        try:
            cd = koebe.CircleDomain(discs)
        except InvalidDomain:
            assert overlap
            rejected += 1
            continue
        assert not overlap
        for (c1, r1), (c2, r2) in itertools.combinations(cd.discs, 2):
            assert abs(c1 - c2) > r1 + r2
        built += 1
    assert built > 0 and rejected > 0
