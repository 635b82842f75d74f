"""Spherical versus Euclidean comparisons for domains whose complement sits in a disc B(0, a)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .domain import Curve, DomainSpec, as_curve, sigma_to_inf
from .errors import CaseUndetermined, ComplementNotContained, PointOutsideDomain, PreconditionFailed
from .qh_metric import build_graph, default_window, graph_path
from .uniformity import check_cigar


def length_constant(a: float) -> float:
    """K(a) = (1 + 9a^2)/2: Euclidean length over spherical length inside B(0, 3a)."""
    return 0.5 * (1.0 + 9.0 * a * a)


def distance_constant(a: float) -> float:
    """C(a) = max(1, pi a) in the spherical distance comparison."""
    return max(1.0, math.pi * a)


def complement_radius(dom: DomainSpec) -> float:
    """Smallest R with every complement component inside the closed disc B(0, R)."""
    if not dom.contains_infinity:
        return math.inf
    R = 0.0
    for c in dom.components:
        if not c.bounded:
            return math.inf
        if c.kind == "disc":
            R = max(R, abs(c.center) + c.radius)
        else:
            s = c.boundary_samples(4096)
            R = max(R, float(np.abs(s).max()))
    return R


def _require_contained(dom: DomainSpec, a: float) -> None:
    if complement_radius(dom) > a * (1 + 1e-12):
        raise ComplementNotContained(f"complement is not inside the closed disc B(0, {a:g})")


@dataclass
class DistanceLemmaReport:
    a: float
    C: float
    samples: np.ndarray
    d_sigma_plane: np.ndarray   # spherical distance to the complement of the planar part
    d_sigma_full: np.ndarray    # spherical distance to the complement of the full domain
    d_euclid: np.ndarray
    first: np.ndarray
    second: np.ndarray
    third: np.ndarray

    @property
    def all_hold(self) -> bool:
        return bool(self.first.all() and self.second.all() and self.third.all())


def check_distance_lemma(dom: DomainSpec, a: float, samples: Sequence[complex],
                         rtol: float = 1e-12) -> DistanceLemmaReport:
    """Check d_sig(z, C\\D) <= d_sig(z, comp D) <= C(a) d_sig(z, C\\D) <= 2 C(a) d_e(z, C\\D).

    Here D is the domain with infinity, so removing infinity adds sigma(z, inf)
    to the candidate distances.  Samples must lie in the domain and in B(0, a).
    """
    _require_contained(dom, a)
    z = np.asarray(samples, dtype=complex)
    if not dom.contains(z).all():
        raise PointOutsideDomain("samples must lie in the domain")
    if np.any(np.abs(z) > a * (1 + 1e-12)):
        raise PreconditionFailed(f"samples must lie in the closed disc B(0, {a:g})")
    full = dom.spherical_boundary_distance(z)
    plane = np.minimum(full, sigma_to_inf(z))
    de = dom.boundary_distance(z)
    C = distance_constant(a)
    slack = 1 + rtol
    return DistanceLemmaReport(a, C, z, plane, full, de, plane <= full * slack,
                               full <= C * plane * slack, C * plane <= 2 * C * de * slack)


# ---------------------------------------------------------------------------
# curve surgery


@dataclass
class SurgeryReport:
    input: Curve
    output: Curve
    case: str
    replacements: list = field(default_factory=list)  # (z1, z2, arc length, chord bound)
    A_verified: float = math.nan
    A_cigar: float = math.nan
    K: float = math.nan
    C: float = math.nan
    length_ratio_bound_ok: bool | None = None
    pivot: complex | None = None


def _crossing(p: complex, q: complex, R: float) -> complex:
    """Point of the segment [p, q] on the circle |z| = R (assumes a sign change)."""
    d = q - p
    A = abs(d) ** 2
    B = 2 * (p.real * d.real + p.imag * d.imag)
    C = abs(p) ** 2 - R * R
    disc = max(B * B - 4 * A * C, 0.0)
    roots = [(-B - math.sqrt(disc)) / (2 * A), (-B + math.sqrt(disc)) / (2 * A)]
    ts = [t for t in roots if -1e-12 <= t <= 1 + 1e-12]
    t = min(ts, key=lambda s: abs(s - 0.5)) if ts else 0.5
    z = p + min(max(t, 0.0), 1.0) * d
    return R * z / abs(z)


def _circle_crossings(pts: np.ndarray, R: float) -> list[tuple[int, complex]]:
    """(segment index, point) for each sign change of |z| - R along the polyline."""
    s = np.abs(pts) - R
    out = []
    for k in np.flatnonzero((s[:-1] <= 0) != (s[1:] <= 0)):
        out.append((int(k), _crossing(complex(pts[k]), complex(pts[k + 1]), R)))
    return out


def minor_arc(z1: complex, z2: complex, R: float, step: float | None = None) -> tuple[np.ndarray, float]:
    """Samples of the shorter arc of |z| = R from z1 to z2, and its exact length."""
    t1 = math.atan2(z1.imag, z1.real)
    dt = (math.atan2(z2.imag, z2.real) - t1 + math.pi) % (2 * math.pi) - math.pi
    length = R * abs(dt)
    n = max(2, int(math.ceil(abs(dt) / (step or 2 * math.pi / 2048))) + 1)
    arc = R * np.exp(1j * (t1 + dt * np.linspace(0, 1, n)))
    arc[0], arc[-1] = z1, z2
    return arc, length


def outer_connector(x: complex, y: complex, a: float, n: int = 512) -> np.ndarray:
    """Curve from x to y avoiding B(0, a): the chord if it stays clear, else a log spiral."""
    x, y = complex(x), complex(y)
    d = y - x
    t = 0.0 if d == 0 else min(max(-(x.real * d.real + x.imag * d.imag) / abs(d) ** 2, 0.0), 1.0)
    if abs(x + t * d) > a * (1 + 1e-9):
        return np.array([x, y])
    lx, ly = np.log(x), np.log(y)
    dth = (ly.imag - lx.imag + math.pi) % (2 * math.pi) - math.pi
    s = np.linspace(0, 1, n)
    path = np.exp((1 - s) * lx.real + s * ly.real + 1j * (lx.imag + s * dth))
    path[0], path[-1] = x, y
    return path


def _classify(x: complex, y: complex, a: float) -> str:
    tol = 1e-9 * a
    for z in (x, y):
        for R in (a, 2 * a, 3 * a):
            if abs(abs(z) - R) <= tol:
                raise CaseUndetermined(f"endpoint {z} lies on the circle |z| = {R:g}")
    rx, ry = abs(x), abs(y)
    if rx < 3 * a and ry < 3 * a:
        return "case2"
    if rx > a and ry > a:
        return "case1"
    return "case3"


def _case2(pts: np.ndarray, a: float) -> tuple[np.ndarray, list]:
    R = 3 * a
    if np.all(np.abs(pts) <= R):
        return pts, []
    cr = _circle_crossings(pts, R)
    (k1, z1), (k2, z2) = cr[0], cr[-1]
    arc, length = minor_arc(z1, z2, R)
    out = np.concatenate([pts[: k1 + 1], arc, pts[k2 + 1 :]])
    return out, [(z1, z2, length, 0.5 * math.pi * abs(z1 - z2))]


def spherical_to_euclidean_surgery(curve, dom: DomainSpec, a: float, verify: bool = True) -> SurgeryReport:
    """Turn a curve of the domain with infinity into a Euclidean inner-uniform candidate.

    Case 2 (both ends in B(0, 3a)) clips the excursion outside B(0, 3a) at the
    first and last crossings and substitutes the minor arc.  Case 1 (both ends
    outside the closed B(0, a)) connects the ends directly around B(0, a).
    Case 3 splits at the last crossing of |z| = 2a and joins the two recipes.
    """
    _require_contained(dom, a)
    curve = as_curve(curve)
    pts = np.asarray(curve.vertices, dtype=complex)
    x, y = complex(pts[0]), complex(pts[-1])
    swapped = False
    case = _classify(x, y, a)
    pivot = None
    reps: list = []
    if case == "case2":
        out, reps = _case2(pts, a)
        case = "case2b" if reps else "case2a"
    elif case == "case1":
        out = outer_connector(x, y, a)
    else:
        if abs(x) > abs(y):
            pts, swapped = pts[::-1], True
        cr = _circle_crossings(pts, 2 * a)
        if not cr or not dom.contains_point(cr[-1][1]):
            raise CaseUndetermined("no domain point on |z| = 2a along the curve")
        k, pivot = cr[-1]
        inner, reps = _case2(np.append(pts[: k + 1], pivot), a)
        out = np.concatenate([inner, outer_connector(pivot, complex(pts[-1]), a)[1:]])
        if swapped:
            out = out[::-1]
    rep = SurgeryReport(curve, Curve(out), case, reps, K=length_constant(a), C=distance_constant(a), pivot=pivot)
    for z1, z2, length, bound in reps:
        # absolute slack covers coincident crossings, where both sides are rounding noise
        if length > bound * (1 + 1e-12) + 1e-12 * a:
            raise AssertionError(f"arc length {length} exceeds the chord bound {bound}")
    if case == "case2b":
        rep.length_ratio_bound_ok = bool(rep.output.length <= 2 * rep.K * curve.spherical_length * (1 + 1e-12))
    if verify:
        cig = check_cigar(rep.output, dom)
        rep.A_cigar = max(cig.A_length, 1.0)
        chord = abs(rep.output.end - rep.output.start)
        ratio = rep.output.length / chord if chord > 0 else 1.0
        rep.A_verified = max(rep.A_cigar, ratio)
    return rep


# ---------------------------------------------------------------------------
# bi-Lipschitz probe in the spherical quasihyperbolic metric


@dataclass
class BilipschitzReport:
    L_est: float
    ratios: np.ndarray
    resolution: float


def _graph_distances(dom, pairs, h, graph):
    pts = np.array([p for pr in pairs for p in pr], dtype=complex)
    if graph is None:
        graph = build_graph(dom, h, default_window(dom, pts))
    return np.array([graph_path(graph, complex(p), complex(q), "spherical")[0] for p, q in pairs]), graph


def bilipschitz_probe(chain, dom_src: DomainSpec, dom_dst: DomainSpec, pairs, h: float,
                      graphs: tuple | None = None) -> BilipschitzReport:
    """Worst two-sided ratio of spherical quasihyperbolic distances before and after a map.

    Distances on both sides are graph distances at the same resolution, so
    the identity map reports exactly 1 and other maps carry O(h) slack.
    """
    pairs = [(complex(p), complex(q)) for p, q in pairs]
    img = [(complex(chain(np.array([p]))[0]), complex(chain(np.array([q]))[0])) for p, q in pairs]
    if not dom_dst.contains(np.array([z for pr in img for z in pr])).all():
        raise PointOutsideDomain("mapped points fall outside the target domain")
    gs, gd = graphs or (None, None)
    ds, _ = _graph_distances(dom_src, pairs, h, gs)
    dd, _ = _graph_distances(dom_dst, img, h, gd)
    r = dd / ds
    return BilipschitzReport(float(np.max(np.maximum(r, 1 / r))), r, h)
