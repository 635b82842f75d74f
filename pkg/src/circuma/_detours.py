"""Detours around complement components: boundary avoidance and LLC checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from shapely.geometry import LinearRing, LineString, Polygon

from .domain import Component, Curve, Disc, DomainSpec, Point, Polyline, Segment, as_curve, component_distance
from .errors import CurveExitsDomain, LargeComponentHit

AvoidanceError = LargeComponentHit


def _circle_ring(c: complex, R: float, off: float) -> np.ndarray:
    rad = R + off
    n = int(min(20000, max(256, math.ceil(math.pi * math.sqrt(8.0 * rad / off)))))
    return c + rad * np.exp(2j * np.pi * np.arange(n) / n)


def offset_loop(comp: Component, off: float) -> np.ndarray:
    """Closed loop at distance ``off`` around a bounded component (no repeated endpoint).

    Disc and point loops are concentric circles whose inscribed chords stay
    at least ``3 off / 4`` away from the component.
    """
    if isinstance(comp, Disc) and not comp.outer:
        return _circle_ring(comp.center, comp.radius, off)
    if isinstance(comp, Point):
        return _circle_ring(comp.p, 0.0, off)
    if isinstance(comp, Segment):
        geom = LineString([(comp.p.real, comp.p.imag), (comp.q.real, comp.q.imag)])
    elif isinstance(comp, Polyline) and not comp.outer:
        geom = Polygon([(p.real, p.imag) for p in comp.points])
    else:
        raise ValueError(f"cannot loop around an unbounded {comp.kind} component")
    xy = np.asarray(geom.buffer(off, quad_segs=64).exterior.coords)[:-1]
    return xy[:, 0] + 1j * xy[:, 1]


def _xy(z: np.ndarray) -> np.ndarray:
    return np.column_stack([z.real, z.imag])


def _cut(pts: np.ndarray, cum: np.ndarray, s0: float, s1: float) -> np.ndarray:
    """Sub-polyline between arclengths s0 <= s1 (inclusive of the cut points)."""
    def at(s):
        k = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(pts) - 2))
        seg = cum[k + 1] - cum[k]
        t = 0.0 if seg == 0 else (s - cum[k]) / seg
        return pts[k] + t * (pts[k + 1] - pts[k])

    inner = pts[(cum > s0) & (cum < s1)]
    return np.concatenate([[at(s0)], inner, [at(s1)]])


def _ring_arc(ring: np.ndarray, t0: float, t1: float, forward: bool) -> np.ndarray:
    closed = np.append(ring, ring[:1])
    cum = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(closed)))])
    P = cum[-1]
    if not forward:
        rev = closed[::-1]
        return _ring_arc(rev[:-1], P - t0, P - t1, True)
    if t1 < t0:
        t1 += P
    two = np.concatenate([closed, closed[1:]])
    cum2 = np.concatenate([cum, cum[1:] + P])
    return _cut(two, cum2, t0, t1)


def detour(pts: np.ndarray, ring: np.ndarray, choose: Callable[[list], int]) -> np.ndarray:
    """Replace the part of a polyline between its first and last crossing of a loop by a loop arc.

    ``choose`` receives the two candidate polylines (forward and backward
    arcs spliced in) and returns the index to keep.
    """
    line = LineString(_xy(pts))
    lr = LinearRing(_xy(ring))
    inter = line.intersection(lr)
    if inter.is_empty:
        return pts
    geoms = getattr(inter, "geoms", [inter])
    hits = [c for g in geoms for c in g.coords]
    s = [line.project(LineString([c, c]).centroid) for c in hits]
    s_in, s_out = min(s), max(s)
    if s_out - s_in <= 1e-14 * max(1.0, line.length):
        return pts
    cum = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(pts)))])
    head = _cut(pts, cum, 0.0, s_in)
    tail = _cut(pts, cum, s_out, cum[-1])
    pin, pout = head[-1], tail[0]
    t_in = lr.project(LineString([(pin.real, pin.imag)] * 2).centroid)
    t_out = lr.project(LineString([(pout.real, pout.imag)] * 2).centroid)
    cands = []
    for fwd in (True, False):
        arc = _ring_arc(ring, t_in, t_out, fwd)
        cands.append(np.concatenate([head, arc[1:-1], tail]))
    return cands[choose(cands)]


def _feasible(dom: DomainSpec, pts: np.ndarray) -> bool:
    return bool(dom.contains(pts).all() and not dom.segment_hits(pts[:-1], pts[1:]).any())


def _hit_components(dom: DomainSpec, pts: np.ndarray) -> list[int]:
    a, b = pts[:-1], pts[1:]
    out = []
    first = []
    for k, c in enumerate(dom.components):
        h = c.segment_hits(a, b)
        if h.any():
            out.append(k)
            first.append(int(np.argmax(h)))
    return [k for _, k in sorted(zip(first, out))]


def _gap_to_others(dom: DomainSpec, k: int) -> float:
    g = math.inf
    for j, c in enumerate(dom.components):
        if j != k:
            g = min(g, component_distance(dom.components[k], c))
    return g


def avoid_boundary(curve, dom: DomainSpec, r: float) -> Curve:
    """Reroute a curve around every small component it meets.

    Each hit component S (diameter < r) is bypassed along a loop at offset
    ``min(r/4, gap/2, (r - diam S)/2)``, where the gap is measured to the
    other components and to the curve's endpoints.  The loops stay inside
    the r-neighbourhood of the original trace, so the diameter grows by
    less than 2r.
    """
    curve = as_curve(curve)
    pts = np.asarray(curve.vertices, dtype=complex)
    ends = pts[[0, -1]]
    if not dom.contains(ends).all():
        raise CurveExitsDomain("curve endpoints must lie in the domain")
    hit = _hit_components(dom, pts)
    large = [k for k in hit if not dom.components[k].diameter < r]
    if large:
        raise LargeComponentHit(f"components {large} have diameter >= r = {r:g}", large)
    for k in hit:
        c = dom.components[k]
        off = min(r / 4.0, 0.5 * _gap_to_others(dom, k), 0.5 * float(c.set_distance(ends).min()),
                  0.5 * (r - c.diameter))
        ring = offset_loop(c, off)

        def shorter_feasible(cands):
            keys = [(not _feasible(dom, p), Curve(p).length) for p in cands]
            return int(min(range(len(cands)), key=lambda i: keys[i]))

        pts = detour(pts, ring, shorter_feasible)
    if not _feasible(dom, pts):
        raise CurveExitsDomain("detoured curve still meets the complement")
    return Curve(pts)


# ---------------------------------------------------------------------------
# local linear connectivity


@dataclass
class LLCSample:
    center: complex
    radius: float
    x: complex
    y: complex
    kind: int


@dataclass
class LLCResult:
    sample: LLCSample
    needed_M: float
    passed: bool
    curve: Curve | None = field(default=None, repr=False)


@dataclass
class LLCReport:
    M: float
    results: list
    failures: list
    worst_M1: float
    worst_M2: float


def llc_samples(dom: DomainSpec, n: int, seed: int = 0, window: Sequence[float] | None = None,
                radius_range: tuple = (0.1, 0.5)) -> list[LLCSample]:
    """Random balls with point pairs; kinds alternate between inside-ball and outside-ball pairs."""
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = window if window is not None else dom.bbox(pad=0.25)
    scale = max(x1 - x0, y1 - y0)
    out: list[LLCSample] = []
    tries = 0
    while len(out) < n and tries < 200 * n:
        tries += 1
        a = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        r = scale * rng.uniform(*radius_range)
        kind = 1 + len(out) % 2
        if kind == 1:
            rad = r * np.sqrt(rng.uniform(0, 1, 2))
        else:
            rad = r * rng.uniform(1.05, 3.0, 2)
        pts = a + rad * np.exp(2j * np.pi * rng.uniform(0, 1, 2))
        if dom.contains(pts).all() and dom.boundary_distance(pts).min() > 1e-3 * r:
            out.append(LLCSample(a, float(r), complex(pts[0]), complex(pts[1]), kind))
    return out


def _llc_base(s: LLCSample, forward: bool) -> np.ndarray:
    if s.kind == 1:
        return np.array([s.x, s.y])
    a = s.center
    R = max(abs(s.x - a), abs(s.y - a))
    tx, ty = np.angle(s.x - a), np.angle(s.y - a)
    dt = (ty - tx) % (2 * np.pi)
    if not forward:
        dt -= 2 * np.pi
    k = max(2, int(abs(dt) / (2 * np.pi) * 2048))
    arc = a + R * np.exp(1j * (tx + dt * np.linspace(0, 1, k)))
    return np.concatenate([[s.x], arc, [s.y]])


def _needed(s: LLCSample, pts: np.ndarray) -> float:
    d = np.abs(pts - s.center)
    if s.kind == 1:
        return float(d.max() / s.radius)
    m = float(d.min())
    return math.inf if m <= 0 else s.radius / m


def connect_llc(dom: DomainSpec, s: LLCSample) -> tuple[float, np.ndarray | None]:
    """Chord (inside pairs) or radial-arc path (outside pairs) with detours; returns (needed M, path)."""
    best = (math.inf, None)
    for forward in ((True,) if s.kind == 1 else (True, False)):
        pts = _llc_base(s, forward)
        ok = True
        for k in _hit_components(dom, pts):
            c = dom.components[k]
            if not c.bounded:
                ok = False
                break
            dend = float(c.set_distance(np.array([s.x, s.y])).min())
            off = min(0.005 * s.radius, 0.5 * _gap_to_others(dom, k), 0.5 * dend)
            ring = offset_loop(c, off)

            def pick(cands):
                keys = [(not _feasible(dom, p), _needed(s, p)) for p in cands]
                return int(min(range(len(cands)), key=lambda i: keys[i]))

            pts = detour(pts, ring, pick)
        if ok and _feasible(dom, pts):
            m = _needed(s, pts)
            if m < best[0]:
                best = (m, pts)
    return best


def check_llc(dom: DomainSpec, samples: Sequence[LLCSample], M: float) -> LLCReport:
    """Try to connect each sampled pair within B(a, M r) (kind 1) or outside B(a, r / M) (kind 2)."""
    results, failures = [], []
    worst = {1: 0.0, 2: 0.0}
    for s in samples:
        need, pts = connect_llc(dom, s)
        res = LLCResult(s, need, bool(need <= M), None if pts is None else Curve(pts))
        results.append(res)
        worst[s.kind] = max(worst[s.kind], need)
        if not res.passed:
            failures.append(res)
    return LLCReport(M, results, failures, worst[1], worst[2])
