"""Inner metrics, cigar conditions and the geometric consequences of inner uniformity."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, minimum_spanning_tree

from .domain import (Component, Curve, Disc, DomainSpec, Point, Polyline, Segment, as_curve,
                     component_geometry, sigma)
from .errors import (CurveExitsDomain, DegenerateComponent, Disconnected, PointOutsideDomain,
                     PreconditionFailed)
from .qh_metric import MetricGraph, build_graph, default_window, graph_path, refine_path


def separation_constant(A: float) -> float:
    """Relative-distance constant ``2 (A + 1)^2`` for inner A-uniform domains."""
    return 2.0 * (A + 1.0) ** 2


def concatenation_constant(A: float) -> float:
    return (2.0 * A + 1.0) * A


# ---------------------------------------------------------------------------
# inner distances


@dataclass
class InnerDistances:
    lam: float
    rho_lo: float
    rho_hi: float
    path: Curve = field(repr=False, default=None)
    resolution: float = math.nan


def _graph_for(dom: DomainSpec, pts, h: float | None, graph: MetricGraph | None, pad: float = 4.0):
    if graph is not None:
        return graph
    pts = np.asarray(pts, dtype=complex)
    if h is None:
        h = 0.02 * float(np.abs(pts[:, None] - pts[None, :]).max() or 1.0)
    return build_graph(dom, h, default_window(dom, pts, pad=pad))


def _check_in(dom: DomainSpec, *pts):
    for p in pts:
        if not dom.contains_point(complex(p)):
            raise PointOutsideDomain(f"{p} is not in the domain")


def shortcut(dom: DomainSpec, pts: np.ndarray) -> np.ndarray:
    """Greedy visibility shortcutting of a polyline (keeps endpoints)."""
    pts = np.asarray(pts, dtype=complex)
    out = [pts[0]]
    i, n = 0, len(pts)
    while i < n - 1:
        cand = np.arange(n - 1, i, -1)
        ok = ~dom.segment_hits(np.full(cand.size, pts[i]), pts[cand])
        j = int(cand[np.argmax(ok)]) if ok.any() else i + 1
        out.append(pts[j])
        i = j
    return np.array(out)


def taut_path(dom: DomainSpec, a: complex, b: complex, graph: MetricGraph) -> Curve:
    """Near-shortest Euclidean path: graph path, shortcut, then tightened."""
    _, pts = graph_path(graph, a, b, "length", weights=graph.length)
    pts = shortcut(dom, pts)
    if len(pts) > 2:
        pts = refine_path(dom, pts, "length", segments=64, sweeps=150)
        pts = shortcut(dom, pts)
    return Curve(pts)


def _minimax_radius(graph: MetricGraph, a: complex, b: complex) -> tuple[float, np.ndarray]:
    """Smallest R with a, b joined in the graph inside the closed ball B(a, R)."""
    n = graph.n
    dom = graph.dom
    key = np.abs(np.append(graph.nodes, [a, b]) - a)
    i = [graph.ei, graph.ej]
    j = [graph.ej, graph.ei]
    for s, z in ((n, a), (n + 1, b)):
        _, nb = graph.tree.query([z.real, z.imag], k=min(8, n))
        nb = np.atleast_1d(nb)
        nb = nb[~dom.segment_hits(np.full(nb.size, z), graph.nodes[nb])]
        i += [np.full(nb.size, s)]
        j += [nb]
    if not dom.segment_hits(np.array([a]), np.array([b]))[0]:
        i += [np.array([n])]
        j += [np.array([n + 1])]
    ii, jj = np.concatenate(i), np.concatenate(j)
    # strictly positive weights survive the sparse representation
    w = np.maximum(key[ii], key[jj]) + 1e-300
    T = minimum_spanning_tree(coo_matrix((w, (ii, jj)), shape=(n + 2, n + 2)).tocsr())
    T = T + T.T
    order, pred = breadth_first_order(T, n, directed=False, return_predecessors=True)
    if pred[n + 1] < 0:
        raise Disconnected("points are not connected in the sample graph")
    seq = [n + 1]
    while seq[-1] != n:
        seq.append(int(pred[seq[-1]]))
    seq = np.array(seq[::-1])
    R = float(key[seq].max())
    pts = np.append(graph.nodes, [a, b])[seq]
    return R, pts


def inner_distances(dom: DomainSpec, a, b, h: float | None = None, *,
                    graph: MetricGraph | None = None) -> InnerDistances:
    """Inner length distance and a factor-2 bracket of the inner diameter distance."""
    a, b = complex(a), complex(b)
    _check_in(dom, a, b)
    graph = _graph_for(dom, [a, b], h, graph)
    path = taut_path(dom, a, b, graph)
    lam = path.length
    rho_lo, rho_hi = rho_bracket(dom, a, b, graph=graph)
    return InnerDistances(lam, rho_lo, max(rho_lo, min(rho_hi, lam)), path, graph.h)


def rho_bracket(dom: DomainSpec, a, b, h: float | None = None, *,
                graph: MetricGraph | None = None) -> tuple[float, float]:
    """Bracket [lo, hi] with hi <= 2 lo for the inner diameter distance.

    ``lo`` is the minimax radius about ``a`` over graph paths (at least
    |a - b|), ``hi`` the smaller of twice that radius and the diameter of
    the minimax path.
    """
    a, b = complex(a), complex(b)
    graph = _graph_for(dom, [a, b], h, graph)
    R, pts = _minimax_radius(graph, a, b)
    d = abs(a - b)
    # numpy and Python hypot may differ in the last bit
    lo = d if R <= d * (1 + 4 * np.finfo(float).eps) else R
    return lo, max(lo, min(2.0 * R, Curve(pts).diameter))


# ---------------------------------------------------------------------------
# cigars


@dataclass
class CigarReport:
    curve: Curve = field(repr=False)
    A_length: float
    A_diam: float
    endpoints: tuple
    passes: dict = field(default_factory=dict)
    lam: float | None = None
    A: float | None = None
    beta: float | None = None


def _prefix_diameters(pts: np.ndarray, metric: str) -> np.ndarray:
    """diam(pts[:k+1]) for every k."""
    out = np.zeros(len(pts))
    cur = 0.0
    for k in range(1, len(pts)):
        d = _pair_dist(pts[k], pts[:k], metric)
        cur = max(cur, float(d.max()))
        out[k] = cur
    return out


def _pair_dist(z, w, metric):
    return sigma(z, w) if metric == "spherical" else np.abs(z - w)


def cigar_profile(curve, dom: DomainSpec, metric: str = "euclidean"):
    """Per-sample (length side, diameter side, boundary distance) at vertices and midpoints."""
    curve = as_curve(curve)
    v = curve.vertices
    # interleave vertices and midpoints
    pts = np.empty(2 * len(v) - 1, dtype=complex)
    pts[0::2] = v
    pts[1::2] = 0.5 * (v[:-1] + v[1:])
    cum = curve.cum_len_s if metric == "spherical" else curve.cum_len_e
    if metric == "spherical":
        c = Curve(pts)
        s = c.cum_len_s
    else:
        s = np.empty(pts.size)
        s[0::2] = cum
        s[1::2] = 0.5 * (cum[:-1] + cum[1:])
    L = s[-1]
    len_side = np.minimum(s, L - s)
    pre = _prefix_diameters(pts, metric)
    suf = _prefix_diameters(pts[::-1], metric)[::-1]
    diam_side = np.minimum(pre, suf)
    if metric == "spherical":
        bd = dom.spherical_boundary_distance(pts)
    else:
        bd = dom.boundary_distance(pts)
    return pts, len_side, diam_side, bd


def _check_trace(curve: Curve, dom: DomainSpec, pts: np.ndarray) -> None:
    inner = pts[1:-1]
    if inner.size and not dom.contains(inner).all():
        raise CurveExitsDomain("curve leaves the domain")
    v = curve.vertices
    a, b = v[:-1], v[1:]
    ok_end = dom.contains(a) & dom.contains(b)
    if (dom.segment_hits(a[ok_end], b[ok_end])).any():
        raise CurveExitsDomain("curve segment crosses a complement component")


def check_cigar(curve, dom: DomainSpec, A: float | None = None, flavor: str | None = None,
                metric: str = "euclidean") -> CigarReport:
    """Smallest cigar constants of a curve, length and diameter versions.

    The ratios are the raw maxima of ``side / dist``; a ratio of ``inf``
    means the curve touches the boundary away from its endpoints.
    """
    curve = as_curve(curve)
    pts, ls, ds, bd = cigar_profile(curve, dom, metric)
    _check_trace(curve, dom, pts)
    with np.errstate(divide="ignore", invalid="ignore"):
        rl = np.where(ls > 0, ls / bd, 0.0)
        rd = np.where(ds > 0, ds / bd, 0.0)
    rep = CigarReport(curve, float(rl.max()), float(rd.max()), (curve.start, curve.end))
    if A is not None:
        tol = 1.0 + 1e-12
        for fl, val in (("length", rep.A_length), ("diameter", rep.A_diam)):
            if flavor in (None, fl):
                rep.passes[fl] = bool(val <= A * tol)
    return rep


# ---------------------------------------------------------------------------
# uniform curves


BETAS = (0.0, 1.0, 4.0, 16.0)


def find_uniform_curve(dom: DomainSpec, a, b, h: float | None = None, *,
                       graph: MetricGraph | None = None, betas: Sequence[float] = BETAS) -> CigarReport:
    """Best curve among the taut path, boundary-penalised paths and a quasihyperbolic geodesic.

    Penalised edge weights are ``length * (1 + beta * min(1, cell / dist))``
    with ``cell = |a - b| / 8``.  Each candidate witnesses the inner
    uniformity constant ``A = max(1, A_length, length / lambda)``; the
    smallest wins.
    """
    a, b = complex(a), complex(b)
    _check_in(dom, a, b)
    graph = _graph_for(dom, [a, b], h, graph)
    lam_curve = taut_path(dom, a, b, graph)
    lam = lam_curve.length
    mid_d = 0.5 * (graph.bdist[graph.ei] + graph.bdist[graph.ej])
    # Whitney cells scale with the boundary distance, so the penalty uses a
    # fixed pair-scale cell instead of the local one
    cell = abs(a - b) / 8.0

    def candidates():
        yield 0.0, lam_curve
        for beta in betas:
            if beta > 0:
                w = graph.length * (1.0 + beta * np.minimum(1.0, cell / mid_d))
                yield beta, Curve(graph_path(graph, a, b, "length", weights=w)[1])
        _, pts = graph_path(graph, a, b, "euclidean")
        yield math.inf, Curve(refine_path(dom, pts, "euclidean", segments=32, sweeps=60))

    best = None
    for beta, cand in candidates():
        try:
            rep = check_cigar(cand, dom)
        except CurveExitsDomain:
            continue
        A = max(1.0, rep.A_length, cand.length / lam if lam > 0 else 1.0)
        if best is None or A < best.A:
            rep.lam, rep.beta, rep.A = lam, beta, A
            best = rep
    if best is None:
        raise CurveExitsDomain("no candidate curve stays in the domain")
    return best


def estimate_uniformity(dom: DomainSpec, pairs: Iterable, h: float | None = None, *,
                        graph: MetricGraph | None = None) -> tuple[float, list]:
    """Maximum per-pair inner uniformity constant over sampled pairs ("A_est")."""
    table = []
    for a, b in pairs:
        rep = find_uniform_curve(dom, a, b, h, graph=graph)
        table.append({"a": complex(a), "b": complex(b), "A": rep.A, "A_length": rep.A_length,
                      "A_diam": rep.A_diam, "length": rep.curve.length, "lambda": rep.lam, "beta": rep.beta})
    if not table:
        raise ValueError("need at least one pair")
    return max(r["A"] for r in table), table


# ---------------------------------------------------------------------------
# separation and counting


@dataclass
class SeparationReport:
    pairs: list
    worst_ratio: float
    implied_A_lower: float
    violations: list
    threshold: float | None


def verify_separation(dom: DomainSpec, A_est: float | None = None) -> SeparationReport:
    """Relative distance ``min diam / dist`` for every pair of components.

    Pairs violating ``2 (A_est + 2)^2`` are flagged.  A ratio ``q`` forces any
    valid constant to satisfy ``A >= sqrt(q / 2) - 1``.
    """
    diam, dist = component_geometry(dom)
    n = len(diam)
    pairs, viol = [], []
    worst = 0.0
    thr = separation_constant(A_est + 1.0) if A_est is not None else None
    for i in range(n):
        for j in range(i + 1, n):
            md = min(diam[i], diam[j])
            ratio = md / dist[i, j] if dist[i, j] > 0 else math.inf
            pairs.append((i, j, float(md), float(dist[i, j]), ratio))
            worst = max(worst, ratio)
            if thr is not None and ratio > thr:
                viol.append((i, j, ratio))
    implied = max(0.0, math.sqrt(worst / 2.0) - 1.0) if pairs else 0.0
    return SeparationReport(pairs, worst if pairs else 0.0, implied, viol, thr)


def _meets_open_ball(c: Component, R: float) -> bool:
    return float(c.set_distance(np.array([0j]))[0]) < R


@dataclass
class CountReport:
    count: int
    bound: float
    packing_constant: float
    separation_ratio: float
    theory_bound: float | None
    indices: list


def count_large_components(dom: DomainSpec, r: float, R: float, A_est: float | None = None) -> CountReport:
    """Count components meeting B(0, R) with diameter > r, plus the packing bound.

    With ``C = max(1, worst min-diam/dist)``, distinct counted components are
    at distance >= r / C, so balls of radius r / (2C) around points of them
    are disjoint; comparing areas gives ``count <= 8 C^2 (1 + R^2 / r^2)``.
    """
    if not (r > 0 and R > 0):
        raise ValueError("r and R must be positive")
    idx = [k for k, c in enumerate(dom.components) if c.diameter > r and _meets_open_ball(c, R)]
    C = max(1.0, verify_separation(dom).worst_ratio)
    packing = 8.0 * C * C
    theory = None
    if A_est is not None:
        Ct = separation_constant(A_est)
        theory = 8.0 * Ct * Ct * (1.0 + R * R / (r * r))
    return CountReport(len(idx), packing * (1.0 + R * R / (r * r)), packing, C, theory, idx)


# ---------------------------------------------------------------------------
# bounded turning


def _component_raster(c: Component, res: int):
    x0, y0, x1, y1 = c.bbox()
    if not (isinstance(c, (Disc, Polyline)) and c.bounded):
        s = max(x1 - x0, y1 - y0, 1.0)
        x0, y0, x1, y1 = x0 - s, y0 - s, x1 + s, y1 + s
    side = max(x1 - x0, y1 - y0)
    step = side / res
    nx = int(math.ceil((x1 - x0) / step)) + 3
    ny = int(math.ceil((y1 - y0) / step)) + 3
    xs = x0 - step + step * np.arange(nx)
    ys = y0 - step + step * np.arange(ny)
    Z = xs[None, :] + 1j * ys[:, None]
    mask = c.contains(Z.ravel()).reshape(Z.shape)
    return Z, mask, step


def _snap(Z, mask, z):
    cand = np.flatnonzero(mask.ravel())
    k = cand[np.argmin(np.abs(Z.ravel()[cand] - z))]
    return np.unravel_index(k, mask.shape)


def _turning_ratio_bisect(Z, mask, p, q, z0, r, hi=64.0, iters=40) -> float:
    rad = np.abs(Z - z0)
    lo = 0.0
    if not _joined(mask & (rad <= hi * r), p, q):
        return math.inf
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _joined(mask & (rad <= mid * r), p, q):
            hi = mid
        else:
            lo = mid
    return hi


def _joined(m, p, q) -> bool:
    if not (m[p] and m[q]):
        return False
    lab, _ = ndimage.label(m, structure=np.ones((3, 3)))
    return lab[p] == lab[q]


def turning_pairs(c: Component, samples: int, seed: int = 0) -> list[tuple[complex, complex]]:
    rng = np.random.default_rng(seed)
    pts = c.boundary_samples(256)
    out = []
    for _ in range(samples):
        i, j = rng.choice(pts.size, 2, replace=False)
        out.append((complex(pts[i]), complex(pts[j])))
    return out


@dataclass
class TurningReport:
    L_est: float
    ratios: list
    resolution: float


def verify_bounded_turning(c: Component, samples: int | Sequence = 64, res: int = 256,
                           seed: int = 0) -> TurningReport:
    """Empirical bounded-turning constant of a complement component.

    For each pair the smallest H is found such that both points lie in one
    connected piece of the component inside the closed ball of radius
    ``H |z1 - z2| / 2`` about their midpoint.  That piece has diameter at most
    ``H |z1 - z2|``, so H bounds the turning ratio for the pair.
    """
    if isinstance(c, Point):
        raise DegenerateComponent("a point component has no turning to measure")
    pairs = turning_pairs(c, samples, seed) if isinstance(samples, int) else list(samples)
    if isinstance(c, Segment):
        return TurningReport(1.0, [(a, b, 1.0) for a, b in pairs], 0.0)
    Z, mask, step = _component_raster(c, res)
    ratios = []
    for a, b in pairs:
        p, q = _snap(Z, mask, a), _snap(Z, mask, b)
        za, zb = Z[p], Z[q]
        if p == q:
            continue
        z0, r = 0.5 * (za + zb), 0.5 * abs(za - zb)
        ratios.append((a, b, _turning_ratio_bisect(Z, mask, p, q, z0, r)))
    L = max([x[2] for x in ratios], default=1.0)
    return TurningReport(L, ratios, step)


def bottleneck_ratio(mask: np.ndarray, Z: np.ndarray, p, q) -> float:
    """Minimax of |z - z0| / r over 8-connected raster paths from p to q (heap search)."""
    za, zb = Z[p], Z[q]
    z0, r = 0.5 * (za + zb), 0.5 * abs(za - zb)
    cost = np.abs(Z - z0) / r
    best = np.full(mask.shape, np.inf)
    best[p] = cost[p]
    heap = [(cost[p], p)]
    ny, nx = mask.shape
    while heap:
        c, (i, j) = heapq.heappop(heap)
        if (i, j) == q:
            return float(c)
        if c > best[i, j]:
            continue
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                a, b = i + di, j + dj
                if (di or dj) and 0 <= a < ny and 0 <= b < nx and mask[a, b]:
                    nc = max(c, cost[a, b])
                    if nc < best[a, b]:
                        best[a, b] = nc
                        heapq.heappush(heap, (nc, (a, b)))
    return math.inf


# ---------------------------------------------------------------------------
# concatenation


def concatenate_with_cigar(g1, g2, dom: DomainSpec, A: float) -> CigarReport:
    """Join two diameter A-cigar curves and confirm the joined curve at ``(2A+1)A``."""
    g1, g2 = as_curve(g1), as_curve(g2)
    if abs(g1.end - g2.start) > 1e-12 * max(1.0, abs(g1.end)):
        raise PreconditionFailed("first curve must end where the second starts")
    for k, g in enumerate((g1, g2), 1):
        rep = check_cigar(g, dom, A, "diameter")
        if not rep.passes["diameter"]:
            raise PreconditionFailed(f"curve {k} fails the diameter cigar: {rep.A_diam:.6g} > A = {A:.6g}")
    x0 = g1.end
    d0 = float(dom.boundary_distance(np.array([x0]))[0])
    need = min(g1.diameter, g2.diameter) / A
    if d0 < need:
        raise PreconditionFailed(f"dist(x0, boundary) = {d0:.6g} < min(d(g1), d(g2)) / A = {need:.6g}")
    joined = g1.concat(g2)
    C = concatenation_constant(A)
    rep = check_cigar(joined, dom, C, "diameter")
    rep.A = C
    return rep


# ---------------------------------------------------------------------------
# boundary avoidance and local linear connectivity live in a companion module

from ._detours import AvoidanceError, LLCReport, avoid_boundary, check_llc, llc_samples  # noqa: E402,F401
