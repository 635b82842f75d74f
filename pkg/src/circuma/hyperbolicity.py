"""Empirical Gromov hyperbolicity of quasihyperbolic metrics.

Both estimators are lower bounds for the true constant: they maximise over
finitely many samples only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .domain import DomainSpec
from .errors import Disconnected
from .qh_metric import MetricGraph, build_graph, default_window

EXHAUSTIVE_MAX = 40
RANDOM_TUPLES = 1_000_000


def gromov_product(d: Callable, x, y, w) -> float:
    return 0.5 * (d(x, w) + d(y, w) - d(x, y))


def four_point_delta(D: np.ndarray, tuples: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest four-point defect over index 4-tuples of a distance matrix.

    For each tuple the defect is half the gap between the two largest of the
    three pair sums, which equals the worst labelling's
    ``min((x|z)_w, (y|z)_w) - (x|y)_w``.  Returns (delta, witness tuple).
    """
    if len(tuples) == 0:
        return 0.0, np.zeros(4, int)
    best, arg = -1.0, None
    for s in range(0, len(tuples), 200_000):
        t = tuples[s : s + 200_000]
        i, j, k, l = t.T
        S = np.sort(np.stack([D[i, j] + D[k, l], D[i, k] + D[j, l], D[i, l] + D[j, k]]), axis=0)
        defect = 0.5 * (S[2] - S[1])
        m = int(np.argmax(defect))
        if defect[m] > best:
            best, arg = float(defect[m]), t[m]
    return max(best, 0.0), np.asarray(arg)


def sample_tuples(m: int, rng: np.random.Generator, limit: int = RANDOM_TUPLES) -> np.ndarray:
    if m < 4:
        raise ValueError("need at least 4 sample points")
    if m <= EXHAUSTIVE_MAX:
        return np.array(list(itertools.combinations(range(m), 4)), dtype=np.int64)
    return np.sort(_random_distinct(m, limit, rng), axis=1)


def _random_distinct(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    out = rng.integers(0, m, size=(n, 4))
    bad = _has_repeat(out)
    while bad.any():
        out[bad] = rng.integers(0, m, size=(int(bad.sum()), 4))
        bad = _has_repeat(out)
    return out


def _has_repeat(t: np.ndarray) -> np.ndarray:
    s = np.sort(t, axis=1)
    return (np.diff(s, axis=1) == 0).any(axis=1)


def farthest_point_sample(pts: np.ndarray, m: int, start: int = 0) -> np.ndarray:
    """Greedy farthest-point indices (Euclidean), beginning at ``start``."""
    m = min(m, pts.size)
    chosen = [start]
    d = np.abs(pts - pts[start])
    for _ in range(m - 1):
        k = int(np.argmax(d))
        chosen.append(k)
        d = np.minimum(d, np.abs(pts - pts[k]))
    return np.array(chosen)


@dataclass
class DeltaEstimate:
    delta_four_point: float
    sample_size: int
    flavor: str
    resolution: float
    delta_thin: float | None = None
    samples: np.ndarray = field(default_factory=lambda: np.zeros(0, complex), repr=False)
    witness: tuple = ()
    tuples_scanned: int = 0


def sample_nodes(graph: MetricGraph, m: int, clearance: float | None = None, seed: int = 0) -> np.ndarray:
    """Well-spread node indices at boundary distance >= clearance.

    The default clearance (a tenth of the largest boundary distance in the
    window) keeps the sample independent of the resolution.
    """
    if clearance is None:
        clearance = 0.1 * float(graph.bdist.max())
    pool = np.flatnonzero(graph.bdist >= clearance)
    if pool.size < m:
        pool = np.argsort(-graph.bdist)[: max(m, 4)]
    pts = graph.nodes[pool]
    rng = np.random.default_rng(seed)
    start = int(rng.integers(pool.size))
    return pool[farthest_point_sample(pts, m, start)]


def distance_matrix(graph: MetricGraph, idx: np.ndarray, flavor: str) -> np.ndarray:
    D = dijkstra(graph.matrix(flavor), directed=False, indices=idx)[:, idx]
    if not np.all(np.isfinite(D)):
        raise Disconnected("sample points fall in different graph components")
    return 0.5 * (D + D.T)


def delta_four_point(dom: DomainSpec, m: int = 40, flavor: str = "euclidean", h: float = 0.02, *,
                     window: Sequence[float] | None = None, graph: MetricGraph | None = None,
                     seed: int = 0, clearance: float | None = None) -> DeltaEstimate:
    """Four-point estimate of the Gromov constant from well-spread graph nodes."""
    if m < 4:
        raise ValueError("m must be at least 4")
    graph = graph or build_graph(dom, h, window)
    idx = sample_nodes(graph, m, clearance, seed)
    D = distance_matrix(graph, idx, flavor)
    tuples = sample_tuples(len(idx), np.random.default_rng(seed))
    delta, wit = four_point_delta(D, tuples)
    return DeltaEstimate(delta, len(idx), flavor, graph.h, samples=graph.nodes[idx],
                         witness=tuple(complex(graph.nodes[idx[k]]) for k in wit), tuples_scanned=len(tuples))


def _node_path(graph: MetricGraph, pred: np.ndarray, target: int) -> list[int]:
    out = [target]
    while pred[out[-1]] >= 0:
        out.append(int(pred[out[-1]]))
    return out[::-1]


def delta_thin_triangles(dom: DomainSpec, triangles: Sequence[Sequence[complex]], flavor: str = "euclidean",
                         h: float = 0.02, *, window: Sequence[float] | None = None,
                         graph: MetricGraph | None = None) -> float:
    """Largest distance from a side of a discrete geodesic triangle to the other two sides."""
    if graph is None:
        pts = np.array([p for tri in triangles for p in tri], dtype=complex)
        graph = build_graph(dom, h, window or default_window(dom, pts, pad=1.0))
    M = graph.matrix(flavor)
    worst = 0.0
    for tri in triangles:
        _, v = graph.tree.query([[complex(p).real, complex(p).imag] for p in tri])
        v = [int(k) for k in v]
        dist, pred = dijkstra(M, directed=False, indices=v, return_predecessors=True)
        sides = []
        for a, b in ((0, 1), (1, 2), (2, 0)):
            if not np.isfinite(dist[a, v[b]]):
                raise Disconnected("triangle vertices are not connected in the sample graph")
            sides.append(_node_path(graph, pred[a], v[b]))
        for s in range(3):
            others = sorted(set(sides[(s + 1) % 3]) | set(sides[(s + 2) % 3]))
            dd = dijkstra(M, directed=False, indices=others, min_only=True)
            worst = max(worst, float(dd[sides[s]].max()))
    return worst
