"""Planar domains given as complements of finitely many closed components.

Points are Python/numpy complex numbers; the point at infinity is the
singleton :data:`INF`.  Every component knows its Euclidean distance, its
spherical distance and a vectorized "does this segment meet me" test, which
is all the metric and curve machinery downstream needs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .errors import InvalidDomain, PointOutsideDomain


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("circuma-infinity")


INF = _Infinity()


def is_inf(z) -> bool:
    return z is INF


# ---------------------------------------------------------------------------
# ambient metrics


def chordal_distance(z, w) -> float:
    """Chordal distance on the Riemann sphere of diameter 2."""
    if is_inf(z) and is_inf(w):
        return 0.0
    if is_inf(z):
        z, w = w, z
    if is_inf(w):
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / (math.sqrt(1.0 + abs(z) ** 2) * math.sqrt(1.0 + abs(w) ** 2))


def spherical_distance(z, w) -> float:
    """Great-circle distance under stereographic projection (range [0, pi])."""
    if is_inf(z) and is_inf(w):
        return 0.0
    if is_inf(z):
        z, w = w, z
    if is_inf(w):
        return math.pi - 2.0 * math.atan(abs(z))
    return 2.0 * math.atan2(abs(z - w), abs(1.0 + np.conj(z) * w))


def sigma(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Vectorized spherical distance between finite points (broadcasting)."""
    return 2.0 * np.arctan2(np.abs(z - w), np.abs(1.0 + np.conj(z) * w))


def sigma_to_inf(z: np.ndarray) -> np.ndarray:
    return np.pi - 2.0 * np.arctan(np.abs(z))


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def point_segment_distance(z, a, b):
    """Distance from z to the closed segment [a, b]; broadcasts."""
    d = b - a
    dd = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, ((z - a) * np.conj(d)).real / np.where(dd > 0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def segment_segment_distance(a1, b1, a2, b2):
    """Distance between closed segments [a1,b1] and [a2,b2]; broadcasts."""
    d = np.minimum(
        np.minimum(point_segment_distance(a1, a2, b2), point_segment_distance(b1, a2, b2)),
        np.minimum(point_segment_distance(a2, a1, b1), point_segment_distance(b2, a1, b1)),
    )
    o1 = _cross(b1 - a1, a2 - a1)
    o2 = _cross(b1 - a1, b2 - a1)
    o3 = _cross(b2 - a2, a1 - a2)
    o4 = _cross(b2 - a2, b1 - a2)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    return np.where(proper, 0.0, d)


def to_sphere(z) -> np.ndarray:
    """Inverse stereographic projection onto the unit sphere; shape (..., 3)."""
    z = np.asarray(z, dtype=complex)
    m = np.abs(z) ** 2
    s = 1.0 + m
    return np.stack([2 * z.real / s, 2 * z.imag / s, (m - 1.0) / s], axis=-1)


NORTH = np.array([0.0, 0.0, 1.0])


def sphere_angle(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Great-circle angle between unit vectors, accurate for tiny angles."""
    return 2.0 * np.arctan2(np.linalg.norm(X - Y, axis=-1), np.linalg.norm(X + Y, axis=-1))


def _circle_plane(A, B, C) -> tuple[np.ndarray, float]:
    n = np.cross(B - A, C - A)
    n = n / np.linalg.norm(n)
    return n, float(n @ A)


def _nearest_on_circle(X: np.ndarray, n: np.ndarray, h: float) -> np.ndarray:
    """Nearest point of the sphere circle {Y : Y.n = h} to each X."""
    rho = math.sqrt(max(0.0, 1.0 - h * h))
    v = X - (X @ n)[..., None] * n
    nv = np.linalg.norm(v, axis=-1)
    # on the axis every circle point is equally close
    perp = np.cross(n, [1.0, 0.0, 0.0] if abs(n[0]) < 0.9 else [0.0, 1.0, 0.0])
    perp = perp / np.linalg.norm(perp)
    u = np.where(nv[..., None] > 1e-300, v / np.where(nv > 1e-300, nv, 1.0)[..., None], perp)
    return h * n + rho * u


def _segment_sphere_distance(X: np.ndarray, a: complex, b: complex) -> np.ndarray:
    """Exact spherical distance from sphere points X to the straight segment [a, b]."""
    A, B = to_sphere(a), to_sphere(b)
    n, h = _circle_plane(A, B, NORTH)
    Y = _nearest_on_circle(X, n, h)
    den = 1.0 - Y[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        y = (Y[..., 0] + 1j * Y[..., 1]) / den
        t = ((y - a) / (b - a)).real
    inside = (den > 1e-14) & (t >= 0.0) & (t <= 1.0)
    ends = np.minimum(sphere_angle(X, A), sphere_angle(X, B))
    return np.where(inside, np.minimum(sphere_angle(X, Y), ends), ends)


# ---------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class Component:
    """Base class for closed complement components."""

    kind = "abstract"
    periodic = True

    # -- to be provided by subclasses
    def distance(self, z: np.ndarray) -> np.ndarray:  # distance to the component's boundary
        raise NotImplementedError

    def contains(self, z: np.ndarray) -> np.ndarray:  # closed membership
        raise NotImplementedError

    def boundary_param(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def segment_hits(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    @property
    def bounded(self) -> bool:
        return True

    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    def boundary_samples(self, n: int = 256) -> np.ndarray:
        u = np.arange(n) / n if self.periodic else np.linspace(0.0, 1.0, n)
        return self.boundary_param(u)

    def to_record(self) -> dict:
        raise NotImplementedError

    # -- shared
    def set_distance(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.where(self.contains(z), 0.0, self.distance(z))

    def sphere_distance(self, X: np.ndarray) -> np.ndarray:
        """Spherical distance to the boundary from points already on the sphere."""
        raise NotImplementedError

    def spherical_distance(self, z) -> np.ndarray:
        """Spherical distance from finite points z to the component boundary."""
        z = np.asarray(z, dtype=complex)
        return self.sphere_distance(to_sphere(z))


@dataclass(frozen=True)
class Disc(Component):
    """Closed disc; with ``outer=True`` the component is the closed exterior."""

    center: complex
    radius: float
    outer: bool = False
    kind = "disc"

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidDomain(f"disc radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def distance(self, z):
        return np.abs(np.abs(np.asarray(z) - self.center) - self.radius)

    def contains(self, z):
        r = np.abs(np.asarray(z) - self.center)
        return r >= self.radius if self.outer else r <= self.radius

    def boundary_param(self, u):
        return self.center + self.radius * np.exp(2j * np.pi * np.asarray(u))

    @cached_property
    def _plane(self):
        c, r = self.center, self.radius
        return _circle_plane(to_sphere(c + r), to_sphere(c + 1j * r), to_sphere(c - r))

    def sphere_distance(self, X):
        n, h = self._plane
        return sphere_angle(X, _nearest_on_circle(X, n, h))

    def segment_hits(self, a, b):
        if self.outer:
            return (np.abs(a - self.center) >= self.radius) | (np.abs(b - self.center) >= self.radius)
        return point_segment_distance(self.center, a, b) <= self.radius

    @property
    def diameter(self):
        return math.inf if self.outer else 2.0 * self.radius

    @property
    def bounded(self):
        return not self.outer

    def bbox(self):
        c, r = self.center, self.radius
        return (c.real - r, c.imag - r, c.real + r, c.imag + r)

    def to_record(self):
        rec = {"cx": self.center.real, "cy": self.center.imag, "r": self.radius}
        if self.outer:
            rec["outer"] = True
        return {"disc": rec}


@dataclass(frozen=True)
class Segment(Component):
    p: complex
    q: complex
    kind = "segment"
    periodic = False

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "q", complex(self.q))
        if self.p == self.q:
            raise InvalidDomain("segment endpoints must differ")

    @property
    def _tol(self):
        return 1e-12 * max(1.0, abs(self.p), abs(self.q))

    def distance(self, z):
        return point_segment_distance(np.asarray(z), self.p, self.q)

    def contains(self, z):
        return self.distance(z) <= self._tol

    def boundary_param(self, u):
        return self.p + np.asarray(u) * (self.q - self.p)

    def sphere_distance(self, X):
        return _segment_sphere_distance(X, self.p, self.q)

    def segment_hits(self, a, b):
        return segment_segment_distance(a, b, self.p, self.q) <= self._tol

    @property
    def diameter(self):
        return abs(self.q - self.p)

    def bbox(self):
        return (min(self.p.real, self.q.real), min(self.p.imag, self.q.imag),
                max(self.p.real, self.q.real), max(self.p.imag, self.q.imag))

    def to_record(self):
        return {"segment": {"x1": self.p.real, "y1": self.p.imag, "x2": self.q.real, "y2": self.q.imag}}


@dataclass(frozen=True)
class Point(Component):
    p: complex
    kind = "point"
    periodic = False

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))

    def distance(self, z):
        return np.abs(np.asarray(z) - self.p)

    def contains(self, z):
        return self.distance(z) <= 1e-14 * max(1.0, abs(self.p))

    def boundary_param(self, u):
        return np.full(np.shape(u), self.p, dtype=complex)

    def sphere_distance(self, X):
        return sphere_angle(X, to_sphere(self.p))

    def segment_hits(self, a, b):
        return point_segment_distance(self.p, a, b) <= 1e-14 * max(1.0, abs(self.p))

    @property
    def diameter(self):
        return 0.0

    def bbox(self):
        return (self.p.real, self.p.imag, self.p.real, self.p.imag)

    def to_record(self):
        return {"point": {"x": self.p.real, "y": self.p.imag}}


def winding_number(z: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Winding number of the closed polygon ``verts`` around each point of z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    nxt = np.roll(verts, -1)
    out = np.empty(z.shape, dtype=int)
    flat = z.ravel()
    for s in range(0, flat.size, 2048):
        zz = flat[s : s + 2048, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            ang = np.angle((nxt[None, :] - zz) / (verts[None, :] - zz))
        out.ravel()[s : s + 2048] = np.rint(np.nansum(ang, axis=1) / (2 * np.pi)).astype(int)
    return out


@dataclass(frozen=True)
class Polyline(Component):
    """Closed simple polygon with its interior; ``outer=True`` keeps the exterior instead."""

    points: tuple
    outer: bool = False
    kind = "polyline"

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts = pts[:-1]
        if len(pts) < 3:
            raise InvalidDomain("polyline needs at least 3 vertices")
        object.__setattr__(self, "points", pts)
        v = self.verts
        e0, e1 = v, np.roll(v, -1)
        n = len(v)
        # simplicity: non-adjacent edges must stay apart
        d = segment_segment_distance(e0[:, None], e1[:, None], e0[None, :], e1[None, :])
        idx = np.arange(n)
        gap = np.abs(idx[:, None] - idx[None, :])
        nonadj = (gap > 1) & (gap < n - 1)
        scale = float(np.max(np.abs(v - v.mean())))
        if np.any(d[nonadj] <= 1e-12 * scale):
            raise InvalidDomain("polyline is not simple")

    @cached_property
    def verts(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    @cached_property
    def _cum(self) -> np.ndarray:
        v = self.verts
        seg = np.abs(np.roll(v, -1) - v)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def distance(self, z):
        z = np.asarray(z, dtype=complex)
        v = self.verts
        w = np.roll(v, -1)
        out = np.empty(z.shape)
        flat = z.ravel()
        for s in range(0, flat.size, 4096):
            zz = flat[s : s + 4096, None]
            out.ravel()[s : s + 4096] = point_segment_distance(zz, v[None, :], w[None, :]).min(axis=1)
        return out

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        on = self.distance(z) <= 1e-12 * max(1.0, float(np.max(np.abs(self.verts))))
        inside = winding_number(z, self.verts).reshape(z.shape) != 0
        return on | (~inside if self.outer else inside)

    def boundary_param(self, u):
        u = np.asarray(u, dtype=float)
        cum = self._cum
        s = np.mod(u, 1.0) * cum[-1]
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(self.points) - 1)
        v = self.verts
        w = np.roll(v, -1)
        t = (s - cum[k]) / (cum[k + 1] - cum[k])
        return v[k] + t * (w[k] - v[k])

    def sphere_distance(self, X):
        v = self.verts
        w = np.roll(v, -1)
        d = np.full(X.shape[:-1], np.inf)
        for a, b in zip(v, w):
            d = np.minimum(d, _segment_sphere_distance(X, a, b))
        return d

    def segment_hits(self, a, b):
        a = np.atleast_1d(np.asarray(a, dtype=complex))
        b = np.atleast_1d(np.asarray(b, dtype=complex))
        v = self.verts
        w = np.roll(v, -1)
        tol = 1e-12 * max(1.0, float(np.max(np.abs(v))))
        hit = np.empty(a.shape, dtype=bool)
        for s in range(0, a.size, 2048):
            aa, bb = a.ravel()[s : s + 2048, None], b.ravel()[s : s + 2048, None]
            hit.ravel()[s : s + 2048] = (segment_segment_distance(aa, bb, v[None, :], w[None, :]) <= tol).any(axis=1)
        return hit | self.contains(a) | self.contains(b)

    @property
    def diameter(self):
        if self.outer:
            return math.inf
        v = self.verts
        return float(np.max(np.abs(v[:, None] - v[None, :])))

    @property
    def bounded(self):
        return not self.outer

    def bbox(self):
        v = self.verts
        return (v.real.min(), v.imag.min(), v.real.max(), v.imag.max())

    def boundary_samples(self, n: int = 256):
        n = max(n, 64)
        return np.unique(np.concatenate([self.verts, self.boundary_param(np.arange(n) / n)]))

    def to_record(self):
        rec = {"points": [[p.real, p.imag] for p in self.points]}
        if self.outer:
            rec["outer"] = True
        return {"polyline": rec}


@dataclass(frozen=True)
class HalfPlane(Component):
    """Closed half-plane ``{z : Re((z - point) * conj(normal)) <= 0}``.

    ``normal`` points from the component into the domain.
    """

    point: complex
    normal: complex = 1j
    kind = "halfplane"
    periodic = False

    def __post_init__(self):
        n = complex(self.normal)
        if n == 0:
            raise InvalidDomain("half-plane normal must be nonzero")
        object.__setattr__(self, "normal", n / abs(n))
        object.__setattr__(self, "point", complex(self.point))

    def _signed(self, z):
        return ((np.asarray(z) - self.point) * np.conj(self.normal)).real

    def distance(self, z):
        return np.abs(self._signed(z))

    def contains(self, z):
        return self._signed(z) <= 0

    def boundary_param(self, u):
        t = np.tan(np.pi * (np.clip(np.asarray(u, dtype=float), 1e-9, 1 - 1e-9) - 0.5))
        return self.point + 1j * self.normal * t

    @cached_property
    def _plane(self):
        p = self.point
        return _circle_plane(to_sphere(p), to_sphere(p + 1j * self.normal), NORTH)

    def sphere_distance(self, X):
        n, h = self._plane
        return sphere_angle(X, _nearest_on_circle(X, n, h))

    def segment_hits(self, a, b):
        return self.contains(a) | self.contains(b)

    @property
    def diameter(self):
        return math.inf

    @property
    def bounded(self):
        return False

    def bbox(self):
        p = self.point
        return (p.real, p.imag, p.real, p.imag)

    def to_record(self):
        return {"halfplane": {"x": self.point.real, "y": self.point.imag,
                              "nx": self.normal.real, "ny": self.normal.imag}}


# ---------------------------------------------------------------------------
# pairwise component geometry


def _edges(c: Component):
    v = c.verts
    return v, np.roll(v, -1)


def component_distance(c1: Component, c2: Component) -> float:
    """Euclidean set distance between two components (exact for all supported pairs)."""
    if isinstance(c2, Point) and not isinstance(c1, Point):
        c1, c2 = c2, c1
    if isinstance(c1, Point):
        return float(c2.set_distance(np.array([c1.p]))[0])
    for a, b in ((c1, c2), (c2, c1)):
        if isinstance(a, HalfPlane):
            if isinstance(b, HalfPlane) or not b.bounded:
                return 0.0
            if isinstance(b, Disc):
                return max(0.0, float(a._signed(b.center)) - b.radius)
            pts = np.array([b.p, b.q]) if isinstance(b, Segment) else b.verts
            return max(0.0, float(a._signed(pts).min()))
    for a, b in ((c1, c2), (c2, c1)):
        if isinstance(a, Disc) and a.outer:
            if isinstance(b, Disc):
                if b.outer:
                    return 0.0
                return max(0.0, a.radius - abs(b.center - a.center) - b.radius)
            if isinstance(b, Segment):
                return max(0.0, a.radius - max(abs(b.p - a.center), abs(b.q - a.center)))
            if isinstance(b, Polyline) and not b.outer:
                return max(0.0, a.radius - float(np.abs(b.verts - a.center).max()))
            return 0.0
    if isinstance(c1, Disc) and isinstance(c2, Disc):
        return max(0.0, abs(c1.center - c2.center) - c1.radius - c2.radius)
    if isinstance(c2, Disc):
        c1, c2 = c2, c1
    if isinstance(c1, Disc):
        if isinstance(c2, Segment):
            return max(0.0, float(point_segment_distance(c1.center, c2.p, c2.q)) - c1.radius)
        v, w = _edges(c2)
        if c2.contains(np.array([c1.center]))[0] != c2.outer:
            return 0.0
        return max(0.0, float(point_segment_distance(c1.center, v, w).min()) - c1.radius)
    if isinstance(c1, Segment) and isinstance(c2, Segment):
        return float(segment_segment_distance(c1.p, c1.q, c2.p, c2.q))
    if isinstance(c2, Segment):
        c1, c2 = c2, c1
    if isinstance(c1, Segment):
        v, w = _edges(c2)
        if c2.contains(np.array([c1.p]))[0]:
            return 0.0
        return float(segment_segment_distance(c1.p, c1.q, v, w).min())
    v1, w1 = _edges(c1)
    v2, w2 = _edges(c2)
    if c1.contains(v2[:1])[0] or c2.contains(v1[:1])[0]:
        return 0.0
    return float(segment_segment_distance(v1[:, None], w1[:, None], v2[None, :], w2[None, :]).min())


# ---------------------------------------------------------------------------
# domain


@dataclass(frozen=True)
class DomainSpec:
    """Complement of finitely many closed components, optionally containing infinity."""

    components: tuple = ()
    contains_infinity: bool = True
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    # -- validation
    def validate(self, probe: int = 160) -> "DomainSpec":
        comps = self.components
        unbounded = [c for c in comps if not c.bounded]
        if self.contains_infinity and unbounded:
            raise InvalidDomain("a domain containing infinity needs bounded components")
        if len(unbounded) > 1:
            raise InvalidDomain("at most one unbounded component is supported")
        scale = self.scale()
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                gap = component_distance(comps[i], comps[j])
                if gap < 1e-9 * scale:
                    raise InvalidDomain(f"components {i} and {j} are not disjoint (gap {gap:.3g})")
        self._check_connected(probe)
        return self

    def _check_connected(self, n: int) -> None:
        x0, y0, x1, y1 = self.bbox(pad=0.25)
        xs = np.linspace(x0, x1, n)
        ys = np.linspace(y0, y1, n)
        Z = xs[None, :] + 1j * ys[:, None]
        inside = self.contains(Z.ravel()).reshape(Z.shape)
        labels, k = ndimage.label(inside, structure=np.ones((3, 3)))
        if k > 1:
            sizes = np.bincount(labels.ravel())[1:]
            # isolated probe cells squeezed between components are sampling noise
            if np.sum(sizes >= max(4, 0.002 * inside.sum())) > 1:
                raise InvalidDomain("domain complement splits the probe grid; domain is not connected")

    # -- geometry
    def bbox(self, pad: float = 0.0) -> tuple[float, float, float, float]:
        boxes = [c.bbox() for c in self.components]
        if not boxes:
            boxes = [(-1.0, -1.0, 1.0, 1.0)]
        x0 = min(b[0] for b in boxes)
        y0 = min(b[1] for b in boxes)
        x1 = max(b[2] for b in boxes)
        y1 = max(b[3] for b in boxes)
        s = max(x1 - x0, y1 - y0, 1e-12)
        if s < 1e-9:
            s = 1.0
        return (x0 - pad * s, y0 - pad * s, x1 + pad * s, y1 + pad * s)

    def scale(self) -> float:
        x0, y0, x1, y1 = self.bbox()
        return max(math.hypot(x1 - x0, y1 - y0), 1e-12)

    def contains(self, z) -> np.ndarray:
        """Membership in the open domain for finite points (vectorized)."""
        z = np.asarray(z, dtype=complex)
        inside = np.ones(z.shape, dtype=bool)
        for c in self.components:
            inside &= ~c.contains(z)
        return inside

    def contains_point(self, z) -> bool:
        if is_inf(z):
            return self.contains_infinity
        return bool(self.contains(np.array([z]))[0])

    def boundary_distance(self, z) -> np.ndarray:
        """Euclidean distance to the union of component boundaries (finite part only)."""
        z = np.asarray(z, dtype=complex)
        d = np.full(z.shape, np.inf)
        for c in self.components:
            d = np.minimum(d, c.distance(z))
        return d

    def spherical_boundary_distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        d = np.full(z.shape, np.inf) if self.contains_infinity else sigma_to_inf(z)
        for c in self.components:
            d = np.minimum(d, c.spherical_distance(z).reshape(z.shape))
        return d

    def segment_hits(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        hit = np.zeros(np.broadcast(a, b).shape, dtype=bool)
        for c in self.components:
            hit |= c.segment_hits(a, b)
        return hit

    def with_components(self, comps: Iterable[Component], name: str | None = None) -> "DomainSpec":
        return DomainSpec(tuple(comps), self.contains_infinity, self.name if name is None else name)

    # -- io
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "contains_infinity": self.contains_infinity,
            "components": [c.to_record() for c in self.components],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DomainSpec":
        comps = [component_from_record(r) for r in data.get("components", [])]
        return cls(tuple(comps), bool(data.get("contains_infinity", True)), str(data.get("name", "")))


def component_from_record(rec: dict) -> Component:
    if len(rec) != 1:
        raise InvalidDomain(f"component record must have exactly one tag: {rec}")
    (tag, v), = rec.items()
    if tag == "disc":
        return Disc(complex(v["cx"], v["cy"]), float(v["r"]), bool(v.get("outer", False)))
    if tag == "segment":
        return Segment(complex(v["x1"], v["y1"]), complex(v["x2"], v["y2"]))
    if tag == "polyline":
        return Polyline(tuple(complex(x, y) for x, y in v["points"]), bool(v.get("outer", False)))
    if tag == "point":
        return Point(complex(v["x"], v["y"]))
    if tag == "halfplane":
        return HalfPlane(complex(v["x"], v["y"]), complex(v.get("nx", 0.0), v.get("ny", 1.0)))
    raise InvalidDomain(f"unknown component tag {tag!r}")


def load_domain(path: str | Path, validate: bool = True) -> DomainSpec:
    dom = DomainSpec.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    return dom.validate() if validate else dom


def dump_domain(dom: DomainSpec, path: str | Path) -> None:
    # repr-precision floats survive the round trip
    Path(path).write_text(json.dumps(dom.to_dict(), indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# operations


def dist_to_boundary(z, dom: DomainSpec, flavor: str = "euclidean") -> float:
    """Distance from a domain point to the boundary, Euclidean or spherical."""
    if is_inf(z):
        if flavor == "euclidean":
            raise PointOutsideDomain("euclidean distance needs a finite point")
        if not dom.contains_infinity:
            raise PointOutsideDomain("infinity is not in the domain")
        return min(float(c.sphere_distance(NORTH[None, :])[0]) for c in dom.components)
    if not dom.contains_point(z):
        raise PointOutsideDomain(f"{z} lies in a complement component")
    arr = np.array([complex(z)])
    if flavor == "euclidean":
        return float(dom.boundary_distance(arr)[0])
    if flavor == "spherical":
        return float(dom.spherical_boundary_distance(arr)[0])
    raise ValueError(f"unknown flavor {flavor!r}")


def component_geometry(dom: DomainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Diameters and the symmetric matrix of pairwise set distances."""
    comps = dom.components
    diam = np.array([c.diameter for c in comps], dtype=float)
    n = len(comps)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = component_distance(comps[i], comps[j])
    return diam, dist


# ---------------------------------------------------------------------------
# curves


def spherical_segment_length(a, b) -> np.ndarray:
    """Exact spherical length of straight segments [a, b] (vectorized)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    L = np.abs(b - a)
    safe = np.where(L > 0, L, 1.0)
    e = (b - a) / safe
    pe = a * np.conj(e)
    beta = pe.real
    c = np.sqrt(1.0 + pe.imag**2)
    val = (2.0 / c) * (np.arctan((L + beta) / c) - np.arctan(beta / c))
    return np.where(L > 0, val, 0.0)


@dataclass(frozen=True)
class Curve:
    """Polyline with cumulative Euclidean and spherical length tables."""

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.vertices, dtype=complex)).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("curve vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @cached_property
    def cum_len_e(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(self.vertices)))])

    @cached_property
    def cum_len_s(self) -> np.ndarray:
        v = self.vertices
        return np.concatenate([[0.0], np.cumsum(spherical_segment_length(v[:-1], v[1:]))])

    @property
    def length(self) -> float:
        return float(self.cum_len_e[-1])

    @property
    def spherical_length(self) -> float:
        return float(self.cum_len_s[-1])

    @property
    def start(self) -> complex:
        return complex(self.vertices[0])

    @property
    def end(self) -> complex:
        return complex(self.vertices[-1])

    @property
    def diameter(self) -> float:
        v = self.vertices
        if len(v) > 3000:
            from scipy.spatial import ConvexHull

            pts = np.column_stack([v.real, v.imag])
            try:
                v = v[ConvexHull(pts).vertices]
            except Exception:
                pass
        return float(np.max(np.abs(v[:, None] - v[None, :]))) if len(v) > 1 else 0.0

    def reversed(self) -> "Curve":
        return Curve(self.vertices[::-1])

    def concat(self, other: "Curve") -> "Curve":
        if abs(self.end - other.start) > 1e-12 * max(1.0, abs(self.end)):
            raise ValueError("curves do not share the junction point")
        return Curve(np.concatenate([self.vertices, other.vertices[1:]]))

    def densify(self, max_step: float) -> "Curve":
        """Subdivide segments so none is longer than ``max_step``; vertices are kept."""
        v = self.vertices
        out = [v[:1]]
        for a, b in zip(v[:-1], v[1:]):
            k = max(1, int(math.ceil(abs(b - a) / max_step)))
            out.append(a + (b - a) * np.arange(1, k + 1) / k)
        return Curve(np.concatenate(out))

    def __len__(self) -> int:
        return len(self.vertices)


def as_curve(c) -> Curve:
    return c if isinstance(c, Curve) else Curve(np.asarray(c, dtype=complex))


def parse_point(text: str) -> complex:
    """Parse ``"x,y"`` into a complex number."""
    x, y = (float(t) for t in text.split(","))
    return complex(x, y)


def sample_domain_points(dom: DomainSpec, n: int, rng: np.random.Generator,
                         window: Sequence[float] | None = None, min_dist: float = 0.0) -> np.ndarray:
    """Rejection-sample ``n`` domain points in a window with a boundary clearance."""
    x0, y0, x1, y1 = window if window is not None else dom.bbox(pad=0.5)
    out: list[np.ndarray] = []
    got = 0
    for _ in range(200):
        z = rng.uniform(x0, x1, 4 * n) + 1j * rng.uniform(y0, y1, 4 * n)
        ok = dom.contains(z)
        if min_dist > 0:
            ok &= dom.boundary_distance(z) >= min_dist
        z = z[ok]
        out.append(z)
        got += z.size
        if got >= n:
            break
    pts = np.concatenate(out)[:n]
    if pts.size < n:
        raise InvalidDomain("could not sample enough domain points in the window")
    return pts
