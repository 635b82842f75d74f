"""Koebe iteration onto circle domains, with rigidity and modulus checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial.distance import directed_hausdorff

from .domain import Component, Disc, DomainSpec, Point, Polyline, Segment
from .errors import (BadRadii, EmptySet, FitResidualTooLarge, InvalidDomain, NoConvergence,
                     NotStarlike)
from .mapchain import (Affine, ArcSqrt, Composite, InvJoukowski, Inversion, Laurent, LaurentInverse,
                       MapChain, TaylorInverse, laurent_at_infinity, normalize_at_infinity)

N_ANCHORS = 1024
MODES = 64
FIT_TOL = 1e-6


@dataclass(frozen=True)
class CircleDomain:
    discs: tuple  # of (center, radius)
    points: tuple = ()
    contains_infinity: bool = True

    def __post_init__(self):
        for c, r in self.discs:
            if not r > 0:
                raise InvalidDomain("disc radii must be positive")
        d = self.discs
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if abs(d[i][0] - d[j][0]) <= d[i][1] + d[j][1]:
                    raise InvalidDomain(f"discs {i} and {j} overlap")
            for p in self.points:
                if abs(p - d[i][0]) <= d[i][1]:
                    raise InvalidDomain(f"point {p} lies in disc {i}")

    def to_domain(self, name: str = "circle-domain") -> DomainSpec:
        comps = [Disc(complex(c), float(r)) for c, r in self.discs] + [Point(complex(p)) for p in self.points]
        return DomainSpec(tuple(comps), True, name)

    def samples(self, n: int = 256) -> np.ndarray:
        th = 2 * np.pi * np.arange(n) / n
        parts = [c + r * np.exp(1j * th) for c, r in self.discs] + [np.asarray(self.points, complex)]
        return np.concatenate(parts)


# ---------------------------------------------------------------------------
# boundary correspondence (Theodorsen) for starlike curves


def polygon_centroid(pts: np.ndarray) -> complex:
    x, y = pts.real, pts.imag
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    A = 0.5 * cr.sum()
    if abs(A) < 1e-300:
        return complex(pts.mean())
    return complex(((x + xn) * cr).sum() / (6 * A), ((y + yn) * cr).sum() / (6 * A))


def _polar_log_radius(pts: np.ndarray, center: complex) -> CubicSpline:
    """Periodic spline of log|z - center| against the polar angle; raises if not starlike."""
    rel = pts - center
    if np.any(np.abs(rel) < 1e-300):
        raise NotStarlike("curve passes through its star centre")
    ang = np.unwrap(np.angle(np.append(rel, rel[:1])))
    if ang[-1] < ang[0]:
        rel = rel[::-1]
        ang = np.unwrap(np.angle(np.append(rel, rel[:1])))
    if np.any(np.diff(ang) <= 0) or abs(ang[-1] - ang[0] - 2 * np.pi) > 1e-6:
        raise NotStarlike("polar angle is not monotone around the centroid")
    lr = np.log(np.abs(np.append(rel, rel[:1])))
    return CubicSpline(ang, lr, bc_type="periodic")


def theodorsen(log_radius: CubicSpline, n: int, exterior: bool, tol: float = 1e-14,
               maxiter: int = 500) -> tuple[np.ndarray, np.ndarray]:
    """Boundary correspondence angle(theta) and log radius for a starlike curve.

    Solves angle = theta + V where V is the (exterior or interior) harmonic
    conjugate of the log radius along the correspondence.
    """
    th = 2 * np.pi * np.arange(n) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    mult = (1j if exterior else -1j) * np.sign(k)
    ang = th.copy()
    relax, last = 1.0, math.inf
    for _ in range(maxiter):
        U = log_radius(ang)
        V = np.fft.ifft(mult * np.fft.fft(U - U.mean())).real
        err = np.max(np.abs(th + V - ang))
        if err > last:
            # plain iteration diverges for elongated curves; under-relax
            relax = max(relax * 0.5, 1.0 / 64)
        last = err
        ang = ang + relax * (th + V - ang)
        if err < tol:
            break
    else:
        if err > 1e-9:
            raise NoConvergence(f"boundary correspondence iteration stalled (step {err:.2e})")
    U = log_radius(ang)
    return ang, U


def _fit_modes(coefs_fn, values: np.ndarray, diam: float, max_modes: int):
    M = MODES
    while True:
        approx = coefs_fn(M)
        res = float(np.max(np.abs(approx - values)))
        if res <= FIT_TOL * diam or 2 * M > max_modes:
            return M, res
        M *= 2


def _exterior_laurent(pts: np.ndarray, n: int = N_ANCHORS) -> tuple[Laurent, float]:
    center = polygon_centroid(pts)
    spline = _polar_log_radius(pts, center)
    ang, U = theodorsen(spline, n, exterior=True)
    vals = center + np.exp(U) * np.exp(1j * ang)
    F = np.fft.fft(vals) / n
    cap = float(F[1].real)
    c0 = complex(F[0])
    w = np.exp(2j * np.pi * np.arange(n) / n)
    diam = float(np.ptp(pts.real) + np.ptp(pts.imag))

    def approx(M):
        g = Laurent(cap, c0, tuple(F[-1 : -M - 1 : -1]))
        return g(w)

    M, res = _fit_modes(approx, vals, diam, n // 2 - 2)
    g = Laurent(cap, c0, tuple(complex(c) for c in F[-1 : -M - 1 : -1]))
    if res > FIT_TOL * diam:
        raise FitResidualTooLarge(f"boundary fit residual {res:.2e} exceeds {FIT_TOL:g} x diameter")
    return g, res


def exterior_map(curve) -> tuple[Laurent, LaurentInverse, float]:
    """Exterior map g of the unit circle onto the exterior of a curve, its inverse, and the fit residual.

    ``curve`` is a Disc, a Segment, or closed samples of a starlike curve.
    """
    if isinstance(curve, Disc):
        g = Laurent(float(curve.radius), complex(curve.center), ())
        return g, LaurentInverse(g), 0.0
    if isinstance(curve, Segment):
        m, half = 0.5 * (curve.p + curve.q), 0.5 * abs(curve.q - curve.p)
        e = (curve.q - curve.p) / abs(curve.q - curve.p)
        # z = m + (half/2) e (w' + 1/w') with w' = w / e gives cap = half/2, c1 = half e^2 / 2
        g = Laurent(half / 2, complex(m), (complex(half / 2 * e * e),))
        return g, LaurentInverse(g), 0.0
    if isinstance(curve, Polyline):
        pts = curve.boundary_param(np.arange(N_ANCHORS) / N_ANCHORS)
    else:
        pts = np.asarray(getattr(curve, "vertices", curve), dtype=complex)
    if pts.size > 2 and abs(pts[0] - pts[-1]) < 1e-14 * np.abs(pts).max():
        pts = pts[:-1]
    g, res = _exterior_laurent(pts)
    return g, LaurentInverse(g), res


def _interior_taylor(pts: np.ndarray, n: int = N_ANCHORS) -> TaylorInverse:
    """Disc map onto the interior of a curve starlike about 0, fixing 0 with positive derivative."""
    spline = _polar_log_radius(pts, 0j)
    ang, U = theodorsen(spline, n, exterior=False)
    vals = np.exp(U) * np.exp(1j * ang)
    F = np.fft.fft(vals) / n
    w = np.exp(2j * np.pi * np.arange(n) / n)

    def approx(M):
        z = np.zeros_like(w)
        for k in range(M, 0, -1):
            z = (z + F[k]) * w
        return z

    M, res = _fit_modes(approx, vals, 2.0, n // 2 - 2)
    if res > FIT_TOL * 2:
        raise FitResidualTooLarge(f"slit-opening fit residual {res:.2e} too large")
    return TaylorInverse(tuple(complex(c) for c in F[1 : M + 1]))


# ---------------------------------------------------------------------------
# one Koebe step per component


def circle_fit(pts: np.ndarray) -> tuple[complex, float, float]:
    """Least-squares circle (algebraic fit); returns (center, radius, max relative deviation)."""
    x, y = pts.real, pts.imag
    A = np.column_stack([x, y, np.ones_like(x)])
    sol, *_ = np.linalg.lstsq(A, x * x + y * y, rcond=None)
    c = complex(sol[0] / 2, sol[1] / 2)
    r = math.sqrt(max(sol[2] + abs(c) ** 2, 0.0))
    d = np.abs(pts - c)
    # recentre radius on the geometric mean deviation
    r = float(0.5 * (d.max() + d.min()))
    return c, r, float(np.max(np.abs(d - r)) / r) if r > 0 else math.inf


def _unit_circle(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def _open_closed(pts: np.ndarray, n: int):
    g, _ = _exterior_laurent(pts, n)
    return LaurentInverse(g), g.cap * _unit_circle(n) + g.c0


def _open_arc(pts: np.ndarray, n: int):
    """Normalized map taking the exterior of an arc (from pts[0] to pts[-1]) onto a disc exterior."""
    a, b = complex(pts[0]), complex(pts[-1])
    mid, half = 0.5 * (a + b), 0.5 * abs(b - a)
    e = (b - a) / abs(b - a)
    off = np.abs(((pts - a) / e).imag)
    if off.max() <= 1e-12 * half:
        step = InvJoukowski(mid, half, float(np.angle(e)))
        return step, mid + 0.5 * half * e * _unit_circle(n)
    inner = pts[1:-1]
    t = (inner - a) / (inner - b)
    s = np.log(np.abs(t))
    if np.any(np.diff(s) <= 0):
        raise NotStarlike("curved slit is not monotone in its endpoint cross-ratio")
    psi = np.unwrap(np.angle(t))
    psi += 2 * np.pi * np.round((math.pi - psi[len(psi) // 2]) / (2 * math.pi))
    sq = ArcSqrt(a, b, tuple(s), tuple(psi))
    wp = np.sqrt(np.abs(t)) * np.exp(0.5j * psi)
    mp = (wp - 1) / (wp + 1)
    bnd = np.concatenate([[-1.0 + 0j], mp, [1.0 + 0j], (1.0 / mp)[::-1]])
    disc = _interior_taylor(bnd, n)
    raw = Composite((sq, disc, Inversion()))
    rho = 2.0 * float(np.abs(pts - mid).max())
    lead, a0, _ = laurent_at_infinity(raw, mid, rho)
    norm = Affine(1.0 / lead, -a0 / lead)
    probe = Composite((sq, disc, Inversion(), norm))
    _, _, a1 = laurent_at_infinity(probe, mid, rho)
    step = Composite((sq, disc, Inversion(), norm), a1)
    return step, norm(1.0 / _unit_circle(n))


def _resample_closed(pts: np.ndarray, n: int) -> np.ndarray:
    closed = np.append(pts, pts[:1])
    seg = np.abs(np.diff(closed))
    if seg.max() <= 4.0 * seg.mean():
        return pts
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    sp = CubicSpline(cum, np.column_stack([closed.real, closed.imag]), bc_type="periodic")
    xy = sp(np.arange(n) / n * cum[-1])
    return xy[:, 0] + 1j * xy[:, 1]


@dataclass
class ConvergenceTrace:
    residuals: list = field(default_factory=list)  # per sweep: list per component
    hausdorff: list = field(default_factory=list)
    steps: list = field(default_factory=list)

    @property
    def sweeps(self) -> int:
        return len(self.residuals)

    def max_residuals(self) -> list[float]:
        return [max(r) if r else 0.0 for r in self.residuals]

    def eventually_decreasing(self, last: int = 3) -> bool:
        m = self.max_residuals()[-last:]
        return all(b <= a for a, b in zip(m, m[1:]))


@dataclass
class KoebeResult:
    circle_domain: CircleDomain
    chain: MapChain
    trace: ConvergenceTrace
    a1: complex
    order: list
    tracked: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __iter__(self):
        return iter((self.circle_domain, self.chain, self.trace))


def _initial_trace(c: Component, n: int):
    if isinstance(c, Disc) and not c.outer:
        return "closed", c.boundary_param(np.arange(n) / n)
    if isinstance(c, Segment):
        t = 0.5 * (1 - np.cos(np.pi * np.linspace(0, 1, n)))
        return "arc", c.p + t * (c.q - c.p)
    if isinstance(c, Polyline) and not c.outer:
        return "closed", c.boundary_param(np.arange(n) / n)
    raise InvalidDomain(f"koebe_iterate cannot handle a {c.kind} component")


def koebe_iterate(dom: DomainSpec, max_sweeps: int = 50, tol: float = 1e-6,
                  order: Sequence[int] | None = None, track: Sequence[complex] = (),
                  n: int = N_ANCHORS) -> KoebeResult:
    """Cyclic Koebe sweeps mapping each non-point component in turn onto a circle.

    Each step is normalized at infinity, so the composed chain is too and its
    1/z coefficient is the sum of the per-step ones.  Components already
    circular to ``tol / 10`` are skipped.
    """
    if not dom.contains_infinity:
        raise InvalidDomain("koebe_iterate needs a domain containing infinity")
    solid = [k for k, c in enumerate(dom.components) if not isinstance(c, Point)]
    pts_idx = [k for k, c in enumerate(dom.components) if isinstance(c, Point)]
    if order is None:
        order = sorted(solid, key=lambda k: -dom.components[k].diameter)
    order = list(order)
    if sorted(order) != sorted(solid):
        raise ValueError("order must be a permutation of the non-point component indices")
    traces = {k: list(_initial_trace(dom.components[k], n)) for k in solid}
    passive = np.array([dom.components[k].p for k in pts_idx] + list(track), dtype=complex)
    x0, y0, x1, y1 = dom.bbox()
    chain = MapChain([], complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), 0.5 * math.hypot(x1 - x0, y1 - y0))
    trace = ConvergenceTrace()
    prev = np.concatenate([traces[k][1] for k in solid]) if solid else passive
    for sweep in range(1, max_sweeps + 1):
        taken = 0
        for k in order:
            kind, P = traces[k]
            if kind == "closed" and circle_fit(P)[2] < 0.1 * tol:
                continue
            try:
                step, newP = (_open_arc if kind == "arc" else _open_closed)(P, n)
            except NotStarlike as exc:
                raise NotStarlike(f"component {k} in sweep {sweep}: {exc}", component=k, sweep=sweep) from exc
            chain.append(step)
            taken += 1
            for j in solid:
                if j != k:
                    traces[j][1] = step(traces[j][1])
            if passive.size:
                passive = step(passive)
            traces[k] = ["closed", newP]
        for k in solid:
            if traces[k][0] == "closed":
                traces[k][1] = _resample_closed(traces[k][1], n)
        res = [circle_fit(traces[k][1])[2] if traces[k][0] == "closed" else math.inf for k in solid]
        cur = np.concatenate([traces[k][1] for k in solid]) if solid else passive
        trace.residuals.append(res)
        trace.hausdorff.append(hausdorff_distance(cur, prev) if cur.size and prev.size else 0.0)
        trace.steps.append(taken)
        prev = cur
        if not res or max(res) < tol:
            break
    else:
        raise NoConvergence(f"circularity {max(trace.residuals[-1]):.2e} after {max_sweeps} sweeps", trace=trace)
    discs = []
    for k in solid:
        c, r, _ = circle_fit(traces[k][1])
        discs.append((c, r))
    npt = len(pts_idx)
    cd = CircleDomain(tuple(discs), tuple(complex(p) for p in passive[:npt]))
    chain = normalize_at_infinity(chain)
    return KoebeResult(cd, chain, trace, chain.a1_sum, order, passive[npt:])


# ---------------------------------------------------------------------------
# diagnostics


def hausdorff_distance(E, F) -> float:
    E = np.asarray(E, dtype=complex).ravel()
    F = np.asarray(F, dtype=complex).ravel()
    if E.size == 0 or F.size == 0:
        raise EmptySet("Hausdorff distance needs two nonempty samples")
    e = np.column_stack([E.real, E.imag])
    f = np.column_stack([F.real, F.imag])
    return float(max(directed_hausdorff(e, f)[0], directed_hausdorff(f, e)[0]))


def mobius_rigidity_check(f, g, probes) -> float:
    """Max residual of the best affine fit g(p) ~ a f(p) + b, relative to the spread of g(p)."""
    p = np.asarray(probes, dtype=complex)
    fp, gp = np.asarray(f(p)), np.asarray(g(p))
    A = np.column_stack([fp, np.ones_like(fp)])
    sol, *_ = np.linalg.lstsq(A, gp, rcond=None)
    res = np.abs(A @ sol - gp)
    spread = float(np.abs(gp - gp.mean()).max())
    return float(res.max() / spread) if spread > 0 else float(res.max())


def annulus_modulus(r: float, R: float) -> float:
    if not (0 < r < R):
        raise BadRadii("need 0 < r < R")
    return 2 * math.pi / math.log(R / r)


def two_disc_modulus(d1: tuple, d2: tuple) -> float:
    """Modulus of the ring between two disjoint discs, via their inversive distance."""
    (c1, r1), (c2, r2) = d1, d2
    inv = (abs(c1 - c2) ** 2 - r1 * r1 - r2 * r2) / (2 * r1 * r2)
    if inv <= 1:
        raise BadRadii("discs are not disjoint")
    return annulus_modulus(1.0, math.exp(math.acosh(inv)))


@dataclass
class DistortionTable:
    t: np.ndarray
    ratio: np.ndarray
    triples: list

    def envelope(self) -> tuple[np.ndarray, np.ndarray]:
        """Monotone upper envelope eta(t) = max ratio over samples with t' <= t."""
        o = np.argsort(self.t)
        return self.t[o], np.maximum.accumulate(self.ratio[o])


def qs_distortion_probe(chain, dom: DomainSpec, triples, h: float | None = None, graph=None) -> DistortionTable:
    """Source inner-distance ratios against image Euclidean ratios for point triples (x, a, b)."""
    from .uniformity import _graph_for, inner_distances

    triples = [tuple(complex(v) for v in t) for t in triples]
    pts = np.array([v for t in triples for v in t], dtype=complex)
    graph = _graph_for(dom, pts, h, graph)
    cache: dict = {}

    def rho(u, v):
        key = (u, v) if (u.real, u.imag) <= (v.real, v.imag) else (v, u)
        if key not in cache:
            r = inner_distances(dom, key[0], key[1], graph=graph)
            cache[key] = math.sqrt(r.rho_lo * r.rho_hi)
        return cache[key]

    ts, rs = [], []
    for x, a, b in triples:
        ts.append(rho(x, a) / rho(x, b))
        fx, fa, fb = chain(np.array([x, a, b]))
        rs.append(abs(fx - fa) / abs(fx - fb))
    return DistortionTable(np.array(ts), np.array(rs), triples)


# ---------------------------------------------------------------------------
# ring modulus of a two-component domain from a logarithmic single layer


def _panels(c: Component, n: int) -> np.ndarray:
    """Panel endpoints (closed loop for solid components, open chain for segments)."""
    if isinstance(c, Disc) and not c.outer:
        v = c.boundary_param(np.arange(n) / n)
        return np.append(v, v[:1])
    if isinstance(c, Segment):
        t = 0.5 * (1 - np.cos(np.pi * np.linspace(0, 1, n + 1)))
        return c.p + t * (c.q - c.p)
    if isinstance(c, Polyline) and not c.outer:
        v = c.boundary_param(np.arange(n) / n)
        return np.append(v, v[:1])
    raise InvalidDomain(f"no panel discretization for a {c.kind} component")


def _panel_potential(z: np.ndarray, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
    """Integral of log|z - s| over each straight panel [p0, p1] (matrix: points x panels)."""
    L = np.abs(p1 - p0)
    e = (p1 - p0) / L
    zeta = (z[:, None] - p0[None, :]) / e[None, :]
    w = zeta - L[None, :]

    def xlogx(u):
        out = np.zeros(u.shape)
        nz = u != 0
        out[nz] = (u[nz] * np.log(u[nz])).real
        return out

    return xlogx(zeta.astype(complex)) - zeta.real - xlogx(w.astype(complex)) + w.real


def ring_modulus(dom: DomainSpec, panels: int = 400) -> float:
    """Conformal modulus of the ring between two bounded complement components.

    Solves for the harmonic measure u (0 on one component, 1 on the other,
    bounded at infinity) as a single layer with piecewise constant density;
    the modulus is 2 pi times the charge carried by one component.
    """
    comps = [c for c in dom.components]
    if len(comps) != 2 or not dom.contains_infinity or any(isinstance(c, Point) for c in comps):
        raise InvalidDomain("ring_modulus needs exactly two non-point bounded components")
    ends = [_panels(c, panels) for c in comps]
    p0 = np.concatenate([e[:-1] for e in ends])
    p1 = np.concatenate([e[1:] for e in ends])
    owner = np.concatenate([np.full(len(e) - 1, k) for k, e in enumerate(ends)])
    mid = 0.5 * (p0 + p1)
    L = np.abs(p1 - p0)
    N = mid.size
    A = np.zeros((N + 1, N + 1))
    A[:N, :N] = _panel_potential(mid, p0, p1)
    A[:N, N] = 1.0
    A[N, :N] = L
    rhs = np.append((owner == 1).astype(float), 0.0)
    sol = np.linalg.solve(A, rhs)
    charge = float(np.sum(sol[:N][owner == 1] * L[owner == 1]))
    return 2 * math.pi * abs(charge)


def circle_domain_modulus(cd: CircleDomain) -> float:
    if len(cd.discs) != 2:
        raise InvalidDomain("need exactly two discs")
    return two_disc_modulus(cd.discs[0], cd.discs[1])
