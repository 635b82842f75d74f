"""Elementary conformal maps and their compositions.

Every map here is vectorized over complex arrays.  Steps that send infinity
to infinity expose ``a1``, the 1/z coefficient of their expansion when they
are normalized as ``z + a1/z + ...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateAtInfinity, NoConvergence


def _poly_inv_horner(coef: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """S = sum_k coef[k-1] u^k and dS/du for k = 1..M (Horner)."""
    S = np.zeros_like(u)
    dS = np.zeros_like(u)
    for k in range(len(coef), 0, -1):
        dS = dS * u + k * coef[k - 1]
        S = (S + coef[k - 1]) * u
    return S, dS


@dataclass(frozen=True)
class Affine:
    a: complex
    b: complex = 0j
    kind = "affine"

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("affine map needs a != 0")

    def __call__(self, z):
        return self.a * np.asarray(z, dtype=complex) + self.b

    @property
    def a1(self) -> complex:
        return 0j

    def to_record(self):
        return {"affine": {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag]}}


def inverse_joukowski(zeta):
    """Branch of the inverse of w + 1/w mapping the complement of [-2, 2] outside the unit circle."""
    zeta = np.asarray(zeta, dtype=complex)
    return 0.5 * (zeta + np.sqrt(zeta - 2) * np.sqrt(zeta + 2))


@dataclass(frozen=True)
class InvJoukowski:
    """Opens the segment ``center + t * exp(i rotation)``, |t| <= halflength, onto a circle.

    Normalized at infinity; the image circle has radius ``halflength / 2``.
    """

    center: complex
    halflength: float
    rotation: float
    kind = "inv_joukowski"

    def __call__(self, z):
        e = np.exp(1j * self.rotation)
        zeta = 2.0 * (np.asarray(z, dtype=complex) - self.center) / (self.halflength * e)
        return self.center + 0.5 * self.halflength * e * inverse_joukowski(zeta)

    @property
    def a1(self) -> complex:
        return -0.25 * self.halflength**2 * np.exp(2j * self.rotation)

    def to_record(self):
        c = complex(self.center)
        return {"inv_joukowski": {"center": [c.real, c.imag], "halflength": self.halflength,
                                  "rotation": self.rotation}}


@dataclass(frozen=True)
class Laurent:
    """w -> cap * w + c0 + sum_k coeffs[k-1] * w^-k, defined for |w| >= 1."""

    cap: complex
    c0: complex
    coeffs: tuple = ()
    kind = "laurent"

    @property
    def carr(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        S, _ = _poly_inv_horner(self.carr, 1.0 / w)
        return self.cap * w + self.c0 + S

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        u = 1.0 / w
        _, dS = _poly_inv_horner(self.carr, u)
        return self.cap - dS * u * u

    @property
    def a1(self) -> complex:
        """1/w coefficient of the normalized map (g - c0) / cap."""
        c1 = self.carr[0] if len(self.coeffs) else 0j
        return c1 / self.cap

    def inverse(self, z, tol: float = 1e-14, maxiter: int = 60):
        """Newton solve of g(w) = z with the affine part as predictor."""
        z = np.asarray(z, dtype=complex)
        w = (z - self.c0) / self.cap
        scale = np.maximum(1.0, np.abs(z))
        for _ in range(maxiter):
            r = self(w) - z
            if np.all(np.abs(r) <= tol * scale):
                return w
            step = r / self.derivative(w)
            # damp steps that would jump inside the unit circle
            wn = w - step
            bad = np.abs(wn) < 0.5
            wn = np.where(bad, w - 0.5 * step, wn)
            w = wn
        r = np.abs(self(w) - z)
        if np.any(r > 1e-9 * scale):
            raise NoConvergence("Newton inverse of an exterior Laurent map did not converge")
        return w

    def to_record(self):
        return {"laurent": {"cap": [complex(self.cap).real, complex(self.cap).imag],
                            "c0": [complex(self.c0).real, complex(self.c0).imag],
                            "coeffs": [[c.real, c.imag] for c in self.carr]}}


@dataclass(frozen=True)
class LaurentInverse:
    """z -> cap * g^{-1}(z) + c0 for an exterior map g; sends the curve g(|w|=1) to a circle."""

    g: Laurent
    kind = "laurent_inverse"

    def __call__(self, z):
        return self.g.cap * self.g.inverse(z) + self.g.c0

    @property
    def a1(self) -> complex:
        c1 = self.g.carr[0] if len(self.g.coeffs) else 0j
        return -self.g.cap * c1

    def to_record(self):
        return {"laurent_inverse": self.g.to_record()["laurent"]}


@dataclass(frozen=True)
class ArcSqrt:
    """z -> M(sqrt((z - a)/(z - b))) with the square-root cut along a given arc from a to b.

    ``M(w) = (w - 1)/(w + 1)``; infinity goes to 0 and the exterior of the arc
    to a Jordan region around 0.  The cut is described by the argument
    ``psi`` of ``(z-a)/(z-b)`` on the arc as a function of ``log|(z-a)/(z-b)|``.
    """

    a: complex
    b: complex
    s_knots: tuple
    psi_knots: tuple
    kind = "arc_sqrt"

    def sqrt_branch(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (z - self.a) / (z - self.b)
        s = np.log(np.abs(t))
        psi = np.interp(s, self.s_knots, self.psi_knots)
        th = np.angle(t)
        th = psi - np.mod(psi - th, 2 * np.pi)
        return np.sqrt(np.abs(t)) * np.exp(0.5j * th)

    def __call__(self, z):
        w = self.sqrt_branch(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (w - 1.0) / (w + 1.0)
        return np.where(np.isinf(np.abs(w)), 1.0 + 0j, out)

    def to_record(self):
        return {"arc_sqrt": {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag],
                             "s": list(self.s_knots), "psi": list(self.psi_knots)}}


@dataclass(frozen=True)
class TaylorInverse:
    """Inverse of phi(z) = sum_k coeffs[k-1] z^k (a near-identity disc map), by Newton."""

    coeffs: tuple
    kind = "taylor_inverse"

    @property
    def carr(self):
        return np.asarray(self.coeffs, dtype=complex)

    def forward(self, z):
        c = self.carr
        return _poly_inv_horner(c, np.asarray(z, dtype=complex))

    def __call__(self, w, tol: float = 1e-14, maxiter: int = 60):
        w = np.asarray(w, dtype=complex)
        z = w / self.carr[0]
        for _ in range(maxiter):
            f, df = self.forward(z)
            r = f - w
            if np.all(np.abs(r) <= tol):
                return z
            z = z - r / df
        f, _ = self.forward(z)
        if np.any(np.abs(f - w) > 1e-9):
            raise NoConvergence("Newton inverse of a disc map did not converge")
        return z

    def to_record(self):
        return {"taylor_inverse": {"coeffs": [[c.real, c.imag] for c in self.carr]}}


@dataclass(frozen=True)
class Inversion:
    kind = "inversion"

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / z

    def to_record(self):
        return {"inversion": {}}


@dataclass(frozen=True)
class Composite:
    """A fixed sequence of steps acting as one normalized step (``a1`` measured numerically)."""

    parts: tuple
    a1_value: complex = 0j
    kind = "composite"

    def __call__(self, z):
        for p in self.parts:
            z = p(z)
        return z

    @property
    def a1(self) -> complex:
        return self.a1_value

    def to_record(self):
        return {"composite": {"parts": [p.to_record() for p in self.parts],
                              "a1": [self.a1_value.real, self.a1_value.imag]}}


def laurent_at_infinity(f, center: complex, rho: float, n: int = 256) -> tuple[complex, complex, complex]:
    """(lead, a0, a1) of f(z) = lead * z + a0 + a1 / z + ... sampled on |z - center| = rho."""
    th = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * th)
    vals = f(center + rho * e)
    if not np.all(np.isfinite(vals)):
        raise DegenerateAtInfinity("map is not finite on the sampling circle")
    lead = np.mean(vals * np.conj(e)) / rho
    b0 = np.mean(vals)
    b1 = np.mean(vals * e) * rho
    # re-expand about 0: lead*(z - c) + b0 + b1/(z - c) = lead z + (b0 - lead c) + b1/z + O(z^-2)
    return complex(lead), complex(b0 - lead * center), complex(b1)


@dataclass
class MapChain:
    """Composition of elementary maps, applied in list order."""

    steps: list = field(default_factory=list)
    center: complex = 0j
    radius: float = 1.0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        for s in self.steps:
            z = s(z)
        return z

    def append(self, step) -> "MapChain":
        self.steps.append(step)
        return self

    def copy(self) -> "MapChain":
        return MapChain(list(self.steps), self.center, self.radius)

    @property
    def a1_sum(self) -> complex:
        """Sum of per-step a1 values (valid when every step is normalized)."""
        return complex(sum(s.a1 for s in self.steps)) if self.steps else 0j

    def laurent_at_infinity(self, rho_factor: float = 4.0) -> tuple[complex, complex, complex]:
        return laurent_at_infinity(self, self.center, rho_factor * self.radius)

    def to_dict(self) -> dict:
        c = complex(self.center)
        return {"center": [c.real, c.imag], "radius": self.radius,
                "steps": [s.to_record() for s in self.steps]}

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")


def _cx(v) -> complex:
    return complex(v[0], v[1])


def step_from_record(rec: dict):
    (tag, v), = rec.items()
    if tag == "affine":
        return Affine(_cx(v["a"]), _cx(v["b"]))
    if tag == "inv_joukowski":
        return InvJoukowski(_cx(v["center"]), v["halflength"], v["rotation"])
    if tag == "laurent":
        return Laurent(_cx(v["cap"]), _cx(v["c0"]), tuple(_cx(c) for c in v["coeffs"]))
    if tag == "laurent_inverse":
        return LaurentInverse(Laurent(_cx(v["cap"]), _cx(v["c0"]), tuple(_cx(c) for c in v["coeffs"])))
    if tag == "arc_sqrt":
        return ArcSqrt(_cx(v["a"]), _cx(v["b"]), tuple(v["s"]), tuple(v["psi"]))
    if tag == "taylor_inverse":
        return TaylorInverse(tuple(_cx(c) for c in v["coeffs"]))
    if tag == "inversion":
        return Inversion()
    if tag == "composite":
        return Composite(tuple(step_from_record(p) for p in v["parts"]), _cx(v["a1"]))
    raise ValueError(f"unknown step tag {tag!r}")


def load_chain(path) -> MapChain:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    return MapChain([step_from_record(r) for r in d["steps"]], _cx(d["center"]), d["radius"])


def normalize_at_infinity(chain: MapChain, tol: float = 1e-13) -> MapChain:
    """Post-compose with the affine map making the expansion ``z + a1/z + ...``.

    Returns the same chain object when it is already normalized.
    """
    lead, a0, _ = chain.laurent_at_infinity()
    if not np.isfinite(lead) or abs(lead) < 1e-300:
        raise DegenerateAtInfinity("derivative at infinity vanishes")
    if abs(lead - 1) <= tol and abs(a0) <= tol * max(1.0, chain.radius):
        return chain
    out = chain.copy()
    out.append(Affine(1.0 / lead, -a0 / lead))
    return out
