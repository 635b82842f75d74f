"""Line-oriented key=value reports with a fixed anchor per check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

# Each check cites the inequality or formula it measures.
ANCHORS = {
    "qh_distance": "k(x,y) = inf over curves of the integral of |dz| / dist(z, boundary)",
    "qh_graph": "graph upper estimate of k(x,y) on the Whitney node graph",
    "comparison": "(pi sqrt 2)^-1 k_e <= k_sigma <= 3(2+D) k_e",
    "density_ratio": "pointwise ratio of spherical to Euclidean quasihyperbolic density",
    "delta_four_point": "(x|y)_w >= min((x|z)_w, (y|z)_w) - delta",
    "delta_thin": "each side within delta of the union of the other two",
    "uniformity": "l(g) <= A lambda(x,y) and min side <= A dist(g(t), boundary)",
    "separation": "dist(E, F) >= min(diam E, diam F) / C with C = 2(A+1)^2",
    "counting": "N <= 8 C^2 (1 + R^2 / r^2) by disjoint balls of radius r/(2C)",
    "bounded_turning": "diam of a connecting subset <= L |p - q|",
    "llc": "pairs in B(a,r) joined in B(a,Mr); pairs outside B(a,r) joined outside B(a,r/M)",
    "nesting": "complements grow with n and stay inside the full complement",
    "circularity": "max boundary deviation from the best-fit circle / radius",
    "a1": "f(z) = z + a1/z + O(z^-2) at infinity",
    "modulus": "mod = 2 pi / log(R/r) for the ring r < |z| < R",
    "rigidity": "max residual of the best affine fit between two uniformizers",
    "distance_lemma": "d_sig(z, C minus D) <= d_sig(z, comp D) <= C(a) d_sig(z, C minus D) <= 2 C(a) d_e",
    "surgery_arc": "length of the minor arc <= (pi/2) |z1 - z2|",
    "surgery_length": "l_e(output) <= 2 K(a) l_sigma(input), K(a) = (1 + 9a^2)/2",
    "bilipschitz": "k_sigma(f x, f y) / k_sigma(x, y) in [1/L, L]",
}


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return f"{fmt(v.real)},{fmt(v.imag)}"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(v)


@dataclass
class Record:
    name: str
    measured: object
    bound: object = None
    status: str = "estimate"  # pass | fail | estimate
    anchor_key: str = ""

    def line(self) -> str:
        parts = [f"record={self.name}", f"measured={fmt(self.measured)}"]
        if self.bound is not None:
            parts.append(f"bound={fmt(self.bound)}")
        parts.append(f"status={self.status}")
        parts.append(f'anchor="{ANCHORS[self.anchor_key]}"')
        return " ".join(parts)


@dataclass
class Report:
    command: str
    config: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    wall_time: float = 0.0

    def estimate(self, name: str, value, anchor: str) -> None:
        self.records.append(Record(name, value, None, "estimate", anchor))

    def check(self, name: str, value, bound, ok: bool, anchor: str) -> bool:
        self.records.append(Record(name, value, bound, "pass" if ok else "fail", anchor))
        return ok

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.status == "fail"]

    def render(self) -> str:
        lines = [f"command={self.command}"]
        lines += [f"config.{k}={fmt(v)}" for k, v in sorted(self.config.items())]
        lines += [r.line() for r in self.records]
        lines.append(f"summary checks={sum(r.status != 'estimate' for r in self.records)} failures={len(self.failures)}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> Path:
        """Write the report; wall time goes to a ``.time`` sidecar so the report itself is reproducible."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="utf-8")
        path.with_suffix(path.suffix + ".time").write_text(f"wall_time_s={self.wall_time:.3f}\n", encoding="utf-8")
        return path
