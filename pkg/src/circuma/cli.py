"""Command-line entry point: ``circuma <subcommand> ...``.

Exit codes: 0 when every hard check passes, 1 when a check fails, 2 on bad
input or a numerical failure (any ``CircumaError``).
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import koebe
from .approximation import approximation_sequence
from .domain import (Disc, DomainSpec, Point, Segment, dump_domain, load_domain, parse_point,
                     sample_domain_points)
from .errors import CircumaError
from .hyperbolicity import delta_four_point, delta_thin_triangles
from .qh_metric import build_graph, qh_distance, verify_comparison
from .report import Report
from .sphere_bridge import (check_distance_lemma, complement_radius, spherical_to_euclidean_surgery)
from .svg import render_svg
from .uniformity import (check_llc, count_large_components, estimate_uniformity, llc_samples,
                         verify_bounded_turning, verify_separation)


@dataclass
class RunConfig:
    h: float | None = None
    tol_circ: float = 1e-6
    tol_fit: float = 1e-6
    slack: float = 0.02
    samples: int = 20
    seed: int = 0
    out: str = "."
    svg: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.h is not None and not self.h > 0:
            raise ValueError("h must be positive")
        if min(self.tol_circ, self.tol_fit, self.slack) <= 0:
            raise ValueError("tolerances must be positive")


CONFIG_KEYS = ("h", "tol_circ", "tol_fit", "slack", "samples", "seed", "out", "svg")


def make_config(args) -> RunConfig:
    base: dict = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for k in CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            base[k] = v
    return RunConfig(**{k: v for k, v in base.items() if k in CONFIG_KEYS})


def _echo(cfg: RunConfig, **more) -> dict:
    d = {k: v for k, v in asdict(cfg).items() if k not in ("extra", "out")}
    d.update(more)
    return {k: v for k, v in d.items() if v is not None}


def _pairs(dom: DomainSpec, n: int, seed: int, clearance: float = 0.0):
    rng = np.random.default_rng(seed)
    pts = sample_domain_points(dom, n, rng, min_dist=clearance)
    return list(itertools.combinations(pts.tolist(), 2))


# ---------------------------------------------------------------------------
# subcommands; each fills a Report and returns it


def cmd_qh_dist(args, cfg: RunConfig) -> Report:
    dom = load_domain(args.domain)
    x, y = parse_point(args.from_), parse_point(args.to)
    res = qh_distance(dom, x, y, args.flavor, cfg.h)
    rep = Report("qh-dist", _echo(cfg, flavor=args.flavor, domain=Path(args.domain).name))
    rep.estimate("k", res.value, "qh_distance")
    rep.estimate("k_graph", res.graph_value, "qh_graph")
    rep.estimate("resolution", res.resolution, "qh_graph")
    if cfg.svg:
        render_svg(dom, [{"curve": res.path.vertices}], Path(cfg.out) / "qh-dist.svg")
    return rep


def cmd_delta(args, cfg: RunConfig) -> Report:
    dom = load_domain(args.domain)
    h = cfg.h or 0.02
    graph = build_graph(dom, h, dom.bbox(pad=args.pad) if dom.contains_infinity else None)
    est = delta_four_point(dom, args.m, args.flavor, h, graph=graph, seed=cfg.seed)
    rep = Report("delta-estimate", _echo(cfg, m=args.m, flavor=args.flavor, domain=Path(args.domain).name))
    rep.estimate("delta_four_point", est.delta_four_point, "delta_four_point")
    rep.estimate("tuples", est.tuples_scanned, "delta_four_point")
    if args.thin:
        p = est.samples
        tris = [p[k : k + 3] for k in range(0, min(len(p) - 2, 3 * args.thin), 3)]
        rep.estimate("delta_thin", delta_thin_triangles(dom, tris, args.flavor, graph=graph), "delta_thin")
    return rep


def cmd_check_uniform(args, cfg: RunConfig) -> Report:
    dom = load_domain(args.domain)
    rep = Report("check-uniform", _echo(cfg, domain=Path(args.domain).name))
    pairs = _pairs(dom, cfg.samples, cfg.seed)[: args.pairs]
    A, _ = estimate_uniformity(dom, pairs, cfg.h)
    rep.estimate("A_est", A, "uniformity")
    sep = verify_separation(dom, A)
    rep.estimate("separation_ratio", sep.worst_ratio, "separation")
    rep.check("separation_implied_A", sep.implied_A_lower, A + 1, sep.implied_A_lower <= A + 1, "separation")
    for k, c in enumerate(dom.components):
        if c.bounded and not isinstance(c, Point):
            tr = verify_bounded_turning(c, 32, seed=cfg.seed)
            rep.estimate(f"bounded_turning[{k}]", tr.L_est, "bounded_turning")
    if args.llc:
        llc = check_llc(dom, llc_samples(dom, args.llc, cfg.seed), args.M)
        rep.estimate("llc_M1", llc.worst_M1, "llc")
        rep.estimate("llc_M2", llc.worst_M2, "llc")
    return rep


def cmd_verify_geometry(args, cfg: RunConfig) -> Report:
    dom = load_domain(args.domain)
    rep = Report("verify-geometry", _echo(cfg, domain=Path(args.domain).name))
    if not dom.contains_infinity:
        pairs = _pairs(dom, cfg.samples, cfg.seed, clearance=1e-3)
        cmp = verify_comparison(dom, pairs, cfg.h, cfg.slack)
        rep.check("comparison_low", cmp.worst_low, cmp.lower * (1 - cfg.slack),
                  cmp.worst_low >= cmp.lower * (1 - cfg.slack), "comparison")
        rep.check("comparison_high", cmp.worst_high, cmp.upper * (1 + cfg.slack),
                  cmp.worst_high <= cmp.upper * (1 + cfg.slack), "comparison")
        rep.estimate("density_ratio_min", cmp.density_ratio_range[0], "density_ratio")
        rep.estimate("density_ratio_max", cmp.density_ratio_range[1], "density_ratio")
    else:
        a = complement_radius(dom)
        rng = np.random.default_rng(cfg.seed)
        z = sample_domain_points(dom, cfg.samples, rng, window=(-a, -a, a, a))
        z = z[np.abs(z) <= a]
        if z.size:
            lem = check_distance_lemma(dom, a, z)
            rep.check("distance_lemma", int((~(lem.first & lem.second & lem.third)).sum()), 0,
                      lem.all_hold, "distance_lemma")
    sep = verify_separation(dom)
    rep.estimate("separation_ratio", sep.worst_ratio, "separation")
    if args.r and args.R:
        cnt = count_large_components(dom, args.r, args.R)
        rep.check("count", cnt.count, cnt.bound, cnt.count <= cnt.bound, "counting")
    return rep


def cmd_approximate(args, cfg: RunConfig) -> Report:
    dom = load_domain(args.domain)
    th = [float(t) for t in args.thresholds.split(",")]
    seq = approximation_sequence(dom, th)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rep = Report("approximate", _echo(cfg, thresholds=args.thresholds, domain=Path(args.domain).name))
    rep.check("nesting", True, True, True, "nesting")
    for n, d in enumerate(seq.domains):
        dump_domain(d, out / f"stage_{n + 1}.json")
        rep.estimate(f"stage_{n + 1}.components", len(d.components), "nesting")
    rep.estimate("residual_components", len(seq.residual), "nesting")
    return rep


def cmd_uniformize(args, cfg: RunConfig) -> Report:
    dom = load_domain(args.domain)
    koebe.FIT_TOL = cfg.tol_fit
    res = koebe.koebe_iterate(dom, args.max_sweeps, cfg.tol_circ)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    dump_domain(res.circle_domain.to_domain(f"{dom.name}|circle" if dom.name else "circle"), out / "circle_domain.json")
    res.chain.dump(out / "mapchain.json")
    rep = Report("uniformize", _echo(cfg, max_sweeps=args.max_sweeps, domain=Path(args.domain).name))
    last = max(res.trace.residuals[-1]) if res.trace.residuals[-1] else 0.0
    rep.check("circularity", last, cfg.tol_circ, last < cfg.tol_circ, "circularity")
    rep.estimate("sweeps", res.trace.sweeps, "circularity")
    rep.estimate("a1", complex(res.a1), "a1")
    for k, (c, r) in enumerate(res.circle_domain.discs):
        rep.estimate(f"disc[{k}]", f"{c.real:.12g},{c.imag:.12g},{r:.12g}", "circularity")
    solid = [c for c in dom.components if not isinstance(c, Point)]
    if len(solid) == 2 and len(dom.components) == 2:
        before = koebe.ring_modulus(dom)
        after = koebe.circle_domain_modulus(res.circle_domain)
        rel = abs(after - before) / before
        rep.check("modulus_rel_diff", rel, 0.03, rel <= 0.03, "modulus")
    if cfg.svg:
        render_svg(res.circle_domain.to_domain(), (), out / "uniformized.svg")
        render_svg(dom, (), out / "input.svg")
    return rep


def cmd_sphere_check(args, cfg: RunConfig) -> Report:
    dom = load_domain(args.domain)
    a = args.a or complement_radius(dom)
    rep = Report("sphere-check", _echo(cfg, a=a, domain=Path(args.domain).name))
    rng = np.random.default_rng(cfg.seed)
    z = sample_domain_points(dom, cfg.samples, rng, window=(-a, -a, a, a))
    z = z[np.abs(z) <= a]
    if z.size:
        lem = check_distance_lemma(dom, a, z)
        rep.check("distance_lemma_failures", int((~(lem.first & lem.second & lem.third)).sum()), 0,
                  lem.all_hold, "distance_lemma")
    if args.curve:
        pts = np.array([complex(x, y) for x, y in json.loads(Path(args.curve).read_text(encoding="utf-8"))])
        sr = spherical_to_euclidean_surgery(pts, dom, a)
        rep.estimate("case", sr.case, "surgery_arc")
        for k, (_, _, length, bound) in enumerate(sr.replacements):
            rep.check(f"arc[{k}]", length, bound, length <= bound * (1 + 1e-12), "surgery_arc")
        if sr.length_ratio_bound_ok is not None:
            rep.check("length_bound", sr.output.length, 2 * sr.K * sr.input.spherical_length,
                      sr.length_ratio_bound_ok, "surgery_length")
        rep.estimate("A_verified", sr.A_verified, "uniformity")
        if cfg.svg:
            ov = [{"curve": sr.input.vertices, "color": "#999"}, {"curve": sr.output.vertices}]
            ov += [{"circle": (0, k * a)} for k in (1, 2, 3)]
            render_svg(dom, ov, Path(cfg.out) / "surgery.svg", window=(-4 * a, -4 * a, 4 * a, 4 * a))
    return rep


def demo_domains() -> dict:
    return {
        "disc": DomainSpec((Disc(0, 1, outer=True),), False, "unit-disc"),
        "slit": DomainSpec((Segment(-2, 2),), True, "slit"),
        "two-slit": DomainSpec((Segment(-2, -1), Segment(1, 2)), True, "two-slit"),
        "two-discs": DomainSpec((Disc(-2, 1), Disc(2, 0.5)), True, "two-discs"),
    }


def cmd_demo(args, cfg: RunConfig) -> Report:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    doms = demo_domains()
    for name, d in doms.items():
        dump_domain(d, out / f"{name}.json")
    rep = Report("demo", _echo(cfg))
    k = qh_distance(doms["disc"], 0, 0.5).value
    rep.check("disc_k(0,1/2)", k, math.log(2), abs(k - math.log(2)) <= 0.01 * math.log(2), "qh_distance")
    res = koebe.koebe_iterate(doms["slit"])
    rep.check("slit_a1", complex(res.a1), -1, abs(res.a1 + 1) <= 1e-3, "a1")
    res2 = koebe.koebe_iterate(doms["two-slit"])
    rep.estimate("two_slit_a1", complex(res2.a1), "a1")
    return rep


COMMANDS = {
    "qh-dist": cmd_qh_dist,
    "delta-estimate": cmd_delta,
    "check-uniform": cmd_check_uniform,
    "verify-geometry": cmd_verify_geometry,
    "approximate": cmd_approximate,
    "uniformize": cmd_uniformize,
    "sphere-check": cmd_sphere_check,
    "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circuma", description="Quasihyperbolic geometry and circle-domain uniformization.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig defaults (flags override)")
    common.add_argument("--h", type=float, help="graph resolution")
    common.add_argument("--tol-circ", dest="tol_circ", type=float)
    common.add_argument("--tol-fit", dest="tol_fit", type=float)
    common.add_argument("--slack", type=float)
    common.add_argument("--samples", type=int, help="number of random sample points")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--report", help="report file name inside --out (default <command>.txt)")
    common.add_argument("--svg", action="store_true", help="write SVG renderings")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    s = add("qh-dist", "quasihyperbolic distance between two points")
    s.add_argument("--domain", required=True)
    s.add_argument("--from", dest="from_", required=True, metavar="X,Y")
    s.add_argument("--to", required=True, metavar="X,Y")
    s.add_argument("--flavor", default="euclidean", choices=["euclidean", "spherical"])
    s = add("delta-estimate", "four-point Gromov constant estimate")
    s.add_argument("--domain", required=True)
    s.add_argument("--m", type=int, default=40)
    s.add_argument("--flavor", default="euclidean", choices=["euclidean", "spherical"])
    s.add_argument("--pad", type=float, default=1.0, help="window padding for domains containing infinity")
    s.add_argument("--thin", type=int, default=0, help="also evaluate this many thin triangles")
    s = add("check-uniform", "inner uniformity estimate with separation and turning checks")
    s.add_argument("--domain", required=True)
    s.add_argument("--pairs", type=int, default=10)
    s.add_argument("--llc", type=int, default=0, help="number of LLC samples")
    s.add_argument("--M", type=float, default=2.0)
    s = add("verify-geometry", "flavor comparison or distance comparison, separation and counting")
    s.add_argument("--domain", required=True)
    s.add_argument("--r", type=float)
    s.add_argument("--R", type=float)
    s = add("approximate", "nested approximations by diameter thresholds")
    s.add_argument("--domain", required=True)
    s.add_argument("--thresholds", required=True, help="comma-separated, strictly decreasing")
    s = add("uniformize", "Koebe iteration onto a circle domain")
    s.add_argument("--domain", required=True)
    s.add_argument("--max-sweeps", dest="max_sweeps", type=int, default=50)
    s = add("sphere-check", "spherical/Euclidean distance comparison and curve surgery")
    s.add_argument("--domain", required=True)
    s.add_argument("--a", type=float)
    s.add_argument("--curve", help="JSON list of [x, y] vertices")
    add("demo", "run a few checks on built-in domains")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = make_config(args)
        rep = COMMANDS[args.command](args, cfg)
    except (CircumaError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"circuma {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    rep.wall_time = time.perf_counter() - t0
    path = rep.write(Path(cfg.out) / (args.report or f"{args.command}.txt"))
    sys.stdout.write(rep.render())
    print(f"report written to {path}", file=sys.stderr)
    return 1 if rep.failures else 0


if __name__ == "__main__":
    sys.exit(main())
