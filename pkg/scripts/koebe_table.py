"""Koebe iteration on the shipped slit and disc domains: sweeps, circularity, a1 and ring moduli."""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from circuma import koebe
from circuma.domain import Point, load_domain

DOMAINS = Path(__file__).resolve().parents[1] / "domains"
DEFAULT = ("two_discs", "slit", "two_slit", "skew_slits", "slit_and_disc", "multi_scale", "disc_grid")


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("names", nargs="*", default=DEFAULT)
    p.add_argument("--tol", type=float, default=1e-6)
    args = p.parse_args(argv)
    print(f"{'domain':14s} {'sweeps':>6s} {'steps':>6s} {'circularity':>12s} {'a1':>24s} "
          f"{'mod before':>11s} {'mod after':>11s} {'sec':>6s}")
    for name in args.names:
        dom = load_domain(DOMAINS / f"{name}.json")
        t0 = time.perf_counter()
        res = koebe.koebe_iterate(dom, tol=args.tol)
        dt = time.perf_counter() - t0
        before = after = float("nan")
        if len(dom.components) == 2 and not any(isinstance(c, Point) for c in dom.components):
            before = koebe.ring_modulus(dom)
            after = koebe.circle_domain_modulus(res.circle_domain)
        a1 = complex(res.a1)
        print(f"{name:14s} {res.trace.sweeps:6d} {sum(res.trace.steps):6d} {res.trace.max_residuals()[-1]:12.2e} "
              f"{a1.real:11.7f}{a1.imag:+11.7f}j  {before:11.6f} {after:11.6f} {dt:6.2f}")


if __name__ == "__main__":
    main()
