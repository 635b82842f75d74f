"""Error of the computed quasihyperbolic distance against closed forms as h shrinks."""

from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass

from circuma.domain import Disc, DomainSpec, HalfPlane
from circuma.qh_metric import qh_distance


@dataclass
class SweepConfig:
    h_max: float = 4e-3
    levels: int = 5


CASES = {
    "half-plane k(i, 2i)": (DomainSpec((HalfPlane(0, 1j),), False), 1j, 2j, math.log(2)),
    "disc k(0, 1/2)": (DomainSpec((Disc(0, 1, outer=True),), False), 0j, 0.5 + 0j, math.log(2)),
    "disc k(0, 0.9)": (DomainSpec((Disc(0, 1, outer=True),), False), 0j, 0.9 + 0j, math.log(10)),
    "half-plane k(i, 3+i)": (DomainSpec((HalfPlane(0, 1j),), False), 1j, 3 + 1j, math.acosh(5.5)),
}


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--h-max", type=float, default=SweepConfig.h_max)
    p.add_argument("--levels", type=int, default=SweepConfig.levels)
    args = p.parse_args(argv)
    cfg = SweepConfig(args.h_max, args.levels)
    print(f"{'case':24s} {'h':>9s} {'graph':>12s} {'refined':>12s} {'rel err':>10s} {'sec':>6s}")
    for name, (dom, x, y, exact) in CASES.items():
        for k in range(cfg.levels):
            h = cfg.h_max / 2**k
            t0 = time.perf_counter()
            res = qh_distance(dom, x, y, h=h)
            dt = time.perf_counter() - t0
            err = abs(res.value - exact) / exact
            print(f"{name:24s} {h:9.2e} {res.graph_value:12.8f} {res.value:12.8f} {err:10.2e} {dt:6.2f}")


if __name__ == "__main__":
    main()
