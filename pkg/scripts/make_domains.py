"""Write the shipped example domains to domains/*.json."""

from __future__ import annotations

import argparse
from pathlib import Path

from circuma.domain import Disc, DomainSpec, HalfPlane, Segment, dump_domain


def shipped() -> dict[str, DomainSpec]:
    grid = tuple(Disc(complex(x, y), 0.1) for y in (-1, 0, 1) for x in (-1, 0, 1))
    return {
        "unit_disc": DomainSpec((Disc(0, 1, outer=True),), False, "unit_disc"),
        "translated_disc": DomainSpec((Disc(5, 1, outer=True),), False, "translated_disc"),
        "disc_with_slit": DomainSpec((Disc(0, 1, outer=True), Segment(-0.5, 0.5)), False, "disc_with_slit"),
        "half_plane": DomainSpec((HalfPlane(0, 1j),), False, "half_plane"),
        "annulus": DomainSpec((Disc(0, 0.5), Disc(0, 2, outer=True)), False, "annulus"),
        "slit": DomainSpec((Segment(-2, 2),), True, "slit"),
        "two_slit": DomainSpec((Segment(-2, -1), Segment(1, 2)), True, "two_slit"),
        "skew_slits": DomainSpec((Segment(-2, -1), Segment(1 + 1j, 2 + 1.5j)), True, "skew_slits"),
        "two_discs": DomainSpec((Disc(-2, 1), Disc(2, 0.5)), True, "two_discs"),
        "slit_and_disc": DomainSpec((Segment(-1, 1), Disc(0.5 + 2j, 0.5)), True, "slit_and_disc"),
        "disc_grid": DomainSpec(grid, True, "disc_grid"),
        "close_discs": DomainSpec((Disc(-1.05, 1), Disc(1.05, 1)), True, "close_discs"),
        "multi_scale": DomainSpec((Disc(0, 1), Disc(3, 0.5), Disc(1.5j + 3, 0.25), Disc(-2.5 + 1j, 0.125)),
                                  True, "multi_scale"),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "domains"))
    out = Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    for name, dom in shipped().items():
        dom.validate()
        dump_domain(dom, out / f"{name}.json")
        print(f"wrote {out / (name + '.json')}")


if __name__ == "__main__":
    main()
