from __future__ import annotations

import numpy as np

from circuma.svg import render_svg
from conftest import domain


def test_one_path_per_component_and_deterministic(tmp_path):
    dom = domain("slit_and_disc")
    overlays = [{"curve": np.array([0, 1 + 1j, 2j])}, {"circle": (0, 3)},
                {"cigar": (np.array([0, 1j]), np.array([0.1, 0.2]))}]
    a = render_svg(dom, overlays, tmp_path / "a.svg")
    b = render_svg(dom, overlays)
    assert a == b == (tmp_path / "a.svg").read_text()
    assert a.count("<path") == len(dom.components)
    assert a.count("<polyline") == 1 and a.count("<circle") == 3


def test_unbounded_components_render():
    for name in ("unit_disc", "half_plane", "annulus"):
        text = render_svg(domain(name))
        assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
