from __future__ import annotations

import json
import math

import pytest

from circuma.cli import RunConfig, build_parser, main, make_config
from circuma.domain import Disc, DomainSpec, dump_domain
from conftest import DOMAINS


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def records(text):
    out = {}
    for line in text.splitlines():
        if line.startswith("record="):
            fields = dict(kv.split("=", 1) for kv in line.split(' anchor=')[0].split())
            out[fields["record"]] = fields
    return out


def test_demo_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["demo", "--out", str(a)], capsys)[0] == 0
    assert run(["demo", "--out", str(b)], capsys)[0] == 0
    assert (a / "demo.txt").read_bytes() == (b / "demo.txt").read_bytes()
    assert (a / "demo.txt.time").exists()
    for name in ("disc", "slit", "two-slit", "two-discs"):
        assert (a / f"{name}.json").exists()


def test_qh_dist_report(tmp_path, capsys):
    code, out = run(["qh-dist", "--domain", str(DOMAINS / "half_plane.json"), "--from", "0,1", "--to", "0,2",
                     "--h", "0.002", "--out", str(tmp_path), "--svg"], capsys)
    assert code == 0
    rec = records(out.out)
    assert float(rec["k"]["measured"]) == pytest.approx(math.log(2), rel=1e-2)
    assert "anchor=" in out.out and out.out.rstrip().endswith("failures=0")
    assert (tmp_path / "qh-dist.svg").exists()


def test_uniformize_writes_outputs(tmp_path, capsys):
    code, out = run(["uniformize", "--domain", str(DOMAINS / "two_slit.json"), "--out", str(tmp_path)], capsys)
    assert code == 0
    assert records(out.out)["modulus_rel_diff"]["status"] == "pass"
    assert json.loads((tmp_path / "mapchain.json").read_text())["steps"]
    assert json.loads((tmp_path / "circle_domain.json").read_text())["components"]


def test_approximate_writes_stages(tmp_path, capsys):
    code, _ = run(["approximate", "--domain", str(DOMAINS / "multi_scale.json"), "--thresholds", "1.5,0.75,0.3",
                   "--out", str(tmp_path)], capsys)
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("stage_*.json")) == ["stage_1.json", "stage_2.json", "stage_3.json"]


def test_failed_check_exits_one(tmp_path, capsys):
    tight = tmp_path / "tight.json"
    dump_domain(DomainSpec((Disc(-1.005, 1), Disc(1.005, 1)), True, "tight"), tight)
    code, out = run(["check-uniform", "--domain", str(tight), "--pairs", "3", "--out", str(tmp_path)], capsys)
    assert code == 1
    assert records(out.out)["separation_implied_A"]["status"] == "fail"


@pytest.mark.parametrize("argv", [
    ["qh-dist", "--domain", "missing.json", "--from", "0,1", "--to", "0,2"],
    ["qh-dist", "--domain", str(DOMAINS / "unit_disc.json"), "--from", "0,0", "--to", "3,0"],
    ["approximate", "--domain", str(DOMAINS / "multi_scale.json"), "--thresholds", "0.5,1.0"],
    ["uniformize", "--domain", str(DOMAINS / "two_slit.json"), "--max-sweeps", "1", "--tol-circ", "1e-14"],
])
def test_bad_input_exits_two(argv, tmp_path, capsys):
    code, out = run(argv + ["--out", str(tmp_path)], capsys)
    assert code == 2
    assert "error" in out.err


def test_config_file_is_overridden_by_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"h": 0.1, "seed": 3, "slack": 0.05}))
    args = build_parser().parse_args(["demo", "--config", str(cfg), "--seed", "7"])
    rc = make_config(args)
    assert (rc.h, rc.seed, rc.slack) == (0.1, 7, 0.05)
    with pytest.raises(ValueError):
        RunConfig(h=-1)
