import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hiergap import cli, tables
from hiergap.intervals import IntervalKind, SpectralInterval

SVG_NS = "{http://www.w3.org/2000/svg}"


def write_cfg(tmp_path, **cfg):
    cfg.setdefault("name", "sys")
    path = tmp_path / f"{cfg['name']}.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def run(*argv):
    return cli.main([str(a) for a in argv])


def gids(svg_path):
    root = ET.parse(svg_path).getroot()
    return [g.get("id") for g in root.iter(f"{SVG_NS}g") if g.get("id")]


@pytest.fixture
def single_ms(tmp_path):
    return write_cfg(tmp_path, kind="mass_spring", masses=[1], kappa=1, range=[0, 10])


class TestBands:
    def test_two_point_grid(self, tmp_path, single_ms):
        out = tmp_path / "o"
        assert run("bands", "--config", single_ms, "--out", out, "--grid", 2) == 0
        lines = (out / "sys_bands.csv").read_text().splitlines()
        assert lines[0] == ",".join(tables.BANDS_HEADER)
        assert len(lines) == 3
        # lam = 0 gives RHS = 2: an edge with k = 0
        assert lines[1].split(",")[2:5] == ["2", "edge", "0"]

    def test_interval_table(self, tmp_path, single_ms):
        out = tmp_path / "o"
        assert run("bands", "--config", single_ms, "--out", out, "--no-svg") == 0
        rows = (out / "sys_intervals.csv").read_text().splitlines()
        assert rows[1].startswith("pass_band,0,4,")
        assert rows[2].startswith("band_gap,4,10,")
        assert not (out / "sys_bands.svg").exists()

    def test_svg_written(self, tmp_path, single_ms):
        out = tmp_path / "o"
        assert run("bands", "--config", single_ms, "--out", out) == 0
        ET.parse(out / "sys_bands.svg")

    def test_pole_rows(self, tmp_path):
        cfg = write_cfg(
            tmp_path, kind="resonant", outer_mass=2, inner_mass=0.5, resonances=[4],
            kappa=0.5, range=[0, 8], grid=5,
        )
        out = tmp_path / "o"
        assert run("bands", "--config", cfg, "--out", out) == 0
        rows = (out / "sys_bands.csv").read_text().splitlines()
        assert rows[3] == "4,2,,pole,,"


class TestHierarchical:
    def test_modulated(self, tmp_path):
        out = tmp_path / "o"
        assert run("hierarchical", "--config", "pendulums_modulated", "--out", out) == 0
        ivs = tables.read_intervals(out / "pendulums_modulated_hierarchical.csv")
        assert [(iv.lo, iv.hi) for iv in ivs] == [(0, 0.5), (1.5, 2), (4, 4.8)]
        assert all(iv.kind is IntervalKind.HIERARCHICAL_GAP for iv in ivs)
        assert "containment_verified: true" in (out / "pendulums_modulated_report.txt").read_text()
        ids = gids(out / "pendulums_modulated_hierarchical.svg")
        assert sum(i.startswith("track-") for i in ids) == 5 + 1
        assert "hierarchical" in ids
        for i in range(1, 6):
            assert (out / f"pendulums_modulated_element_{i}_gaps.csv").exists()

    def test_single_element(self, tmp_path):
        cfg = write_cfg(tmp_path, kind="pendulum", masses=[1.2], kappa=0.5, resonances=2, range=[0, 10])
        out = tmp_path / "o"
        assert run("hierarchical", "--config", cfg, "--out", out) == 0
        pred = tables.read_intervals(out / "sys_hierarchical.csv")
        comb = tables.read_intervals(out / "sys_combined_intervals.csv")
        assert [(p.lo, p.hi) for p in pred] == [(iv.lo, iv.hi) for iv in comb if iv.kind.value == "band_gap"]

    def test_disjoint_pair(self, tmp_path):
        cfg = write_cfg(
            tmp_path, kind=["pendulum", "mass_spring"], masses=[1, 0.1], kappa=1,
            resonances=[0.5, 0], range=[0, 30],
        )
        out = tmp_path / "o"
        assert run("hierarchical", "--config", cfg, "--out", out) == 0
        assert (out / "sys_hierarchical.csv").read_text().splitlines() == [",".join(tables.INTERVAL_HEADER)]
        ids = gids(out / "sys_hierarchical.svg")
        assert "hierarchical" not in ids
        assert sum(i.startswith("track-") for i in ids) == 3

    def test_degenerate_warns_once(self, tmp_path):
        # a subprocess, so the CLI's own warning filters apply rather than pytest's
        proc = subprocess.run(
            [sys.executable, "-m", "hiergap", "hierarchical", "--config",
             "pendulums_homogeneous", "--out", str(tmp_path / "o")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stderr.count("DegenerateElementWarning") == 1

    def test_all_scalar_rejected(self, tmp_path):
        cfg = write_cfg(tmp_path, kind="pendulum", masses=1.2, kappa=0.5, resonances=2, range=[0, 10])
        assert run("gaps", "--config", cfg, "--out", tmp_path / "o") == 1


class TestFibonacci:
    def test_depth_six_word(self, tmp_path):
        cfg = write_cfg(
            tmp_path, kind="pendulum", masses=[1.2, 2], kappa=0.5, resonances=[2, 0.5],
            range=[0, 4.4], fibonacci={"a": 0, "b": 1, "depth": 6}, grid=512,
        )
        out = tmp_path / "o"
        assert run("fibonacci", "--config", cfg, "--out", out) == 0
        report = (out / "sys_report.txt").read_text().splitlines()
        assert len(report) == 6
        assert "n=8 " in report[5] and "word=babbabab " in report[5]
        assert all(line.endswith("containment_verified=true") for line in report)
        ids = gids(out / "sys_fibonacci.svg")
        assert sum(i.startswith("track-") for i in ids) == 6

    def test_depth_limit(self, tmp_path):
        cfg = write_cfg(
            tmp_path, kind="pendulum", masses=[1.2, 2], kappa=0.5, resonances=[2, 0.5],
            range=[0, 4.4], fibonacci={"a": 0, "b": 1, "depth": 21},
        )
        assert run("fibonacci", "--config", cfg, "--out", tmp_path / "o") == 1

    def test_missing_block(self, tmp_path, single_ms):
        assert run("fibonacci", "--config", single_ms, "--out", tmp_path / "o") == 1


class TestVerify:
    def test_passes(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("verify", "--config", "fibonacci_pendulums", "--trials", 200, "--out", out) == 0
        text = (out / "fibonacci_pendulums_verify.txt").read_text()
        assert "FAIL" not in text and text.count("PASS") >= 9

    def test_no_out_writes_nothing(self, tmp_path, monkeypatch, single_ms):
        monkeypatch.chdir(tmp_path)
        assert run("verify", "--config", single_ms, "--trials", 50) == 0
        assert not (tmp_path / "results").exists()

    def test_fault_injection_exits_2(self, tmp_path, monkeypatch):
        import hiergap.spectrum as sp

        real = sp.log_margin
        monkeypatch.setattr(sp, "log_margin", lambda cell, lams, guard=1e-9: -np.abs(real(cell, lams, guard)))
        assert run("verify", "--config", "mass_spring", "--trials", 20) == 2
        assert run("hierarchical", "--config", "mass_spring", "--out", tmp_path / "o") == 2


class TestErrors:
    def test_malformed_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert run("gaps", "--config", p, "--out", tmp_path / "o") == 1

    @pytest.mark.parametrize(
        "cfg",
        [
            dict(kind="mass_spring", masses=[1, 2], kappa=[1, 1, 1], range=[0, 1]),
            dict(kind="mass_spring", masses=[-1], kappa=1, range=[0, 1]),
            dict(kind="mass_spring", masses=[1], kappa=1, range=[2, 1]),
            dict(kind="mass_spring", masses=[1], kappa=1, range=[0, 1], bogus=3),
            dict(kind="warp_drive", masses=[1], kappa=1, range=[0, 1]),
        ],
    )
    def test_invalid_configs(self, tmp_path, cfg):
        assert run("gaps", "--config", write_cfg(tmp_path, **cfg), "--out", tmp_path / "o") == 1

    def test_missing_file(self, tmp_path):
        assert run("gaps", "--config", tmp_path / "nope.json") == 1

    def test_bad_arguments(self, single_ms):
        assert run("gaps", "--config", single_ms, "--grid", 1) == 1
        assert run("frobnicate") == 1

    def test_unwritable_out(self, tmp_path, single_ms):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert run("gaps", "--config", single_ms, "--out", blocker / "sub") == 1


def test_interval_csv_round_trip(tmp_path):
    ivs = [
        SpectralInterval(0.0, 1 / 3, IntervalKind.PASS_BAND, False, True),
        SpectralInterval(1 / 3, np.pi, IntervalKind.BAND_GAP, True, False),
    ]
    path = tables.write_intervals(tmp_path / "x.csv", ivs)
    back = tables.read_intervals(path)
    assert [iv.kind for iv in back] == [iv.kind for iv in ivs]
    for a, b in zip(ivs, back):
        assert b.lo == float(format(a.lo, ".12g")) and b.hi == float(format(a.hi, ".12g"))
        assert (b.lo_refined, b.hi_refined) == (a.lo_refined, a.hi_refined)


def test_outputs_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / str(k)
        assert run("hierarchical", "--config", "phononic_resonant", "--out", out) == 0
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == sorted(p.name for p in outs[1].iterdir())
    for n in names:
        assert (outs[0] / n).read_bytes() == (outs[1] / n).read_bytes(), n


def test_no_temp_files_left(tmp_path, single_ms):
    out = tmp_path / "o"
    assert run("bands", "--config", single_ms, "--out", out) == 0
    assert not [p for p in out.iterdir() if p.name.endswith(".tmp")]
