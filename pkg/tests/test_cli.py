import json
import math

import pytest

from nese.cli import main
from nese.config import load_run_config, load_scene_spec
from nese.errors import ValidationError

SCENE_INI = """\
[scene]
width = 36
height = 36
length = 12
background_level = 64

[event:appear]
kind = object_enter
rect = 6,6,18,18
level_delta = 128
start = 5
end = 12
"""

RUN_INI = """\
[engine]
box_size = 3
precision = 2
threshold_pixels = 1
time_tau = 4

[energy]
frame_period = 0.01

[input]
scene = {scene}

[output]
dir = {out}

[run]
seed = 0
"""


@pytest.fixture
def scene_file(tmp_path):
    path = tmp_path / "scene.ini"
    path.write_text(SCENE_INI)
    return path


@pytest.fixture
def run_file(tmp_path, scene_file):
    path = tmp_path / "run.ini"
    path.write_text(RUN_INI.format(scene=scene_file, out=tmp_path / "out"))
    return path


class TestConfigParsing:
    def test_scene_spec(self, scene_file):
        spec = load_scene_spec(scene_file)
        assert (spec.width, spec.height, spec.length) == (36, 36, 12)
        assert len(spec.events) == 1
        assert spec.events[0].rect == (6, 6, 18, 18)
        assert spec.events[0].frame_range == (5, 12)

    def test_run_config(self, run_file):
        cfg = load_run_config(run_file)
        assert cfg.engine.box_size == 3
        assert cfg.engine.precision == 2
        assert cfg.frame_period == pytest.approx(0.01)
        assert cfg.harvester is None

    def test_threshold_inf(self, tmp_path, scene_file):
        path = tmp_path / "r.ini"
        path.write_text(f"[engine]\nthreshold_pixels = inf\n[input]\nscene = {scene_file}\n")
        assert math.isinf(load_run_config(path).engine.threshold_pixels)

    def test_harvester_section(self, tmp_path, scene_file):
        path = tmp_path / "r.ini"
        path.write_text(
            f"[input]\nscene = {scene_file}\n"
            "[harvester]\ncapacity = 0.02\npower_on_threshold = 0.01\n"
            "trace = constant:0.005\n"
        )
        cfg = load_run_config(path)
        assert cfg.harvester is not None
        assert cfg.harvester.capacity == pytest.approx(0.02)

    def test_missing_input_rejected(self, tmp_path):
        path = tmp_path / "r.ini"
        path.write_text("[engine]\nbox_size = 3\n")
        with pytest.raises(ValidationError):
            load_run_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError):
            load_run_config(tmp_path / "nope.ini")


class TestCmdGen:
    def test_generates_frames_and_truths(self, tmp_path, scene_file, capsys):
        out = tmp_path / "gen"
        assert main(["gen", str(scene_file), str(out), "--seed", "1"]) == 0
        assert len(list(out.glob("frame_*.pgm"))) == 12
        assert len(list(out.glob("truth_*.pgm"))) == 12

    def test_byte_identical_reruns(self, tmp_path, scene_file):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["gen", str(scene_file), str(out_a), "--seed", "7"])
        main(["gen", str(scene_file), str(out_b), "--seed", "7"])
        for pa in sorted(out_a.iterdir()):
            assert pa.read_bytes() == (out_b / pa.name).read_bytes()

    def test_invalid_rect_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.ini"
        bad.write_text("[scene]\nwidth = 10\nheight = 10\nlength = 2\n"
                       "[event:a]\nkind = object_enter\nrect = 8,8,5,5\nlevel_delta = 10\n")
        assert main(["gen", str(bad), str(tmp_path / "o")]) == 2
        assert "rect" in capsys.readouterr().err


class TestCmdRun:
    def test_static_scene_reports_no_events(self, tmp_path, capsys):
        scene = tmp_path / "static.ini"
        scene.write_text("[scene]\nwidth = 30\nheight = 30\nlength = 10\n")
        cfg = tmp_path / "r.ini"
        cfg.write_text(RUN_INI.format(scene=scene, out=tmp_path / "out"))
        assert main(["run", str(cfg)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["sensor_mode_entries"] == 0
        assert summary["event_frames"] == []

    def test_scenario_run_artifacts(self, run_file, tmp_path, capsys):
        assert main(["run", str(run_file)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["event_frames"] == [5, 6, 7, 8]
        assert summary["background_update_frames"] == [9]
        out = tmp_path / "out"
        assert (out / "summary.json").exists()
        assert (out / "energy.csv").read_text().startswith("frame_index,category,joules")
        assert len(list(out.glob("mask_*.pgm"))) == 11

    def test_missing_input_dir_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "r.ini"
        cfg.write_text(f"[input]\nframes_dir = {tmp_path / 'absent'}\n"
                       f"[output]\ndir = {tmp_path / 'out'}\n")
        assert main(["run", str(cfg)]) == 2
        assert "absent" in capsys.readouterr().err


class TestCmdSweep:
    def test_default_ranges_give_12_rows(self, run_file, tmp_path, capsys):
        assert main(["sweep", str(run_file)]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 12
        assert (tmp_path / "out" / "sweep.csv").exists()
        assert (tmp_path / "out" / "sweep.json").exists()

    def test_restricted_ranges(self, tmp_path, scene_file, capsys):
        cfg = tmp_path / "r.ini"
        cfg.write_text(RUN_INI.format(scene=scene_file, out=tmp_path / "out")
                       + "\n[sweep]\nbox_sizes = 3\nprecisions = 1,2,3,4\n")
        assert main(["sweep", str(cfg)]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 4
        assert {r["box_size"] for r in rows} == {3}

    def test_deterministic_report_bytes(self, run_file, tmp_path):
        main(["sweep", str(run_file)])
        first = (tmp_path / "out" / "sweep.json").read_bytes()
        main(["sweep", str(run_file)])
        assert (tmp_path / "out" / "sweep.json").read_bytes() == first


class TestIntermittentRun:
    def test_harvested_run_reports_power_cycles(self, tmp_path, scene_file, capsys):
        cfg = tmp_path / "r.ini"
        # capacity = one quiet frame's cost at (3,2), harvested over two periods
        cost = 0.842 * 0.01
        cfg.write_text(
            f"[engine]\nbox_size = 3\nprecision = 2\ntime_tau = 100\n"
            f"[energy]\nframe_period = 0.01\n"
            f"[harvester]\ncapacity = {cost}\npower_on_threshold = {cost}\n"
            f"trace = constant:{cost / 2}\n"
            f"[input]\nscene = {scene_file}\n[output]\ndir = {tmp_path / 'out'}\n"
        )
        assert main(["run", str(cfg)]) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["power_cycles"] > 0
        assert summary["skipped_frames"]


class TestCmdTables:
    def test_table_contents(self, capsys):
        assert main(["tables"]) == 0
        out = capsys.readouterr().out
        assert "7396" in out
        assert "80000" in out
        assert "extrapolated" in out

    def test_strict_mode_rejects_off_paper_frame_size(self, run_file, tmp_path, capsys):
        text = run_file.read_text() + "strict_mode = true\n"
        run_file.write_text(text)
        assert main(["run", str(run_file)]) == 2
        assert "600" in capsys.readouterr().err
