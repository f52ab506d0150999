"""End-to-end tests of the command line on a tiny configuration."""

import io

import numpy as np
import pytest
import yaml

from cli import main
from cli.records import read_records
from data import read_clip, write_clip
from utils.run_logger import RunLogger


@pytest.fixture(autouse=True)
def quiet_console(monkeypatch):
    monkeypatch.setattr(RunLogger, "stream", io.StringIO())
    yield
    RunLogger.color = True


@pytest.fixture
def config_path(tmp_path, tiny_mapping):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(tiny_mapping))
    return str(path)


@pytest.fixture
def dataset_dir(tmp_path, config_path):
    out = tmp_path / "data"
    assert main(["--no-color", "synth", "--config", config_path, "--out", str(out)]) == 0
    return out


@pytest.fixture
def run_dir(tmp_path, config_path, dataset_dir):
    out = tmp_path / "run"
    argv = ["--no-color", "train", "--config", config_path, "--data", str(dataset_dir), "--out", str(out),
            "--override", "training.iterations=1"]
    assert main(argv) == 0
    return out


class TestSynth:
    def test_writes_three_containers_per_clip(self, dataset_dir):
        names = sorted(p.name for p in dataset_dir.glob("*.dvt"))
        assert names == ["clip_000.dvt", "clip_000_depth.dvt", "clip_000_mask.dvt"]
        assert read_clip(dataset_dir / "clip_000.dvt").shape == (8, 16, 16, 3)

    def test_ppm_export(self, tmp_path, config_path):
        out = tmp_path / "ppm"
        assert main(["synth", "--config", config_path, "--out", str(out), "--ppm"]) == 0
        assert (out / "clip_000" / "mask_0000.pgm").is_file()


class TestTrain:
    def test_one_iteration_gives_one_record(self, run_dir):
        records = read_records(run_dir / "losses.jsonl")
        assert len(records) == 1
        assert records[0]["iteration"] == 0
        assert {"l_d", "l_i", "l_p", "l_s", "l_gen", "l_ded", "total"} <= set(records[0])
        assert (run_dir / "final.dvck").is_file()

    def test_resume_continues_the_count(self, tmp_path, config_path, dataset_dir, run_dir):
        out = tmp_path / "resumed"
        argv = ["train", "--config", config_path, "--data", str(dataset_dir), "--out", str(out),
                "--resume", str(run_dir / "final.dvck"), "--override", "training.iterations=3"]
        assert main(argv) == 0
        assert [r["iteration"] for r in read_records(out / "losses.jsonl")] == [1, 2]

    def test_periodic_checkpoints(self, tmp_path, config_path, dataset_dir):
        out = tmp_path / "ckpt"
        argv = ["train", "--config", config_path, "--data", str(dataset_dir), "--out", str(out),
                "--override", "training.iterations=2", "--override", "training.checkpoint_every=1"]
        assert main(argv) == 0
        assert (out / "checkpoint_000001.dvck").is_file()
        assert (out / "checkpoint_000002.dvck").is_file()

    def test_unknown_config_key_exits_one(self, tmp_path, config_path):
        argv = ["train", "--config", config_path, "--out", str(tmp_path / "x"), "--override", "model.depth=3"]
        assert main(argv) == 1


class TestInferAndEval:
    def test_infer_then_eval(self, tmp_path, config_path, dataset_dir, run_dir):
        out = tmp_path / "pred.dvt"
        timing = tmp_path / "timing.jsonl"
        argv = ["infer", "--config", config_path, "--checkpoint", str(run_dir / "final.dvck"),
                "--clip", str(dataset_dir / "clip_000.dvt"), "--mask", str(dataset_dir / "clip_000_mask.dvt"),
                "--out", str(out), "--mode", "online", "--timing", str(timing)]
        assert main(argv) == 0
        pred = read_clip(out)
        truth = read_clip(dataset_dir / "clip_000.dvt")
        mask = read_clip(dataset_dir / "clip_000_mask.dvt")
        valid = mask[..., 0] == 1
        np.testing.assert_array_equal(pred[valid], truth[valid])
        assert [r["start"] for r in read_records(timing)] == [0, 3]

        metrics = tmp_path / "metrics.jsonl"
        argv = ["eval", "--pred", str(out), "--truth", str(dataset_dir / "clip_000.dvt"),
                "--mask", str(dataset_dir / "clip_000_mask.dvt"), "--out", str(metrics)]
        assert main(argv) == 0
        (record,) = read_records(metrics)
        assert record["clip"] == "pred"
        assert 0.0 < record["psnr_crop"] <= 99.0

    def test_eval_identity(self, tmp_path, dataset_dir):
        metrics = tmp_path / "metrics.jsonl"
        clip = str(dataset_dir / "clip_000.dvt")
        argv = ["eval", "--pred", clip, "--truth", clip, "--mask", str(dataset_dir / "clip_000_mask.dvt"),
                "--pred-depth", str(dataset_dir / "clip_000_depth.dvt"),
                "--truth-depth", str(dataset_dir / "clip_000_depth.dvt"), "--out", str(metrics)]
        assert main(argv) == 0
        (record,) = read_records(metrics)
        assert record["psnr_crop"] == 99.0
        assert record["ssim_crop"] == pytest.approx(1.0)
        assert record["mse_crop"] == 0.0
        assert record["depth_rmse"] == 0.0

    def test_eval_prints_records_to_stdout(self, tmp_path, dataset_dir, capsys):
        clip = str(dataset_dir / "clip_000.dvt")
        assert main(["eval", "--pred", clip, "--truth", clip, "--mask", str(dataset_dir / "clip_000_mask.dvt")]) == 0
        lines = [line for line in capsys.readouterr().out.splitlines() if line.startswith("{")]
        assert len(lines) == 1 and '"psnr_crop": 99.0' in lines[0]

    def test_eval_prints_resolved_config(self, dataset_dir, config_path):
        clip = str(dataset_dir / "clip_000.dvt")
        argv = ["--no-color", "eval", "--config", config_path, "--override", "training.seed=7",
                "--pred", clip, "--truth", clip, "--mask", str(dataset_dir / "clip_000_mask.dvt")]
        assert main(argv) == 0
        console = RunLogger.stream.getvalue()
        assert "Resolved configuration" in console
        assert '"seed": 7' in console

    def test_eval_bad_override_exits_one(self, dataset_dir):
        clip = str(dataset_dir / "clip_000.dvt")
        argv = ["eval", "--override", "model.depth=3", "--pred", clip, "--truth", clip,
                "--mask", str(dataset_dir / "clip_000_mask.dvt")]
        assert main(argv) == 1

    def test_missing_clip_exits_two(self, tmp_path, dataset_dir):
        argv = ["eval", "--pred", str(tmp_path / "none.dvt"), "--truth", str(dataset_dir / "clip_000.dvt"),
                "--mask", str(dataset_dir / "clip_000_mask.dvt")]
        assert main(argv) == 2

    def test_corrupt_container_exits_two(self, tmp_path, dataset_dir):
        bad = tmp_path / "bad.dvt"
        bad.write_bytes(b"NOPE" + bytes(16))
        argv = ["eval", "--pred", str(bad), "--truth", str(dataset_dir / "clip_000.dvt"),
                "--mask", str(dataset_dir / "clip_000_mask.dvt")]
        assert main(argv) == 2

    def test_short_video_exits_two(self, tmp_path, config_path, run_dir):
        clip, mask = tmp_path / "short.dvt", tmp_path / "short_mask.dvt"
        write_clip(clip, np.zeros((3, 16, 16, 3), dtype=np.float32))
        write_clip(mask, np.ones((3, 16, 16, 1), dtype=np.float32))
        argv = ["infer", "--config", config_path, "--checkpoint", str(run_dir / "final.dvck"),
                "--clip", str(clip), "--mask", str(mask), "--out", str(tmp_path / "o.dvt")]
        assert main(argv) == 2


class TestGradcheck:
    def test_default_set_passes(self, tmp_path):
        out = tmp_path / "grad.jsonl"
        assert main(["gradcheck", "--seeds", "2", "--out", str(out)]) == 0
        records = read_records(out)
        assert records and all(r["passed"] for r in records)
        assert all(r["max_rel_error"] <= 1e-5 for r in records)

    def test_unknown_domain_exits_one(self):
        assert main(["gradcheck", "--seeds", "1", "--domain", "optics"]) == 1

    def test_prints_resolved_config(self, config_path):
        argv = ["--no-color", "gradcheck", "--config", config_path, "--override", "training.seed=11",
                "--seeds", "1", "--domain", "primitives"]
        assert main(argv) == 0
        console = RunLogger.stream.getvalue()
        assert "Resolved configuration" in console
        assert '"seed": 11' in console

    def test_bad_override_exits_one(self):
        assert main(["gradcheck", "--seeds", "1", "--override", "model.depth=3"]) == 1


class TestUsage:
    @pytest.mark.parametrize("argv", [[], ["fly"], ["eval", "--pred", "x"], ["-v", "-q", "gradcheck"]])
    def test_usage_errors_exit_one(self, argv):
        assert main(argv) == 1
