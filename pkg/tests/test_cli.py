"""End-to-end command-line tests, run in-process through main(argv)."""

import csv
import io
import json

import numpy as np
import pytest

from impulsekit.assets import sample_image
from impulsekit.cli import main
from impulsekit.detectors import DM5Config, detect
from impulsekit.evaluation import confusion, mse_psnr, rates
from impulsekit.image_io import read_color_image, read_mask, write_color_image


def run_cli(*argv):
    return main([str(arg) for arg in argv])


@pytest.fixture(scope="module")
def corpus(tmp_path_factory, portrait):
    """A small clean image on disk, shared by every CLI test."""
    root = tmp_path_factory.mktemp("cli")
    clean = portrait[100:148, 100:148]
    path = root / "clean.png"
    write_color_image(str(path), clean)
    return {"dir": root, "clean_path": path, "clean": clean}


def corrupt_pair(corpus, tmp_path, seed=7):
    noisy = tmp_path / "noisy.png"
    truth = tmp_path / "truth.png"
    code = run_cli("corrupt", corpus["clean_path"], "--out", noisy,
                   "--mask-out", truth, "--family", "ci", "--variant", "1",
                   "--p", "0.1", "--seed", seed)
    assert code == 0
    return noisy, truth


def test_corrupt_writes_outputs_and_summary(corpus, tmp_path, capsys):
    noisy_path, truth_path = corrupt_pair(corpus, tmp_path)
    out = capsys.readouterr().out
    lines = dict(line.split("=", 1) for line in out.splitlines())
    assert lines["family"] == "ci"
    assert lines["variant"] == "1"
    assert lines["seed"] == "7"

    noisy = read_color_image(str(noisy_path))
    truth = read_mask(str(truth_path))
    assert int(lines["corrupted_pixels"]) == int(truth.sum())
    assert np.array_equal(noisy[~truth], corpus["clean"][~truth])
    assert truth.any()


def test_corrupt_report_json(corpus, tmp_path, capsys):
    code = run_cli("corrupt", corpus["clean_path"], "--out", tmp_path / "n.png",
                   "--mask-out", tmp_path / "m.png", "--family", "ct",
                   "--variant", "3", "--p", "0.2", "--seed", "1",
                   "--report", "json")
    assert code == 0
    fields = json.loads(capsys.readouterr().out)
    assert fields["family"] == "ct"
    assert fields["variant"] == 3
    assert fields["p"] == 0.2
    assert fields["corrupted_pixels"] == int(read_mask(str(tmp_path / "m.png")).sum())


def test_corrupt_same_seed_identical_bytes(corpus, tmp_path):
    paths = []
    for tag in ("a", "b"):
        noisy = tmp_path / f"noisy-{tag}.png"
        truth = tmp_path / f"truth-{tag}.png"
        assert run_cli("corrupt", corpus["clean_path"], "--out", noisy,
                       "--mask-out", truth, "--family", "ci", "--variant", "2",
                       "--p", "0.15", "--seed", "99") == 0
        paths.append((noisy, truth))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()

    other = tmp_path / "noisy-c.png"
    assert run_cli("corrupt", corpus["clean_path"], "--out", other,
                   "--mask-out", tmp_path / "truth-c.png", "--family", "ci",
                   "--variant", "2", "--p", "0.15", "--seed", "100") == 0
    assert other.read_bytes() != paths[0][0].read_bytes()


def test_missing_input_exits_2(tmp_path, capsys):
    code = run_cli("detect", tmp_path / "nope.png", "--out", tmp_path / "m.png",
                   "--detector", "dm5")
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_out_of_range_flag_exits_4(corpus, tmp_path, capsys):
    code = run_cli("denoise", corpus["clean_path"], "--out", tmp_path / "r.png",
                   "--detector", "dm3", "--d", "1.5")
    assert code == 4
    assert "--d" in capsys.readouterr().err


def test_evaluate_truth_without_mask_exits_4(corpus, capsys):
    code = run_cli("evaluate", corpus["clean_path"], "--clean",
                   corpus["clean_path"], "--truth", corpus["clean_path"])
    assert code == 4
    assert "--truth and --mask" in capsys.readouterr().err


def test_unsupported_output_extension_exits_3(corpus, tmp_path, capsys):
    code = run_cli("corrupt", corpus["clean_path"], "--out", tmp_path / "n.bmp",
                   "--mask-out", tmp_path / "m.png", "--family", "ci",
                   "--variant", "1", "--p", "0.1")
    assert code == 3
    assert capsys.readouterr().err.startswith("error:")


def test_detect_reports_rates_against_truth(corpus, tmp_path, capsys):
    noisy_path, truth_path = corrupt_pair(corpus, tmp_path)
    capsys.readouterr()
    mask_path = tmp_path / "detected.png"
    code = run_cli("detect", noisy_path, "--out", mask_path, "--detector",
                   "dm5", "--truth", truth_path, "--report", "json")
    assert code == 0
    fields = json.loads(capsys.readouterr().out)

    outcome = detect(read_color_image(str(noisy_path)), DM5Config())
    assert np.array_equal(read_mask(str(mask_path)), outcome.mask)
    fp_rate, fn_rate = rates(confusion(read_mask(str(truth_path)), outcome.mask))
    assert fields["detector"] == "dm5"
    assert fields["flagged"] == int(outcome.mask.sum())
    assert fields["fp_rate"] == fp_rate
    assert fields["fn_rate"] == fn_rate


def test_detect_plain_summary_is_key_value(corpus, tmp_path, capsys):
    noisy_path, _ = corrupt_pair(corpus, tmp_path)
    capsys.readouterr()
    assert run_cli("detect", noisy_path, "--out", tmp_path / "m.png",
                   "--detector", "dm3") == 0
    lines = capsys.readouterr().out.splitlines()
    keys = [line.split("=", 1)[0] for line in lines]
    assert keys == ["detector", "flagged", "fraction"]


def test_denoise_report_matches_written_files(corpus, tmp_path, capsys):
    noisy_path, truth_path = corrupt_pair(corpus, tmp_path)
    capsys.readouterr()
    restored_path = tmp_path / "restored.png"
    detected_path = tmp_path / "detected.png"
    code = run_cli("denoise", noisy_path, "--out", restored_path,
                   "--mask-out", detected_path, "--detector", "dm5",
                   "--clean", corpus["clean_path"], "--truth", truth_path,
                   "--report", "json")
    assert code == 0
    (row,) = json.loads(capsys.readouterr().out)

    restored = read_color_image(str(restored_path))
    mse, psnr = mse_psnr(corpus["clean"], restored)
    fp_rate, fn_rate = rates(
        confusion(read_mask(str(truth_path)), read_mask(str(detected_path)))
    )
    assert row["label"] == "dm5"
    assert row["mse"] == mse
    assert row["psnr"] == psnr
    assert row["fp_rate"] == fp_rate
    assert row["fn_rate"] == fn_rate
    assert row["elapsed_seconds"] > 0.0


def test_denoise_threads_do_not_change_bytes(corpus, tmp_path):
    noisy_path, _ = corrupt_pair(corpus, tmp_path)
    outs = []
    for threads in ("1", "8"):
        out = tmp_path / f"restored-{threads}.png"
        assert run_cli("denoise", noisy_path, "--out", out, "--detector",
                       "dm4", "--threads", threads) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_evaluate_restored_image(corpus, tmp_path, capsys):
    noisy_path, truth_path = corrupt_pair(corpus, tmp_path)
    restored_path = tmp_path / "restored.png"
    assert run_cli("denoise", noisy_path, "--out", restored_path,
                   "--detector", "dm5", "--mask-out", tmp_path / "det.png") == 0
    capsys.readouterr()
    code = run_cli("evaluate", restored_path, "--clean", corpus["clean_path"],
                   "--truth", truth_path, "--mask", tmp_path / "det.png",
                   "--report", "json")
    assert code == 0
    (row,) = json.loads(capsys.readouterr().out)
    mse, psnr = mse_psnr(corpus["clean"], read_color_image(str(restored_path)))
    assert "label" not in row
    assert row["mse"] == mse
    assert row["psnr"] == psnr
    assert row["elapsed_seconds"] == 0.0


def test_roc_single_point_csv(corpus, tmp_path, capsys):
    table_path = tmp_path / "roc.csv"
    code = run_cli("roc", corpus["clean_path"], "--family", "ci", "--variant",
                   "1", "--p", "0.1", "--seed", "3", "--detector", "dm5",
                   "--level-grid", "76:76:1", "--out", table_path)
    assert code == 0
    err = capsys.readouterr().err
    assert err.startswith("selected: ")
    lines = table_path.read_text().splitlines()
    assert lines[0] == "detector,params,fp_rate,fn_rate"
    assert len(lines) == 2
    assert lines[1].startswith("dm5,")


def test_roc_alpha_sweep_is_monotone(corpus, capsys):
    code = run_cli("roc", corpus["clean_path"], "--family", "ci", "--variant",
                   "1", "--p", "0.1", "--seed", "3", "--detector", "dm1",
                   "--alpha-grid", "0:50:2")
    assert code == 0
    captured = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(captured.out)))
    assert len(rows) == 26
    fp = [float(row["fp_rate"]) for row in rows]
    fn = [float(row["fn_rate"]) for row in rows]
    assert all(a >= b for a, b in zip(fp, fp[1:]))
    assert all(a <= b for a, b in zip(fn, fn[1:]))
    assert "selected: " in captured.err


def test_roc_grid_flag_mismatch_exits_4(corpus, capsys):
    code = run_cli("roc", corpus["clean_path"], "--family", "ci", "--variant",
                   "1", "--p", "0.1", "--detector", "dm3",
                   "--alpha-grid", "0:10:1")
    assert code == 4
    assert "--d-grid" in capsys.readouterr().err


def test_bench_reports_requested_detectors(corpus, capsys):
    code = run_cli("bench", corpus["clean_path"], "--family", "ct", "--variant",
                   "1", "--p", "0.1", "--seed", "5", "--detectors", "dm5,dm3",
                   "--repeats", "2")
    assert code == 0
    captured = capsys.readouterr()
    rows = list(csv.DictReader(io.StringIO(captured.out)))
    assert [row["label"] for row in rows] == ["dm5", "dm3"]
    for row in rows:
        assert float(row["elapsed_seconds"]) > 0.0
    assert "dm5: median" in captured.err
    assert "dm3: median" in captured.err


def test_bench_rejects_unknown_detector(corpus, capsys):
    code = run_cli("bench", corpus["clean_path"], "--family", "ci", "--variant",
                   "1", "--p", "0.1", "--detectors", "dm9")
    assert code == 4
    assert "--detectors" in capsys.readouterr().err


def test_netpbm_outputs_match_png(corpus, tmp_path):
    outs = {}
    for ext_img, ext_mask in ((".png", ".png"), (".ppm", ".pbm")):
        noisy = tmp_path / f"noisy{ext_img}"
        truth = tmp_path / f"truth{ext_mask}"
        assert run_cli("corrupt", corpus["clean_path"], "--out", noisy,
                       "--mask-out", truth, "--family", "ci", "--variant", "1",
                       "--p", "0.1", "--seed", "11") == 0
        outs[ext_img] = (read_color_image(str(noisy)), read_mask(str(truth)))
    assert np.array_equal(outs[".png"][0], outs[".ppm"][0])
    assert np.array_equal(outs[".png"][1], outs[".ppm"][1])


def test_report_keeps_stdout_machine_readable(corpus, tmp_path, capsys):
    noisy_path, _ = corrupt_pair(corpus, tmp_path)
    capsys.readouterr()
    code = run_cli("denoise", noisy_path, "--out", tmp_path / "r.png",
                   "--detector", "dm5", "--clean", corpus["clean_path"],
                   "--report", "csv")
    assert code == 0
    captured = capsys.readouterr()
    rows = list(csv.reader(io.StringIO(captured.out)))
    assert rows[0][:5] == ["label", "mse", "psnr", "fp_rate", "fn_rate"]
    assert len(rows) == 2
