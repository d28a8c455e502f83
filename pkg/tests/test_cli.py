import subprocess
import sys

import numpy as np
import pytest

from conftest import segment_curve
from loewnerzip.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, main
from loewnerzip.fileio import read_curve, read_driving, save_walk_codes, write_curve
from loewnerzip.zipper import Curve

SMALL = ["--steps", "400", "--seed", "3"]


def test_generate_is_reproducible(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["generate", "--count", "2", "--out", str(a)] + SMALL) == EXIT_OK
    assert main(["generate", "--count", "2", "--out", str(b)] + SMALL) == EXIT_OK
    assert main(["generate", "--count", "2", "--out", str(c), "--lambda", "0.9"] + SMALL) == EXIT_OK
    names = sorted(p.name for p in a.iterdir())
    assert names == ["lerw_00000.curve", "lerw_00001.curve"]
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
        pa, meta = read_curve(a / n)
        pc, _ = read_curve(c / n)
        assert np.allclose(pc.points.imag, 0.9 * pa.points.imag, rtol=1e-15)
        assert meta["model"] == "lerw" and meta["N"] == "400" and meta["seed"] == "3"


@pytest.mark.parametrize("preset", ["saw-desk", "percolation-desk"])
def test_generate_other_models(tmp_path, preset):
    assert main(["generate", "--preset", preset, "--count", "2", "--out", str(tmp_path)] + SMALL) == EXIT_OK
    files = sorted(tmp_path.iterdir())
    assert len(files) == 2
    assert read_curve(files[0])[1]["model"] == preset.split("-")[0]


def test_unzip_segment_fixture(tmp_path, capsys):
    p = tmp_path / "seg.curve"
    write_curve(p, Curve(segment_curve(0.3, 1.0, 1000)))
    assert main(["unzip", str(p), "--naive"]) == EXIT_OK
    t, u, meta = read_driving(tmp_path / "seg.driving")
    assert t[-1] == pytest.approx(0.25, abs=1e-12)
    assert u[-1] == pytest.approx(0.3, abs=1e-12)
    assert meta["steps"] == "1000"
    assert "steps=1000" in capsys.readouterr().out


def test_unzip_t_max_and_methods(tmp_path):
    p = tmp_path / "seg.curve"
    write_curve(p, Curve(segment_curve(0.3, 1.0, 1000)))
    out = tmp_path / "out"
    assert main(["unzip", str(p), "--t-max", "0.1", "--out", str(out)]) == EXIT_OK
    t, _, _ = read_driving(out / "seg.driving")
    assert t[-1] == 0.1
    assert main(["unzip", str(p), "--method", "tilted", "--block-len", "10", "--out", str(out)]) == EXIT_OK
    _, _, meta = read_driving(out / "seg.driving")
    assert meta["method"] == "tilted"


def test_unzip_naive_matches_fast_on_saw(tmp_path, saw_curve_points):
    p = tmp_path / "saw.curve"
    write_curve(p, Curve(saw_curve_points[:10_001]))
    main(["unzip", str(p), "--naive", "--out", str(tmp_path / "n")])
    main(["unzip", str(p), "--out", str(tmp_path / "f")])
    tn, un, _ = read_driving(tmp_path / "n" / "saw.driving")
    tf, uf, _ = read_driving(tmp_path / "f" / "saw.driving")
    assert abs(tf[-1] - tn[-1]) / tn[-1] <= 1e-6


def test_unzip_numeric_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "back.curve"
    write_curve(p, Curve(np.array([0j, 1j, 2j, 1.5j, 3j])))
    assert main(["unzip", str(p)]) == EXIT_NUMERIC
    assert "back.curve" in capsys.readouterr().err
    assert main(["unzip", str(p), "--skip-collapsed"]) == EXIT_OK


def test_invalid_input_exit_codes(tmp_path):
    assert main(["unzip", str(tmp_path / "missing.curve")]) == EXIT_INVALID
    bad = tmp_path / "bad.curve"
    bad.write_text("# curve v1\n1 1\n2 2\n")
    assert main(["unzip", str(bad)]) == EXIT_INVALID
    cfg = tmp_path / "c.ini"
    cfg.write_text("[model]\nflavour = x\n")
    assert main(["experiment", "--config", str(cfg)]) == EXIT_INVALID
    assert main(["experiment", "--samples", "5"]) == EXIT_INVALID


def test_experiment_command(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[model]\nmodel = lerw\nsteps = 400\n[experiment]\nsamples = 40\nseed = 2\n")
    out = tmp_path / "run"
    assert main(["experiment", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "kappa =" in text and "p-values:" in text
    first = (out / "report.csv").read_bytes()
    assert main(["experiment", "--config", str(cfg), "--out", str(out), "--workers", "2"]) == EXIT_OK
    assert (out / "report.csv").read_bytes() == first


def test_bench_command(tmp_path, capsys):
    w = tmp_path / "rod.npz"
    n = 3000
    save_walk_codes(w, np.zeros(n + 1, dtype=int), np.arange(n + 1))
    args = ["bench", "--walk", str(w), "--sizes", "1000", "2000", "--blocks", "5", "10", "--out", str(tmp_path)]
    assert main(args) == EXIT_OK
    text = capsys.readouterr().out
    assert "slope fast" in text and "slope naive" in text
    rows = (tmp_path / "timing.csv").read_text().splitlines()
    assert rows[0] == "N_points,seconds_naive,seconds_fast,block_len,speedup"
    assert len(rows) == 3
    assert main(["bench", "--walk", str(w), "--sizes", "5000"]) == EXIT_INVALID


def test_bench_builds_saw(capsys):
    assert main(["bench", "--sizes", "500", "--iterations", "2000", "--no-naive"]) == EXIT_OK
    assert "N=500" in capsys.readouterr().out


def test_selftest(capsys):
    assert main(["selftest"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and all(line.startswith("PASS") for line in lines)


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "loewnerzip.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("generate", "unzip", "experiment", "bench", "selftest"):
        assert cmd in r.stdout
