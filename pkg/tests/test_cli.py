import filecmp
import json
import math
import os

import numpy as np
import pytest

from tomosense.cli import main, parse_theta
from tomosense.errors import ValidationError
from tomosense.states import SqueezeParams, normalization_constant


def run_cli(*args):
    return main([str(a) for a in args])


# ---------------------------------------------------------------------------
# theta parsing
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("text,value", [
    ("0", 0.0),
    ("0.5", 0.5),
    ("pi", math.pi),
    ("pi/20", math.pi / 20),
    ("pi/100", math.pi / 100),
    ("2pi/3", 2 * math.pi / 3),
    ("3pi/4", 3 * math.pi / 4),
    ("-pi/2", -math.pi / 2),
])
def test_parse_theta(text, value):
    assert parse_theta(text) == pytest.approx(value, abs=1e-15)


def test_parse_theta_rejects_garbage():
    with pytest.raises(ValidationError):
        parse_theta("two pies")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def test_state_csv_and_prob_normalization(tmp_path):
    out = tmp_path / "coeffs.csv"
    assert run_cli("state", "--family", "svs", "--r", 0.7071067811865476,
                   "--m", 2, "--out", out) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "n,re,im,prob"
    # first populated series term sits at |2>, with weight 2!/N_2
    n2 = normalization_constant("added", 2, SqueezeParams(0.7071067811865476))
    prob2 = float(rows[3].split(",")[3])
    assert prob2 == pytest.approx(2.0 / n2, abs=1e-10)
    assert float(rows[1].split(",")[3]) == 0.0


def test_observables_json(tmp_path):
    out = tmp_path / "obs.json"
    assert run_cli("observables", "--family", "svs", "--r", 0.5,
                   "--theta", "pi/2", "--out", out) == 0
    payload = json.loads(out.read_text())
    assert payload["mean_photon_number"] == pytest.approx(math.sinh(0.5) ** 2, abs=1e-9)
    assert payload["quadrature_variance"] == pytest.approx(math.e / 2, abs=1e-9)


def test_slice_csv(tmp_path):
    out = tmp_path / "slice.csv"
    assert run_cli("slice", "--family", "svs", "--r", 0, "--theta", 0.3,
                   "--out", out) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "x,pdf,cdf"
    assert len(rows) == 1 + 2048


def test_tomogram_pgm_and_dark_center(tmp_path):
    bright = tmp_path / "svs.pgm"
    dark = tmp_path / "add1.pgm"
    assert run_cli("tomogram", "--family", "svs", "--theta-count", 16,
                   "--format", "pgm", "--out", bright) == 0
    assert run_cli("tomogram", "--family", "svs", "--m", 1, "--theta-count", 16,
                   "--format", "pgm", "--out", dark) == 0
    for path in (bright, dark):
        header = path.read_bytes().split(b"\n", 3)
        assert header[0] == b"P5" and header[2] == b"255"
    width = int(bright.read_bytes().split(b"\n")[1].split()[0])
    row0 = np.frombuffer(bright.read_bytes().split(b"\n", 3)[3], dtype=np.uint8)[:width]
    row0_dark = np.frombuffer(dark.read_bytes().split(b"\n", 3)[3], dtype=np.uint8)[:width]
    mid = width // 2
    assert row0[mid] == 255          # bright central band for the squeezed vacuum
    assert row0_dark[mid] <= 1       # dark central band after one added photon


def test_w1_cli_value(tmp_path):
    out = tmp_path / "w1.json"
    assert run_cli("w1", "--family", "svs", "--r", 0, "--b-family", "svs",
                   "--b-r", 0.5, "--theta", 0, "--out", out) == 0
    payload = json.loads(out.read_text())
    assert payload["w1"] == pytest.approx(0.22199130323553978, abs=1e-6)


def test_crossover_cli_location(tmp_path):
    out = tmp_path / "cross.json"
    assert run_cli("crossover", "--pair", "add1:add2", "--theta", 0,
                   "--lo", 0.3, "--hi", 0.6, "--out", out) == 0
    payload = json.loads(out.read_text())
    assert payload["found"] is True
    assert 0.43 <= payload["location"] <= 0.47
    assert set(payload) == {"found", "location", "bracket_lo", "bracket_hi",
                            "residual", "scan_points"}


def test_sample_binary_and_csv(tmp_path):
    out_bin = tmp_path / "rec.bin"
    assert run_cli("sample", "--family", "svs", "--r", 0.5, "--shots", 500,
                   "--seed", 7, "--format", "bin", "--out", out_bin) == 0
    blob = out_bin.read_bytes()
    assert blob[:8] == b"TOMOSMPL" and len(blob) == 32 + 500 * 8
    out_csv = tmp_path / "rec.csv"
    assert run_cli("sample", "--family", "svs", "--r", 0.5, "--shots", 10,
                   "--seed", 7, "--format", "csv", "--out", out_csv) == 0
    assert out_csv.read_text().splitlines()[0] == "theta,x"


# ---------------------------------------------------------------------------
# config files, metadata, determinism
# ---------------------------------------------------------------------------

def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family=svs\nr=0.4\nm=1\nout=unused.csv\n")
    out = tmp_path / "a.csv"
    assert run_cli("state", "--config", cfg, "--r", 0.6, "--out", out) == 0
    meta = (tmp_path / "a.csv.meta").read_text()
    assert "r=0.59999999999999998" in meta  # flag wins over the config value
    assert "m=1" in meta                    # config fills what flags leave unset


def test_metadata_rerun_is_byte_identical(tmp_path):
    out1 = tmp_path / "w1.json"
    assert run_cli("w1", "--family", "svs", "--r", 0.37, "--b-family", "svs",
                   "--b-r", 0.37, "--b-m", 2, "--theta", "pi/20", "--out", out1) == 0
    out2 = tmp_path / "again.json"
    assert run_cli("w1", "--config", str(out1) + ".meta", "--out", out2) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_exit_codes(tmp_path, capsys):
    assert run_cli("state", "--family", "svs", "--r", 0, "--m", -1,
                   "--out", tmp_path / "x.csv") == 2
    assert "error" in capsys.readouterr().err
    assert run_cli("slice", "--family", "svs", "--r", 0.9, "--theta", "pi/2",
                   "--grid-halfwidth", 3, "--out", tmp_path / "x.csv") == 3
    assert run_cli("state") == 2  # --out missing
    with pytest.raises(SystemExit) as exc:
        run_cli("state", "--no-such-flag")
    assert exc.value.code == 2


def test_csv_numbers_roundtrip_doubles(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--family", "svs", "--compare", "1", "--lo", 0.3,
                   "--hi", 0.5, "--steps", 3, "--theta", 0, "--out", out) == 0
    from tomosense.transport import sweep_w1
    from conftest import svs_spec

    table = sweep_w1(svs_spec(), [svs_spec(m=1)], (0.3, 0.5, 3), 0.0)
    rows = out.read_text().strip().splitlines()[1:]
    for row, expected in zip(rows, table.columns[0][1]):
        assert float(row.split(",")[1]) == expected


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------

REPRODUCE_ARGS = ["--steps", 5, "--theta-count", 16, "--grid-points", 2048,
                  "--empirical", 1, "--shots", 2000, "--seed", 90210]


def test_reproduce_and_full_rerun_byte_identical(tmp_path):
    dir1, dir2 = tmp_path / "run1", tmp_path / "run2"
    assert run_cli("reproduce", "--outdir", dir1, *REPRODUCE_ARGS) == 0
    expected = {
        "w1_added_theta_0.csv", "w1_added_theta_pi100.csv", "w1_added_theta_pi4.csv",
        "w1_subtracted_theta_0.csv", "w1_ecs_added.csv",
        "crossover_added_1v2.json", "crossover_added_1v3.json", "crossover_ecs_1v2.json",
        "tomogram_svs.pgm", "tomogram_svs_add1.pgm", "tomogram_ecs.pgm",
        "mean_photon_vs_r.csv", "w1_vs_mean_photon.csv", "variance_vs_r.csv",
        "kappa_fits.json", "w1_svs_ecs_equal_mean.csv", "w1_add1_vs_cats_equal_mean.csv",
        "empirical_crossover_added_1v2.json",
    }
    produced = {p for p in os.listdir(dir1) if not p.endswith(".meta")}
    assert expected <= produced
    assert all(os.path.exists(os.path.join(dir1, p + ".meta")) for p in produced)

    assert run_cli("reproduce", "--outdir", dir2, *REPRODUCE_ARGS) == 0
    for name in sorted(produced):
        assert filecmp.cmp(dir1 / name, dir2 / name, shallow=False), name


def test_reproduce_artifact_rerun_from_meta(tmp_path):
    outdir = tmp_path / "run"
    assert run_cli("reproduce", "--outdir", outdir, "--steps", 3, "--theta-count", 16,
                   "--empirical", 0) == 0
    # rerunning one emitted sweep from its metadata reproduces it byte for byte
    again = tmp_path / "again.csv"
    assert run_cli("sweep", "--config", outdir / "w1_added_theta_pi2.csv.meta",
                   "--out", again) == 0
    assert again.read_bytes() == (outdir / "w1_added_theta_pi2.csv").read_bytes()
    payload = json.loads((outdir / "kappa_fits.json").read_text())
    assert payload["m0"] == pytest.approx(2.0, abs=1e-6)
