import csv
import json
from pathlib import Path

import numpy as np
import pytest

from losdof import cli, experiments
from losdof.errors import ConfigError, NumericalFailureError, ParaxialViolationError
from losdof.experiments import emit_plotdata, load_scenario, run_scenario

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = """
[link]
frequency_hz = {freq}
distance_m = {D}

[source]
shape = "interval"
extents_m = [0.2]
counts = [{N}]

[analysis]
kernel = "fresnel"
sigma = [0.5, 0.1]

[sweep]
axis = "frequency"
values = {values}
"""


def write(tmp_path, text, name="s.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def small(tmp_path, freq=300e9, D=2.0, N=40, values="[100e9, 300e9]"):
    return write(tmp_path, SMALL.format(freq=freq, D=D, N=N, values=values))


@pytest.fixture(scope="module")
def fig2_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig2")
    report = run_scenario(load_scenario(CONFIGS / "fig2.toml"), out_dir=out)
    return report, out


def test_fig2_counts(fig2_run):
    report, _ = fig2_run
    counts = [r["empirical_dof"]["0.5"] for r in report.records]
    for got, want in zip(counts, (4, 7, 20)):
        assert abs(got - want) <= 2
    assert [r["value"] for r in report.records] == [60e9, 100e9, 300e9]


def test_plunge_width_nonincreasing(fig2_run):
    widths = [r["relative_plunge_width"] for r in fig2_run[0].records]
    assert all(b <= a for a, b in zip(widths, widths[1:]))


def test_rerun_is_deterministic(fig2_run, tmp_path):
    report, out = fig2_run
    again = run_scenario(load_scenario(CONFIGS / "fig2.toml"), out_dir=tmp_path)
    for name in ("spectrum_000.csv", "spectrum_001.csv", "spectrum_002.csv"):
        assert (out / name).read_bytes() == (tmp_path / name).read_bytes()
    assert report.to_json(include_timestamp=False) == again.to_json(include_timestamp=False)
    assert report.metadata["config_hash"] == again.metadata["config_hash"]
    saved = json.loads((out / "report.json").read_text())
    assert saved["metadata"]["config_hash"] == report.metadata["config_hash"]


def test_parallel_sweep_matches_serial(tmp_path):
    s = load_scenario(small(tmp_path, values="[60e9, 100e9, 200e9, 300e9]"))
    a = run_scenario(s, jobs=1)
    b = run_scenario(s, jobs=4)
    assert a.to_json(False) == b.to_json(False)


def test_plotdata(fig2_run, tmp_path):
    report, out = fig2_run
    paths = emit_plotdata(report, tmp_path)
    assert len(paths) == 3
    with open(paths[2], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["index_over_dof", "eigenvalue_normalized"]
    x = np.array([float(r["index_over_dof"]) for r in rows])
    y = np.array([float(r["eigenvalue_normalized"]) for r in rows])
    dof = report.records[2]["closed_form_dof"]
    assert x.max() == pytest.approx(200 / dof, rel=1e-12)
    crossing = x[np.argmax(y < 0.5)]
    assert crossing == pytest.approx(1.0, abs=0.1)


def test_plotdata_single_eigenvalue(tmp_path):
    cfg = write(tmp_path, """
[link]
wavelength_m = 0.01
distance_m = 1.0
[source]
shape = "interval"
extents_m = [0.1]
counts = [1]
[analysis]
kernel = "fourier"
""")
    report = run_scenario(load_scenario(cfg), out_dir=tmp_path / "o")
    (path,) = emit_plotdata(report)
    assert len(path.read_text().splitlines()) == 2


def test_plotdata_missing_spectrum(tmp_path):
    report = run_scenario(load_scenario(small(tmp_path)), out_dir=tmp_path / "o")
    (tmp_path / "o" / "spectrum_000.csv").unlink()
    with pytest.raises(FileNotFoundError):
        emit_plotdata(report)


def test_empty_sweep_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="empty"):
        load_scenario(small(tmp_path, values="[]"))


@pytest.mark.parametrize("values", ["[3e11, 1e11]", "[-1.0, 2.0]"])
def test_sweep_must_increase(tmp_path, values):
    with pytest.raises(ConfigError):
        load_scenario(small(tmp_path, values=values))


def test_parse_error_reports_line(tmp_path):
    p = write(tmp_path, "[link]\nfrequency_hz = = 3\n")
    with pytest.raises(ConfigError, match="line 2"):
        load_scenario(p)


def test_missing_field(tmp_path):
    p = write(tmp_path, '[link]\nfrequency_hz = 1e9\ndistance_m = 1.0\n[source]\nshape = "interval"\n')
    with pytest.raises(ConfigError, match="extents_m"):
        load_scenario(p)


def test_paraxial_violation_and_override(tmp_path):
    s = load_scenario(small(tmp_path, D=0.1))
    with pytest.raises(ParaxialViolationError):
        run_scenario(s)
    report = run_scenario(s, override_paraxial=True)
    assert report.metadata["override_paraxial"]
    assert all(r["paraxial_override"] for r in report.records)


def test_failed_point_does_not_abort(tmp_path, monkeypatch):
    real = experiments.eigen_spectrum
    calls = []

    def flaky(H, normalizer):
        calls.append(1)
        if len(calls) == 1:
            raise NumericalFailureError("no convergence")
        return real(H, normalizer)

    monkeypatch.setattr(experiments, "eigen_spectrum", flaky)
    report = run_scenario(load_scenario(small(tmp_path)))
    assert report.records[0]["error"].startswith("numerical failure")
    assert report.records[1]["error"] is None
    assert len(report.failed) == 1
    calls.clear()
    assert cli.main(["sweep", "--config", str(small(tmp_path))]) == cli.EXIT_NUMERICAL


def test_landau_scenario(tmp_path):
    report = run_scenario(load_scenario(CONFIGS / "landau_plunge.toml"), out_dir=tmp_path)
    assert [r["inputs"]["grid_points"] for r in report.records] == [512, 512, 640, 1280]
    for r in report.records:
        assert abs(r["empirical_dof"]["0.5"] - r["closed_form_dof"]) <= 1
    assert report.metadata["regression_slope"]["0.1"] is not None


def test_aperture_axis_scales_both(tmp_path):
    text = SMALL.format(freq=300e9, D=2.0, N=30, values="[0.5, 1.0]").replace(
        'axis = "frequency"', 'axis = "aperture"')
    report = run_scenario(load_scenario(write(tmp_path, text)))
    d0, d1 = (r["closed_form_dof"] for r in report.records)
    assert d1 == pytest.approx(4 * d0)


# CLI


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_cli_dof(capsys, tmp_path):
    code, out = run_cli(capsys, "dof", "--config", str(CONFIGS / "fig2.toml"), "--sigma", "0.5,0.1")
    assert code == 0
    pts = json.loads(out)["points"]
    assert [round(p["closed_form_dof"], 3) for p in pts] == [4.003, 6.671, 20.014]
    assert set(pts[0]["landau_corrected"]) == {"0.5", "0.1"}


def test_cli_spectrum(capsys, tmp_path):
    code, out = run_cli(capsys, "spectrum", "--config", str(small(tmp_path, N=100)),
                        "--out", str(tmp_path / "sp"))
    assert code == 0
    res = json.loads(out)
    assert res["N_r"] == 100
    assert (tmp_path / "sp" / "spectrum.csv").exists()


def test_cli_sweep_writes_files(capsys, tmp_path):
    code, out = run_cli(capsys, "sweep", "--config", str(small(tmp_path)), "--out", str(tmp_path / "o"))
    assert code == 0
    assert {p.name for p in (tmp_path / "o").iterdir()} == {
        "report.json", "spectrum_000.csv", "spectrum_001.csv", "plot_000.csv", "plot_001.csv"}


def test_cli_landau(capsys):
    code, out = run_cli(capsys, "landau", "--T", "1,3,5,10", "--sigma", "0.5")
    assert code == 0
    res = json.loads(out)
    for p in res["points"]:
        assert abs(p["empirical_dof"]["0.5"] - p["2BT"]) <= 1
    assert "regression_slope" in res and "predicted_slope" in res


def test_cli_sampling(capsys, tmp_path):
    code, out = run_cli(capsys, "sampling", "--config", str(small(tmp_path)))
    assert code == 0
    p = json.loads(out)["points"][1]
    assert p["N_max"] == 40
    assert p["symmetric_rayleigh_spacing_m"] ** 2 == pytest.approx(p["rayleigh_product_m2"])


def test_cli_validate_exit_codes(capsys, tmp_path):
    assert run_cli(capsys, "validate", "--config", str(small(tmp_path)))[0] == 0
    bad = small(tmp_path, D=0.1)
    assert run_cli(capsys, "validate", "--config", str(bad))[0] == cli.EXIT_VALIDITY
    assert run_cli(capsys, "sweep", "--config", str(bad))[0] == cli.EXIT_VALIDITY
    assert run_cli(capsys, "sweep", "--config", str(bad), "--override-paraxial")[0] == 0


def test_cli_config_error(capsys, tmp_path):
    assert run_cli(capsys, "sweep", "--config", str(small(tmp_path, values="[]")))[0] == cli.EXIT_CONFIG
    assert run_cli(capsys, "dof", "--config", str(tmp_path / "nope.toml"))[0] == cli.EXIT_CONFIG
    assert run_cli(capsys, "dof")[0] == cli.EXIT_CONFIG
