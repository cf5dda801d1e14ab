import csv
import json

import pytest

from wulffkit.cli import EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, load_config, main, validate

BASE = {
    "schema_version": 1,
    "anisotropy": {"family": "ellipsoid", "Q": [[4, 0, 0], [0, 1, 0], [0, 0, 1]]},
    "surface": {"kind": "wulff", "scale": 1.0},
    "p": 3.0,
    "q": 4.0,
    "r_values": [1.0, 2.0],
    "resolutions": [16],
}


def write(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if isinstance(data, dict) else data)
    return str(path)


def config(**changes):
    data = json.loads(json.dumps(BASE))
    data.update(changes)
    return data


def test_bundled_wulff_equality_runs_clean(tmp_path, capsys):
    assert main(["run", "wulff_equality", "--output-dir", str(tmp_path)]) == EXIT_OK
    report = json.loads((tmp_path / "report_res128.json").read_text())
    assert report["hk_product_l2"] == pytest.approx(1.0, abs=1e-5)
    assert report["schema_version"] == 1
    assert "hk_l2=" in capsys.readouterr().out


def test_list_configs(capsys):
    assert main(["--list-configs"]) == EXIT_OK
    names = capsys.readouterr().out.split()
    assert "wulff_equality.json" in names and "pinch_sweep.json" in names


@pytest.mark.parametrize("name", ["wulff_equality", "pinch_sweep", "refinement_study", "sphere_isotropic",
                                  "ellipsoid_isotropic", "harmonic_wulff_2d.json"])
def test_bundled_configs_validate(name):
    assert load_config(name).schema_version == 1


def test_sweep_writes_monotone_csv(tmp_path):
    data = config(surface={"kind": "wulff", "scale": 1.0,
                           "perturbation": [{"degree": 2, "order": 0, "coefficient": 0.16}]},
                  resolutions=[24],
                  sweep={"parameter": "surface.perturbation.0.coefficient", "values": [0.16, 0.04, 0.01]})
    assert main(["sweep", write(tmp_path, data), "--output-dir", str(tmp_path / "out"), "--quiet"]) == EXIT_OK
    with open(tmp_path / "out" / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["value"]) for r in rows] == [0.16, 0.04, 0.01]
    for column in ("pinching_epsilon", "radius_deviation", "hausdorff", "mc_deviation_r1.0"):
        values = [float(r[column]) for r in rows]
        assert values[0] > values[1] > values[2], column
    assert (tmp_path / "out" / "report_res24_sweep0p04.json").is_file()


def test_q_not_above_n_names_q(tmp_path, capsys):
    assert main(["run", write(tmp_path, config(q=2.0))]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "q:" in err


def test_study_needs_three_resolutions(tmp_path, capsys):
    assert main(["study", write(tmp_path, config(resolutions=[16, 32]))]) == EXIT_CONFIG
    assert "resolutions" in capsys.readouterr().err


def test_study_writes_table(tmp_path, capsys):
    data = config(anisotropy={"family": "isotropic"}, surface={"kind": "ellipsoid", "semi_axes": [3.0, 1.0, 0.5]},
                  resolutions=[16, 32, 64])
    assert main(["study", write(tmp_path, data), "--output-dir", str(tmp_path)]) == EXIT_OK
    table = json.loads((tmp_path / "study.json").read_text())
    assert all(o >= 2 for o in table["orders"]["hm_residual"] if o is not None)
    assert table["orders"]["h_gamma_max_error"] is None
    assert "n/a" in capsys.readouterr().out
    assert (tmp_path / "study.csv").read_text().startswith("resolution,")


def test_json_syntax_error_reports_position(tmp_path, capsys):
    path = write(tmp_path, '{\n  "p": 3.0,\n  "q" 4.0\n}')
    assert main(["run", path]) == EXIT_CONFIG
    assert "config.json:3:" in capsys.readouterr().err


@pytest.mark.parametrize("changes, field", [
    ({"extra": 1}, "extra"),
    ({"schema_version": 2}, "schema_version"),
    ({"p": 2.0}, "p"),
    ({"r_values": [3.0]}, "r_values"),
    ({"resolutions": [32, 16]}, "resolutions"),
    ({"resolutions": [4]}, "resolutions"),
    ({"anisotropy": {"family": "ellipsoid", "Q": [[1, 0, 0], [0, -1, 0], [0, 0, 1]]}}, "anisotropy"),
])
def test_invalid_fields_are_named(tmp_path, capsys, changes, field):
    assert main(["run", write(tmp_path, config(**changes))]) == EXIT_CONFIG
    assert field in capsys.readouterr().err


def test_unknown_config_name(capsys):
    assert main(["run", "no_such_config"]) == EXIT_CONFIG
    assert "no_such_config" in capsys.readouterr().err


def test_validate_collects_every_problem():
    from wulffkit.cli import ConfigError

    with pytest.raises(ConfigError) as info:
        validate(config(p=1.0, q=1.0, extra=True))
    fields = {where for where, _ in info.value.problems}
    assert {"p", "q", "extra"} <= fields


def test_violation_exits_with_diff(tmp_path, capsys):
    data = config(anisotropy={"family": "isotropic"}, surface={"kind": "ellipsoid", "semi_axes": [2.0, 1.0, 1.0]},
                  tolerances={"hm_residual_max": 1e-30})
    assert main(["run", write(tmp_path, data), "--output-dir", str(tmp_path), "--quiet"]) == EXIT_VIOLATION
    err = capsys.readouterr().err
    assert "--- expected" in err and "+ hm_residual = " in err and "report_res16.json" in err


def test_reports_are_byte_identical_across_runs_and_jobs(tmp_path):
    data = config(resolutions=[16, 24])
    path = write(tmp_path, data)
    assert main(["run", path, "--output-dir", str(tmp_path / "a"), "--quiet"]) == EXIT_OK
    assert main(["run", path, "--output-dir", str(tmp_path / "b"), "--quiet", "--jobs", "2"]) == EXIT_OK
    for name in ("report_res16.json", "report_res24.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_CONFIG
