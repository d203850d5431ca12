"""Test the command line interface."""

import csv
import json

import numpy as np
import pytest

import wavelock
from wavelock.cli import main, parse_grid
from wavelock.errors import (EXIT_CONFIG_ERROR, EXIT_NUMERICAL_FAILURE,
                             EXIT_SUCCESS, ConfigError, NumericalFailureError,
                             SingularModelError, exit_code_for)


@pytest.fixture
def scenario_file(spiral_scenario, tmp_path):
    """Noiseless spiral scenario with the DE box pinned to the truth."""
    truth = [12.0, 10.0, 0.0, 0.0]
    scenario = spiral_scenario.replace(
        de=wavelock.DEConfig(population_size=4, max_generations=1,
                             bounds=(truth, truth)))
    path = tmp_path / "scenario.json"
    wavelock.save_scenario(scenario, path)
    return path


def read_csv(path):
    with open(path, newline="") as file:
        return list(csv.reader(file))


class TestParseGrid:

    @pytest.mark.parametrize("text, expected", [
        ("0.1:0.1:0.5", [0.1, 0.2, 0.3, 0.4, 0.5]),
        ("0:5:20", [0.0, 5.0, 10.0, 15.0, 20.0]),
        ("2:1:2", [2.0]),
        ("1,2.5,4", [1.0, 2.5, 4.0]),
        ("7", [7.0]),
    ])
    def test_valid(self, text, expected):
        assert parse_grid(text) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("text", ["", ",", "1:0:2", "2:1:1", "a,b",
                                      "1:2"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            parse_grid(text)


@pytest.mark.parametrize("error, code", [
    (ConfigError("bad"), EXIT_CONFIG_ERROR),
    (OSError("missing"), EXIT_CONFIG_ERROR),
    (wavelock.DegenerateGeometryError("zero"), EXIT_CONFIG_ERROR),
    (SingularModelError("rank", 3), EXIT_NUMERICAL_FAILURE),
    (NumericalFailureError("inf"), EXIT_NUMERICAL_FAILURE),
    (RuntimeError("other"), EXIT_NUMERICAL_FAILURE),
])
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("wavelock ")


def test_synth_then_localize(scenario_file, tmp_path):
    data_path = tmp_path / "data.npz"
    result_path = tmp_path / "result.json"
    trace_path = tmp_path / "trace.csv"
    assert main(["-q", "synth", str(scenario_file), "-o",
                 str(data_path)]) == EXIT_SUCCESS
    assert wavelock.load_spectrum(data_path).number_sensors == 12
    assert main(["-q", "localize", str(scenario_file), "--data",
                 str(data_path), "--trace", str(trace_path), "-o",
                 str(result_path)]) == EXIT_SUCCESS
    document = json.loads(result_path.read_text())
    assert document["method"] == "full"
    np.testing.assert_allclose(document["errors"], 0.0, atol=1e-8)
    assert read_csv(trace_path)[0][:5] == ["phase", "iter", "cost",
                                           "damping", "accepted"]


def test_localize_to_stdout(scenario_file, capsys):
    assert main(["-q", "localize", str(scenario_file)]) == EXIT_SUCCESS
    document = json.loads(capsys.readouterr().out)
    assert document["estimated_positions"] == pytest.approx([[12.0, 10.0]],
                                                            abs=1e-8)


def test_missing_scenario_is_config_error(tmp_path, capsys):
    code = main(["-q", "synth", str(tmp_path / "absent.json"), "-o",
                 str(tmp_path / "data.npz")])
    assert code == EXIT_CONFIG_ERROR
    assert "absent.json" in capsys.readouterr().err


def test_invalid_grid_is_config_error(scenario_file, tmp_path):
    code = main(["-q", "sweep", str(scenario_file), "--var", "snr",
                 "--grid", "1:0:2", "-o", str(tmp_path / "sweep.csv")])
    assert code == EXIT_CONFIG_ERROR


def test_coincident_sources_are_numerical_failure(two_source_scenario,
                                                  tmp_path, capsys):
    pinned = [4.0, 4.0, 3.0, 3.0, 0.0]
    scenario = two_source_scenario.replace(
        de=wavelock.DEConfig(population_size=4, max_generations=1,
                             bounds=(pinned, pinned)))
    path = tmp_path / "scenario.json"
    wavelock.save_scenario(scenario, path)
    assert main(["-q", "localize", str(path)]) == EXIT_NUMERICAL_FAILURE
    assert capsys.readouterr().err.startswith("wavelock: error:")


def test_crlb_table(scenario_file, tmp_path):
    path = tmp_path / "crlb.csv"
    assert main(["-q", "crlb", str(scenario_file), "--snr-grid", "10,20",
                 "-o", str(path)]) == EXIT_SUCCESS
    rows = read_csv(path)
    assert rows[0] == ["snr_db", "source", "var_x", "var_y"]
    assert [row[:2] for row in rows[1:]] == [["10", "0"], ["20", "0"]]
    assert float(rows[1][2]) == pytest.approx(10 * float(rows[2][2]),
                                              rel=1e-9)


def test_crlb_noiseless_needs_grid(scenario_file, tmp_path):
    code = main(["-q", "crlb", str(scenario_file), "-o",
                 str(tmp_path / "crlb.csv")])
    assert code == EXIT_CONFIG_ERROR


def test_sweep_table(scenario_file, tmp_path):
    path = tmp_path / "sweep.csv"
    assert main(["-q", "--threads", "2", "sweep", str(scenario_file),
                 "--var", "sync_std", "--grid", "0", "--trials", "2",
                 "--no-baseline", "-o", str(path)]) == EXIT_SUCCESS
    rows = read_csv(path)
    assert rows[0] == ["variable", "value", "method", "trials", "failures",
                       "error", "sqrt_crlb"]
    assert rows[1][:5] == ["sync_std", "0", "full", "2", "0"]


def test_surface_table(scenario_file, tmp_path):
    path = tmp_path / "surface.csv"
    assert main(["-q", "surface", str(scenario_file), "--x-grid",
                 "11:1:13", "--y-grid", "9:1:11", "-o",
                 str(path)]) == EXIT_SUCCESS
    rows = read_csv(path)
    assert rows[0] == ["x", "y", "cost"]
    assert len(rows) == 1 + 9
    costs = {(row[0], row[1]): float(row[2]) for row in rows[1:]}
    assert min(costs, key=costs.get) == ("12", "10")


def test_surface_bad_source_is_config_error(scenario_file, tmp_path):
    code = main(["-q", "surface", str(scenario_file), "--x-grid", "12",
                 "--y-grid", "10", "--source", "3", "-o",
                 str(tmp_path / "surface.csv")])
    assert code == EXIT_CONFIG_ERROR
