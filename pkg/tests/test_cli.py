import json
import xml.etree.ElementTree as ET

import pytest

from app.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, cli_main
from app.io.traces import METRICS_HEADER

SCENARIO = "n_boids = 12\nseed = 5\nticks = 15\nn_sensors = 4\n"


@pytest.fixture
def scenario(tmp_path):
    path = tmp_path / "scenario.toml"
    path.write_text(SCENARIO, encoding="utf-8")
    return path


def test_run_writes_a_trace(scenario, tmp_path, capsys):
    trace = tmp_path / "out.csv"
    assert cli_main(["run", str(scenario), "--trace", str(trace)]) == EXIT_OK
    lines = trace.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# {")
    assert lines[1] == "tick,entity_kind,entity_id,x,y,heading,count,rule"
    assert len(lines) == 2 + 16 * (12 + 4)
    summary = json.loads(capsys.readouterr().out)
    assert summary["metadata"]["scenario"]["n_boids"] == 12
    assert summary["final"]["tick"] == 15


def test_run_twice_gives_identical_traces(scenario, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli_main(["run", str(scenario), "--trace", str(first)]) == EXIT_OK
    assert cli_main(["run", str(scenario), "--trace", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_run_picks_jsonl_from_the_suffix(scenario, tmp_path):
    trace = tmp_path / "out.jsonl"
    assert cli_main(["run", str(scenario), "--trace", str(trace)]) == EXIT_OK
    first = json.loads(trace.read_text(encoding="utf-8").splitlines()[0])
    assert "metadata" in first


def test_run_honours_output_paths_in_the_scenario(tmp_path):
    metrics = tmp_path / "metrics.csv"
    plot = tmp_path / "plot.svg"
    path = tmp_path / "scenario.toml"
    path.write_text(SCENARIO + f'metrics_path = "{metrics.as_posix()}"\nplot_path = "{plot.as_posix()}"\n', encoding="utf-8")
    assert cli_main(["run", str(path)]) == EXIT_OK
    assert metrics.read_text(encoding="utf-8").splitlines()[0] == ",".join(METRICS_HEADER)
    assert ET.fromstring(plot.read_text(encoding="utf-8")).tag == "{http://www.w3.org/2000/svg}svg"


def test_run_draws_a_snapshot(scenario, tmp_path):
    plot = tmp_path / "snap.svg"
    assert cli_main(["run", str(scenario), "--plot", str(plot), "--style", "snapshot"]) == EXIT_OK
    root = ET.fromstring(plot.read_text(encoding="utf-8"))
    assert len(root.findall(".//{http://www.w3.org/2000/svg}line")) == 12


def test_check_accepts_a_clean_trace(scenario, tmp_path, capsys):
    trace = tmp_path / "out.csv"
    cli_main(["run", str(scenario), "--trace", str(trace)])
    capsys.readouterr()
    assert cli_main(["check", str(trace)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "ok: 16 ticks, no violations"


def test_check_flags_a_corrupted_heading(scenario, tmp_path, capsys):
    trace = tmp_path / "out.csv"
    cli_main(["run", str(scenario), "--trace", str(trace)])
    lines = trace.read_text(encoding="utf-8").splitlines()
    fields = lines[2].split(",")
    fields[5] = "400.000000"
    lines[2] = ",".join(fields)
    trace.write_text("\n".join(lines) + "\n", encoding="utf-8")
    capsys.readouterr()
    assert cli_main(["check", str(trace)]) == EXIT_FAILURE
    err = capsys.readouterr().err
    assert "heading_range" in err
    assert "boid 0" in err


def test_check_flags_a_miscounted_sensor(scenario, tmp_path, capsys):
    trace = tmp_path / "out.csv"
    cli_main(["run", str(scenario), "--trace", str(trace)])
    lines = trace.read_text(encoding="utf-8").splitlines()
    row = next(i for i, line in enumerate(lines) if line.startswith("5,sensor,0,"))
    fields = lines[row].split(",")
    count = int(fields[6])
    fields[6] = str(count - 1 if count else 1)
    lines[row] = ",".join(fields)
    trace.write_text("\n".join(lines) + "\n", encoding="utf-8")
    capsys.readouterr()
    assert cli_main(["check", str(trace)]) == EXIT_FAILURE
    err = capsys.readouterr().err
    assert "sensor_count_consistent" in err
    assert "tick 5: sensor 0" in err


def test_metrics_recomputes_from_a_trace(scenario, tmp_path, capsys):
    trace = tmp_path / "out.jsonl"
    in_process = tmp_path / "in_process.csv"
    cli_main(["run", str(scenario), "--trace", str(trace), "--metrics", str(in_process)])
    capsys.readouterr()
    assert cli_main(["metrics", str(trace)]) == EXIT_OK
    assert capsys.readouterr().out == in_process.read_text(encoding="utf-8")


def test_sweep_prints_one_row_per_seed(scenario, capsys):
    assert cli_main(["sweep", str(scenario), "--seeds", "3", "--ticks", "10"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("seed,initial_mean_flockmates")
    assert [line.split(",")[0] for line in lines[1:]] == ["5", "6", "7"]


@pytest.mark.parametrize("argv", [[], ["run"], ["bogus"], ["run", "x.toml", "--style", "pie"]])
def test_usage_errors_exit_2(argv, capsys):
    assert cli_main(argv) == EXIT_USAGE


def test_invalid_scenario_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("n_boids = 3\nseed = 1\nvision = 400\n", encoding="utf-8")
    assert cli_main(["run", str(path)]) == EXIT_FAILURE
    assert "vision" in capsys.readouterr().err


@pytest.mark.parametrize("command", ["run", "check", "metrics", "sweep"])
def test_missing_input_file_is_a_usage_error(command, tmp_path, capsys):
    assert cli_main([command, str(tmp_path / "nope")]) == EXIT_USAGE
    assert "no such file" in capsys.readouterr().err


def test_unwritable_output_exits_1(scenario, tmp_path, capsys):
    assert cli_main(["run", str(scenario), "--trace", str(tmp_path / "missing" / "out.csv")]) == EXIT_FAILURE


def test_infinite_extent_exits_1(tmp_path, capsys):
    path = tmp_path / "inf.toml"
    path.write_text("n_boids = 5\nseed = 1\nticks = 2\nmin_x = -inf\n", encoding="utf-8")
    assert cli_main(["run", str(path)]) == EXIT_FAILURE
    assert "min_x" in capsys.readouterr().err
