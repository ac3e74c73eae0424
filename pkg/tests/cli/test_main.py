import json

import pytest

from src.cli.main import main
from src.config import settings


def status(capsys):
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["run"],
        ["run", "--manifest", "pusher_desk", "--jobs", "0"],
        ["validate"],
    ],
)
def test_usage_errors_exit_with_two(argv, capsys):
    assert main(argv) == 2
    line = status(capsys)
    assert line["status"] == "error"
    assert line["exit_code"] == 2


def test_unknown_preset_is_a_validation_error(runs_dir, capsys):
    assert main(["run", "--manifest", "no_such_preset"]) == 3
    assert "no_such_preset" in status(capsys)["error"]


def test_bad_override_is_a_validation_error(runs_dir, capsys):
    assert main(["run", "--manifest", "pusher_desk", "--set", "evolve.n_gen=zero"]) == 3
    line = status(capsys)
    assert line["command"] == "run"
    assert "n_gen" in line["error"]


def test_resume_of_a_plain_directory(tmp_path, capsys):
    assert main(["resume", "--run", str(tmp_path)]) == 3
    assert "not a run directory" in status(capsys)["error"]


def test_validate_missing_path_is_a_runtime_error(tmp_path, capsys):
    assert main(["validate", "--path", str(tmp_path / "nothing.gsnp")]) == 4
    assert status(capsys)["command"] == "validate"


def test_validate_a_preset_file(capsys):
    assert main(["validate", "--path", str(settings.presets_dir / "skirmish_desk.json")]) == 0
    line = status(capsys)
    assert line["status"] == "ok"
    assert line["result"]["violations"] == []
