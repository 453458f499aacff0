"""Command-line entry points and their exit codes."""

import json

import pytest

from taskworld.cli import main
from taskworld.config.settings import CRITIC_URL_ENV
from taskworld.world.trace_io import load_trace

from .conftest import SCENES_DIR

T3 = str(SCENES_DIR / "t3_kitchen.json")
T3_KEYWORD = "pick up the apple and put it into the bowl"


def test_validate_ok(capsys):
    assert main(["validate", "--scene", T3]) == 0
    assert capsys.readouterr().out.startswith("t3_kitchen: valid (4 objects")


def test_validate_reports_every_issue(tmp_path, capsys):
    doc = json.loads((SCENES_DIR / "t3_kitchen.json").read_text(encoding="utf-8"))
    doc["objects"].append(dict(doc["objects"][1]))
    doc["objects"][0]["bbox"] = [0.8, -0.6, 0.9]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")

    assert main(["validate", "--scene", str(path)]) == 1
    err = capsys.readouterr().err
    assert "objects[4].id" in err
    assert "objects[0].bbox" in err


def test_missing_scene_is_an_io_error(tmp_path, capsys):
    assert main(["validate", "--scene", str(tmp_path / "absent.json")]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_unknown_keyword_is_a_generation_error(capsys):
    assert main(["generate", "--scene", T3, "--keyword", "juggle the plates"]) == 3
    assert "[expand]" in capsys.readouterr().err


def test_remote_critic_without_endpoint(monkeypatch, capsys):
    monkeypatch.delenv(CRITIC_URL_ENV, raising=False)
    assert main(["bench", "--critic", "remote"]) == 4
    assert CRITIC_URL_ENV in capsys.readouterr().err


def test_bad_config_file(tmp_path):
    path = tmp_path / "settings.json"
    path.write_text('{"remote": {"max_retries": -1}}', encoding="utf-8")
    assert main(["validate", "--scene", T3, "--config", str(path)]) == 4
    assert main(["validate", "--scene", T3, "--config", str(tmp_path / "absent.json")]) == 2


def test_generate_writes_the_bundle(tmp_path, capsys):
    out = tmp_path / "bundle"
    assert main(["generate", "--scene", T3, "--keyword", T3_KEYWORD, "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "pick_up_apple_and_put_into_bowl"
    assert lines[3] == "  reachable (horizon 9)"
    reach = json.loads((out / "reachability.json").read_text(encoding="utf-8"))
    assert reach["feasible"] is True
    assert len(reach["segments"]) == 2

    assert json.loads((out / "scales.json").read_text(encoding="utf-8")) == {"apple_0": 0.42}
    flows = json.loads((out / "flows.json").read_text(encoding="utf-8"))
    assert len(flows) == 2
    bddl = sorted((out / "bddl").glob("*.bddl"))
    assert [p.name[:3] for p in bddl] == ["01_", "02_"]
    assert bddl[0].read_text(encoding="utf-8").startswith("(define (problem")
    assert json.loads((out / "task.json").read_text(encoding="utf-8"))["task_activity_name"] == \
        "pick_up_apple_and_put_into_bowl"


def test_run_reports_a_failed_flow_without_failing(tmp_path, capsys):
    scene = str(SCENES_DIR / "t4_kitchen.json")
    argv = ["run", "--scene", scene, "--keyword", "put the cup on the table",
            "--fault", "welded_target=glass_0", "--out", str(tmp_path)]
    assert main(argv) == 0
    report = json.loads((tmp_path / "run.json").read_text(encoding="utf-8"))
    assert report["success"] is False
    assert report["subtasks"][0]["success"] is False


def test_unknown_fault_is_a_validation_error():
    argv = ["run", "--scene", T3, "--keyword", T3_KEYWORD, "--fault", "gravity_off"]
    assert main(argv) == 1


def test_export_trace_writes_one_file_per_subtask(tmp_path, capsys):
    assert main(["export-trace", "--scene", T3, "--keyword", T3_KEYWORD, "--out", str(tmp_path)]) == 0
    paths = sorted(tmp_path.glob("*.jsonl"))
    assert len(paths) == 2
    header, steps = load_trace(paths[0])
    assert header["success"] is True
    assert steps


def test_evolve_writes_logs(tmp_path, capsys):
    scene = str(SCENES_DIR / "t1_kitchen.json")
    argv = ["evolve", "--scene", scene, "--keyword", "put the glass into the fridge",
            "--fault", "stiff_door", "--tau-max", "3", "--out", str(tmp_path)]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert out.strip().endswith("Succeeded")
    logs = sorted((tmp_path / "evolution").glob("*.jsonl"))
    assert len(logs) == 4
    last = [json.loads(line) for line in logs[-1].read_text(encoding="utf-8").splitlines()]
    assert len(last) == 2
    assert last[-1]["success"] is True


@pytest.mark.parametrize("argv", [[], ["generate", "--scene", T3], ["bench", "--planner", "oracle"]])
def test_usage_errors_exit_through_argparse(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
