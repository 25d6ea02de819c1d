from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

from conftest import DATA_DIR

WORKED_EXAMPLE = DATA_DIR / "worked_example.json"


def _run(*args: str, cwd: Path | None = None) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "camsched", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def test_generate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        proc = _run(
            "generate", "--seed", "11", "--cameras", "10", "--objects", "5",
            "--cell-radius", "150", "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["format"] == "camsched-instance"
    assert len(doc["scenario"]["cameras"]) == 10


def test_schedule_worked_example(tmp_path):
    out = tmp_path / "alloc.json"
    proc = _run("schedule", "--instance", str(WORKED_EXAMPLE), "--algo", "mqbs",
                "--out", str(out), "--grid")
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(out.read_text())
    assert doc["algorithm"] == "mqbs"
    assert doc["objective"] == 21.0
    assert "Camera5 Camera5 Camera5 Camera6 Camera6" in proc.stdout
    base = json.loads(_run("schedule", "--instance", str(WORKED_EXAMPLE), "--algo", "baseline").stdout)
    assert base["objective"] == 15.0


def test_solve_worked_example():
    proc = _run("solve", "--instance", str(WORKED_EXAMPLE))
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert doc["z_star"] == 21.0
    assert doc["proven_optimal"] is True


def test_sweep_writes_deterministic_csv(tmp_path):
    args = (
        "sweep", "--var", "objects", "--values", "3", "4", "--runs", "2",
        "--seed", "5", "--cameras", "10", "--objects", "4", "--cell-radius", "150",
    )
    d1, d2 = tmp_path / "one", tmp_path / "two"
    assert _run(*args, "--out", str(d1)).returncode == 0
    assert _run(*args, "--out", str(d2)).returncode == 0
    c1 = (d1 / "sweep_object_count.csv").read_bytes()
    c2 = (d2 / "sweep_object_count.csv").read_bytes()
    assert c1 == c2
    assert c1.decode().startswith("sweep_var,sweep_value,algo,")


def test_replay_produces_json_lines(tmp_path):
    events = tmp_path / "events.json"
    events.write_text(json.dumps([
        {"time_ms": 1000, "kind": "arrival", "flow_id": 1, "rb_req_per_subband": [1, 1, 1]},
        {"time_ms": 4000, "kind": "departure", "flow_id": 1},
    ]))
    out1, out2 = tmp_path / "log1.jsonl", tmp_path / "log2.jsonl"
    for out in (out1, out2):
        proc = _run("replay", "--instance", str(WORKED_EXAMPLE), "--events", str(events),
                    "--period-ms", "10000", "--out", str(out))
        assert proc.returncode == 0, proc.stderr
    assert out1.read_bytes() == out2.read_bytes()
    records = [json.loads(line) for line in out1.read_text().splitlines()]
    assert records[0]["event"] == "epoch"
    assert {r["event"] for r in records} == {"epoch", "arrival", "departure"}


def test_replay_generates_traffic_when_no_events_given(tmp_path):
    out = tmp_path / "log.jsonl"
    proc = _run("replay", "--instance", str(WORKED_EXAMPLE), "--duration-ms", "20000",
                "--traffic-seed", "3", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "generate": {"cameras": 8, "objects": 4, "cell_radius": 150.0},
        "spectrum": {"total_rbs": 12, "sub_bands": 3},
    }))
    out = tmp_path / "inst.json"
    proc = _run("generate", "--seed", "2", "--config", str(config),
                "--objects", "3", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(out.read_text())
    assert len(doc["scenario"]["cameras"]) == 8  # from config
    assert len(doc["scenario"]["objects"]) == 3  # flag wins
    assert doc["spectrum"]["total_rbs"] == 12


def test_unknown_subcommand_fails():
    assert _run("frobnicate").returncode != 0
