"""Command-line interface: subcommand behavior and exit codes."""

import json

from click.testing import CliRunner

from geoformal.cli import main
from geoformal.harness import bundled_fixture_path


def invoke(*args, **kwargs):
    return CliRunner().invoke(main, list(args), **kwargs)


def test_exec_prints_answer():
    result = invoke("exec", "Gougu N0 N1 V0 Get V0", "--params", "N0=3 N1=4")
    assert result.exit_code == 0
    assert "answer: 5.0" in result.output


def test_exec_json_output():
    result = invoke("exec", "Gougu N0 N1 V0 Get V0", "--params", "N0=3 N1=4",
                    "--json")
    payload = json.loads(result.output)
    assert payload["answer"] == 5.0


def test_exec_trace_flag():
    result = invoke("exec", "Gougu N0 N1 V0 Get V0", "--params", "N0=3 N1=4",
                    "--trace")
    assert result.exit_code == 0 and "solved V0" in result.output


def test_exec_unknown_operator_exits_1():
    result = invoke("exec", "Solve x Get V0")
    assert result.exit_code == 1
    assert "UnknownOperator" in result.output


def test_exec_strict_numbering_exits_1():
    result = invoke("exec", "Sum N0 N2 V0 Get V0", "--params", "N0=1 N2=2",
                    "--strict")
    assert result.exit_code == 1


def test_exec_policy_unique_rejects_choice():
    result = invoke("exec", "Gougu V0 N2 N1 Get V0", "--params",
                    "N1=13, N2=7", "--policy", "unique")
    assert result.exit_code == 1


def test_verify_pass_and_fail_exit_codes(tmp_path):
    path = tmp_path / "response.txt"
    path.write_text("\\boxed{Gougu N0 N1 V0 Get V0} \\boxed{N0=3 N1=4}",
                    encoding="utf-8")
    good = invoke("verify", "--response-file", str(path), "--truth", "5")
    assert good.exit_code == 0 and "reward:     1" in good.output
    bad = invoke("verify", "--response-file", str(path), "--truth", "6")
    assert bad.exit_code == 1


def test_oracle_check_bundled_fixture():
    result = invoke("oracle-check")
    assert result.exit_code == 0
    assert "passed 30/30" in result.output


def test_oracle_check_json():
    result = invoke("oracle-check", "--json")
    payload = json.loads(result.output)
    assert payload["passed"] == payload["total"] and payload["failed_ids"] == []


def test_score_command(tmp_path):
    samples = tmp_path / "samples.jsonl"
    records = []
    with open(bundled_fixture_path(), encoding="utf-8") as handle:
        for line in handle:
            records.append(json.loads(line))
    rows = []
    for record in records[:5]:
        good = f"\\boxed{{{record['program']}}} \\boxed{{{record['params']}}}"
        rows.append({"id": record["id"], "responses": ["nothing boxed", good]})
    samples.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
    result = invoke("score", str(bundled_fixture_path()), str(samples),
                    "--k", "2", "--stratify", "--json")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["overall"]["pass_at"]["1"] == 0.0
    assert payload["overall"]["pass_at"]["2"] == 1.0


def test_filter_command(tmp_path):
    candidates = tmp_path / "candidates.jsonl"
    rows = [
        {"response": "\\boxed{Gougu N0 N1 V0 Get V0} \\boxed{N0=3 N1=4}",
         "truth": 5},
        {"response": "\\boxed{Solve x Get V0} \\boxed{N0=1}", "truth": 5},
    ]
    candidates.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
    result = invoke("filter", str(candidates), "--json")
    payload = json.loads(result.output)
    assert payload["accepted"] == [0]
    assert payload["acceptance_ratio"] == 0.5


def test_stratify_command():
    result = invoke("stratify", str(bundled_fixture_path()), "--json")
    payload = json.loads(result.output)
    assert "angle-diameter" in payload["2"]
    assert "shaded-ring" in payload[">=6"]


def test_usage_error_exit_code():
    result = invoke("score", "nonexistent.jsonl", "also-missing.jsonl", "--k", "1")
    assert result.exit_code == 2
