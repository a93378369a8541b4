"""Dataset ingestion, oracle self-checks, Pass@K scoring, filtering, and
difficulty stratification."""

import json
import random

import pytest

from geoformal.errors import (
    InsufficientSamplesError,
    MissingRecordError,
    SchemaError,
)
from geoformal.harness import (
    ProblemRecord,
    SampleSet,
    bundled_fixture_path,
    difficulty_bucket,
    filter_synthetic,
    load_dataset,
    load_samples,
    run_oracle_check,
    score_samples,
    stratify_by_operators,
)

ANGLE_PROGRAM = "Sum N0 N1 C180 Sum N1 V0 C180 Get V0"
ANGLE_RESPONSE = "\\boxed{Sum N0 N1 C180 Sum N1 V0 C180 Get V0} \\boxed{N0=3*x N1=4*x+61}"


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(row) for row in rows) + "\n",
                    encoding="utf-8")


def boxed_response(record):
    return f"\\boxed{{{record.program}}} \\boxed{{{record.params}}}"


# --- loading ---

def test_bundled_fixture_loads():
    records = load_dataset(bundled_fixture_path())
    assert len(records) >= 25
    assert all(record.program and record.params is not None for record in records)


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    assert load_dataset(path) == []


def test_load_missing_answer(tmp_path):
    path = tmp_path / "bad.jsonl"
    write_jsonl(path, [{"id": "a", "question": "q"}])
    with pytest.raises(SchemaError, match="line 1"):
        load_dataset(path)


def test_load_choices_resolve_answer(tmp_path):
    path = tmp_path / "mc.jsonl"
    write_jsonl(path, [{"id": "a", "question": "q",
                        "choices": [10, 20, 30], "answer_index": 2}])
    assert load_dataset(path)[0].answer == 30.0


def test_load_duplicate_id(tmp_path):
    path = tmp_path / "dup.jsonl"
    write_jsonl(path, [{"id": "a", "answer": 1}, {"id": "a", "answer": 2}])
    with pytest.raises(SchemaError, match="line 2"):
        load_dataset(path)


def test_load_program_requires_params(tmp_path):
    path = tmp_path / "p.jsonl"
    write_jsonl(path, [{"id": "a", "answer": 1, "program": "Get V0"}])
    with pytest.raises(SchemaError):
        load_dataset(path)


def test_load_samples(tmp_path):
    path = tmp_path / "s.jsonl"
    write_jsonl(path, [{"id": "a", "responses": ["r1", "r2"]}])
    sets = load_samples(path)
    assert sets == [SampleSet(id="a", responses=("r1", "r2"))]


# --- oracle self-check ---

def test_oracle_check_fixture_all_pass():
    report = run_oracle_check(load_dataset(bundled_fixture_path()))
    assert report.ok and report.total >= 25, report.failed_ids


def test_oracle_check_flags_perturbed_answer():
    records = load_dataset(bundled_fixture_path())
    broken = records[0]
    records[0] = ProblemRecord(
        id=broken.id, question=broken.question, answer=broken.answer + 1,
        program=broken.program, params=broken.params, split=broken.split,
    )
    report = run_oracle_check(records)
    assert report.passed == report.total - 1
    assert report.failed_ids == [broken.id]


def test_oracle_check_empty_input():
    assert run_oracle_check([]).ok


# --- Pass@K ---

def _records(n):
    return [ProblemRecord(id=f"p{i}", question="", answer=51.0,
                          program=ANGLE_PROGRAM, params="N0=3*x N1=4*x+61",
                          split="pgps9k" if i % 2 else "unigeo")
            for i in range(n)]


def _samples(flags_matrix):
    sets = []
    for i, flags in enumerate(flags_matrix):
        responses = tuple(ANGLE_RESPONSE if flag else "no box" for flag in flags)
        sets.append(SampleSet(id=f"p{i}", responses=responses))
    return sets


def test_pass_at_k_from_definition():
    report = score_samples(_records(2), _samples([[0, 1], [0, 0]]), k=2)
    assert report.overall.pass_at[1] == 0.0
    assert report.overall.pass_at[2] == 0.5


def test_pass_at_k_all_correct():
    report = score_samples(_records(3), _samples([[1, 1]] * 3), k=2)
    assert all(v == 1.0 for v in report.overall.pass_at.values())


def test_pass_at_k_diagonal_construction():
    # response j of problem i is correct iff j == i mod K
    k = 4
    flags = [[j == (i % k) for j in range(k)] for i in range(8)]
    report = score_samples(_records(8), _samples(flags), k=k)
    assert report.overall.pass_at[k] == 1.0
    assert report.overall.pass_at[1] == pytest.approx(1 / k)


def test_pass_at_k_monotone_in_k():
    rng = random.Random(31)
    flags = [[rng.random() < 0.3 for _ in range(5)] for _ in range(12)]
    report = score_samples(_records(12), _samples(flags), k=5)
    for metrics in [report.overall, *report.by_split.values()]:
        values = [metrics.pass_at[k] for k in range(1, 6)]
        assert values == sorted(values)


def test_pass_at_1_of_empty_responses_is_zero():
    sets = [SampleSet(id=f"p{i}", responses=("",)) for i in range(4)]
    report = score_samples(_records(4), sets, k=1)
    assert report.overall.pass_at[1] == 0.0


def test_score_invariant_under_problem_permutation():
    rng = random.Random(17)
    flags = [[rng.random() < 0.5 for _ in range(3)] for _ in range(10)]
    records, samples = _records(10), _samples(flags)
    base = score_samples(records, samples, k=3)
    shuffled = list(zip(records, samples))
    rng.shuffle(shuffled)
    again = score_samples([r for r, _ in shuffled], [s for _, s in shuffled], k=3)
    assert base.overall.pass_at == again.overall.pass_at
    assert base.diagnostics == again.diagnostics


def test_score_missing_record():
    with pytest.raises(MissingRecordError):
        score_samples(_records(1), [SampleSet(id="ghost", responses=("",))], k=1)


def test_score_insufficient_samples():
    with pytest.raises(InsufficientSamplesError):
        score_samples(_records(1), [SampleSet(id="p0", responses=("",))], k=2)


def test_score_diagnostics_histogram():
    report = score_samples(_records(2), _samples([[1, 0], [0, 0]]), k=2)
    assert report.diagnostics.get("Match") == 1
    assert report.diagnostics.get("NoBoxedAnswer") == 3


# --- filtering ---

def test_filter_accepts_verified_and_reports_codes():
    records = load_dataset(bundled_fixture_path())
    good = boxed_response(records[0])
    bad = "\\boxed{Solve x Set V0 Get V0} \\boxed{N0=1}"
    result = filter_synthetic([(good, records[0].answer), (bad, 5.0)])
    assert result.accepted == [0]
    assert result.rejected == [(1, "UnknownOperator")]
    assert result.acceptance_ratio == 0.5


def test_filter_empty():
    result = filter_synthetic([])
    assert result.accepted == [] and result.rejected == []
    assert result.acceptance_ratio == 0.0


# --- stratification ---

def test_bucket_angle_program_is_2():
    assert difficulty_bucket(ANGLE_PROGRAM) == "2"


def test_bucket_open_top():
    program = ("Circle_R_Area N0 V0 RNgon_L_Area C3 N0 V1 RNgon_H_Area C3 V2 V1 "
               "Circle_R_Area V2 V3 Sum V1 V4 V0 Sum V3 V4 V5 Get V5")
    assert difficulty_bucket(program) == ">=6"


def test_bucket_low_counts_fold_into_2():
    assert difficulty_bucket("Gougu N0 N1 V0 Get V0") == "2"
    assert difficulty_bucket("Get V0") == "2"


def test_bucket_middle_values():
    three = "Gougu N0 N1 V0 Equal V0 V1 Equal V1 V2 Get V2"
    assert difficulty_bucket(three) == "3"


def test_stratify_excludes_programless_records_with_warning():
    records = [
        ProblemRecord(id="a", question="", answer=1.0,
                      program="Get N0", params="N0=1"),
        ProblemRecord(id="b", question="", answer=1.0),
    ]
    buckets, warnings = stratify_by_operators(records)
    assert sum(len(v) for v in buckets.values()) == 1
    assert warnings and "b" in warnings[0]
