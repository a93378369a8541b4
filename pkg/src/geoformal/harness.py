"""Batch scoring: dataset ingestion, ground-truth self-checks, Pass@K
scoring of K-sample response files, synthesis filtering, and difficulty
stratification by operator count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import InsufficientSamplesError, MissingRecordError, SchemaError
from .executor import DEFAULT_POLICY, RootPolicy
from .program import parse_program
from .verify import DiagnosticCode, Verdict, verify_program, verify_response

#: Difficulty buckets over non-Get instruction counts.  The top bucket is
#: open-ended; counts below 2 fold into the lowest bucket.
STRATA = ("2", "3", "4", "5", ">=6")


@dataclass(frozen=True)
class ProblemRecord:
    id: str
    question: str
    answer: float
    program: Optional[str] = None
    params: Optional[str] = None
    choices: Optional[Tuple[float, ...]] = None
    split: str = "default"
    image_ref: Optional[str] = None


@dataclass(frozen=True)
class SampleSet:
    id: str
    responses: Tuple[str, ...]


def _record_from_json(line_no: int, obj: dict) -> ProblemRecord:
    if not isinstance(obj, dict):
        raise SchemaError(f"line {line_no}: record is not an object")

    def fail(msg):
        raise SchemaError(f"line {line_no}: {msg}")

    record_id = obj.get("id")
    if not isinstance(record_id, str) or not record_id:
        fail("missing or empty 'id'")
    choices = obj.get("choices")
    if choices is not None:
        try:
            choices = tuple(float(c) for c in choices)
        except (TypeError, ValueError):
            fail("'choices' must be a list of numbers")
    answer = obj.get("answer")
    if answer is None and choices is not None:
        label = obj.get("answer_index")
        if not isinstance(label, int) or not (0 <= label < len(choices)):
            fail("'answer_index' must select one of 'choices'")
        answer = choices[label]
    if answer is None:
        fail("missing 'answer' (and no resolvable choice)")
    try:
        answer = float(answer)
    except (TypeError, ValueError):
        fail("'answer' is not a number")
    if not math.isfinite(answer):
        fail("'answer' must be finite")
    program = obj.get("program")
    params = obj.get("params")
    if program is not None and params is None:
        fail("record with 'program' must carry 'params'")
    return ProblemRecord(
        id=record_id,
        question=obj.get("question", ""),
        answer=answer,
        program=program,
        params=params,
        choices=choices,
        split=obj.get("split", "default"),
        image_ref=obj.get("image_ref"),
    )


def load_dataset(path) -> List[ProblemRecord]:
    """Load a JSONL dataset, one problem record per line."""
    records = []
    seen = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {line_no}: invalid JSON: {exc}") from exc
            record = _record_from_json(line_no, obj)
            if record.id in seen:
                raise SchemaError(f"line {line_no}: duplicate id {record.id!r}")
            seen.add(record.id)
            records.append(record)
    return records


def load_samples(path) -> List[SampleSet]:
    """Load a JSONL response file: {"id": ..., "responses": [...]}."""
    sets = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {line_no}: invalid JSON: {exc}") from exc
            responses = obj.get("responses")
            if not isinstance(obj.get("id"), str) or not isinstance(responses, list):
                raise SchemaError(f"line {line_no}: need string 'id' and list 'responses'")
            sets.append(SampleSet(id=obj["id"], responses=tuple(str(r) for r in responses)))
    return sets


# --- oracle self-check ---

@dataclass
class OracleOutcome:
    id: str
    passed: bool
    value: Optional[float]
    diagnostic: str


@dataclass
class OracleReport:
    outcomes: List[OracleOutcome] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for o in self.outcomes if o.passed)

    @property
    def total(self) -> int:
        return len(self.outcomes)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    @property
    def failed_ids(self) -> List[str]:
        return [o.id for o in self.outcomes if not o.passed]


def run_oracle_check(
    records: Iterable[ProblemRecord],
    policy: RootPolicy = DEFAULT_POLICY,
) -> OracleReport:
    """Execute every record's own ground-truth program against its answer."""
    report = OracleReport()
    for record in records:
        if record.program is None:
            continue
        verdict = verify_program(record.program, record.params or "", record.answer,
                                 policy=policy)
        report.outcomes.append(OracleOutcome(
            id=record.id,
            passed=verdict.reward == 1,
            value=verdict.value,
            diagnostic=verdict.diagnostic.value,
        ))
    return report


# --- Pass@K scoring ---

@dataclass
class StratumMetrics:
    count: int = 0
    pass_at: Dict[int, float] = field(default_factory=dict)


@dataclass
class MetricsReport:
    k_max: int
    overall: StratumMetrics = None
    by_split: Dict[str, StratumMetrics] = field(default_factory=dict)
    by_difficulty: Dict[str, StratumMetrics] = field(default_factory=dict)
    diagnostics: Dict[str, int] = field(default_factory=dict)


def _pass_at(correct_flags: Sequence[Sequence[bool]], k: int) -> float:
    """Fraction of problems with a correct verdict among the first k samples."""
    if not correct_flags:
        return 0.0
    hits = sum(1 for flags in correct_flags if any(flags[:k]))
    return hits / len(correct_flags)


def _metrics(correct_flags, k_max) -> StratumMetrics:
    return StratumMetrics(
        count=len(correct_flags),
        pass_at={k: _pass_at(correct_flags, k) for k in range(1, k_max + 1)},
    )


def difficulty_bucket(program_text: str) -> str:
    """Bucket key from the number of non-Get instructions."""
    count = parse_program(program_text).operator_count
    if count >= 6:
        return ">=6"
    if count <= 2:
        return "2"
    return str(count)


def stratify_by_operators(
    records: Iterable[ProblemRecord],
) -> Tuple[Dict[str, List[ProblemRecord]], List[str]]:
    """Group records by difficulty bucket; records without a program are
    excluded and returned as warnings."""
    buckets: Dict[str, List[ProblemRecord]] = {key: [] for key in STRATA}
    warnings = []
    for record in records:
        if record.program is None:
            warnings.append(f"record {record.id} has no program; excluded")
            continue
        buckets[difficulty_bucket(record.program)].append(record)
    return buckets, warnings


def score_samples(
    records: Sequence[ProblemRecord],
    samples: Sequence[SampleSet],
    k: int,
    policy: RootPolicy = DEFAULT_POLICY,
    stratify: bool = False,
    timeout_ms: Optional[float] = None,
) -> MetricsReport:
    """Pass@k over the first k responses of every sample set.

    Every sample-set id must match a record and carry at least k responses.
    """
    by_id = {record.id: record for record in records}
    flags_overall: List[List[bool]] = []
    flags_by_split: Dict[str, List[List[bool]]] = {}
    flags_by_difficulty: Dict[str, List[List[bool]]] = {}
    diagnostics: Dict[str, int] = {}

    for sample_set in samples:
        record = by_id.get(sample_set.id)
        if record is None:
            raise MissingRecordError(f"no problem record with id {sample_set.id!r}")
        if len(sample_set.responses) < k:
            raise InsufficientSamplesError(
                f"{sample_set.id}: {len(sample_set.responses)} responses < k={k}"
            )
        flags = []
        for response in sample_set.responses[:k]:
            verdict = verify_response(response, record.answer, policy=policy,
                                      timeout_ms=timeout_ms)
            flags.append(verdict.reward == 1)
            name = verdict.diagnostic.value
            diagnostics[name] = diagnostics.get(name, 0) + 1
        flags_overall.append(flags)
        flags_by_split.setdefault(record.split, []).append(flags)
        if stratify and record.program is not None:
            bucket = difficulty_bucket(record.program)
            flags_by_difficulty.setdefault(bucket, []).append(flags)

    report = MetricsReport(k_max=k)
    report.overall = _metrics(flags_overall, k)
    report.by_split = {
        split: _metrics(flags, k) for split, flags in sorted(flags_by_split.items())
    }
    report.by_difficulty = {
        bucket: _metrics(flags, k)
        for bucket, flags in sorted(flags_by_difficulty.items())
    }
    report.diagnostics = dict(sorted(diagnostics.items()))
    return report


# --- synthesis filtering ---

@dataclass
class FilterResult:
    accepted: List[int] = field(default_factory=list)
    rejected: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def acceptance_ratio(self) -> float:
        total = len(self.accepted) + len(self.rejected)
        return len(self.accepted) / total if total else 0.0


def filter_synthetic(
    candidates: Sequence[Tuple[str, float]],
    policy: RootPolicy = DEFAULT_POLICY,
    timeout_ms: Optional[float] = None,
) -> FilterResult:
    """Keep candidate (response, truth) pairs whose program verifies."""
    result = FilterResult()
    for pos, (response, truth) in enumerate(candidates):
        verdict = verify_response(response, truth, policy=policy,
                                  timeout_ms=timeout_ms)
        if verdict.reward == 1:
            result.accepted.append(pos)
        else:
            result.rejected.append((pos, verdict.diagnostic.value))
    return result


def bundled_fixture_path() -> Path:
    from importlib import resources

    return Path(str(resources.files("geoformal.data").joinpath("fixture.jsonl")))
