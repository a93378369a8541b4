"""Reward verification: extract boxed formal solutions from raw responses,
execute them, and compare against the ground truth.

``verify_response`` and ``verify_program`` are total by contract: every
failure becomes a reward-0 verdict carrying a diagnostic code, never an
exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from . import errors
from .executor import DEFAULT_POLICY, ExecutionTrace, RootPolicy, execute
from .program import parse_params, parse_program

#: Absolute / relative tolerance of answer comparison.  Chosen as the
#: tightest simple rule that rejects 26.764 against truth 26.632 while
#: accepting round-off in 3-decimal ground truths.
ABS_TOL = 1e-2
REL_TOL = 1e-3


class DiagnosticCode(Enum):
    MATCH = "Match"
    NUMERIC_MISMATCH = "NumericMismatch"
    NO_BOXED_ANSWER = "NoBoxedAnswer"
    PARSE_ERROR = "ParseError"
    UNKNOWN_OPERATOR = "UnknownOperator"
    ARITY_MISMATCH = "ArityMismatch"
    UNBOUND_OPERAND = "UnboundOperand"
    UNSOLVED_SYSTEM = "UnsolvedSystem"
    AMBIGUOUS_SOLUTION = "AmbiguousSolution"
    DOMAIN_ERROR = "DomainError"
    NO_GET = "NoGet"


@dataclass(frozen=True)
class ExtractedSolution:
    program_text: str
    params_text: str
    box_count: int


@dataclass
class Verdict:
    reward: int
    truth: float
    diagnostic: DiagnosticCode
    value: Optional[float] = None
    program_text: Optional[str] = None
    params_text: Optional[str] = None
    trace: Optional[ExecutionTrace] = None

    def to_dict(self) -> dict:
        return {
            "reward": self.reward,
            "value": self.value,
            "truth": self.truth,
            "diagnostic": self.diagnostic.value,
            "program": self.program_text,
            "params": self.params_text,
        }


def extract_boxed(response: str) -> ExtractedSolution:
    """Collect every ``\\boxed{...}`` span (balanced braces).

    Spans containing ``=`` are parameter bindings; the rest are program
    fragments, concatenated in order with single spaces (programs may be
    split across several boxes).
    """
    spans = _boxed_spans(response)
    if not spans:
        raise errors.NoBoxedAnswerError("no \\boxed{} span in response")
    program_parts: List[str] = []
    param_parts: List[str] = []
    for span in spans:
        (param_parts if "=" in span else program_parts).append(span.strip())
    return ExtractedSolution(
        program_text=" ".join(part for part in program_parts if part),
        params_text=" ".join(part for part in param_parts if part),
        box_count=len(spans),
    )


_MARKER = "\\boxed{"


def _boxed_spans(text: str) -> List[str]:
    spans = []
    pos = 0
    while True:
        start = text.find(_MARKER, pos)
        if start < 0:
            return spans
        depth = 1
        i = start + len(_MARKER)
        begin = i
        while i < len(text) and depth:
            if text[i] == "{":
                depth += 1
            elif text[i] == "}":
                depth -= 1
            i += 1
        if depth:
            raise errors.UnbalancedBracesError(
                f"\\boxed{{ opened at offset {start} never closes"
            )
        spans.append(text[begin:i - 1])
        pos = i


def compare_answer(computed: float, truth: float) -> bool:
    """True iff |computed - truth| <= max(ABS_TOL, REL_TOL * |truth|)."""
    if not (math.isfinite(computed) and math.isfinite(truth)):
        return False
    return abs(computed - truth) <= max(ABS_TOL, REL_TOL * abs(truth))


_DIAGNOSTIC_BY_ERROR = [
    (errors.NoBoxedAnswerError, DiagnosticCode.NO_BOXED_ANSWER),
    (errors.UnknownOperatorError, DiagnosticCode.UNKNOWN_OPERATOR),
    (errors.ArityMismatchError, DiagnosticCode.ARITY_MISMATCH),
    (errors.MalformedOperandError, DiagnosticCode.PARSE_ERROR),
    (errors.MalformedExpressionError, DiagnosticCode.PARSE_ERROR),
    (errors.DuplicateBindingError, DiagnosticCode.PARSE_ERROR),
    (errors.NonProblemTargetError, DiagnosticCode.PARSE_ERROR),
    (errors.UnbalancedBracesError, DiagnosticCode.PARSE_ERROR),
    (errors.UnboundOperandError, DiagnosticCode.UNBOUND_OPERAND),
    (errors.UnboundSymbolError, DiagnosticCode.UNBOUND_OPERAND),
    (errors.NoGetInstructionError, DiagnosticCode.NO_GET),
    (errors.AmbiguousSolutionError, DiagnosticCode.AMBIGUOUS_SOLUTION),
    (errors.DomainError, DiagnosticCode.DOMAIN_ERROR),
    (errors.NoRealRootError, DiagnosticCode.DOMAIN_ERROR),
    # remaining solver failures (no progress, inconsistency, timeout,
    # unsupported shape, unresolved target) all read as "could not solve"
    (errors.GeoformalError, DiagnosticCode.UNSOLVED_SYSTEM),
]


def _classify(exc: Exception) -> DiagnosticCode:
    for err_type, code in _DIAGNOSTIC_BY_ERROR:
        if isinstance(exc, err_type):
            return code
    return DiagnosticCode.UNSOLVED_SYSTEM


def verify_program(
    program_text: str,
    params_text: str,
    truth: float,
    policy: RootPolicy = DEFAULT_POLICY,
    timeout_ms: Optional[float] = None,
) -> Verdict:
    """Parse, execute, and compare a formal program against the truth."""
    verdict = Verdict(
        reward=0,
        truth=truth,
        diagnostic=DiagnosticCode.UNSOLVED_SYSTEM,
        program_text=program_text,
        params_text=params_text,
    )
    try:
        program = parse_program(program_text)
        params = parse_params(params_text)
        result = execute(program, params, policy=policy, timeout_ms=timeout_ms)
    except Exception as exc:
        verdict.diagnostic = _classify(exc)
        return verdict
    verdict.value = result.answer
    verdict.trace = result.trace
    if compare_answer(result.answer, truth):
        verdict.reward = 1
        verdict.diagnostic = DiagnosticCode.MATCH
    else:
        verdict.diagnostic = DiagnosticCode.NUMERIC_MISMATCH
    return verdict


def verify_response(
    response: str,
    truth: float,
    policy: RootPolicy = DEFAULT_POLICY,
    timeout_ms: Optional[float] = None,
) -> Verdict:
    """Full pipeline for a raw model response: extract boxed spans first."""
    try:
        extracted = extract_boxed(response)
    except Exception as exc:
        return Verdict(
            reward=0,
            truth=truth,
            diagnostic=_classify(exc),
        )
    return verify_program(
        extracted.program_text,
        extracted.params_text,
        truth,
        policy=policy,
        timeout_ms=timeout_ms,
    )
