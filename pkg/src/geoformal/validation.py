"""Static checks on a parsed program + parameter bindings before execution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .operands import OperandKind
from .program import ParamSet, Program


@dataclass(frozen=True)
class Finding:
    code: str
    instruction: Optional[int]
    message: str


@dataclass
class ValidationReport:
    errors: List[Finding] = field(default_factory=list)
    warnings: List[Finding] = field(default_factory=list)
    strict_mode: bool = False

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(program: Program, params: ParamSet, strict: bool = False) -> ValidationReport:
    """Check operand bindings and numbering.

    Errors: problem operands with no binding, Get applied to a constant.
    Non-sequential N/V numbering is a warning, promoted to an error in
    strict mode (numbering must start at 0 and increment by 1).
    """
    report = ValidationReport(strict_mode=strict)
    problem_indices = set()
    process_indices = set()

    for pos, ins in enumerate(program.instructions):
        for arg in ins.args:
            if arg.kind is OperandKind.PROBLEM:
                problem_indices.add(arg.index)
                if arg.index not in params:
                    report.errors.append(Finding(
                        code="UnboundOperand",
                        instruction=pos,
                        message=f"N{arg.index} has no parameter binding",
                    ))
            elif arg.kind is OperandKind.PROCESS:
                process_indices.add(arg.index)
        if ins.is_get and ins.args[0].kind is OperandKind.CONSTANT:
            report.errors.append(Finding(
                code="ImpossibleOperand",
                instruction=pos,
                message="Get target cannot be a constant",
            ))

    for prefix, indices in (("N", problem_indices), ("V", process_indices)):
        if indices and indices != set(range(len(indices))):
            finding = Finding(
                code="NonSequentialNumbering",
                instruction=None,
                message=(
                    f"{prefix} indices {sorted(indices)} must start from "
                    f"{prefix}0 and increment by 1"
                ),
            )
            (report.errors if strict else report.warnings).append(finding)

    return report
