"""Program execution: instantiate operator equations, solve, read the Get
target, with geometric root selection."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp

from .algebra import (
    Environment,
    Equation,
    SolveContext,
    SolveEvent,
    is_real,
    numeric_key,
    eval_numeric,
    solve_system,
)
from .errors import (
    AmbiguousSolutionError,
    InconsistentSystemError,
    NoGetInstructionError,
    NoRealRootError,
    UnboundOperandError,
    UnsolvedVariableError,
)
from .operands import OperandKind, OperandRef
from .program import ParamSet, Program, constant_expr
from .templates import build_equations
from .validation import validate


class RootPolicyMode(Enum):
    NONNEGATIVE_PREFERRED = "nonneg"
    STRICT_UNIQUE = "unique"


@dataclass(frozen=True)
class RootPolicy:
    mode: RootPolicyMode = RootPolicyMode.NONNEGATIVE_PREFERRED

    @classmethod
    def parse(cls, name: str) -> "RootPolicy":
        return cls(RootPolicyMode(name))


DEFAULT_POLICY = RootPolicy()


def select_root(
    roots: Sequence[sp.Expr],
    policy: RootPolicy = DEFAULT_POLICY,
    context: Optional[SolveContext] = None,
) -> sp.Expr:
    """Pick one root of a solve step.

    NonnegativePreferred takes a sole real root outright, then the unique
    nonnegative one; with several nonnegative candidates each is tried
    against the remaining equations and the unique consistent one wins.
    StrictUnique refuses any genuine choice.
    """
    real = [r for r in roots if is_real(r)]
    if not real:
        raise NoRealRootError("no real root to select")
    real = sorted(real, key=numeric_key)
    if len(real) == 1:
        return real[0]
    if policy.mode is RootPolicyMode.STRICT_UNIQUE:
        raise AmbiguousSolutionError(f"{len(real)} real roots under strict policy")

    preference = context.preference if context is not None else None
    if preference:
        # trig inversion: take the principal candidate unless a later
        # equation rejects it
        trial = context.trial
        if trial is None:
            return preference[0]
        for candidate in preference:
            if trial(candidate):
                return candidate
        raise InconsistentSystemError("no trig candidate is consistent")

    nonneg = [r for r in real if numeric_key(r) >= -1e-12]
    if len(nonneg) == 1:
        return nonneg[0]
    pool = nonneg if nonneg else real
    trial = context.trial if context is not None else None
    if trial is None:
        raise AmbiguousSolutionError(f"cannot disambiguate roots {pool}")
    consistent = [r for r in pool if trial(r)]
    if not consistent:
        raise InconsistentSystemError("no candidate root is consistent")
    values = {round(numeric_key(r), 12) for r in consistent}
    if len(values) > 1:
        raise AmbiguousSolutionError(
            f"multiple consistent roots {consistent}"
        )
    return consistent[0]


@dataclass
class TraceRecord:
    instruction: str
    equation: Optional[str]
    events: List[SolveEvent] = field(default_factory=list)


@dataclass
class ExecutionTrace:
    records: List[TraceRecord] = field(default_factory=list)

    def to_text(self) -> str:
        lines = []
        for pos, rec in enumerate(self.records):
            lines.append(f"[{pos}] {rec.instruction}")
            if rec.equation is not None:
                lines.append(f"    equation: {rec.equation}")
            for ev in rec.events:
                roots = ", ".join(str(r) for r in ev.roots)
                lines.append(
                    f"    solved {ev.unknown} from roots {{{roots}}} -> {ev.chosen}"
                )
        return "\n".join(lines)


@dataclass
class ExecutionResult:
    answer: float
    environment: Environment
    trace: ExecutionTrace
    warnings: List[str] = field(default_factory=list)


def process_symbol(index: int) -> sp.Symbol:
    return sp.Symbol(f"V{index}")


def _operand_expr(ref: OperandRef, params: ParamSet) -> sp.Expr:
    if ref.kind is OperandKind.CONSTANT:
        return constant_expr(ref.literal)
    if ref.kind is OperandKind.PROCESS:
        return process_symbol(ref.index)
    if ref.index not in params:
        raise UnboundOperandError(f"N{ref.index} has no parameter binding")
    return params[ref.index]


def instantiate_equations(
    program: Program, params: ParamSet
) -> Tuple[List[Equation], set, List[Tuple[int, OperandRef]], Dict[int, int]]:
    """Turn each non-Get instruction into its template equation.

    Returns (equations, unknowns, get_targets, equation->instruction map).
    Unknowns are the unresolved process symbols plus any parameter unknowns
    (x, y) appearing in the bindings.
    """
    equations: List[Equation] = []
    eq_to_instruction: Dict[int, int] = {}
    get_targets: List[Tuple[int, OperandRef]] = []
    unknowns = set(params.unknowns)
    for pos, ins in enumerate(program.instructions):
        if ins.is_get:
            get_targets.append((pos, ins.args[0]))
            # Get target params may carry unknowns even if no equation uses them
            if ins.args[0].kind is OperandKind.PROBLEM:
                _operand_expr(ins.args[0], params)
            continue
        args = [_operand_expr(a, params) for a in ins.args]
        template_id = ins.op.template_for(len(args))
        for eq in build_equations(template_id, args):
            eq_to_instruction[len(equations)] = pos
            equations.append(eq)
    for eq in equations:
        for sym in eq.free_symbols():
            unknowns.add(sym)
    return equations, unknowns, get_targets, eq_to_instruction


def execute(
    program: Program,
    params: ParamSet,
    policy: RootPolicy = DEFAULT_POLICY,
    timeout_ms: Optional[float] = None,
) -> ExecutionResult:
    """Run a program end to end and return the value of its final Get."""
    report = validate(program, params, strict=False)
    if not report.ok:
        first = report.errors[0]
        raise UnboundOperandError(first.message)

    equations, unknowns, get_targets, eq_to_instruction = instantiate_equations(
        program, params
    )
    if not get_targets:
        raise NoGetInstructionError("program has no Get instruction")

    warnings = [
        f"extra Get at instruction {pos} ignored; the last Get supplies the answer"
        for pos, _ in get_targets[:-1]
    ]

    deadline = time.monotonic() + timeout_ms / 1000.0 if timeout_ms else None
    events: List[SolveEvent] = []
    env = solve_system(
        equations,
        unknowns,
        select_root=lambda roots, ctx: select_root(roots, policy, ctx),
        deadline=deadline,
        events=events,
    )

    target_pos, target = get_targets[-1]
    if target.kind is OperandKind.CONSTANT:
        target_expr = constant_expr(target.literal)
    elif target.kind is OperandKind.PROBLEM:
        target_expr = params[target.index]
    else:
        sym = process_symbol(target.index)
        if sym not in env:
            raise UnsolvedVariableError(f"Get target V{target.index} was never solved")
        target_expr = env[sym]
    try:
        answer = eval_numeric(target_expr, env)
    except Exception as exc:
        raise UnsolvedVariableError(
            f"Get target at instruction {target_pos} did not resolve: {exc}"
        ) from exc

    trace = ExecutionTrace(records=[
        TraceRecord(
            instruction=str(ins),
            equation=None,
            events=[],
        )
        for ins in program.instructions
    ])
    eq_index = 0
    for pos, ins in enumerate(program.instructions):
        if not ins.is_get:
            trace.records[pos].equation = str(equations[eq_index])
            eq_index += 1
    for ev in events:
        trace.records[eq_to_instruction[ev.equation_index]].events.append(ev)

    return ExecutionResult(
        answer=answer,
        environment=env,
        trace=trace,
        warnings=warnings,
    )
