"""Executable engine for a geometric formal language.

Parse operator programs and parameter bindings, instantiate each operator
as algebraic equations, solve symbolically, and verify answers against
ground truth for reward computation and Pass@K evaluation.
"""

from .algebra import Equation, eval_numeric, simplify, solve_single, solve_system, substitute
from .executor import ExecutionResult, RootPolicy, RootPolicyMode, execute, instantiate_equations, select_root
from .operands import OperandKind, OperandRef
from .program import Instruction, ParamSet, Program, parse_params, parse_program, serialize_program
from .registry import OperatorSpec, Registry, default_registry, load_registry, lookup_operator
from .validation import ValidationReport, validate
from .verify import DiagnosticCode, Verdict, compare_answer, extract_boxed, verify_program, verify_response

__version__ = "0.1.0"

__all__ = [
    "DiagnosticCode",
    "Equation",
    "ExecutionResult",
    "Instruction",
    "OperandKind",
    "OperandRef",
    "OperatorSpec",
    "ParamSet",
    "Program",
    "Registry",
    "RootPolicy",
    "RootPolicyMode",
    "ValidationReport",
    "Verdict",
    "compare_answer",
    "default_registry",
    "eval_numeric",
    "execute",
    "extract_boxed",
    "instantiate_equations",
    "load_registry",
    "lookup_operator",
    "parse_params",
    "parse_program",
    "select_root",
    "serialize_program",
    "simplify",
    "solve_single",
    "solve_system",
    "substitute",
    "validate",
    "verify_program",
    "verify_response",
]
