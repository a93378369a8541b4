"""Parsing and serialization of formal programs and parameter bindings."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import sympy as sp
from sympy.parsing.sympy_parser import (
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from .errors import (
    ArityMismatchError,
    DuplicateBindingError,
    MalformedExpressionError,
    MalformedOperandError,
    NonProblemTargetError,
    UnknownOperatorError,
)
from .operands import OperandKind, OperandRef
from .registry import OperatorSpec, Registry, default_registry


@dataclass(frozen=True)
class Instruction:
    op: OperatorSpec
    args: Tuple[OperandRef, ...]

    def __str__(self) -> str:
        return " ".join([self.op.name] + [str(a) for a in self.args])

    @property
    def is_get(self) -> bool:
        return self.op.name == "Get"


@dataclass(frozen=True)
class Program:
    instructions: Tuple[Instruction, ...]

    def __str__(self) -> str:
        return serialize_program(self)

    def __len__(self) -> int:
        return len(self.instructions)

    @property
    def operator_count(self) -> int:
        """Number of deduction (non-Get) instructions."""
        return sum(1 for ins in self.instructions if not ins.is_get)


def parse_program(text: str, registry: Optional[Registry] = None) -> Program:
    """Parse space-delimited formal-language text into a Program.

    Tokens alternate: an operator name followed by its operands.  An operand
    run ends at the next registry name (variadic operators consume greedily)
    or at the fixed arity of the current operator.
    """
    registry = registry or default_registry()
    tokens = text.split()
    instructions: List[Instruction] = []
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if OperandRef.looks_like_operand(token):
            raise ArityMismatchError(
                f"operand token {token!r} arrives with no operator to attach to"
            )
        if OperandRef.looks_like_operand_prefix(token):
            raise MalformedOperandError(
                f"token {token!r} matches none of N<i>, V<i>, C<decimal>"
            )
        op = registry.lookup(token)
        i += 1
        args: List[OperandRef] = []
        while i < len(tokens) and tokens[i] not in registry:
            if not OperandRef.looks_like_operand(tokens[i]):
                if OperandRef.looks_like_operand_prefix(tokens[i]):
                    raise MalformedOperandError(
                        f"token {tokens[i]!r} matches none of N<i>, V<i>, C<decimal>"
                    )
                # a bare word in operand position ("Solve", "x", "+") is an
                # undefined operator, the failure the verdict surfaces by name
                raise UnknownOperatorError(tokens[i])
            if not op.is_variadic and len(args) == max(a for a, _ in op.fixed_arities):
                # fixed-arity operator is full; leftover operand has no home
                raise ArityMismatchError(
                    f"trailing operand {tokens[i]!r} after {op.name} "
                    f"already has {len(args)} operands"
                )
            args.append(OperandRef.parse(tokens[i]))
            i += 1
        if not op.accepts(len(args)):
            raise ArityMismatchError(
                f"{op.name} got {len(args)} operands; accepts "
                f"{_arity_text(op)}"
            )
        instructions.append(Instruction(op=op, args=tuple(args)))
    if not instructions:
        raise ArityMismatchError("empty program")
    return Program(instructions=tuple(instructions))


def _arity_text(op: OperatorSpec) -> str:
    parts = [str(a) for a, _ in op.fixed_arities]
    if op.variadic_min is not None:
        parts.append(f">={op.variadic_min}")
    return " or ".join(parts)


def serialize_program(program: Program) -> str:
    """Canonical single-space-delimited text; inverse of parse_program."""
    return " ".join(str(ins) for ins in program.instructions)


# --- parameter bindings ---

#: Parameter expressions are polynomials of degree <= 2 in at most 3
#: single-letter unknowns with rational coefficients.  This covers every
#: observed binding style (15, 3*x, 4*x + 61, 7y-2) while rejecting unit
#: suffixes and arbitrary expressions.
MAX_DEGREE = 2
MAX_UNKNOWNS = 3

_BINDING_HEAD_RE = re.compile(r"([A-Za-z]\w*(?:\.\d+)?)\s*=")
_EXPR_CHARS_RE = re.compile(r"[0-9a-z+\-*/(). \t]*\Z")
_UNKNOWN_NAME_RE = re.compile(r"[a-z]\Z")
# adjacent letters ("5cm", "xy") read as a unit suffix or a run-on name,
# not an implicit product; products of unknowns must be written with *
_LETTER_RUN_RE = re.compile(r"[a-z]{2,}")

_TRANSFORMS = standard_transformations + (implicit_multiplication_application,)


@dataclass(frozen=True)
class ParamSet:
    """Bindings of problem-variable indices to exact sympy expressions."""

    bindings: Dict[int, sp.Expr] = field(default_factory=dict)

    def __contains__(self, index: int) -> bool:
        return index in self.bindings

    def __getitem__(self, index: int) -> sp.Expr:
        return self.bindings[index]

    def __len__(self) -> int:
        return len(self.bindings)

    @property
    def unknowns(self) -> set:
        syms = set()
        for expr in self.bindings.values():
            syms |= expr.free_symbols
        return syms


_PLAIN_NUMBER_RE = re.compile(r"[+-]?\d+(?:\.\d+)?\Z")


def parse_param_expr(text: str) -> sp.Expr:
    """Parse one binding expression into an exact sympy expression."""
    text = text.strip()
    if not text:
        raise MalformedExpressionError("empty parameter expression")
    if _PLAIN_NUMBER_RE.match(text):
        # plain numeric literal: skip the full expression parser
        return sp.Rational(Fraction(text))
    if not _EXPR_CHARS_RE.match(text):
        raise MalformedExpressionError(f"illegal characters in expression {text!r}")
    if _LETTER_RUN_RE.search(text):
        raise MalformedExpressionError(
            f"adjacent letters in {text!r}: unknowns are single letters and "
            f"their products need an explicit *"
        )
    try:
        expr = parse_expr(text, transformations=_TRANSFORMS, evaluate=True)
    except Exception as exc:
        raise MalformedExpressionError(f"cannot parse expression {text!r}: {exc}") from exc
    expr = sp.nsimplify(expr, rational=True)
    _check_param_expr(text, expr)
    return expr


def _check_param_expr(text: str, expr: sp.Expr) -> None:
    symbols = expr.free_symbols
    for sym in symbols:
        if not _UNKNOWN_NAME_RE.match(sym.name):
            raise MalformedExpressionError(
                f"unknown {sym.name!r} in {text!r}: unknowns must be single "
                f"lowercase letters (x, y, ...)"
            )
    if len(symbols) > MAX_UNKNOWNS:
        raise MalformedExpressionError(
            f"{text!r} uses more than {MAX_UNKNOWNS} unknowns"
        )
    try:
        poly = sp.Poly(expr, *sorted(symbols, key=str)) if symbols else None
    except sp.PolynomialError:
        raise MalformedExpressionError(f"{text!r} is not a polynomial") from None
    if poly is not None:
        if poly.total_degree() > MAX_DEGREE:
            raise MalformedExpressionError(
                f"{text!r} exceeds degree {MAX_DEGREE}"
            )
        coeffs = poly.coeffs()
    else:
        coeffs = [expr]
    for coeff in coeffs:
        if not (coeff.is_rational and coeff.is_number):
            raise MalformedExpressionError(
                f"{text!r} has a non-rational coefficient {coeff}"
            )


def parse_params(text: str) -> ParamSet:
    """Parse parameter-binding text such as ``N0=15, N1=13`` or
    ``N0 = 3*x  N1 = 4*x + 61``.

    Entries are located by their ``<token>=`` heads; commas and whitespace
    between entries are free-form.
    """
    bindings: Dict[int, sp.Expr] = {}
    heads = list(_BINDING_HEAD_RE.finditer(text))
    leading = text[: heads[0].start()] if heads else text
    if leading.strip(" \t\r\n,"):
        raise MalformedExpressionError(
            f"stray text before first binding: {leading.strip()!r}"
        )
    for pos, head in enumerate(heads):
        target = head.group(1)
        end = heads[pos + 1].start() if pos + 1 < len(heads) else len(text)
        expr_text = text[head.end():end].strip(" \t\r\n,")
        m = re.fullmatch(r"N(\d+)", target)
        if not m:
            if re.fullmatch(r"V\d+|C\d+(?:\.\d+)?", target):
                raise NonProblemTargetError(
                    f"cannot bind non-problem operand {target!r}"
                )
            raise MalformedOperandError(f"binding target {target!r} is not an N token")
        index = int(m.group(1))
        if index in bindings:
            raise DuplicateBindingError(f"N{index} bound more than once")
        bindings[index] = parse_param_expr(expr_text)
    return ParamSet(bindings=bindings)


def constant_expr(literal: Fraction) -> sp.Expr:
    return sp.Rational(literal.numerator, literal.denominator)
