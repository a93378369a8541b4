"""Operand tokens of the formal language: N<i>, V<i> and C<literal>."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .errors import MalformedOperandError

_PROBLEM_RE = re.compile(r"N(\d+)\Z")
_PROCESS_RE = re.compile(r"V(\d+)\Z")
_CONSTANT_RE = re.compile(r"C(\d+(?:\.\d+)?)\Z")


class OperandKind(Enum):
    PROBLEM = "N"
    PROCESS = "V"
    CONSTANT = "C"


@dataclass(frozen=True)
class OperandRef:
    """A single operand token.

    Problem/process refs carry an index; constants carry an exact decimal
    literal (C0.5 -> Fraction(1, 2)).
    """

    kind: OperandKind
    index: Optional[int] = None
    literal: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind is OperandKind.CONSTANT:
            assert self.literal is not None and self.index is None
        else:
            assert self.index is not None and self.literal is None

    @classmethod
    def problem(cls, index: int) -> "OperandRef":
        return cls(OperandKind.PROBLEM, index=index)

    @classmethod
    def process(cls, index: int) -> "OperandRef":
        return cls(OperandKind.PROCESS, index=index)

    @classmethod
    def constant(cls, literal) -> "OperandRef":
        return cls(OperandKind.CONSTANT, literal=Fraction(literal))

    @classmethod
    def parse(cls, token: str) -> "OperandRef":
        m = _PROBLEM_RE.match(token)
        if m:
            return cls.problem(int(m.group(1)))
        m = _PROCESS_RE.match(token)
        if m:
            return cls.process(int(m.group(1)))
        m = _CONSTANT_RE.match(token)
        if m:
            return cls.constant(Fraction(m.group(1)))
        raise MalformedOperandError(f"not an N/V/C operand token: {token!r}")

    @staticmethod
    def looks_like_operand(token: str) -> bool:
        """True if the token matches one of the operand grammars."""
        return bool(
            _PROBLEM_RE.match(token)
            or _PROCESS_RE.match(token)
            or _CONSTANT_RE.match(token)
        )

    @staticmethod
    def looks_like_operand_prefix(token: str) -> bool:
        """True for tokens shaped like an operand but failing to parse.

        Distinguishes MalformedOperand ('N', 'C1.2.3') from an unknown
        operator name ('Solve', 'Circle_Foo').
        """
        return bool(
            re.fullmatch(r"[NVC][\d.]*", token)
        ) and not OperandRef.looks_like_operand(token)

    def __str__(self) -> str:
        if self.kind is OperandKind.CONSTANT:
            lit = self.literal
            if lit.denominator == 1:
                return f"C{lit.numerator}"
            value = float(lit)
            text = repr(value)
            return f"C{text}"
        return f"{self.kind.value}{self.index}"
