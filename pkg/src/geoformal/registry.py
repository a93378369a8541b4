"""Operator registry: names, accepted arities, and equation template ids.

The default registry is loaded from the bundled ``data/operators.json``
table so further operators of the source language can be added as data,
without code changes.  Operator names match case-sensitively.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple

from .errors import ArityMismatchError, UnknownOperatorError


@dataclass(frozen=True)
class OperatorSpec:
    """One registry entry.

    ``fixed_arities`` maps an exact operand count to a template id;
    ``variadic_min`` (with ``variadic_template``) accepts any count >= min.
    """

    name: str
    fixed_arities: Tuple[Tuple[int, str], ...] = ()
    variadic_min: Optional[int] = None
    variadic_template: Optional[str] = None
    description: str = ""

    def accepts(self, count: int) -> bool:
        if any(count == a for a, _ in self.fixed_arities):
            return True
        return self.variadic_min is not None and count >= self.variadic_min

    def template_for(self, count: int) -> str:
        for arity, template in self.fixed_arities:
            if arity == count:
                return template
        if self.variadic_min is not None and count >= self.variadic_min:
            return self.variadic_template
        raise ArityMismatchError(
            f"{self.name} does not accept {count} operands"
        )

    @property
    def min_arity(self) -> int:
        candidates = [a for a, _ in self.fixed_arities]
        if self.variadic_min is not None:
            candidates.append(self.variadic_min)
        return min(candidates)

    @property
    def is_variadic(self) -> bool:
        return self.variadic_min is not None

    @property
    def form_count(self) -> int:
        return len(self.fixed_arities) + (1 if self.variadic_min is not None else 0)


@dataclass(frozen=True)
class Registry:
    """Immutable name -> OperatorSpec table."""

    operators: Dict[str, OperatorSpec] = field(default_factory=dict)

    def lookup(self, name: str) -> OperatorSpec:
        try:
            return self.operators[name]
        except KeyError:
            raise UnknownOperatorError(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self.operators

    def __len__(self) -> int:
        return len(self.operators)

    @property
    def form_count(self) -> int:
        """Total number of (name, arity) equation forms in the table."""
        return sum(spec.form_count for spec in self.operators.values())

    def names(self):
        return list(self.operators)


def _spec_from_record(record: dict) -> OperatorSpec:
    fixed = []
    variadic_min = None
    variadic_template = None
    for form in record["forms"]:
        arity = form["arity"]
        if isinstance(arity, str) and arity.endswith("+"):
            variadic_min = int(arity[:-1])
            variadic_template = form["template"]
        else:
            fixed.append((int(arity), form["template"]))
    return OperatorSpec(
        name=record["name"],
        fixed_arities=tuple(fixed),
        variadic_min=variadic_min,
        variadic_template=variadic_template,
        description=record.get("description", ""),
    )


def load_registry(path: Optional[Path] = None) -> Registry:
    """Load a registry table from ``path``, or the bundled default."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("geoformal.data").joinpath("operators.json").read_text(
            encoding="utf-8"
        )
    records = json.loads(text)
    operators = {}
    for record in records:
        spec = _spec_from_record(record)
        if spec.name in operators:
            raise ValueError(f"duplicate operator name in registry: {spec.name}")
        operators[spec.name] = spec
    return Registry(operators=operators)


_DEFAULT: Optional[Registry] = None


def default_registry() -> Registry:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_registry()
    return _DEFAULT


def set_default_registry(registry: Registry) -> None:
    """Install a registry (e.g. loaded from REGISTRY_PATH) process-wide."""
    global _DEFAULT
    _DEFAULT = registry


def lookup_operator(name: str, registry: Optional[Registry] = None) -> OperatorSpec:
    return (registry or default_registry()).lookup(name)
