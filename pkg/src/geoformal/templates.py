"""Equation templates: operand expressions -> algebraic equation.

Each template id named in the registry table maps to a constructor taking
the instruction's operand expressions in order.  Ratio templates are
cleared to cross-multiplied form so an unknown denominator does not create
a spurious singularity.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Sequence

import sympy as sp

from .algebra import Equation, cos_deg, sin_deg, tan_deg

TemplateFn = Callable[[Sequence[sp.Expr]], List[Equation]]


def _chain_sum(args):
    return [Equation(sp.Add(*args[:-1]), args[-1])]


def _chain_product(args):
    return [Equation(sp.Mul(*args[:-1]), args[-1])]


def _equal(args):
    a, b = args
    return [Equation(a, b)]


def _gougu(args):
    a, b, c = args
    return [Equation(a**2 + b**2, c**2)]


def _gsin(args):
    a, b, c = args
    return [Equation(sin_deg(c) * b, a)]


def _gcos(args):
    a, b, c = args
    return [Equation(cos_deg(c) * b, a)]


def _gtan(args):
    a, b, c = args
    return [Equation(tan_deg(c) * b, a)]


def _para_area(args):
    a, b, c = args
    return [Equation(a * b, c)]


def _circle_circum(args):
    a, b = args
    return [Equation(2 * sp.pi * a, b)]


def _circle_arc(args):
    a, b, c = args
    return [Equation(2 * sp.pi * a * b / 360, c)]


def _circle_area(args):
    a, b = args
    return [Equation(sp.pi * a**2, b)]


def _rngon_l_area(args):
    n, r, area = args
    return [Equation(n * r**2 * sin_deg(360 / n) / 2, area)]


def _rngon_h_area(args):
    n, h, area = args
    return [Equation(n * h**2 * tan_deg(180 / n), area)]


def _rngon_b_area(args):
    n, s, area = args
    return [Equation(n * s**2 / (4 * tan_deg(180 / n)), area)]


def _geo_mean(args):
    a, b, c = args
    return [Equation(sp.sqrt(a * b), c)]


def _proportion(args):
    # a/b = c/d, cross-multiplied
    a, b, c, d = args
    return [Equation(a * d, b * c)]


def _chord2_ang(args):
    a, b, c = args
    return [Equation(a, (b + c) / 2)]


def _tansec_ang(args):
    a, b, c = args
    return [Equation(a, (c - b) / 2)]


TEMPLATES: Dict[str, TemplateFn] = {
    "chain_sum": _chain_sum,
    "chain_product": _chain_product,
    "equal": _equal,
    "gougu": _gougu,
    "gsin": _gsin,
    "gcos": _gcos,
    "gtan": _gtan,
    "para_area": _para_area,
    "circle_circum": _circle_circum,
    "circle_arc": _circle_arc,
    "circle_area": _circle_area,
    "rngon_l_area": _rngon_l_area,
    "rngon_h_area": _rngon_h_area,
    "rngon_b_area": _rngon_b_area,
    "geo_mean": _geo_mean,
    "proportion": _proportion,
    "chord2_ang": _chord2_ang,
    "tansec_ang": _tansec_ang,
}


def build_equations(template_id: str, args: Sequence[sp.Expr]) -> List[Equation]:
    try:
        fn = TEMPLATES[template_id]
    except KeyError:
        raise KeyError(f"registry references unknown template {template_id!r}") from None
    return fn(args)
