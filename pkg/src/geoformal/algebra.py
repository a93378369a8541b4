"""Symbolic expression algebra and equation solving.

Expressions are sympy trees restricted to exact rationals, symbols, pi,
square roots, and degree-based trig atoms.  Rational arithmetic stays exact
until :func:`eval_numeric` produces a binary64 result.  Angles are always
measured in degrees; ``sin_deg`` and friends build the corresponding exact
radian form, so sympy folds special angles (sin_deg(120) -> sqrt(3)/2)
automatically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy as sp

from .errors import (
    AmbiguousSolutionError,
    DomainError,
    InconsistentSystemError,
    NoRealRootError,
    SolveTimeoutError,
    UnboundSymbolError,
    UnsolvedSystemError,
    UnsupportedShapeError,
)

#: Residual tolerance for solved systems: |lhs - rhs| <= RTOL * max(1, |rhs|).
RESIDUAL_RTOL = 1e-9

_MAX_SOLVE_STEPS = 2000
_MAX_JOINT_UNKNOWNS = 3


# --- degree-based trig atoms ---

def sin_deg(e):
    return sp.sin(e * sp.pi / 180)


def cos_deg(e):
    return sp.cos(e * sp.pi / 180)


def tan_deg(e):
    return sp.tan(e * sp.pi / 180)


def asin_deg(e):
    return 180 * sp.asin(e) / sp.pi


def acos_deg(e):
    return 180 * sp.acos(e) / sp.pi


def atan_deg(e):
    return 180 * sp.atan(e) / sp.pi


@dataclass(frozen=True)
class Equation:
    """lhs = rhs, interpreted as lhs - rhs = 0."""

    lhs: sp.Expr
    rhs: sp.Expr

    @property
    def residual_expr(self) -> sp.Expr:
        return self.lhs - self.rhs

    def free_symbols(self) -> set:
        return self.lhs.free_symbols | self.rhs.free_symbols

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


Environment = Dict[sp.Symbol, sp.Expr]


def simplify(e: sp.Expr) -> sp.Expr:
    """Normalize an expression: fold rational constants, collect like terms,
    evaluate special-angle trig values."""
    return sp.simplify(sp.nsimplify(e, rational=False))


def substitute(e: sp.Expr, env: Environment) -> sp.Expr:
    """Replace bound symbols and simplify; unbound symbols remain."""
    if not env:
        return simplify(e)
    return simplify(e.subs(env, simultaneous=True))


def eval_numeric(e: sp.Expr, env: Optional[Environment] = None) -> float:
    """Evaluate to binary64.  Every symbol must resolve through ``env``."""
    if env:
        e = e.subs(env, simultaneous=True)
    free = e.free_symbols
    if free:
        names = ", ".join(sorted(s.name for s in free))
        raise UnboundSymbolError(f"unbound symbols: {names}")
    if e.is_Rational:
        return float(e)
    value = sp.N(e, 20)
    if value.has(sp.zoo, sp.oo, -sp.oo, sp.nan):
        raise DomainError(f"undefined value in {e}")
    value = complex(value)
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        raise DomainError(f"non-real value {value} from {e}")
    result = float(value.real)
    if result != result or result in (float("inf"), float("-inf")):
        raise DomainError(f"non-finite value from {e}")
    return result


def is_real(root: sp.Expr) -> bool:
    if root.is_real is True:
        return True
    if root.is_real is False:
        return False
    try:
        value = complex(sp.N(root, 20))
    except (TypeError, ValueError):
        return False
    return abs(value.imag) <= 1e-12 * max(1.0, abs(value.real))


def numeric_key(root: sp.Expr) -> float:
    return float(sp.re(sp.N(root, 20)))


def solve_single(eq: Equation, unknown: sp.Symbol) -> List[sp.Expr]:
    """All closed-form real roots of ``eq`` in the unknown, ascending.

    Supported shapes: polynomial of degree <= 2, isolated sqrt, isolated
    trig atom.  Anything sympy cannot solve in closed form raises
    UnsupportedShape; complex-only root sets raise NoRealRoot.
    """
    expr = sp.expand(eq.residual_expr)
    if unknown not in expr.free_symbols:
        raise UnsupportedShapeError(f"{unknown} does not appear in {eq}")
    roots = _poly_roots(expr, unknown)
    if roots is None:
        try:
            roots = sp.solve(expr, unknown)
        except NotImplementedError as exc:
            raise UnsupportedShapeError(str(exc)) from exc
        if not isinstance(roots, list):
            raise UnsupportedShapeError(f"no closed-form solution for {eq}")
    real = [r for r in roots if not r.free_symbols and is_real(r)]
    symbolic = [r for r in roots if r.free_symbols]
    if symbolic:
        # parametric root (other unknowns still inside): not a single solve
        raise UnsupportedShapeError(f"{eq} is not univariate in {unknown}")
    if not real:
        raise NoRealRootError(f"no real root of {eq} in {unknown}")
    unique: List[sp.Expr] = []
    for r in sorted(real, key=numeric_key):
        if not any(abs(numeric_key(r) - numeric_key(u)) <= 1e-12 for u in unique):
            unique.append(r)
    return unique


def _poly_roots(expr: sp.Expr, unknown: sp.Symbol) -> Optional[List[sp.Expr]]:
    """Fast exact path for linear and quadratic polynomials."""
    try:
        poly = sp.Poly(expr, unknown)
    except sp.PolynomialError:
        return None
    if not all(c.is_number for c in poly.all_coeffs()):
        return None
    degree = poly.degree()
    if degree == 1:
        b, c = poly.all_coeffs()
        return [-c / b]
    if degree == 2:
        a, b, c = poly.all_coeffs()
        disc = b * b - 4 * a * c
        sqrt_disc = sp.sqrt(disc)
        return [(-b - sqrt_disc) / (2 * a), (-b + sqrt_disc) / (2 * a)]
    return None


@dataclass
class SolveEvent:
    """One committed unknown resolution during system solving."""

    equation_index: int
    unknown: sp.Symbol
    roots: Tuple[sp.Expr, ...]
    chosen: sp.Expr


@dataclass
class SolveContext:
    """Hand-off from the system solver to root selection.

    ``trial`` tests a candidate root against the remaining equations.
    ``preference`` is set for trig inversions: candidates ordered with the
    right-triangle principal root (angle in [0, 90]) first, so the
    supplementary root is used only if a later equation rejects it.
    """

    trial: Optional[Callable[[sp.Expr], bool]] = None
    preference: Optional[List[sp.Expr]] = None


def unknown_inside_trig(expr: sp.Expr, unknown: sp.Symbol) -> bool:
    return any(
        unknown in atom.free_symbols
        for atom in expr.atoms(sp.sin, sp.cos, sp.tan)
    )


def principal_order(roots: Sequence[sp.Expr]) -> List[sp.Expr]:
    """Trig candidates: angles in [0, 90] degrees first, ascending."""
    principal = [r for r in roots if -1e-12 <= numeric_key(r) <= 90 + 1e-12]
    rest = [r for r in roots if r not in principal]
    return sorted(principal, key=numeric_key) + sorted(rest, key=numeric_key)


def _residual_ok(eq: Equation, env: Environment) -> bool:
    residual = eval_numeric(eq.residual_expr, env)
    try:
        scale = abs(eval_numeric(eq.rhs, env))
    except (UnboundSymbolError, DomainError):
        scale = 1.0
    return abs(residual) <= RESIDUAL_RTOL * max(1.0, scale)


class _Budget:
    def __init__(self, deadline: Optional[float]):
        self.deadline = deadline
        self.steps = 0

    def tick(self):
        self.steps += 1
        if self.steps > _MAX_SOLVE_STEPS:
            raise SolveTimeoutError("solve step budget exhausted")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolveTimeoutError("solve wall-clock budget exhausted")


def solve_system(
    equations: Sequence[Equation],
    unknowns: Iterable[sp.Symbol],
    select_root: Optional[Callable[[List[sp.Expr], SolveContext], sp.Expr]] = None,
    deadline: Optional[float] = None,
    events: Optional[List[SolveEvent]] = None,
) -> Environment:
    """Solve a system by propagation in program order.

    Repeatedly picks the first equation with exactly one unresolved unknown,
    solves it, selects a root (``select_root``; default: sole root, else
    ambiguity error) and substitutes everywhere.  Residual clusters of at
    most three jointly-coupled unknowns fall back to exact simultaneous
    solving.  Equations whose unknowns are all resolved are checked against
    the residual tolerance.
    """
    unknowns = set(unknowns)
    if select_root is None:
        select_root = _default_select
    budget = _Budget(deadline)
    pending = [(idx, eq) for idx, eq in enumerate(equations)]
    return _search(pending, {}, unknowns, select_root, budget, events)


def _default_select(roots: List[sp.Expr], context: SolveContext) -> sp.Expr:
    if len(roots) == 1:
        return roots[0]
    raise AmbiguousSolutionError(f"multiple roots {roots} with no selection policy")


def _search(pending, env, unknowns, select_root, budget, events) -> Environment:
    pending = list(pending)
    while True:
        budget.tick()
        remaining = []
        for idx, eq in pending:
            sub_eq = Equation(
                eq.lhs.subs(env, simultaneous=True) if env else eq.lhs,
                eq.rhs.subs(env, simultaneous=True) if env else eq.rhs,
            )
            free = sub_eq.free_symbols() & unknowns
            if not free:
                if not _residual_ok(eq, env):
                    raise InconsistentSystemError(
                        f"equation {eq} violated by solved values"
                    )
            else:
                remaining.append((idx, eq, sub_eq, free))
        if not remaining:
            return env

        chosen = next(((idx, eq, sub_eq, free) for idx, eq, sub_eq, free in remaining
                       if len(free) == 1), None)
        if chosen is None:
            env = _joint_fallback(remaining, env, unknowns, budget, events)
            pending = [(idx, eq) for idx, eq, _, _ in remaining]
            continue

        idx, eq, sub_eq, free = chosen
        unknown = next(iter(free))
        roots = solve_single(sub_eq, unknown)

        rest = [(i, e) for i, e in pending if i != idx]

        def trial(candidate, _rest=rest, _env=env, _unknown=unknown):
            trial_env = dict(_env)
            trial_env[_unknown] = candidate
            try:
                _search(list(_rest), trial_env, unknowns, select_root,
                        budget, None)
                return True
            except (UnsolvedSystemError, InconsistentSystemError,
                    AmbiguousSolutionError, NoRealRootError, DomainError,
                    UnsupportedShapeError):
                return False

        preference = None
        if len(roots) > 1 and unknown_inside_trig(sub_eq.residual_expr, unknown):
            preference = principal_order(roots)
        root = select_root(list(roots), SolveContext(trial=trial, preference=preference))
        env = dict(env)
        env[unknown] = root
        if events is not None:
            events.append(SolveEvent(
                equation_index=idx,
                unknown=unknown,
                roots=tuple(roots),
                chosen=root,
            ))
        pending = rest


def _joint_fallback(remaining, env, unknowns, budget, events=None) -> Environment:
    """Exact simultaneous solve for small coupled clusters (all-linear, or
    one quadratic plus linear by substitution inside sympy.solve)."""
    budget.tick()
    cluster_unknowns = set()
    for _, _, _, free in remaining:
        cluster_unknowns |= free
    if len(cluster_unknowns) > _MAX_JOINT_UNKNOWNS:
        raise UnsolvedSystemError(
            f"no progress: {len(cluster_unknowns)} coupled unknowns"
        )
    exprs = [sub_eq.residual_expr for _, _, sub_eq, _ in remaining]
    ordered = sorted(cluster_unknowns, key=lambda s: s.name)
    try:
        solutions = sp.solve(exprs, ordered, dict=True)
    except NotImplementedError as exc:
        raise UnsolvedSystemError(str(exc)) from exc
    real_solutions = []
    for sol in solutions:
        if len(sol) < len(ordered):
            continue
        if all(not v.free_symbols and is_real(v) for v in sol.values()):
            real_solutions.append(sol)
    if not real_solutions:
        raise UnsolvedSystemError("joint fallback found no real solution")
    if len(real_solutions) > 1:
        nonneg = [
            sol for sol in real_solutions
            if all(numeric_key(v) >= -1e-12 for v in sol.values())
        ]
        if len(nonneg) != 1:
            raise AmbiguousSolutionError(
                f"{len(real_solutions)} joint solutions, cannot pick"
            )
        real_solutions = nonneg
    new_env = dict(env)
    for sym, value in real_solutions[0].items():
        new_env[sym] = value
        if events is not None:
            source = next(idx for idx, _, _, free in remaining if sym in free)
            events.append(SolveEvent(
                equation_index=source,
                unknown=sym,
                roots=(value,),
                chosen=value,
            ))
    return new_env
