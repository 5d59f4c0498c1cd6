"""Partial and total derivatives, substitution."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .core import (
    DERIVATIVE_OF, ONE, ZERO, Add, Atan2, Const, ContextError, Expr, Fn, Mul,
    Named, Pow, Var, add, as_expr, context_of, cos, cosh, mul, power, rebuild,
    sin, sinh, _VAR_RANK,
)

SECOND_DERIVATIVES = ("ddu", "ddf", "ddg")


class MissingRhsError(KeyError):
    """Total derivative needs a right-hand side for a highest derivative."""


def diff(e: Expr, v: str) -> Expr:
    """Partial derivative of ``e`` with respect to variable ``v``."""
    if v not in _VAR_RANK:
        raise ContextError(f"unknown variable {v!r}")
    ctx = context_of(e)
    if ctx is not None and v not in ctx:
        raise ContextError(f"{v!r} is not in the context {tuple(ctx)} of {e}")
    return _diff(e, v, {})


def _diff(e: Expr, v: str, memo: dict) -> Expr:
    if v not in e.free:
        return ZERO
    hit = memo.get(e)
    if hit is not None:
        return hit
    if isinstance(e, Var):
        out = ONE
    elif isinstance(e, Add):
        out = add(*(_diff(t, v, memo) for t in e.terms))
    elif isinstance(e, Mul):
        parts = []
        ts = e.terms
        for k, t in enumerate(ts):
            dt = _diff(t, v, memo)
            if dt is ZERO or dt == ZERO:
                continue
            parts.append(mul(dt, *ts[:k], *ts[k + 1:]))
        out = add(*parts)
    elif isinstance(e, Pow):
        out = mul(Const(e.exp), power(e.base, e.exp - 1), _diff(e.base, v, memo))
    elif isinstance(e, Fn):
        a = e.arg
        da = _diff(a, v, memo)
        name = e.name
        if name == "exp":
            out = mul(e, da)
        elif name == "log":
            out = mul(da, power(a, -1))
        elif name == "sin":
            out = mul(cos(a), da)
        elif name == "cos":
            out = mul(Const(-1), sin(a), da)
        elif name == "sinh":
            out = mul(cosh(a), da)
        elif name == "cosh":
            out = mul(sinh(a), da)
        else:  # atan
            out = mul(da, power(add(ONE, power(a, 2)), -1))
    elif isinstance(e, Atan2):
        y, x = e.y, e.x
        num = add(mul(x, _diff(y, v, memo)), mul(Const(-1), y, _diff(x, v, memo)))
        out = mul(num, power(add(power(x, 2), power(y, 2)), -1))
    else:  # Const / Named never reach here (no free vars)
        out = ZERO
    memo[e] = out
    return out


def total_derivative(e: Expr, rhs: Optional[Mapping[str, Expr]] = None) -> Expr:
    """D_x e.

    With ``rhs=None`` this is the free total derivative: each variable q is
    followed by its derivative symbol (f -> df -> ddf).  With an ``rhs``
    mapping, second-derivative symbols are replaced by the supplied right-hand
    sides (the on-shell derivative); a missing entry raises MissingRhsError.
    """
    parts = [diff(e, "x")] if "x" in e.free else []
    for q in sorted(e.free, key=_VAR_RANK.__getitem__):
        if q == "x":
            continue
        dq = DERIVATIVE_OF.get(q)
        if dq is None:
            raise MissingRhsError(f"no derivative symbol beyond {q!r}; cannot differentiate {q} totally")
        if rhs is not None and dq in SECOND_DERIVATIVES:
            if dq not in rhs:
                raise MissingRhsError(f"rhs has no entry for {dq!r}")
            dq_expr = as_expr(rhs[dq])
        elif rhs is not None and dq in rhs:
            dq_expr = as_expr(rhs[dq])
        else:
            dq_expr = Var(dq)
        parts.append(mul(dq_expr, diff(e, q)))
    return add(*parts)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions (simultaneous substitution)."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    keys = frozenset(mapping)
    memo: dict = {}

    def go(node: Expr) -> Expr:
        if not (node.free & keys):
            return node
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Var):
            out = mapping[node.name]
        else:
            out = rebuild(node, [go(a) for a in node.args])
        memo[node] = out
        return out

    return go(e)


def substitute_named(e: Expr, values: Mapping[str, Expr]) -> Expr:
    """Replace named constants (e.g. A, b) by expressions."""
    values = {k: as_expr(v) for k, v in values.items()}
    memo: dict = {}

    def go(node: Expr) -> Expr:
        if isinstance(node, Named):
            return values.get(node.name, node)
        if not node.args:
            return node
        hit = memo.get(node)
        if hit is not None:
            return hit
        out = rebuild(node, [go(a) for a in node.args])
        memo[node] = out
        return out

    return go(e)


def is_polynomial(e: Expr) -> bool:
    """Polynomial in the variables with rational coefficients."""
    if isinstance(e, (Const, Var)):
        return True
    if isinstance(e, Named):
        return e.name in ("A", "b")
    if isinstance(e, (Add, Mul)):
        return all(is_polynomial(t) for t in e.terms)
    if isinstance(e, Pow):
        return e.exp >= 0 and e.exp.denominator == 1 and is_polynomial(e.base)
    return False


def rational_value(e: Expr, point: Mapping[str, Fraction]) -> Fraction:
    """Exact evaluation of a polynomial expression at a rational point."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return Fraction(point[e.name])
    if isinstance(e, Named):
        return Fraction(point[e.name])
    if isinstance(e, Add):
        return sum((rational_value(t, point) for t in e.terms), Fraction(0))
    if isinstance(e, Mul):
        out = Fraction(1)
        for t in e.terms:
            out *= rational_value(t, point)
        return out
    if isinstance(e, Pow) and e.exp.denominator == 1:
        return rational_value(e.base, point) ** int(e.exp)
    raise ValueError(f"not a polynomial node: {e}")
