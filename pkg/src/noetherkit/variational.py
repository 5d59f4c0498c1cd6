"""Euler-Lagrange equations for scalar complex Lagrangians and real pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

from .complexify import realify
from .expr import (
    DEFAULT_DOMAIN, Expr, ExprError, SampleDomain, Var, add, diff, is_zero, mul,
    neg, power, substitute, total_derivative,
)


class DegenerateLagrangianError(ExprError):
    """The Lagrangian is linear in u' so its EL equation is not second order."""


@dataclass(frozen=True)
class ScalarRCODE:
    """u'' = w(x, u, u')."""

    w: Expr

    def __post_init__(self):
        if "ddu" in self.w.free:
            raise ExprError("r-CODE right-hand side must not contain ddu")

    @property
    def rhs(self) -> dict:
        return {"ddu": self.w}

    def __str__(self):
        return f"ddu = {self.w}"


@dataclass(frozen=True)
class System2:
    """f'' = w1, g'' = w2 with right-hand sides over (x, f, g, f', g')."""

    w1: Expr
    w2: Expr

    def __post_init__(self):
        for w in (self.w1, self.w2):
            if w.free & {"ddf", "ddg"}:
                raise ExprError("system right-hand sides must not contain ddf/ddg")

    @property
    def rhs(self) -> dict:
        return {"ddf": self.w1, "ddg": self.w2}

    @classmethod
    def from_rcode(cls, r: ScalarRCODE) -> "System2":
        p = realify(r.w)
        return cls(p.re, p.im)


def el_scalar(L: Expr, dom: SampleDomain = DEFAULT_DOMAIN) -> ScalarRCODE:
    """Solve the EL equation of L(x, u, u') for u''."""
    L_du = diff(L, "du")
    L_dudu = diff(L_du, "du")
    if is_zero(L_dudu, dom, mode="complex"):
        raise DegenerateLagrangianError(f"d^2L/du'^2 vanishes for L = {L}")
    num = add(diff(L, "u"), neg(diff(L_du, "x")), neg(mul(Var("du"), diff(L_du, "u"))))
    return ScalarRCODE(mul(num, power(L_dudu, -1)))


def el_residuals(L1: Expr, L2: Expr, sys: System2) -> List[Expr]:
    """The four on-shell EL expressions for L1 and L2 (f-equation, g-equation each)."""
    out = []
    for L in (L1, L2):
        for q in ("f", "g"):
            p = diff(L, "d" + q)
            out.append(add(diff(L, q), neg(total_derivative(p, sys.rhs))))
    return out


def check_lagrangian_pair(L1: Expr, L2: Expr, sys: System2,
                          dom: SampleDomain = DEFAULT_DOMAIN, **zero_kw) -> bool:
    return all(is_zero(r, dom, mode="real", **zero_kw) for r in el_residuals(L1, L2, sys))


def check_system_matches(L: Expr, sys: System2, dom: SampleDomain = DEFAULT_DOMAIN,
                         **zero_kw) -> bool:
    """Complex EL equation of L, split into real parts, equals ``sys``."""
    w = realify(el_scalar(L, dom).w)
    return all(is_zero(add(a, neg(b)), dom, mode="real", **zero_kw)
               for a, b in zip(w, (sys.w1, sys.w2)))


def implicit_residuals(eqs: Sequence[Expr], sys: System2) -> List[Expr]:
    """Substitute a solved system into implicit equations F(x, f, g, f', g', f'', g'') = 0."""
    return [substitute(e, sys.rhs) for e in eqs]
