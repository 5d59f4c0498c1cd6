"""Realification u = f + i g of complex-analytic expressions.

``realify`` maps an expression over (x, u, u', u'') to its real and imaginary
parts over (x, f, g, f', g', f'', g'').  Named constants A, b, pi are real;
``i`` is the imaginary unit.  Principal branches are used for log, fractional
powers and atan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import (
    ONE, ZERO, Add, Atan2, Const, Expr, ExprError, Fn, Mul, Named, Pow,
    SampleDomain, Var, add, atan2, cos, cosh, diff, exp, is_zero, log, mul,
    neg, power, sin, sinh,
)
from .expr.zerotest import DEFAULT_DOMAIN

_PARTS = {"u": ("f", "g"), "du": ("df", "dg"), "ddu": ("ddf", "ddg")}


class RealificationError(ExprError):
    """Node has no complex-analytic extension (e.g. atan2)."""


@dataclass(frozen=True)
class RealPair:
    re: Expr
    im: Expr

    def __iter__(self):
        return iter((self.re, self.im))

    def __add__(self, other: "RealPair") -> "RealPair":
        return RealPair(add(self.re, other.re), add(self.im, other.im))

    def __sub__(self, other: "RealPair") -> "RealPair":
        return RealPair(add(self.re, neg(other.re)), add(self.im, neg(other.im)))

    def __mul__(self, other: "RealPair") -> "RealPair":
        return _cmul(self, other)

    def scale(self, c) -> "RealPair":
        return RealPair(mul(c, self.re), mul(c, self.im))

    def __str__(self):
        return f"({self.re}, {self.im})"


def _cmul(p: RealPair, q: RealPair) -> RealPair:
    a, b = p
    c, d = q
    return RealPair(add(mul(a, c), neg(mul(b, d))), add(mul(a, d), mul(b, c)))


def _modsq(p: RealPair) -> Expr:
    return add(power(p.re, 2), power(p.im, 2))


def _int_power(p: RealPair, n: int) -> RealPair:
    if n < 0:
        conj = RealPair(p.re, neg(p.im))
        q = _int_power(conj, -n)
        inv = power(_modsq(p), n)
        return RealPair(mul(q.re, inv), mul(q.im, inv))
    out = RealPair(ONE, ZERO)
    base = p
    while n:
        if n & 1:
            out = _cmul(out, base)
        n >>= 1
        if n:
            base = _cmul(base, base)
    return out


def _rational_power(p: RealPair, r: Fraction) -> RealPair:
    if r.denominator == 1:
        return _int_power(p, int(r))
    a, b = p
    modulus = power(_modsq(p), r / 2)
    angle = mul(Const(r), atan2(b, a))
    return RealPair(mul(modulus, cos(angle)), mul(modulus, sin(angle)))


def _fn_pair(name: str, p: RealPair) -> RealPair:
    a, b = p
    if b == ZERO:
        return RealPair(Fn(name, a) if not isinstance(a, Const) else _fold(name, a), ZERO)
    if name == "exp":
        ea = exp(a)
        return RealPair(mul(ea, cos(b)), mul(ea, sin(b)))
    if name == "log":
        return RealPair(mul(Const(Fraction(1, 2)), log(_modsq(p))), atan2(b, a))
    if name == "sin":
        return RealPair(mul(sin(a), cosh(b)), mul(cos(a), sinh(b)))
    if name == "cos":
        return RealPair(mul(cos(a), cosh(b)), neg(mul(sin(a), sinh(b))))
    if name == "sinh":
        return RealPair(mul(sinh(a), cos(b)), mul(cosh(a), sin(b)))
    if name == "cosh":
        return RealPair(mul(cosh(a), cos(b)), mul(sinh(a), sin(b)))
    if name == "atan":
        a2, b2 = power(a, 2), power(b, 2)
        re = mul(Const(Fraction(1, 2)), atan2(mul(2, a), add(ONE, neg(a2), neg(b2))))
        num = add(a2, power(add(ONE, b), 2))
        den = add(a2, power(add(ONE, neg(b)), 2))
        im = mul(Const(Fraction(1, 4)), log(mul(num, power(den, -1))))
        return RealPair(re, im)
    raise RealificationError(f"no complex extension for {name}")


def _fold(name, a):
    from .expr import fn
    return fn(name, a)


def realify(e: Expr) -> RealPair:
    """Split a complex-analytic expression into (real part, imaginary part)."""
    memo: dict = {}

    def go(node: Expr) -> RealPair:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = RealPair(node, ZERO)
        elif isinstance(node, Named):
            out = RealPair(ZERO, ONE) if node.name == "i" else RealPair(node, ZERO)
        elif isinstance(node, Var):
            if node.name == "x":
                out = RealPair(node, ZERO)
            elif node.name in _PARTS:
                re, im = _PARTS[node.name]
                out = RealPair(Var(re), Var(im))
            else:
                raise RealificationError(f"{node.name!r} is already a real-side variable")
        elif isinstance(node, Add):
            parts = [go(t) for t in node.terms]
            out = RealPair(add(*(p.re for p in parts)), add(*(p.im for p in parts)))
        elif isinstance(node, Mul):
            # fold real factors first; only complex factors need complex products
            real_factors, cplx = [], []
            for t in node.terms:
                p = go(t)
                if p.im == ZERO:
                    real_factors.append(p.re)
                else:
                    cplx.append(p)
            acc = RealPair(ONE, ZERO)
            for p in cplx:
                acc = _cmul(acc, p)
            scale = mul(*real_factors) if real_factors else ONE
            out = RealPair(mul(scale, acc.re), mul(scale, acc.im))
        elif isinstance(node, Pow):
            p = go(node.base)
            if p.im == ZERO and node.exp.denominator == 1:
                out = RealPair(power(p.re, node.exp), ZERO)
            else:
                out = _rational_power(p, node.exp)
        elif isinstance(node, Fn):
            out = _fn_pair(node.name, go(node.arg))
        elif isinstance(node, Atan2):
            raise RealificationError("atan2 is not complex-analytic; use atan")
        else:
            raise RealificationError(f"unsupported node {type(node).__name__}")
        memo[node] = out
        return out

    return go(e)


def complexify_pair(re: Expr, im: Expr) -> Expr:
    """re + i*im as a single complex-side-style expression (no variable change)."""
    from .expr import I
    return add(re, mul(I, im))


def check_cauchy_riemann(p: RealPair, dom: SampleDomain = DEFAULT_DOMAIN, **zero_kw) -> bool:
    """All four Cauchy-Riemann residuals in (f, g) and (f', g') vanish."""
    re, im = p
    residuals = [
        add(diff(re, "f"), neg(diff(im, "g"))),
        add(diff(re, "g"), diff(im, "f")),
        add(diff(re, "df"), neg(diff(im, "dg"))),
        add(diff(re, "dg"), diff(im, "df")),
    ]
    return all(is_zero(r, dom, mode="real", **zero_kw) for r in residuals)
