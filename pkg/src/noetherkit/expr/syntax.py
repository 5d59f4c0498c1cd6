"""Text grammar for expressions.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?          # binds tightest, right-associative
    atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)? ')' | '(' expr ')'

Identifiers: x u du ddu f g df dg ddf ddg A b pi i; primes are accepted as
aliases (u' -> du, f'' -> ddf).  Functions: exp log sin cos sinh cosh atan
atan2 sqrt, plus the aliases ln and arctan.  Exponents must fold to exact
rationals.  ``to_str`` prints the canonical tree so that
``parse(to_str(e)) == e``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping, Optional

from .core import (
    FUNCTIONS, NAMED_CONSTANTS, Add, Atan2, Const, Expr, ExprError, Fn, Mul,
    Named, Pow, Var, _VAR_RANK, add, as_expr, atan2, fn, mul, neg, power,
)


class ParseError(ExprError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}: {text!r}")
        self.line = line
        self.column = col


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d*)?|\.\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*'*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

_ALIASES = {"u'": "du", "u''": "ddu", "f'": "df", "f''": "ddf",
            "g'": "dg", "g''": "ddg", "ln": "log", "arctan": "atan"}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, macros=None):
        self.text = text
        self.macros = macros or {}
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else neg(t))
        return add(*terms) if len(terms) > 1 else terms[0]

    def term(self):
        factors = [self.unary()]
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            tok = self.peek()
            f = self.unary()
            if op == "/":
                try:
                    f = power(f, -1)
                except ExprError as exc:
                    self.fail(str(exc), tok)
            factors.append(f)
        return mul(*factors) if len(factors) > 1 else factors[0]

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            tok = self.take()
            exponent = self.unary()
            if not isinstance(exponent, Const):
                self.fail("exponent must be an exact rational constant", tok)
            try:
                return power(base, exponent.value)
            except ExprError as exc:
                self.fail(str(exc), tok)
        return base

    def atom(self):
        kind, text, pos = tok = self.take()
        if kind == "num":
            return Const(Fraction(text))
        if kind == "op" and text == "(":
            e = self.expr()
            self.take(")")
            return e
        if kind == "ident":
            name = _ALIASES.get(text, text)
            if self.peek()[1] == "(":
                return self.call(name, tok)
            if name in self.macros:
                return self.macros[name]
            if name in _VAR_RANK:
                return Var(name)
            if name in NAMED_CONSTANTS:
                return Named(name)
            self.fail(f"unknown identifier {text!r}", tok)
        self.fail(f"unexpected {text or 'end of input'!r}", tok)

    def call(self, name, tok):
        self.take("(")
        args = [self.expr()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.take(")")
        want = 2 if name == "atan2" else 1
        if name not in FUNCTIONS and name not in ("atan2", "sqrt"):
            self.fail(f"unknown function {name!r}", tok)
        if len(args) != want:
            self.fail(f"{name} takes {want} argument(s), got {len(args)}", tok)
        if name == "atan2":
            return atan2(*args)
        if name == "sqrt":
            return power(args[0], Fraction(1, 2))
        return fn(name, args[0])


def parse(text: str, macros: Optional[Mapping[str, Expr]] = None) -> Expr:
    """Parse an expression in the text grammar.

    ``macros`` maps extra identifiers to already-built expressions; they are
    spliced in as if parenthesized.
    """
    return _Parser(text, macros).parse()


def E(value) -> Expr:
    """Convenience: parse strings, pass expressions and rationals through."""
    if isinstance(value, str):
        return parse(value)
    return as_expr(value)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _exponent(q: Fraction) -> str:
    if q.denominator == 1 and q > 0:
        return str(q.numerator)
    return f"({_frac(q)})"


def _atom(e: Expr) -> str:
    """Print ``e`` so that it can stand as the base of '^'."""
    if isinstance(e, (Var, Named, Fn, Atan2)):
        return to_str(e)
    if isinstance(e, Const) and e.value >= 0 and e.value.denominator == 1:
        return to_str(e)
    return f"({to_str(e)})"


def _factor(e: Expr) -> str:
    """Print ``e`` as an operand of '*' or '/'."""
    if isinstance(e, Add):
        return f"({to_str(e)})"
    if isinstance(e, Const) and (e.value < 0 or e.value.denominator != 1):
        return f"({to_str(e)})"
    if isinstance(e, Mul):
        return f"({to_str(e)})"
    return to_str(e)


def _pow_str(base: Expr, q: Fraction) -> str:
    return f"{_atom(base)}^{_exponent(q)}"


def _mul_str(e: Mul) -> str:
    coeff = Fraction(1)
    terms = e.terms
    if isinstance(terms[0], Const):
        coeff = terms[0].value
        terms = terms[1:]
    num, den = [], []
    for t in terms:
        if isinstance(t, Pow) and t.exp < 0:
            den.append(t.base if t.exp == -1 else None)
            if t.exp != -1:
                den[-1] = _pow_str(t.base, -t.exp)
            else:
                den[-1] = _factor(t.base) if not isinstance(t.base, Pow) else _atom(t.base)
        else:
            num.append(_factor(t))
    sign = "-" if coeff < 0 else ""
    p, q = abs(coeff.numerator), coeff.denominator
    parts = []
    if p != 1 or not num:
        parts.append(str(p))
    parts.extend(num)
    out = sign + "*".join(parts)
    if q != 1:
        out += f"/{q}"
    for d in den:
        out += f"/{d}"
    return out


def to_str(e: Expr) -> str:
    """Canonical text form of ``e``."""
    if isinstance(e, Const):
        return _frac(e.value)
    if isinstance(e, (Var, Named)):
        return e.name
    if isinstance(e, Fn):
        return f"{e.name}({to_str(e.arg)})"
    if isinstance(e, Atan2):
        return f"atan2({to_str(e.y)}, {to_str(e.x)})"
    if isinstance(e, Pow):
        if e.exp < 0:
            return _mul_str(Mul((Const(1), e)))
        return _pow_str(e.base, e.exp)
    if isinstance(e, Mul):
        return _mul_str(e)
    if isinstance(e, Add):
        out = to_str(e.terms[0])
        for t in e.terms[1:]:
            c = t.value if isinstance(t, Const) else (
                t.terms[0].value if isinstance(t, Mul) and isinstance(t.terms[0], Const) else 1)
            if c < 0:
                out += " - " + to_str(neg(t))
            else:
                out += " + " + to_str(t)
        return out
    raise TypeError(type(e).__name__)
