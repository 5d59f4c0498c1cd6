"""Immutable expression trees with exact rational constants.

Nodes are built through the smart constructors (``add``, ``mul``, ``power``,
``fn``, ``atan2``) which apply local canonicalization only: flattening,
constant folding, like-term and like-base collection, and a total order on
children.  No trig/exp identities are applied.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Union

# Canonical variable order; also used to rank variables inside sort keys.
VAR_ORDER = ("x", "u", "du", "ddu", "f", "g", "df", "dg", "ddf", "ddg")
_VAR_RANK = {name: i for i, name in enumerate(VAR_ORDER)}

NAMED_CONSTANTS = ("A", "b", "pi", "i")
FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "atan")

# next-derivative symbol for each variable; x has none (it is the independent variable)
DERIVATIVE_OF = {
    "u": "du", "du": "ddu",
    "f": "df", "df": "ddf",
    "g": "dg", "dg": "ddg",
}


class ExprError(ValueError):
    """Malformed expression (bad arity, non-rational exponent, 0^-n, ...)."""


class ContextError(ExprError):
    """Variable not part of the expression's context."""


class VarContext(tuple):
    """Ordered set of variable identifiers."""

    def __new__(cls, names: Iterable[str]):
        names = tuple(names)
        if not names or any(not n for n in names):
            raise ContextError("context names must be nonempty")
        if len(set(names)) != len(names):
            raise ContextError(f"duplicate names in context {names}")
        return super().__new__(cls, names)

    def covers(self, names: Iterable[str]) -> bool:
        return set(names) <= set(self)


COMPLEX = VarContext(("x", "u", "du", "ddu"))
REAL = VarContext(("x", "f", "g", "df", "dg", "ddf", "ddg"))
COMPLEX_BASE = VarContext(("x", "u"))
REAL_BASE = VarContext(("x", "f", "g"))


Number = Union[int, Fraction]


class Expr:
    """Base class.  Subclasses set ``_key`` (a total-order sort key),
    ``_hash`` and ``free`` (frozenset of variable names) at construction."""

    __slots__ = ("_key", "_hash", "free")

    # -- structural identity -------------------------------------------------
    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __lt__(self, other):
        return self._key < other._key

    @property
    def args(self) -> tuple:
        return ()

    # -- arithmetic sugar -----------------------------------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, -1))

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __str__(self):
        from .syntax import to_str
        return to_str(self)

    def __repr__(self):
        return f"Expr({self})"

    @property
    def named(self) -> frozenset:
        """Named constants referenced by the tree."""
        out = set()
        stack = [self]
        seen = set()
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if isinstance(node, Named):
                out.add(node.name)
            stack.extend(node.args)
        return frozenset(out)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number):
        self.value = Fraction(value)
        self._key = (0, self.value)
        self._hash = hash(self._key)
        self.free = frozenset()


class Named(Expr):
    """Named real constant (A, b, pi) or the imaginary unit ``i``."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in NAMED_CONSTANTS:
            raise ExprError(f"unknown named constant {name!r}")
        self.name = name
        self._key = (1, name)
        self._hash = hash(self._key)
        self.free = frozenset()


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in _VAR_RANK:
            raise ContextError(f"unknown variable {name!r}")
        self.name = name
        self._key = (2, _VAR_RANK[name])
        self._hash = hash(self._key)
        self.free = frozenset((name,))


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: Fraction):
        self.base = base
        self.exp = exp
        self._key = (3, base._key, exp)
        self._hash = hash((3, base._hash, exp))
        self.free = base.free

    @property
    def args(self):
        return (self.base,)


class _Nary(Expr):
    __slots__ = ("terms",)
    RANK = -1

    def __init__(self, terms: tuple):
        if len(terms) < 2:
            raise ExprError(f"{type(self).__name__} needs at least 2 children")
        self.terms = terms
        self._key = (self.RANK, tuple(t._key for t in terms))
        self._hash = hash((self.RANK,) + tuple(t._hash for t in terms))
        self.free = frozenset().union(*(t.free for t in terms))

    @property
    def args(self):
        return self.terms


class Mul(_Nary):
    __slots__ = ()
    RANK = 4


class Add(_Nary):
    __slots__ = ()
    RANK = 5


class Fn(Expr):
    """One-argument function node: exp, log, sin, cos, sinh, cosh, atan."""

    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ExprError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg
        self._key = (6, name, arg._key)
        self._hash = hash((6, name, arg._hash))
        self.free = arg.free

    @property
    def args(self):
        return (self.arg,)


class Atan2(Expr):
    __slots__ = ("y", "x")

    def __init__(self, y: Expr, x: Expr):
        self.y = y
        self.x = x
        self._key = (7, y._key, x._key)
        self._hash = hash((7, y._hash, x._hash))
        self.free = y.free | x.free

    @property
    def args(self):
        return (self.y, self.x)


ZERO = Const(0)
ONE = Const(1)
I = Named("i")


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)) or isinstance(value, Rational):
        return Const(value)
    if isinstance(value, str):
        if value in _VAR_RANK:
            return Var(value)
        if value in NAMED_CONSTANTS:
            return Named(value)
    raise ExprError(f"cannot convert {value!r} to an expression (floats are not allowed)")


def is_const(e: Expr, value: Optional[Number] = None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------

def split_coeff(e: Expr):
    """Return (rational coefficient, remaining expression or None)."""
    if isinstance(e, Const):
        return e.value, None
    if isinstance(e, Mul) and isinstance(e.terms[0], Const):
        rest = e.terms[1:]
        return e.terms[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def _with_coeff(c: Fraction, rest: Optional[Expr]) -> Expr:
    if rest is None or c == 0:
        return Const(c)
    if c == 1:
        return rest
    if isinstance(rest, Mul):
        return Mul((Const(c),) + rest.terms)
    return Mul((Const(c), rest))


def add(*terms) -> Expr:
    flat = []
    for t in terms:
        t = as_expr(t)
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    const = Fraction(0)
    groups: dict = {}
    for t in flat:
        c, rest = split_coeff(t)
        if rest is None:
            const += c
        elif rest in groups:
            groups[rest] += c
        else:
            groups[rest] = c
    out = [_with_coeff(c, rest) for rest, c in groups.items() if c != 0]
    if const != 0:
        out.append(Const(const))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    out.sort()
    return Add(tuple(out))


def _base_exp(e: Expr):
    if isinstance(e, Pow):
        return e.base, e.exp
    return e, Fraction(1)


def mul(*factors) -> Expr:
    flat = []
    stack = [as_expr(f) for f in reversed(factors)]
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f.terms))
        else:
            flat.append(f)
    coeff = Fraction(1)
    groups: dict = {}
    for f in flat:
        if isinstance(f, Const):
            coeff *= f.value
            continue
        base, e = _base_exp(f)
        groups[base] = groups.get(base, Fraction(0)) + e
    if coeff == 0:
        return ZERO
    out = []
    regroup = False
    for base, e in groups.items():
        if e == 0:
            continue
        p = power(base, e)
        if isinstance(p, Const):
            coeff *= p.value
        else:
            # i^n -> -i, (2*y)^2 -> 4*y^2, (x*y)^(1/2)*(x*y)^(1/2) -> x*y
            regroup = regroup or isinstance(p, Mul)
            out.append(p)
    if regroup:
        return mul(Const(coeff), *out)
    if not out:
        return Const(coeff)
    out.sort()
    if coeff == 1 and len(out) == 1:
        return out[0]
    if coeff != 1:
        out.insert(0, Const(coeff))
    return Mul(tuple(out))


def neg(e: Expr) -> Expr:
    return mul(Const(-1), e)


def _as_fraction(exponent) -> Fraction:
    if isinstance(exponent, Const):
        return exponent.value
    if isinstance(exponent, (int, Fraction)) or isinstance(exponent, Rational):
        return Fraction(exponent)
    if isinstance(exponent, Expr):
        raise ExprError(f"exponent must be an exact rational, got {exponent}")
    raise ExprError(f"exponent must be an exact rational, got {exponent!r}")


def power(base, exponent) -> Expr:
    base = as_expr(base)
    r = _as_fraction(exponent)
    if r == 0:
        return ONE
    if r == 1:
        return base
    if isinstance(base, Const):
        v = base.value
        if v == 0:
            if r < 0:
                raise ExprError("0 raised to a negative power")
            return ZERO
        if v == 1:
            return ONE
        if r.denominator == 1:
            return Const(v ** int(r))
        return Pow(base, r)
    if isinstance(base, Named) and base.name == "i" and r.denominator == 1:
        n = int(r) % 4
        return (ONE, I, Const(-1), mul(Const(-1), I))[n]
    if isinstance(base, Pow) and r.denominator == 1:
        return power(base.base, base.exp * r)
    if isinstance(base, Mul) and isinstance(base.terms[0], Const) and r.denominator == 1:
        c, rest = split_coeff(base)
        return mul(Const(c ** int(r)), power(rest, r))
    return Pow(base, r)


_FN_ZERO = {"exp": ONE, "log": None, "sin": ZERO, "cos": ONE,
            "sinh": ZERO, "cosh": ONE, "atan": ZERO}


def fn(name: str, arg) -> Expr:
    arg = as_expr(arg)
    if name not in FUNCTIONS:
        raise ExprError(f"unknown function {name!r}")
    if is_const(arg, 0) and _FN_ZERO[name] is not None:
        return _FN_ZERO[name]
    if name == "log" and is_const(arg, 1):
        return ZERO
    return Fn(name, arg)


def atan2(y, x) -> Expr:
    y, x = as_expr(y), as_expr(x)
    if is_const(y, 0) and isinstance(x, Const) and x.value > 0:
        return ZERO
    return Atan2(y, x)


def exp(a): return fn("exp", a)
def log(a): return fn("log", a)
def sin(a): return fn("sin", a)
def cos(a): return fn("cos", a)
def sinh(a): return fn("sinh", a)
def cosh(a): return fn("cosh", a)
def atan(a): return fn("atan", a)
def sqrt(a): return power(a, Fraction(1, 2))


def rebuild(e: Expr, args) -> Expr:
    """Reconstruct a node of the same kind as ``e`` from new children."""
    if isinstance(e, Add):
        return add(*args)
    if isinstance(e, Mul):
        return mul(*args)
    if isinstance(e, Pow):
        return power(args[0], e.exp)
    if isinstance(e, Fn):
        return fn(e.name, args[0])
    if isinstance(e, Atan2):
        return atan2(args[0], args[1])
    return e


def additive_terms(e: Expr) -> tuple:
    return e.terms if isinstance(e, Add) else (e,)


def context_of(e: Expr) -> Optional[VarContext]:
    """Infer the canonical context (complex or real side) from free variables.

    Returns None when the expression uses neither side's dependent variables
    (constants, or functions of x alone), which are valid on both sides.
    """
    names = e.free
    cplx = names & {"u", "du", "ddu"}
    real = names & {"f", "g", "df", "dg", "ddf", "ddg"}
    if cplx and real:
        raise ContextError(f"expression mixes complex and real variables: {sorted(names)}")
    if cplx:
        return COMPLEX
    if real:
        return REAL
    return None


def node_count(e: Expr) -> int:
    """Number of distinct nodes in the expression DAG."""
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        stack.extend(n.args)
    return len(seen)
