"""Compile expressions to plain Python scalar functions.

Used where the same expressions are evaluated thousands of times at single
points (trajectory integration).  Shared subtrees become one local variable.
Singular points raise ArithmeticError/ValueError from the math module.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .core import Add, Atan2, Const, Expr, Fn, Mul, Named, Pow, Var


def _atan2(y, x):
    if y == 0 and x == 0:
        raise ZeroDivisionError("atan2(0, 0)")
    return math.atan2(y, x)


def _fpow(b, r):
    if b <= 0:
        raise ValueError("fractional power of a nonpositive number")
    return math.pow(b, r)


_ENV = {
    "exp": math.exp, "log": math.log, "sin": math.sin, "cos": math.cos,
    "sinh": math.sinh, "cosh": math.cosh, "atan": math.atan,
    "atan2": _atan2, "fpow": _fpow, "pi": math.pi,
}


def compile_exprs(exprs: Sequence[Expr], args: Sequence[str]) -> Callable[..., tuple]:
    """Return ``fn(*values) -> tuple`` evaluating ``exprs`` in real arithmetic.

    ``args`` names the positional parameters (variables or named constants).
    """
    names: dict = {}
    lines: list = []

    def ref(e: Expr) -> str:
        hit = names.get(e)
        if hit is not None:
            return hit
        if isinstance(e, Const):
            return repr(float(e.value))
        if isinstance(e, (Var, Named)):
            if e.name == "pi":
                return "pi"
            if e.name not in args:
                raise KeyError(f"{e.name!r} is not an argument")
            return e.name
        if isinstance(e, Add):
            code = " + ".join(ref(t) for t in e.terms)
        elif isinstance(e, Mul):
            code = " * ".join(ref(t) for t in e.terms)
        elif isinstance(e, Pow):
            b = ref(e.base)
            r = e.exp
            if r.denominator == 1:
                code = f"{b} ** {int(r)}" if r > 0 else f"1.0 / ({b} ** {-int(r)})"
            else:
                code = f"fpow({b}, {float(r)!r})"
        elif isinstance(e, Fn):
            code = f"{e.name}({ref(e.arg)})"
        elif isinstance(e, Atan2):
            code = f"atan2({ref(e.y)}, {ref(e.x)})"
        else:
            raise TypeError(type(e).__name__)
        name = f"t{len(names)}"
        names[e] = name
        lines.append(f"    {name} = {code}")
        return name

    outs = [ref(e) for e in exprs]
    src = f"def _fn({', '.join(args)}):\n" + "\n".join(lines)
    src += f"\n    return ({', '.join(outs)}{',' if len(outs) == 1 else ''})\n"
    env = dict(_ENV)
    exec(compile(src, "<noetherkit-codegen>", "exec"), env)
    return env["_fn"]
