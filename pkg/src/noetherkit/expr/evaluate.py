"""Numeric evaluation of expression trees.

Evaluation is vectorized over a batch of points (numpy arrays) and walks the
expression DAG once, caching shared subtrees.  Two modes exist: ``real``
(float64, real-side expressions) and ``complex`` (complex128, used for
complex-side expressions where u, u', u'' take complex values and all
functions use principal branches).
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from .core import Add, Atan2, Const, Expr, Fn, Mul, Named, Pow, Var


class SingularityError(ArithmeticError):
    """Evaluation hit a singular subterm (0^-n, log of nonpositive, atan2(0,0), overflow)."""

    def __init__(self, subterm: Expr, message: str):
        super().__init__(f"{message} in subterm {subterm}")
        self.subterm = subterm


_REAL_FN = {
    "exp": np.exp, "log": np.log, "sin": np.sin, "cos": np.cos,
    "sinh": np.sinh, "cosh": np.cosh, "atan": np.arctan,
}


class _Evaluator:
    def __init__(self, columns: Mapping[str, np.ndarray], mode: str, eps: float, strict: bool):
        if mode not in ("real", "complex"):
            raise ValueError(f"mode must be 'real' or 'complex', not {mode!r}")
        self.columns = columns
        self.mode = mode
        self.eps = eps
        self.strict = strict
        self.dtype = np.complex128 if mode == "complex" else np.float64
        self.n = len(next(iter(columns.values()))) if columns else 1
        self.bad = np.zeros(self.n, dtype=bool)
        self.memo: dict = {}

    def flag(self, node: Expr, mask, why: str):
        mask = np.asarray(mask, dtype=bool)
        if self.strict and mask.any():
            raise SingularityError(node, why)
        self.bad |= mask

    def const(self, value) -> np.ndarray:
        return np.full(self.n, value, dtype=self.dtype)

    def run(self, e: Expr) -> np.ndarray:
        hit = self.memo.get(id(e))
        if hit is not None:
            return hit[1]
        out = self._eval(e)
        if self.mode == "real":
            nonfinite = ~np.isfinite(out)
        else:
            nonfinite = ~(np.isfinite(out.real) & np.isfinite(out.imag))
        if nonfinite.any():
            self.flag(e, nonfinite, "non-finite value")
        # keep e alive so id() stays unique during this walk
        self.memo[id(e)] = (e, out)
        return out

    def _eval(self, e: Expr) -> np.ndarray:
        if isinstance(e, Const):
            return self.const(float(e.value))
        if isinstance(e, Var):
            try:
                col = self.columns[e.name]
            except KeyError:
                raise KeyError(f"point does not assign variable {e.name!r}") from None
            return np.asarray(col, dtype=self.dtype)
        if isinstance(e, Named):
            if e.name == "pi":
                return self.const(math.pi)
            if e.name == "i":
                if self.mode != "complex":
                    raise SingularityError(e, "imaginary unit in real-mode evaluation")
                return self.const(1j)
            try:
                return np.asarray(self.columns[e.name], dtype=self.dtype)
            except KeyError:
                raise KeyError(f"point does not assign named constant {e.name!r}") from None
        if isinstance(e, Add):
            acc = self.run(e.terms[0]).copy()
            for t in e.terms[1:]:
                acc += self.run(t)
            return acc
        if isinstance(e, Mul):
            acc = self.run(e.terms[0]).copy()
            for t in e.terms[1:]:
                acc *= self.run(t)
            return acc
        if isinstance(e, Pow):
            return self._pow(e)
        if isinstance(e, Fn):
            return self._fn(e)
        if isinstance(e, Atan2):
            y = self.run(e.y)
            x = self.run(e.x)
            if self.mode == "complex":
                raise SingularityError(e, "atan2 has no complex extension")
            r = np.hypot(x, y)
            self.flag(e, r == 0, "atan2(0, 0)")
            self.flag(e, r < self.eps, "atan2 near origin")
            return np.arctan2(y, x)
        raise TypeError(f"unknown node {type(e).__name__}")

    def _pow(self, e: Pow) -> np.ndarray:
        b = self.run(e.base)
        r = e.exp
        integral = r.denominator == 1
        with np.errstate(all="ignore"):
            if self.mode == "real":
                if r < 0:
                    self.flag(e, b == 0, "division by zero")
                    self.flag(e, np.abs(b) < self.eps, "denominator near zero")
                if not integral:
                    self.flag(e, b < 0, "fractional power of a negative number")
                    self.flag(e, b < self.eps, "fractional power near zero")
                if integral:
                    return np.power(b, int(r)) if r > 0 else 1.0 / np.power(b, -int(r))
                return np.power(np.where(b > 0, b, np.nan), float(r))
            # complex: principal branch z^r = exp(r log z)
            mag = np.abs(b)
            if r < 0:
                self.flag(e, mag == 0, "division by zero")
                self.flag(e, mag < self.eps, "denominator near zero")
            if integral:
                return np.power(b, int(r)) if r > 0 else 1.0 / np.power(b, -int(r))
            self.flag(e, mag < self.eps, "fractional power near zero")
            return np.exp(float(r) * np.log(b))

    def _fn(self, e: Fn) -> np.ndarray:
        a = self.run(e.arg)
        name = e.name
        with np.errstate(all="ignore"):
            if name == "log":
                if self.mode == "real":
                    self.flag(e, a <= 0, "log of nonpositive number")
                    self.flag(e, a < self.eps, "log argument near zero")
                    return np.log(np.where(a > 0, a, np.nan))
                self.flag(e, np.abs(a) == 0, "log of zero")
                self.flag(e, np.abs(a) < self.eps, "log argument near zero")
                return np.log(a)
            if name == "atan" and self.mode == "complex":
                self.flag(e, np.abs(1 + a * a) < self.eps, "atan near branch point")
            return _REAL_FN[name](a)


def evaluate_batch(e: Expr, columns: Mapping[str, np.ndarray], mode: str = "real",
                   eps: float = 0.0):
    """Evaluate ``e`` at many points.

    Returns ``(values, bad)`` where ``bad`` marks points at which some
    subterm is singular or within ``eps`` of a singularity.
    """
    ev = _Evaluator(columns, mode, eps, strict=False)
    with np.errstate(all="ignore"):
        values = ev.run(e)
    return values, ev.bad


def evaluate_many(exprs, columns: Mapping[str, np.ndarray], mode: str = "real",
                  eps: float = 0.0):
    """Evaluate several expressions sharing one subtree cache.

    Returns ``(list_of_values, bad)`` with one combined ``bad`` mask.
    """
    ev = _Evaluator(columns, mode, eps, strict=False)
    with np.errstate(all="ignore"):
        values = [ev.run(e) for e in exprs]
    return values, ev.bad


def evaluate(e: Expr, point: Mapping[str, complex], mode: str = "real"):
    """Evaluate ``e`` at a single point; raises SingularityError on a singular subterm."""
    columns = {k: np.array([v]) for k, v in point.items()}
    ev = _Evaluator(columns, mode, 0.0, strict=True)
    ev.n = 1
    with np.errstate(all="ignore"):
        value = ev.run(e)[0]
    return complex(value) if mode == "complex" else float(value)
