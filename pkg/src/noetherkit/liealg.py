"""Lie brackets of real vector fields and structure-constant tables."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .expr import (
    DEFAULT_DOMAIN, REAL_BASE, Const, SampleDomain, add, guarded_points,
    is_polynomial, is_zero, mul, neg, rational_value,
)
from .symmetry import RealVectorField, rationalize


class DependentBasisError(ValueError):
    """The operator list is linearly dependent."""


def lie_bracket(X: RealVectorField, Y: RealVectorField) -> RealVectorField:
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    return RealVectorField(*(add(X.apply(b), neg(Y.apply(a)))
                             for a, b in zip(X.components, Y.components)))


def combine(coeffs: Sequence[Fraction], ops: Sequence[RealVectorField]) -> RealVectorField:
    comps = [add(*(mul(Const(c), op.components[k]) for c, op in zip(coeffs, ops) if c))
             for k in range(3)]
    return RealVectorField(*comps)


def field_is_zero(X: RealVectorField, dom: SampleDomain = DEFAULT_DOMAIN) -> bool:
    return all(is_zero(c, dom, mode="real") for c in X.components)


# ---------------------------------------------------------------------------
# exact linear algebra over the rationals
# ---------------------------------------------------------------------------

def _rref(rows: List[List[Fraction]], ncols: int):
    """Row-reduce in place; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def _solve_exact(A: List[List[Fraction]], b: List[Fraction]) -> Optional[List[Fraction]]:
    """Solve A c = b exactly; None if inconsistent."""
    n = len(A[0]) if A else 0
    rows = [list(row) + [rhs] for row, rhs in zip(A, b)]
    pivots = _rref(rows, n + 1)
    if n in pivots:
        return None
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = rows[i][n]
    return sol


def _rational_points(n: int, seed: int) -> List[Dict[str, Fraction]]:
    rng = random.Random(seed)
    return [{v: Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for v in REAL_BASE}
            for _ in range(n)]


def _exact_rows(fields: Sequence[RealVectorField], points) -> List[List[Fraction]]:
    """One row per (point, component); one column per field."""
    rows = []
    for pt in points:
        for k in range(3):
            rows.append([rational_value(X.components[k], pt) for X in fields])
    return rows


def _all_polynomial(fields: Sequence[RealVectorField]) -> bool:
    return all(is_polynomial(c) for X in fields for c in X.components)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

@dataclass
class AlgebraTable:
    names: List[str]
    basis: List[RealVectorField]
    constants: Dict[Tuple[int, int], Tuple[Fraction, ...]] = field(default_factory=dict)
    closed: bool = True
    residuals: Dict[Tuple[int, int], RealVectorField] = field(default_factory=dict)

    def coefficient(self, i: int, j: int) -> Optional[Tuple[Fraction, ...]]:
        if i == j:
            return tuple(Fraction(0) for _ in self.basis)
        if (i, j) in self.constants:
            return self.constants[(i, j)]
        if (j, i) in self.constants:
            return tuple(-c for c in self.constants[(j, i)])
        return None

    def format_row(self, i: int, j: int) -> str:
        head = f"[{self.names[i]},{self.names[j]}] = "
        c = self.coefficient(i, j)
        if c is None:
            return head + f"{self.residuals[(i, j)]}  (not in span)"
        return head + format_combination(c, self.names)

    def rows(self) -> List[str]:
        n = len(self.basis)
        return [self.format_row(i, j) for i in range(n) for j in range(i + 1, n)]


def format_combination(coeffs: Sequence[Fraction], names: Sequence[str]) -> str:
    parts = []
    for c, name in zip(coeffs, names):
        if c == 0:
            continue
        mag = abs(c)
        term = name if mag == 1 else f"{mag}{name}" if mag.denominator == 1 else f"({mag}){name}"
        parts.append(("-" if c < 0 else "+", term))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def check_independent(ops: Sequence[RealVectorField], dom: SampleDomain = DEFAULT_DOMAIN) -> bool:
    """Numeric rank on 3n sampled points, confirmed exactly for polynomial fields."""
    n = len(ops)
    comps = [c for X in ops for c in X.components]
    _, vals = guarded_points(comps, dom, 3 * n, "real")
    M = np.array([[vals[3 * j + k][p] for j in range(n)] for p in range(3 * n) for k in range(3)])
    s = np.linalg.svd(M, compute_uv=False)
    numeric = bool(s.size and s[-1] > 1e-9 * max(1.0, s[0]))
    if _all_polynomial(ops):
        rows = _exact_rows(ops, _rational_points(3 * n, dom.seed))
        return len(_rref(rows, n)) == n
    return numeric


def expand_in_span(B: RealVectorField, ops: Sequence[RealVectorField],
                   dom: SampleDomain = DEFAULT_DOMAIN) -> Optional[Tuple[Fraction, ...]]:
    """Exact coefficients c with B = sum c_k ops_k, or None if B is not in the span."""
    n = len(ops)
    if _all_polynomial(list(ops) + [B]):
        pts = _rational_points(3 * n + 3, dom.seed + 1)
        A = _exact_rows(ops, pts)
        b = [row[0] for row in _exact_rows([B], pts)]
        coeffs = _solve_exact(A, b)
    else:
        comps = [c for X in list(ops) + [B] for c in X.components]
        _, vals = guarded_points(comps, dom, 3 * n + 3, "real")
        m = len(vals[0])
        A = np.array([[vals[3 * j + k][p] for j in range(n)] for p in range(m) for k in range(3)])
        b = np.array([vals[3 * n + k][p] for p in range(m) for k in range(3)])
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        coeffs = [rationalize(float(v)) for v in sol]
        if any(c is None for c in coeffs):
            return None
    if coeffs is None:
        return None
    resid = add_fields(B, combine(coeffs, ops).scale(-1))
    return tuple(coeffs) if field_is_zero(resid, dom) else None


def add_fields(X: RealVectorField, Y: RealVectorField) -> RealVectorField:
    return X + Y


def structure_constants(names: Sequence[str], ops: Sequence[RealVectorField],
                        dom: SampleDomain = DEFAULT_DOMAIN) -> AlgebraTable:
    """Expand every bracket [X_i, X_j], i < j, over the operator list."""
    if not ops:
        raise ValueError("operator list is empty")
    if len(names) != len(ops):
        raise ValueError("one name per operator")
    if not check_independent(ops, dom):
        raise DependentBasisError("operators are linearly dependent")
    table = AlgebraTable(list(names), list(ops))
    for i, j in itertools.combinations(range(len(ops)), 2):
        B = lie_bracket(ops[i], ops[j])
        c = expand_in_span(B, ops, dom)
        if c is None:
            table.closed = False
            table.residuals[(i, j)] = B
        else:
            table.constants[(i, j)] = c
    return table


def check_jacobi(table: AlgebraTable) -> bool:
    """sum over cyclic (i, j, k) of c_ij^m c_mk^l = 0, exactly."""
    if not table.closed:
        raise ValueError("Jacobi check needs a closed table")
    n = len(table.basis)
    C = [[table.coefficient(i, j) for j in range(n)] for i in range(n)]
    for i, j, k in itertools.combinations(range(n), 3):
        for l in range(n):
            total = Fraction(0)
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                total += sum(C[a][b][m] * C[m][c][l] for m in range(n))
            if total != 0:
                return False
    return True
