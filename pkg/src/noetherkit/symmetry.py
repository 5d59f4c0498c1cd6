"""Point symmetries, prolongation, Noether-like operator pairs and gauge solving.

Complex generators Z = xi(x,u) d/dx + eta(x,u) d/du act on the complex side;
real fields X = xi d/dx + eta_f d/df + eta_g d/dg act on (x, f, g).  The
Noether-like condition is checked on the complex side,

    Z^(1) L + (D_x xi) L - D_x A = 0,

and then split into real and imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .complexify import RealPair, realify
from .expr import (
    COMPLEX_BASE, DEFAULT_DOMAIN, REAL_BASE, DomainTooTightError, ZERO, Const, Expr, ExprError,
    I, Named, SampleDomain, Var, add, diff, guarded_points, is_zero, mul, neg, power,
    substitute, total_derivative,
)
from .variational import ScalarRCODE, System2


class NotTotalDerivative(ExprError):
    """The Noether residual is not D_x of any gauge in the searched basis."""


@dataclass(frozen=True)
class ComplexPointSymmetry:
    xi: Expr
    eta: Expr

    def __post_init__(self):
        for c in (self.xi, self.eta):
            if not c.free <= set(COMPLEX_BASE):
                raise ExprError(f"symmetry coefficient {c} must depend on x, u only")

    def __str__(self):
        return _format_terms(zip((self.xi, self.eta), ("x", "u")))


def _format_terms(terms) -> str:
    """c1*Dv1 + c2*Dv2 with unit coefficients dropped and compound ones bracketed."""
    out = ""
    for c, v in terms:
        if c == ZERO:
            continue
        text = str(c)
        sign = "-" if text.startswith("-") and not any(ch in text[1:] for ch in "+- ") else ""
        if sign:
            text = text[1:]
        if text == "1":
            term = f"D{v}"
        elif any(ch in text for ch in "+- /"):
            term = f"({text})*D{v}"
        else:
            term = f"{text}*D{v}"
        if not out:
            out = sign + term
        else:
            out += (" - " if sign else " + ") + term
    return out or "0"


@dataclass(frozen=True)
class RealVectorField:
    xi: Expr
    eta_f: Expr
    eta_g: Expr

    def __post_init__(self):
        for c in self.components:
            if not c.free <= set(REAL_BASE):
                raise ExprError(f"field coefficient {c} must depend on x, f, g only")

    @property
    def components(self) -> Tuple[Expr, Expr, Expr]:
        return (self.xi, self.eta_f, self.eta_g)

    def apply(self, h: Expr) -> Expr:
        """X(h) for h over (x, f, g)."""
        return add(*(mul(c, diff(h, v)) for c, v in zip(self.components, REAL_BASE)))

    def is_null(self) -> bool:
        return all(c == ZERO for c in self.components)

    def __add__(self, other: "RealVectorField") -> "RealVectorField":
        return RealVectorField(*(add(a, b) for a, b in zip(self.components, other.components)))

    def scale(self, c) -> "RealVectorField":
        return RealVectorField(*(mul(c, a) for a in self.components))

    def __str__(self):
        return _format_terms(zip(self.components, REAL_BASE))


@dataclass(frozen=True)
class OperatorPair:
    X1: RealVectorField
    X2: RealVectorField
    origin: Optional[ComplexPointSymmetry] = None

    def __post_init__(self):
        if self.origin is not None:
            if self.X2.eta_f != self.X1.eta_g or self.X2.eta_g != neg(self.X1.eta_f):
                raise ExprError("operator pair does not have the split structure of its origin")


@dataclass(frozen=True)
class GaugePair:
    A1: Expr
    A2: Expr = ZERO

    @classmethod
    def from_complex(cls, A: Expr) -> "GaugePair":
        p = realify(A)
        return cls(p.re, p.im)


Gauge = Union[Expr, GaugePair, None]


def _gauge_pair(A: Gauge) -> GaugePair:
    if A is None:
        return GaugePair(ZERO, ZERO)
    if isinstance(A, GaugePair):
        return A
    return GaugePair.from_complex(A)


# ---------------------------------------------------------------------------
# splitting and prolongation
# ---------------------------------------------------------------------------

def split_symmetry(Z: ComplexPointSymmetry) -> OperatorPair:
    """Real and imaginary operators of Z = X1 + i X2 (unit coefficient on d/dx)."""
    s1, s2 = realify(Z.xi)
    c1, c2 = realify(Z.eta)
    X1 = RealVectorField(s1, c1, c2)
    X2 = RealVectorField(s2, c2, neg(c1))
    return OperatorPair(X1, X2, Z)


def prolong(Z: Union[ComplexPointSymmetry, RealVectorField], order: int = 1) -> tuple:
    """Prolonged coefficients.

    Complex generator: (eta1,) or (eta1, eta2) for u', u''.
    Real field: ((eta_f1, eta_g1),) or with the second-order pair appended.
    Free total derivatives are used; nothing is put on shell.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if isinstance(Z, ComplexPointSymmetry):
        dxi = total_derivative(Z.xi)
        e1 = add(total_derivative(Z.eta), neg(mul(Var("du"), dxi)))
        if order == 1:
            return (e1,)
        e2 = add(total_derivative(e1), neg(mul(Var("ddu"), dxi)))
        return (e1, e2)
    dxi = total_derivative(Z.xi)
    first = tuple(add(total_derivative(eta), neg(mul(Var(dq), dxi)))
                  for eta, dq in ((Z.eta_f, "df"), (Z.eta_g, "dg")))
    if order == 1:
        return (first,)
    second = tuple(add(total_derivative(e), neg(mul(Var(ddq), dxi)))
                   for e, ddq in zip(first, ("ddf", "ddg")))
    return (first, second)


def apply_prolonged(Z: Union[ComplexPointSymmetry, RealVectorField], h: Expr) -> Expr:
    """Z^(1) h (or Z^(2) h when h involves second derivatives)."""
    need2 = bool(h.free & {"ddu", "ddf", "ddg"})
    pro = prolong(Z, 2 if need2 else 1)
    if isinstance(Z, ComplexPointSymmetry):
        terms = [mul(Z.xi, diff(h, "x")), mul(Z.eta, diff(h, "u")), mul(pro[0], diff(h, "du"))]
        if need2:
            terms.append(mul(pro[1], diff(h, "ddu")))
        return add(*terms)
    terms = [Z.apply(h)]
    names = (("df", "dg"), ("ddf", "ddg"))
    for coeffs, vs in zip(pro, names):
        for c, v in zip(coeffs, vs):
            terms.append(mul(c, diff(h, v)))
    return add(*terms)


# ---------------------------------------------------------------------------
# Noether conditions
# ---------------------------------------------------------------------------

def noether_residual(Z: ComplexPointSymmetry, L: Expr) -> Expr:
    """Z^(1) L + (D_x xi) L, before subtracting D_x A."""
    return add(apply_prolonged(Z, L), mul(total_derivative(Z.xi), L))


def noether_like_residuals(pair: OperatorPair, L: Expr, gauge: Gauge) -> RealPair:
    """Real and imaginary parts of Z^(1) L + (D_x xi) L - D_x A."""
    if pair.origin is None:
        raise ExprError("the Noether-like check needs the complex generator the pair came from")
    R = realify(noether_residual(pair.origin, L))
    A = _gauge_pair(gauge)
    return RealPair(add(R.re, neg(total_derivative(A.A1))),
                    add(R.im, neg(total_derivative(A.A2))))


def check_noether_like(pair: OperatorPair, L: Expr, gauge: Gauge = None,
                       dom: SampleDomain = DEFAULT_DOMAIN, **zero_kw) -> bool:
    """Both parts of the split Noether condition vanish identically.

    ``L`` is the complex Lagrangian; ``gauge`` is a complex A(x, u), a real
    GaugePair (A1, A2) over (x, f, g), or None for zero gauge.
    """
    return all(is_zero(r, dom, mode="real", **zero_kw) for r in noether_like_residuals(pair, L, gauge))


def classical_noether_residual(X: RealVectorField, L: Expr, A: Expr = ZERO) -> Expr:
    return add(apply_prolonged(X, L), mul(total_derivative(X.xi), L), neg(total_derivative(A)))


def check_classical_noether(X: RealVectorField, L: Expr, A: Union[Expr, str] = ZERO,
                            dom: SampleDomain = DEFAULT_DOMAIN, **zero_kw) -> bool:
    """X^(1) L + (D_x xi) L = D_x A for one real Lagrangian.

    ``A="auto"`` searches a polynomial gauge with ``find_real_gauge``.
    """
    if isinstance(A, str) and A == "auto":
        try:
            A = find_real_gauge(X, L, dom=dom)
        except NotTotalDerivative:
            return False
    return bool(is_zero(classical_noether_residual(X, L, A), dom, mode="real", **zero_kw))


def lie_residuals(X: Union[RealVectorField, ComplexPointSymmetry],
                  sys: Union[System2, ScalarRCODE]) -> List[Expr]:
    """Second prolongation applied to u'' - w, evaluated on shell."""
    if isinstance(X, ComplexPointSymmetry):
        if not isinstance(sys, ScalarRCODE):
            raise TypeError("a complex generator needs a ScalarRCODE")
        eq = add(Var("ddu"), neg(sys.w))
        return [substitute(apply_prolonged(X, eq), sys.rhs)]
    if not isinstance(sys, System2):
        raise TypeError("a real field needs a System2")
    out = []
    for dd, w in (("ddf", sys.w1), ("ddg", sys.w2)):
        eq = add(Var(dd), neg(w))
        out.append(substitute(apply_prolonged(X, eq), sys.rhs))
    return out


def check_lie_symmetry(X, sys, dom: SampleDomain = DEFAULT_DOMAIN, **zero_kw) -> bool:
    return all(is_zero(r, dom, **zero_kw) for r in lie_residuals(X, sys))


# ---------------------------------------------------------------------------
# gauge search
# ---------------------------------------------------------------------------

def monomials(names: Sequence[str], degree: int = 3) -> List[Expr]:
    """Monomials in ``names`` of total degree 1..degree (constants are invisible to D_x)."""
    out = []

    def rec(k, left, acc):
        if k == len(names):
            if acc:
                out.append(mul(*(power(Var(n), e) for n, e in acc)))
            return
        for e in range(left + 1):
            rec(k + 1, left - e, acc + ([(names[k], e)] if e else []))

    rec(0, degree, [])
    out.sort(key=lambda m: m._key)
    return out


def default_basis(names: Sequence[str], L: Expr, degree: int = 3) -> List[Expr]:
    """Monomials, plus the same monomials times each parameter (A, b) occurring in L."""
    base = monomials(names, degree)
    params = sorted(L.named & {"A", "b"})
    return base + [mul(Named(p), m) for p in params for m in base]


def rationalize(value: float, max_den: int = 1000, tol: float = 1e-7) -> Optional[Fraction]:
    q = Fraction(value).limit_denominator(max_den)
    return q if abs(float(q) - value) <= tol * max(1.0, abs(value)) else None


def _solve_gauge(R: Expr, basis: Sequence[Expr], dom: SampleDomain, mode: str) -> List[complex]:
    cols = [total_derivative(b) for b in basis]
    n = max(2 * len(basis), 8)
    _, vals = guarded_points([R] + cols, dom, n, mode)
    M = np.column_stack(vals[1:]) if cols else np.zeros((n, 0))
    rhs = vals[0]
    scale = np.maximum(1.0, np.abs(rhs) + np.abs(M).sum(axis=1))
    coeffs, *_ = np.linalg.lstsq(M / scale[:, None], rhs / scale, rcond=None)
    return list(coeffs)


def _rational_combination(coeffs, basis, allow_complex: bool) -> Optional[Expr]:
    terms = []
    for c, b in zip(coeffs, basis):
        re = rationalize(float(np.real(c)))
        im = rationalize(float(np.imag(c))) if allow_complex else Fraction(0)
        if re is None or im is None:
            return None
        if not allow_complex and abs(np.imag(c)) > 1e-7:
            return None
        coeff = add(Const(re), mul(Const(im), I)) if im else Const(re)
        terms.append(mul(coeff, b))
    return add(*terms) if terms else ZERO


def find_gauge(Z: ComplexPointSymmetry, L: Expr, basis: Optional[Sequence[Expr]] = None,
               dom: SampleDomain = DEFAULT_DOMAIN, retries: int = 5) -> Expr:
    """Complex gauge A(x, u) with Z^(1) L + (D_x xi) L = D_x A.

    A is searched as a combination of ``basis`` (default: monomials x^i u^j
    with 1 <= i + j <= 3, and the same monomials times each parameter A, b
    occurring in L) with rational, possibly complex, coefficients.
    Raises NotTotalDerivative when no such A exists in the basis.
    """
    basis = list(basis) if basis is not None else default_basis(("x", "u"), L)
    R = noether_residual(Z, L)
    if not is_zero(diff(diff(R, "du"), "du"), dom, mode="complex"):
        raise NotTotalDerivative(f"residual {R} is not affine in u'")
    pair = split_symmetry(Z)
    last_error = None
    for attempt in range(retries):
        sub = dom.with_seed(dom.seed + 7919 * attempt)
        try:
            coeffs = _solve_gauge(R, basis, sub, "complex")
        except (np.linalg.LinAlgError, DomainTooTightError) as exc:
            last_error = exc
            continue
        A = _rational_combination(coeffs, basis, allow_complex=True)
        if A is not None and check_noether_like(pair, L, A, dom):
            return A
        break
    raise NotTotalDerivative(f"no gauge in the basis makes {Z} a Noether-like symmetry of {L}"
                             + (f" ({last_error})" if last_error else ""))


def find_real_gauge(X: RealVectorField, L: Expr, basis: Optional[Sequence[Expr]] = None,
                    dom: SampleDomain = DEFAULT_DOMAIN, retries: int = 5) -> Expr:
    """Real gauge A(x, f, g) for the classical condition X^(1) L + (D_x xi) L = D_x A."""
    basis = list(basis) if basis is not None else default_basis(("x", "f", "g"), L)
    R = add(apply_prolonged(X, L), mul(total_derivative(X.xi), L))
    for dv in ("df", "dg"):
        for dw in ("df", "dg"):
            if not is_zero(diff(diff(R, dv), dw), dom, mode="real"):
                raise NotTotalDerivative(f"residual {R} is not affine in the velocities")
    for attempt in range(retries):
        sub = dom.with_seed(dom.seed + 7919 * attempt)
        try:
            coeffs = _solve_gauge(R, basis, sub, "real")
        except (np.linalg.LinAlgError, DomainTooTightError):
            continue
        A = _rational_combination(coeffs, basis, allow_complex=False)
        if A is not None and is_zero(classical_noether_residual(X, L, A), dom, mode="real"):
            return A
        break
    raise NotTotalDerivative(f"no gauge in the basis makes {X} a Noether symmetry of {L}")
