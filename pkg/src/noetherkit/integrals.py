"""First integrals from Noether-like symmetries, with symbolic and trajectory checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .complexify import realify
from .expr import (
    DEFAULT_DOMAIN, ZERO, Const, Expr, ExprError, SampleDomain, Var, add,
    compile_exprs, diff, guarded_points, is_zero, mul, neg, total_derivative,
)
from .symmetry import ComplexPointSymmetry, OperatorPair, rationalize
from .variational import System2

STATE = ("f", "g", "df", "dg")


@dataclass(frozen=True)
class IntegralPair:
    I1: Expr
    I2: Expr

    def __post_init__(self):
        for e in (self.I1, self.I2):
            if e.free & {"ddf", "ddg", "u", "du", "ddu"}:
                raise ExprError(f"integral {e} must depend on x, f, g, f', g' only")

    def __iter__(self):
        return iter((self.I1, self.I2))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n, 4): f, g, f', g'
    step: float
    method: str = "rk4"


class TruncatedTrajectoryError(ArithmeticError):
    """Integration left the region where the right-hand sides are finite."""

    def __init__(self, message: str, last_time: float, partial: Trajectory):
        super().__init__(f"{message} (last good x = {last_time:.6g})")
        self.last_time = last_time
        self.partial = partial


def noether_integral(Z: ComplexPointSymmetry, L: Expr, A: Optional[Expr] = None) -> IntegralPair:
    """Split I = xi L + (eta - u' xi) dL/du' - A into real and imaginary parts."""
    du = Var("du")
    I = add(mul(Z.xi, L), mul(add(Z.eta, neg(mul(du, Z.xi))), diff(L, "du")),
            neg(A) if A is not None else ZERO)
    p = realify(I)
    return IntegralPair(p.re, p.im)


def on_shell_derivatives(I: IntegralPair, sys: System2) -> Tuple[Expr, Expr]:
    return tuple(total_derivative(e, sys.rhs) for e in I)


def verify_on_shell(I: IntegralPair, sys: System2, dom: SampleDomain = DEFAULT_DOMAIN,
                    **zero_kw) -> bool:
    return all(is_zero(d, dom, mode="real", **zero_kw) for d in on_shell_derivatives(I, sys))


def noether_like_prolonged(pair: OperatorPair):
    """First-prolonged Noether-like operators (Y1, Y2) built from the pair.

    Each is a map of coefficients on (x, f, g, f', g').  The d/dx coefficient
    carries a factor 2 and the derivative coefficients are the real and
    imaginary parts of eta^(1) = D_x eta - u' D_x xi, so that
    Y1 h1 - Y2 h2 = 2 Re(Z^(1) h) and Y1 h2 + Y2 h1 = 2 Im(Z^(1) h)
    for analytic h = h1 + i h2.
    """
    s1, s2 = pair.X1.xi, pair.X2.xi
    c1, c2 = pair.X1.eta_f, pair.X1.eta_g
    df, dg = Var("df"), Var("dg")
    ds1, ds2 = total_derivative(s1), total_derivative(s2)
    p1 = add(total_derivative(c1), neg(mul(df, ds1)), mul(dg, ds2))
    p2 = add(total_derivative(c2), neg(mul(df, ds2)), neg(mul(dg, ds1)))
    two = Const(2)
    Y1 = {"x": mul(two, s1), "f": c1, "g": c2, "df": p1, "dg": p2}
    Y2 = {"x": mul(two, s2), "f": c2, "g": neg(c1), "df": p2, "dg": neg(p1)}
    return Y1, Y2


def _apply(Y: dict, h: Expr) -> Expr:
    return add(*(mul(c, diff(h, v)) for v, c in Y.items() if v in h.free))


def coupled_residuals(I: IntegralPair, pair: OperatorPair) -> Tuple[Expr, Expr]:
    Y1, Y2 = noether_like_prolonged(pair)
    r1 = add(_apply(Y1, I.I1), neg(_apply(Y2, I.I2)))
    r2 = add(_apply(Y1, I.I2), _apply(Y2, I.I1))
    return r1, r2


def verify_coupled_relations(I: IntegralPair, pair: OperatorPair,
                             dom: SampleDomain = DEFAULT_DOMAIN, **zero_kw) -> bool:
    """Y1 I1 - Y2 I2 = 0 and Y1 I2 + Y2 I1 = 0 for the prolonged operator pair."""
    return all(is_zero(r, dom, mode="real", **zero_kw) for r in coupled_residuals(I, pair))


# ---------------------------------------------------------------------------
# relation to printed integrals
# ---------------------------------------------------------------------------

@dataclass
class IntegralMatch:
    """printed = alpha * I1 + beta * I2 + const, with exact rational alpha, beta."""

    matched: bool
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None


_PHASE = ("x", "f", "g", "df", "dg")


def match_integral(printed: Expr, computed: IntegralPair,
                   dom: SampleDomain = DEFAULT_DOMAIN) -> IntegralMatch:
    """Express a printed integral through the computed pair up to an additive constant.

    Gradients over (x, f, g, f', g') are compared at sampled points, the
    rational combination is recovered by least squares, and the difference is
    confirmed constant by is_zero on all of its partial derivatives.
    """
    grads = [[diff(e, v) for v in _PHASE] for e in (printed, computed.I1, computed.I2)]
    flat = [g for row in grads for g in row]
    try:
        _, vals = guarded_points(flat, dom, 8, "real")
    except Exception:
        return IntegralMatch(False)
    k = len(_PHASE)
    target = np.concatenate(vals[0:k])
    M = np.column_stack([np.concatenate(vals[k:2 * k]), np.concatenate(vals[2 * k:3 * k])])
    coeffs, *_ = np.linalg.lstsq(M, target, rcond=None)
    alpha, beta = (rationalize(float(c)) for c in coeffs)
    if alpha is None or beta is None:
        return IntegralMatch(False)
    diff_expr = add(printed, neg(mul(Const(alpha), computed.I1)), neg(mul(Const(beta), computed.I2)))
    ok = all(is_zero(diff(diff_expr, v), dom, mode="real") for v in _PHASE)
    return IntegralMatch(ok, alpha, beta) if ok else IntegralMatch(False)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def _normalize_init(init: Sequence[float]) -> Tuple[float, np.ndarray]:
    init = [float(v) for v in init]
    if len(init) == 4:
        return 0.0, np.array(init)
    if len(init) == 5:
        return init[0], np.array(init[1:])
    raise ValueError("initial state must be (f, g, f', g') or (x, f, g, f', g')")


def integrate_trajectory(sys: System2, init: Sequence[float], T: float, step: float,
                         constants: Optional[dict] = None) -> Trajectory:
    """Classical fixed-step RK4 for f'' = w1, g'' = w2 over [x0, x0 + T].

    ``init`` is (f, g, f', g') starting at x = 0 or (x0, f, g, f', g').
    ``constants`` assigns named constants (A, b) used by the system.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if T < step:
        raise ValueError("T must be at least one step")
    constants = dict(constants or {})
    x0, y0 = _normalize_init(init)
    cnames = sorted(constants)
    rhs = compile_exprs([sys.w1, sys.w2], ("x",) + STATE + tuple(cnames))
    cvals = tuple(float(constants[c]) for c in cnames)

    def F(x, y):
        w1, w2 = rhs(x, *y, *cvals)
        return np.array((y[2], y[3], w1, w2))

    n = int(round(T / step))
    times = x0 + step * np.arange(n + 1)
    states = np.empty((n + 1, 4))
    states[0] = y0
    y = y0
    for k in range(n):
        x = times[k]
        try:
            k1 = F(x, y)
            k2 = F(x + step / 2, y + step / 2 * k1)
            k3 = F(x + step / 2, y + step / 2 * k2)
            k4 = F(x + step, y + step * k3)
        except (ArithmeticError, ValueError) as exc:
            partial = Trajectory(times[:k + 1], states[:k + 1], step)
            raise TruncatedTrajectoryError(str(exc), float(x), partial) from None
        y = y + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            partial = Trajectory(times[:k + 1], states[:k + 1], step)
            raise TruncatedTrajectoryError("non-finite state", float(x), partial)
        states[k + 1] = y
    return Trajectory(times, states, step)


def integral_values(e: Expr, traj: Trajectory, constants: Optional[dict] = None) -> np.ndarray:
    constants = dict(constants or {})
    cnames = sorted(constants)
    fn = compile_exprs([e], ("x",) + STATE + tuple(cnames))
    cvals = tuple(float(constants[c]) for c in cnames)
    return np.array([fn(x, *s, *cvals)[0] for x, s in zip(traj.times, traj.states)])


def drift(I: IntegralPair, traj: Trajectory, constants: Optional[dict] = None) -> Tuple[float, float]:
    """max |I(s) - I(s0)| / (1 + |I(s0)|) along the trajectory, per component."""
    out = []
    for e in I:
        v = integral_values(e, traj, constants)
        out.append(float(np.max(np.abs(v - v[0])) / (1.0 + abs(v[0]))))
    return tuple(out)
