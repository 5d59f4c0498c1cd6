import cmath
import random

import pytest
from hypothesis import given, settings, strategies as st

from noetherkit.complexify import (
    RealPair, RealificationError, check_cauchy_riemann, realify,
)
from noetherkit.expr import E, SampleDomain, add, diff, evaluate, fn, is_zero, mul, power

DOM = SampleDomain()


def same(p, q):
    return all(is_zero(a - b) for a, b in zip(p, q))


def test_realify_exp_plus_log():
    p = realify(E("exp(du) + log(u)"))
    want = (E("exp(df)*cos(dg) + log(f^2 + g^2)/2"), E("exp(df)*sin(dg) + atan2(g, f)"))
    assert same(p, want)
    # arctan(g/f) agrees with atan2(g, f) while f > 0
    assert is_zero(p.im - E("exp(df)*sin(dg) + atan(g/f)"))


def test_realify_fractional_power():
    p = realify(E("-4*du^(1/2) + u"))
    want = (E("-4*(df^2 + dg^2)^(1/4)*cos(atan2(dg, df)/2) + f"),
            E("-4*(df^2 + dg^2)^(1/4)*sin(atan2(dg, df)/2) + g"))
    assert same(p, want)


def test_realify_identity():
    p = realify(E("u"))
    assert (p.re, p.im) == (E("f"), E("g"))


def test_realify_integer_powers_are_algebraic():
    p = realify(E("u^2"))
    assert (p.re, p.im) == (E("f^2 - g^2"), E("2*f*g"))
    q = realify(E("1/u"))
    assert same(q, (E("f/(f^2 + g^2)"), E("-g/(f^2 + g^2)")))


def test_realify_atan():
    p = realify(E("atan(du)"))
    want = (E("atan2(2*df, 1 - df^2 - dg^2)/2"),
            E("log((df^2 + (1 + dg)^2)/(df^2 + (1 - dg)^2))/4"))
    assert same(p, want)


def test_realify_constant_i():
    p = realify(E("i*u"))
    assert (p.re, p.im) == (E("-g"), E("f"))


def test_realify_rejects_non_analytic():
    with pytest.raises(RealificationError):
        realify(E("atan2(u, x)"))


def test_cauchy_riemann_examples():
    assert check_cauchy_riemann(realify(E("exp(du) + log(u)")))
    assert not check_cauchy_riemann(RealPair(E("f"), E("-g")))
    assert check_cauchy_riemann(RealPair(E("f^2 - g^2"), E("2*f*g")))


# --- properties -------------------------------------------------------------

leaves = st.sampled_from([E("u"), E("du"), E("x"), E("2"), E("i"), E("1/3")])


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: add(*t)),
        st.tuples(children, children).map(lambda t: mul(*t)),
        children.map(lambda e: fn("exp", e)),
        children.map(lambda e: fn("sin", e)),
        children.map(lambda e: fn("cosh", e)),
        children.map(lambda e: power(add(E("3"), e), -1)),
    )


cexprs = st.recursive(leaves, _extend, max_leaves=6)


def _point(seed):
    rng = random.Random(seed)
    iv = DOM.intervals
    return {k: rng.uniform(*iv[k]) for k in ("x", "f", "g", "df", "dg")}


@settings(max_examples=40, deadline=None)
@given(cexprs, st.integers(0, 10**6))
def test_realify_matches_complex_arithmetic(e, seed):
    p = _point(seed)
    z = {"x": p["x"], "u": complex(p["f"], p["g"]), "du": complex(p["df"], p["dg"])}
    try:
        want = complex(evaluate(e, z, mode="complex"))
        pair = realify(e)
        got = complex(evaluate(pair.re, p), evaluate(pair.im, p))
    except (ArithmeticError, ValueError):
        return
    if not (cmath.isfinite(want) and abs(want) < 1e8):
        return
    assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


@settings(max_examples=25, deadline=None)
@given(cexprs, cexprs)
def test_realify_is_a_ring_homomorphism(a, b):
    assert same(realify(add(a, b)), realify(a) + realify(b))
    assert same(realify(mul(a, b)), realify(a) * realify(b))


@settings(max_examples=25, deadline=None)
@given(cexprs)
def test_realified_derivative_is_analytic(e):
    p = realify(e)
    q = realify(diff(e, "u"))
    assert same(q, (diff(p.re, "f"), diff(p.im, "f")))
    assert check_cauchy_riemann(p)
