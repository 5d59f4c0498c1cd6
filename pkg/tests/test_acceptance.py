import subprocess
import sys
import time

import numpy as np
import pytest

from noetherkit.catalog import load_catalog, operator_count, verify_record
from noetherkit.catalog.verify import DRIFT_TOL, FREE_DRIFT_TOL
from noetherkit.complexify import check_cauchy_riemann, realify
from noetherkit.expr import E, diff, evaluate, is_zero, total_derivative
from noetherkit.integrals import (
    IntegralPair, drift, integrate_trajectory, noether_integral, verify_coupled_relations,
    verify_on_shell,
)
from noetherkit.liealg import check_jacobi, expand_in_span, structure_constants
from noetherkit.symmetry import (
    ComplexPointSymmetry, check_lie_symmetry, check_noether_like, find_gauge, split_symmetry,
)
from noetherkit.variational import check_system_matches

CATALOG = {r.name: r for r in load_catalog()}


def blocks(rec):
    yield rec.main
    if rec.alternative:
        yield rec.alternative


def same_up_to_constant(a, b):
    return all(is_zero(diff(a - b, v), mode="complex") for v in ("x", "u"))


def verified_pairs(rec):
    """Unflagged printed integrals, grouped into pairs by source symmetry."""
    by_source = {}
    for it in rec.integrals:
        if not it.claim.flagged:
            by_source.setdefault(it.source, []).append(it.claim.effective)
    return by_source


@pytest.mark.criterion(1, "splitting theorem")
def test_criterion_1_splitting_theorem():
    t0 = time.perf_counter()
    for rec in CATALOG.values():
        assert check_system_matches(rec.complex_lagrangian, rec.system, rec.domain,
                                    trials=24, tol=1e-8), rec.name
    assert len(CATALOG) == 12
    assert time.perf_counter() - t0 < 5.0


@pytest.mark.criterion(2, "Cauchy-Riemann")
def test_criterion_2_cauchy_riemann():
    n = 0
    for rec in CATALOG.values():
        for b in blocks(rec):
            assert check_cauchy_riemann(realify(b.lagrangian), rec.domain), rec.name
            n += 1
    assert n == 14


@pytest.mark.criterion(3, "Noether-like conditions")
@pytest.mark.xfail(strict=True, raises=AssertionError, reason="alternative free-particle entries Z6, Z8 admit no gauge")
def test_criterion_3_noether_like_conditions():
    failing = []
    for rec in CATALOG.values():
        for b in blocks(rec):
            for s in b.symmetries:
                if not check_noether_like(split_symmetry(s.symmetry), b.lagrangian, s.gauge, rec.domain):
                    failing.append((rec.name, s.name))
    assert gauges_recovered()
    assert failing == []


def gauges_recovered():
    app2 = CATALOG["app2"]
    z = next(s for s in app2.symmetries if s.gauge != E("0"))
    A = find_gauge(z.symmetry, app2.complex_lagrangian)
    fp = CATALOG["free_particle"]
    B = find_gauge(ComplexPointSymmetry(E("0"), E("x")), fp.complex_lagrangian)
    return (A is not None and same_up_to_constant(A, E("x^2/2"))
            and B is not None and same_up_to_constant(B, E("u")))


def test_noether_like_entries_outside_the_two_known_failures():
    failing = []
    for rec in CATALOG.values():
        for b in blocks(rec):
            for s in b.symmetries:
                if not check_noether_like(split_symmetry(s.symmetry), b.lagrangian, s.gauge, rec.domain):
                    failing.append((rec.name, s.name))
    assert failing == [("free_particle", "Z6"), ("free_particle", "Z8")]
    assert gauges_recovered()


def printed_integral_failures():
    bad = set()
    for rec in CATALOG.values():
        for b in blocks(rec):
            for it in b.integrals:
                e = it.claim.printed
                if rec.level == "complex":
                    ok = is_zero(total_derivative(e, rec.rcode.rhs), rec.domain, mode="complex")
                else:
                    ok = verify_on_shell(IntegralPair(e, E("0")), rec.system, rec.domain)
                if not ok:
                    bad.add(rec.name)
    return bad


@pytest.mark.criterion(4, "first integrals on shell")
@pytest.mark.xfail(strict=True, raises=AssertionError, reason="nine records carry a printed integral that fails on shell")
def test_criterion_4_first_integrals_on_shell():
    assert len(printed_integral_failures()) <= 2


def test_every_unflagged_integral_is_on_shell():
    for rec in CATALOG.values():
        rep = verify_record(rec)
        for r in rep.results:
            if " on shell" in r.claim and r.flag is None:
                assert r.verdict, (rec.name, r.claim)


def test_printed_integral_failures_are_all_flagged():
    assert printed_integral_failures() == {
        "app3", "alt_lagrangian", "N1_3_5", "N2_3_5", "N1_3_6", "N3_3_5", "N2_3_6",
        "N3_3_6", "free_particle"}


def max_drift(rec, step, T=None):
    spec = rec.trajectory
    traj = integrate_trajectory(rec.system, spec.init, T or spec.T, step, rec.constants)
    out = 0.0
    for pair in verified_pairs(rec).values():
        for e in pair:
            parts = realify(e) if rec.level == "complex" else (e, e)
            out = max(out, *drift(IntegralPair(*parts), traj, rec.constants))
    return out


@pytest.mark.criterion(5, "trajectory oracle")
def test_criterion_5_trajectory_oracle():
    for rec in CATALOG.values():
        assert rec.trajectory.step == 1e-3
        d = max_drift(rec, rec.trajectory.step)
        tol = FREE_DRIFT_TOL if rec.name == "free_particle" else DRIFT_TOL
        assert d <= tol, (rec.name, d)
    # at step 1e-3 the drift is at roundoff, so the order is measured on coarse steps
    rec = CATALOG["N2_3_5"]
    coarse, fine = max_drift(rec, 0.05), max_drift(rec, 0.025)
    assert coarse / fine >= 8


def table_matches(name):
    rec = CATALOG[name]
    names = [op.name for op in rec.operators]
    table = structure_constants(names, [op.field for op in rec.operators])
    spec = rec.algebra
    assert spec.basis == names
    want = {(i, j): e.effective for (i, j), e in spec.entries.items()}
    n = len(names)
    assert len(want) == n * (n - 1) // 2
    return table.closed and all(table.coefficient(i, j) == c for (i, j), c in want.items()) \
        and check_jacobi(table)


@pytest.mark.criterion(6, "algebra tables")
def test_criterion_6_algebra_tables():
    assert table_matches("N1_3_5")
    assert table_matches("N1_3_6")
    rec = CATALOG["N2_3_5"]
    fields = [op.field for op in rec.operators]
    table = structure_constants([op.name for op in rec.operators], fields)
    assert len(fields) == 5 and not table.closed
    assert list(table.residuals) == [(3, 4)]
    B = table.residuals[(3, 4)]
    assert (B.xi, B.eta_f, B.eta_g) == (E("0"), E("g"), E("f"))


@pytest.mark.criterion(7, "free-particle nine operators and ten integrals")
def test_criterion_7_free_particle():
    rec = CATALOG["free_particle"]
    assert len(rec.symmetries) == 5
    split = []
    for s in rec.symmetries:
        p = split_symmetry(s.symmetry)
        split += [X for X in (p.X1, p.X2) if not X.is_null()]
    assert len(split) == 9
    printed = [op.field for op in rec.operators]
    assert [op.name for op in rec.operators] == [f"X{k}" for k in range(1, 10)]
    for X in printed:
        assert sum(expand_in_span(X, [Y]) is not None for Y in split) == 1
    lie = [check_lie_symmetry(X, rec.system, rec.domain) for X in printed]
    assert lie == [True] * 8 + [False]
    # X9 comes from x^2 d/dx + x u d/du, whose integrals still hold
    block, z4 = rec.find_symmetry("Z4")
    I = noether_integral(z4.symmetry, rec.complex_lagrangian, z4.gauge)
    assert verify_on_shell(I, rec.system, rec.domain)
    ints = []
    for s in rec.symmetries:
        I = noether_integral(s.symmetry, rec.complex_lagrangian, s.gauge)
        assert verify_on_shell(I, rec.system, rec.domain)
        ints += [I.I1, I.I2]
    rng = np.random.default_rng(0)
    pts = [{v: float(rng.uniform(-1.5, 1.5)) for v in ("x", "f", "g", "df", "dg")} for _ in range(30)]
    M = np.array([[evaluate(e, p) for e in ints] for p in pts])
    assert np.linalg.matrix_rank(M, tol=1e-9) == 10


@pytest.mark.criterion(8, "operator counts")
def test_criterion_8_operator_counts():
    counts = {n: operator_count(r) for n, r in CATALOG.items()}
    listed = ["app1", "app2", "app3", "app4", "N1_3_5", "N2_3_5", "N3_3_5", "N1_3_6",
              "N2_3_6", "free_particle"]
    assert [counts[n] for n in listed] == [1, 2, 3, 4, 5, 5, 3, 6, 6, 9]
    assert counts["alt_lagrangian"] == 3 and counts["N3_3_6"] == 3
    assert set(counts.values()) <= {0, 1, 2, 3, 4, 5, 6, 9}


@pytest.mark.criterion(9, "coupled relations")
def test_criterion_9_coupled_relations():
    for name in ("free_particle", "app1"):
        rec = CATALOG[name]
        for s in rec.symmetries:
            I = noether_integral(s.symmetry, rec.complex_lagrangian, s.gauge)
            assert verify_coupled_relations(I, split_symmetry(s.symmetry), rec.domain), (name, s.name)


@pytest.mark.criterion(10, "full verify-catalog run")
def test_criterion_10_verify_catalog_cli():
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "noetherkit.cli", "verify-catalog"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout[-2000:] + proc.stderr
    assert proc.stdout.strip().endswith("verify-catalog: pass")
    assert time.perf_counter() - t0 < 60.0
