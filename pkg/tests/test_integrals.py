import numpy as np
import pytest

from noetherkit.catalog import load_catalog
from noetherkit.expr import E, ExprError, is_zero
from noetherkit.integrals import (
    IntegralPair, TruncatedTrajectoryError, drift, integrate_trajectory, match_integral,
    noether_integral, verify_coupled_relations, verify_on_shell,
)
from noetherkit.symmetry import ComplexPointSymmetry, split_symmetry
from noetherkit.variational import System2

FREE = System2(E("0"), E("0"))
CATALOG = {r.name: r for r in load_catalog()}


def Z(xi, eta):
    return ComplexPointSymmetry(E(xi), E(eta))


def printed_pair(rec, a, b):
    its = {it.name: it.claim.effective for it in rec.integrals}
    return IntegralPair(its[a], its[b])


def test_integral_pair_rejects_second_derivatives():
    with pytest.raises(ExprError):
        IntegralPair(E("ddf"), E("0"))


def test_noether_integral_application_one_up_to_sign():
    rec = CATALOG["app1"]
    I = noether_integral(Z("1", "0"), E("exp(du) + log(u)"))
    printed = printed_pair(rec, "I1", "I2")
    m1 = match_integral(printed.I1, I)
    m2 = match_integral(printed.I2, I)
    assert m1.matched and m2.matched
    assert abs(m1.alpha) == 1 and m1.beta == 0
    assert m2.alpha == 0 and abs(m2.beta) == 1


def test_noether_integral_translation_of_free_particle():
    I = noether_integral(Z("0", "1"), E("du^2/2"))
    assert (I.I1, I.I2) == (E("df"), E("dg"))


def test_noether_integral_with_gauge():
    I = noether_integral(Z("0", "x"), E("du^2/2"), E("u"))
    assert is_zero(I.I1 - E("x*df - f")) and is_zero(I.I2 - E("x*dg - g"))


def test_on_shell_application_two():
    rec = CATALOG["app2"]
    assert verify_on_shell(printed_pair(rec, "I1", "I2"), rec.system)


def test_on_shell_power_law_record():
    rec = CATALOG["N1_3_5"]
    for a, b in (("I1", "I2"), ("I3", "I4"), ("I5", "I6")):
        assert verify_on_shell(printed_pair(rec, a, b), rec.system)


def test_coordinates_are_not_conserved():
    assert not verify_on_shell(IntegralPair(E("f"), E("g")), FREE)


def test_coupled_relations_free_particle_projective_pair():
    rec = CATALOG["free_particle"]
    I = printed_pair(rec, "I5_1", "I5_2")
    assert verify_coupled_relations(I, split_symmetry(Z("x^2", "x*u")))


def test_coupled_relations_application_one():
    rec = CATALOG["app1"]
    assert verify_coupled_relations(printed_pair(rec, "I1", "I2"), split_symmetry(Z("1", "0")))


def test_coupled_relations_sign_broken_pair():
    # constant coefficients make the relations vacuous for translations
    assert verify_coupled_relations(IntegralPair(E("df"), E("-dg")), split_symmetry(Z("0", "1")))
    rec = CATALOG["free_particle"]
    I = printed_pair(rec, "I5_1", "I5_2")
    broken = IntegralPair(I.I1, -I.I2)
    assert not verify_coupled_relations(broken, split_symmetry(Z("x^2", "x*u")))


def test_free_particle_trajectory_is_linear():
    traj = integrate_trajectory(FREE, (0, 0, 1, 2), 1.0, 1e-3)
    assert len(traj.times) == 1001
    assert np.all(np.diff(traj.times) > 0)
    f, g = traj.states[-1, :2]
    assert abs(f - 1.0) <= 1e-12 and abs(g - 2.0) <= 1e-12


def test_application_one_drift():
    rec = CATALOG["app1"]
    traj = integrate_trajectory(rec.system, (1, 0.2, 0.5, 0.3), 1.0, 1e-3)
    assert max(drift(printed_pair(rec, "I1", "I2"), traj)) <= 1e-6


def test_six_operator_record_drift_from_offset_start():
    rec = CATALOG["N1_3_6"]
    traj = integrate_trajectory(rec.system, (1, 1, 0.3, 0.7, 0.4), 0.5, 5e-4)
    assert traj.times[0] == 1.0
    assert max(drift(printed_pair(rec, "I1", "I2"), traj)) <= 1e-6


def test_drift_of_coordinates_is_large():
    rec = CATALOG["app1"]
    traj = integrate_trajectory(rec.system, (1, 0.2, 0.5, 0.3), 1.0, 1e-3)
    assert min(drift(IntegralPair(E("f"), E("g")), traj)) > 1e-2


def test_drift_with_parameters():
    rec = CATALOG["N2_3_6"]
    t = rec.trajectory
    traj = integrate_trajectory(rec.system, t.init, t.T, t.step, rec.constants)
    assert max(drift(printed_pair(rec, "I5", "I6"), traj, rec.constants)) <= 1e-6


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_truncated_trajectory():
    blowup = System2(E("f^2"), E("0"))
    with pytest.raises(TruncatedTrajectoryError) as info:
        integrate_trajectory(blowup, (1, 0, 1, 0), 10.0, 1e-2)
    err = info.value
    assert 0 < err.last_time < 10
    assert len(err.partial.times) == len(err.partial.states) >= 2
    singular = System2(E("log(f)"), E("0"))
    with pytest.raises(TruncatedTrajectoryError, match="last good x"):
        integrate_trajectory(singular, (0.5, 0, -1, 0), 2.0, 1e-2)


def test_trajectory_arguments():
    with pytest.raises(ValueError):
        integrate_trajectory(FREE, (0, 0, 1, 2), 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_trajectory(FREE, (0, 0, 1, 2), 1e-4, 1e-3)
    with pytest.raises(ValueError):
        integrate_trajectory(FREE, (0, 0, 1), 1.0, 1e-3)


def test_rk4_convergence_order():
    rec = CATALOG["N3_3_5"]
    I = printed_pair(rec, "I3", "I4")
    d = []
    for h in (0.04, 0.02, 0.01):
        traj = integrate_trajectory(rec.system, rec.trajectory.init, 0.5, h, rec.constants)
        d.append(max(drift(I, traj, rec.constants)))
    assert d[0] / d[1] >= 8 and d[1] / d[2] >= 8


def test_match_integral_recovers_combination():
    rec = CATALOG["app3"]
    its = {it.name: it for it in rec.integrals}
    sym = rec.main.symmetry(its["I1"].source)
    I = noether_integral(sym.symmetry, rec.complex_lagrangian, sym.gauge)
    m = match_integral(E("3") * I.I1 - I.I2 / 2 + E("7"), I)
    assert m.matched and m.alpha == 3 and m.beta == -0.5
    assert not match_integral(E("f"), I).matched


def test_on_shell_and_trajectory_verifiers_agree():
    for rec in CATALOG.values():
        if rec.level != "real":
            continue
        t = rec.trajectory
        traj = integrate_trajectory(rec.system, t.init, t.T, t.step, rec.constants)
        for it in rec.integrals:
            for e in {it.claim.printed, it.claim.effective}:
                pair = IntegralPair(e, e)
                on_shell = verify_on_shell(pair, rec.system, rec.domain)
                small = max(drift(pair, traj, rec.constants)) <= 1e-6
                assert on_shell == small, (rec.name, it.name)
