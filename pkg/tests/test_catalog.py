import pytest

from noetherkit.catalog import (
    DATA_DIR, CatalogParseError, CatalogValidationError, load_catalog, operator_count,
    parse_record, summarize, verify_record,
)
from noetherkit.catalog.verify import FREE_DRIFT_TOL
from noetherkit.complexify import realify
from noetherkit.symmetry import check_classical_noether, check_lie_symmetry, split_symmetry

NAMES = ["app1", "app2", "app3", "app4", "alt_lagrangian", "N1_3_5", "N2_3_5", "N1_3_6",
         "N3_3_5", "N2_3_6", "N3_3_6", "free_particle"]
CATALOG = {r.name: r for r in load_catalog()}
APP1 = (DATA_DIR / "01_app1.rec").read_text()


def test_bundled_corpus_loads_in_order():
    assert [r.name for r in load_catalog()] == NAMES


def test_empty_inputs(tmp_path):
    assert parse_record("") is None
    assert parse_record("# only a comment\n") is None
    assert load_catalog(tmp_path) == []
    (tmp_path / "empty.rec").write_text("")
    assert load_catalog(tmp_path) == []


def test_parse_error_has_location():
    bad = APP1.replace("ddu = exp(-du)/u", "ddu = exp(-du)/(u")
    with pytest.raises(CatalogParseError) as info:
        parse_record(bad, "app1.rec")
    line = next(i for i, t in enumerate(bad.splitlines(), 1) if t.startswith("ddu ="))
    assert info.value.line == line
    assert info.value.column > 1


def test_mutated_system_is_rejected():
    bad = APP1.replace("ddf = exp(-df)*", "ddf = 2*exp(-df)*")
    with pytest.raises(CatalogValidationError) as info:
        parse_record(bad)
    assert info.value.record == "app1"
    assert info.value.field == "system"


def test_unknown_symmetry_reference_is_rejected():
    bad = APP1.replace("X1 = Z1.re", "X1 = Z9.re")
    with pytest.raises(CatalogValidationError):
        parse_record(bad)


def test_structural_load_without_consistency_check():
    bad = APP1.replace("ddf = exp(-df)*", "ddf = 2*exp(-df)*")
    rec = parse_record(bad, check=False)
    assert rec.name == "app1"
    assert not verify_record(rec).ok


def test_free_particle_report():
    rep = verify_record(CATALOG["free_particle"])
    assert rep.ok
    assert rep.get("Lie condition X9: fails (expected)").verdict
    for k in range(1, 6):
        for j in (1, 2):
            res = rep.get(f"integral I{k}_{j} drift")
            assert res.verdict and res.drift <= FREE_DRIFT_TOL


def test_six_operator_report():
    rep = verify_record(CATALOG["N1_3_6"])
    assert rep.ok
    for k in range(1, 7):
        assert rep.get(f"operator X{k} is Z{(k + 1) // 2}.{'re' if k % 2 else 'im'} up to a scalar").verdict
    assert rep.get("algebra closes").verdict
    assert rep.get("Jacobi identity").verdict
    for k in range(1, 7):
        assert rep.get(f"integral I{k} drift").verdict


def test_non_closure_report():
    rep = verify_record(CATALOG["N2_3_5"])
    assert rep.ok
    assert rep.get("[X4,X5] is X6 and leaves the operator span").verdict
    # the printed [X3,X6] entry fails but is flagged, the corrected one passes
    printed = rep.get("bracket [X3,X6] = 2X2 (printed)")
    assert not printed.verdict and printed.flag == "reconstructed"
    assert rep.get("bracket [X3,X6] = X2").verdict


def test_flags():
    assert CATALOG["N3_3_5"].flags["record"] == "reconstructed"
    assert CATALOG["N3_3_6"].flags["record"] == "reconstructed"
    assert set(CATALOG["app3"].flags) == {"I1", "I2"}
    assert set(CATALOG["alt_lagrangian"].flags) == {"alt.I5", "alt.I6"}
    assert set(CATALOG["free_particle"].flags) == {"I4_2", "alt.Z6", "alt.Z8"}
    assert CATALOG["app1"].flags == {}


def test_flagged_failures_do_not_fail_the_record():
    for name in ("app3", "alt_lagrangian", "free_particle"):
        rep = verify_record(CATALOG[name])
        flagged = [r for r in rep.results if r.flag]
        assert flagged and rep.ok


def test_operator_counts():
    counts = {n: operator_count(r) for n, r in CATALOG.items()}
    assert counts == {"app1": 1, "app2": 2, "app3": 3, "app4": 4, "alt_lagrangian": 3,
                      "N1_3_5": 5, "N2_3_5": 5, "N1_3_6": 6, "N3_3_5": 3, "N2_3_6": 6,
                      "N3_3_6": 3, "free_particle": 9}


LIE = {
    "app1": "T", "app2": "TT", "app3": "TTT", "app4": "TTTF", "alt_lagrangian": "TTTTF",
    "N1_3_5": "TTTTF", "N2_3_5": "TTTFF", "N1_3_6": "TTTFFF", "N3_3_5": "TTT",
    "N2_3_6": "TTTFFF", "free_particle": "TTTTTTTTF",
}


@pytest.mark.parametrize("name", sorted(LIE))
def test_lie_verdicts_of_operators(name):
    rec = CATALOG[name]
    got = "".join("T" if check_lie_symmetry(op.field, rec.system, rec.domain) else "F"
                  for op in rec.operators)
    assert got == LIE[name]


def test_alternative_symmetry_classical_cross_check():
    rec = CATALOG["free_particle"]
    block, entry = rec.find_symmetry("Z7")
    L1, L2 = realify(block.lagrangian)
    A1, A2 = realify(entry.gauge)
    X = split_symmetry(entry.symmetry).X1
    assert check_classical_noether(X, L1, A1, rec.domain)
    assert check_classical_noether(X, L2, A2, rec.domain)
    assert not check_classical_noether(X, L1, 0 * A1, rec.domain)


def test_summary_counts():
    reps = [verify_record(CATALOG[n]) for n in ("app1", "app3")]
    s = summarize(reps)
    assert s["claims"] == sum(len(r.results) for r in reps)
    assert s["failed"] == 0
    assert s["flagged"] > 0


def test_report_json_shape():
    rep = verify_record(CATALOG["app1"])
    for r in rep.results:
        d = r.to_dict()
        assert set(d) <= {"record", "claim", "verdict", "witness", "drift", "flag"}
        assert d["verdict"] in ("pass", "fail")
