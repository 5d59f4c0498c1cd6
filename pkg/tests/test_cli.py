import json
import subprocess
import sys

import pytest

from noetherkit.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_split_prints_real_pair(capsys):
    code, out, _ = call(capsys, "split", "exp(du)+log(u)")
    assert code == 0
    re_line, im_line = out.strip().splitlines()
    assert "cos(dg)" in re_line and "log(f^2 + g^2)" in re_line
    assert "sin(dg)" in im_line and "atan" in im_line


def test_split_json(capsys):
    code, out, _ = call(capsys, "split", "u^2", "--json")
    assert code == 0
    assert json.loads(out) == {"re": "f^2 - g^2", "im": "2*f*g"}


def test_el_free(capsys):
    code, out, _ = call(capsys, "el", "du^2/2")
    assert code == 0 and out.strip() == "ddu = 0"


def test_el_accepts_primes(capsys):
    code, out, _ = call(capsys, "el", "u'^2/2 - u^2/2")
    assert code == 0 and out.strip() == "ddu = -u"


def test_parse_error_exit_code_and_caret(capsys):
    code, _, err = call(capsys, "el", "x +* u")
    assert code == 2
    assert "column 4" in err and "^" in err


@pytest.mark.parametrize("argv", [["split"], ["--bogus"], ["split", "u", "--nope"], ["frobnicate"]])
def test_usage_errors(capsys, argv):
    assert call(capsys, *argv)[0] == 2


def test_noether_check_exit_codes(capsys):
    assert call(capsys, "noether-check", "du^2/2", "--xi", "1", "--eta", "0")[0] == 0
    assert call(capsys, "noether-check", "du^2/2", "--xi", "u", "--eta", "0")[0] == 1
    code, out, _ = call(capsys, "noether-check", "du^2/2", "--xi", "0", "--eta", "x", "--gauge", "auto")
    assert code == 0 and "gauge = u" in out


def test_integrals_verb(capsys):
    code, out, _ = call(capsys, "integrals", "du^2/2", "--xi", "0", "--eta", "1")
    assert code == 0
    assert out.splitlines() == ["I1 = df", "I2 = dg", "on shell: pass"]


def test_bracket_verb(capsys):
    code, out, _ = call(capsys, "bracket", "1|0|0", "x|-f|-g")
    assert code == 0 and out.strip() == "1 | 0 | 0"
    code, out, _ = call(capsys, "bracket", "--table", "1|0|0", "0|1|0", "x|f|g")
    assert code == 0 and "closed: yes" in out and "Jacobi: pass" in out


def test_eval_verb(capsys):
    code, out, _ = call(capsys, "eval", "u^2", "--at", "u=1+2j")
    assert code == 0 and out.splitlines()[-1] == "-3.0+4j"
    assert call(capsys, "eval", "sin(x)^2 + cos(x)^2 - 1", "--zero")[0] == 0
    assert call(capsys, "eval", "x - f", "--zero")[0] == 1


def test_trajectory_table(capsys):
    code, out, _ = call(capsys, "trajectory", "--record", "app1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "integral\tdrift\tverdict"
    assert [ln.split("\t")[0] for ln in lines[1:]] == ["I1", "I2"]
    assert all(ln.endswith("pass") for ln in lines[1:])


def test_verify_catalog_single_record(capsys):
    code, out, _ = call(capsys, "verify-catalog", "--record", "free_particle")
    assert code == 0
    assert "Lie condition X9: fails (expected)" in out
    assert out.strip().endswith("verify-catalog: pass")


def test_verify_catalog_json_schema(capsys):
    code, out, _ = call(capsys, "verify-catalog", "--record", "app2", "--json")
    assert code == 0
    doc = json.loads(out)
    entries = doc["results"] if isinstance(doc, dict) else doc
    for e in entries:
        assert {"record", "claim", "verdict"} <= set(e)
        assert set(e) <= {"record", "claim", "verdict", "witness", "drift", "flag"}


def test_verify_catalog_unknown_record(capsys):
    assert call(capsys, "verify-catalog", "--record", "nope")[0] == 2


def test_output_is_deterministic(capsys):
    argv = ["verify-catalog", "--record", "N1_3_5", "--json", "--seed", "7"]
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


def test_global_flags(capsys):
    code, out, _ = call(capsys, "eval", "x - 1/1000000000", "--zero", "--tol", "1e-6",
                        "--domain", "x=0:0.000000001")
    assert code == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "noetherkit.cli", "el", "du^2/2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "ddu = 0"


def test_noether_check_failure_reports_witness(capsys):
    code, out, _ = call(capsys, "noether-check", "du^2/2", "--xi", "u", "--eta", "0")
    assert code == 1 and "witness (real part): residual" in out


def test_classical_noether_check(capsys):
    code, out, _ = call(capsys, "noether-check", "(df^2 + dg^2)/2", "--op", "0|0|x", "--gauge", "auto")
    assert code == 0 and "gauge = g" in out
    code, out, _ = call(capsys, "noether-check", "(df^2 + dg^2)/2", "--op", "f|0|0")
    assert code == 1 and "witness: residual" in out


def test_bracket_ops_file(capsys, tmp_path):
    ops = tmp_path / "ops.txt"
    ops.write_text("# translations and a rotation\nP = 0 | 1 | 0\nQ = 0 | 0 | 1\nR = 0 | -g | f\n")
    code, out, _ = call(capsys, "bracket", "--ops", str(ops))
    assert code == 0
    assert "[P,R] = Q" in out and "[Q,R] = -P" in out and "closed: yes" in out
    assert call(capsys, "bracket", "--ops", str(tmp_path / "missing.txt"))[0] == 2
