import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from quadorbits import bianchi as bi
from quadorbits import cli
from quadorbits.counting import GroupSpec, orbit_count, psi
from quadorbits.pell import fundamental_pell4
from quadorbits.qforms import Form, alpha_of, classify
from quadorbits.quadirr import QuadIrr, cf_expand


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0, text
    return json.loads(text)


def test_pell_example():
    d = run_json("pell", "--D", "5")
    assert (d["t"], d["u"]) == ("3", "1")
    assert d["regulator"] == pytest.approx(0.9624236501192069, abs=1e-16)
    assert list(d)[0] == "version"


def test_pell_roundtrip_large():
    d = run_json("pell", "--D", "409")
    sol = fundamental_pell4(409)
    assert (int(d["t"]), int(d["u"])) == (sol.t, sol.u)
    assert d["negative_unit"] is True


def test_form_alpha_example():
    assert run_json("form", "alpha", "--form", "1,-1,-1")["alpha"] == "(1+sqrt(5))/2"


def test_form_roundtrip():
    Q = Form(3, 1, -5)
    assert run_json("form", "classify", "--form", "3,1,-5") == {"version": cli.__version__,
                                                               **json.loads(cli._encode(classify(Q)))}
    d = run_json("form", "equivalent", "--form", "1,-1,-1", "--form2=-1,1,1")
    assert d["equivalent"] is True and len(d["witness"]) == 4
    assert str(alpha_of(Q)) == run_json("form", "alpha", "--form", "3,1,-5")["alpha"]


def test_irr_roundtrip():
    d = run_json("irr", "cf", "--alpha", "sqrt(7)")
    pre, per = cf_expand(QuadIrr.parse("sqrt(7)"))
    assert d["preperiod"] == [str(x) for x in pre] and d["period"] == [str(x) for x in per]
    assert run_json("irr", "reciprocal", "--alpha", "sqrt(3)")["reciprocal"] is False
    h = run_json("irr", "h", "--alpha", "(1+sqrt(5))/2")
    assert Fraction(h["h_squared"]) == Fraction(4, 5)


def test_count_example_both_engines():
    d = run_json("count", "reps", "--form", "1,-1,-1", "--s", "11", "--engine", "both")
    assert int(d["count"]) == psi(Form(1, -1, -1), 11)


def test_count_orbit_roundtrip():
    d = run_json("count", "orbit", "--alpha", "(1+sqrt(5))/2", "--group", "hecke0:3", "--s", "40")
    phi = QuadIrr.parse("(1+sqrt(5))/2")
    assert int(d["count"]) == orbit_count(phi, GroupSpec("hecke0", 3), 40)


def test_asym_csv_and_geometric():
    code, text = run("asym", "reps", "--form", "1,-1,-1", "--s-list", "geometric:10:1000:3",
                     "--format", "csv")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "s,count,ratio,predicted,rel_gap"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [10, 100, 1000]
    assert cli.parse_s_list("1,5/2") == [1, Fraction(5, 2)]
    with pytest.raises(ValueError):
        cli.parse_s_list("geometric:5:1:3")


def test_bianchi_count():
    d = run_json("bianchi", "count", "--D", "-4", "--ideal", "2", "--s", "20")
    g = bi.ImagQuadInt(-4, 2, 0)
    assert int(d["count"]) == bi.bianchi_orbit_count(-4, g, 20)
    assert d["k_a"] == "3" and d["reciprocal_flag"] is True
    assert run_json("bianchi", "fib", "--D", "-4", "--ideal", "3")["k"] == "2"
    assert run_json("bianchi", "zeta", "--D", "-4")["zeta_K2"] == pytest.approx(1.5067030099229850)


def test_deterministic_output():
    args = ("equi", "--t", "3", "--samples", "20000", "--bins", "5", "--seed", "7")
    assert run(*args) == run(*args) == run(*args, "--threads", "2")


@pytest.mark.parametrize("argv", [
    ["pell"],
    ["pell", "--D", "16"],
    ["form", "classify", "--form", "1,2"],
    ["count", "reps", "--s", "10"],
    ["count", "reps", "--form", "1,-1,-1", "--s", "5/2"],
    ["bianchi", "zeta", "--D", "-5"],
    ["asym", "reps", "--form", "1,-1,-1", "--s-list", "geometric:x"],
])
def test_usage_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_engine_disagreement_exit_3(monkeypatch):
    import quadorbits.counting as counting
    real = counting.psi_values_oracle
    monkeypatch.setattr(counting, "psi_values_oracle", lambda *a, **k: real(*a, **k)[:-1])
    assert run("count", "reps", "--form", "1,-1,-1", "--s", "11", "--engine", "both")[0] == 3


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "quadorbits.cli", "pell", "--D", "13"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["t"] == "11"
