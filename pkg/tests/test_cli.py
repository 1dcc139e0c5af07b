import json
import subprocess
import sys

import pytest

from newtonforge.cli import dump_json, run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def invoke_json(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestExamples:
    def test_forward_difference(self, capsys):
        data = invoke_json(capsys, "diff", "--f", "1/(z+1)", "--kind", "forward", "--z", "0", "--h", "1", "--n", "3")
        assert data == {"value": "-1/4", "exact": True}

    def test_binomial_sum(self, capsys):
        data = invoke_json(capsys, "sum", "--f", "1/(z+1)", "--y", "0", "--h", "1", "--n", "3")
        assert data["value"] == "15/4"

    def test_newton(self, capsys):
        data = invoke_json(capsys, "newton", "--f", "1/(z+1)", "--z0", "1", "--eval", "2", "--tol", "1e-8")
        assert data["value"] == "1/3"
        assert data["diagnostics"]["converged"] is True
        assert data["diagnostics"]["terms_used"] >= 1

    def test_newton_floating(self, capsys):
        data = invoke_json(capsys, "newton", "--f", "1/(z+1)", "--z0", "1", "--eval", "5/2+i")
        assert abs(complex(data["value"].replace("i", "j")) - 1 / (3.5 + 1j)) < 1e-8
        assert data["exact"] is False and data["precision_bits"] > 0


class TestSubcommands:
    def test_table_json_and_csv(self, capsys):
        data = invoke_json(capsys, "table", "--f", "z^2", "--z", "0", "--n-max", "3")
        assert data["value"][2] == ["2", "2"]
        code, out, _ = invoke(capsys, "table", "--f", "z^2", "--z", "0", "--n-max", "3", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "n,value,normalized"
        assert out.splitlines()[3] == "2,2,0.5"

    def test_euler(self, capsys):
        data = invoke_json(capsys, "euler", "--f", "1/(z+1)", "--n-terms", "40", "--reference", "ln2")
        assert 0.4 <= data["diagnostics"]["rate_ratio"] <= 0.6
        assert float(data["diagnostics"]["accel_error"]) < 2.0 ** -40

    def test_oracle(self, capsys):
        data = invoke_json(capsys, "oracle", "--f", "1/(z+1)", "--z", "0", "--n", "3")
        assert abs(float(data["value"]) + 0.25) < 1e-12
        assert data["diagnostics"]["direct"] == "-1/4"
        data = invoke_json(capsys, "oracle", "--f", "gaussian", "--kind", "fourier-central", "--z", "0", "--n", "2")
        assert data["diagnostics"]["abs_gap"] < 1e-12

    def test_region(self, capsys):
        assert invoke_json(capsys, "region", "--f", "1/(z+1)", "--z", "1")["value"] == "absolute"
        data = invoke_json(capsys, "region", "--f", "1/((z-2)*(z+3))", "--z", "2")
        assert data["value"] == "conditional_unknown"
        assert data["diagnostics"]["abscissa"] == "2"

    def test_bessel_csv(self, capsys):
        code, out, _ = invoke(capsys, "bessel", "--n-max", "30", "--format", "csv")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "n,value,normalized" and len(lines) == 32

    def test_verify_subset(self, capsys):
        data = invoke_json(capsys, "verify", "--only", "1")
        assert data["value"] == "pass"


class TestErrors:
    def test_domain_error_exit_code(self, capsys):
        code, out, err = invoke(capsys, "newton", "--f", "1/(z+1)", "--z0", "-2", "--eval", "2")
        assert code == 1 and out == "" and "RegionError" in err

    def test_pole_hit(self, capsys):
        code, _, err = invoke(capsys, "diff", "--f", "1/(z+1)", "--z", "-1", "--n", "2")
        assert code == 1 and "node -1" in err

    def test_bad_expression_shows_usage(self, capsys):
        code, _, err = invoke(capsys, "diff", "--f", "1/(z+", "--z", "0", "--n", "2")
        assert code == 2 and err.startswith("usage: newtonforge diff")

    def test_unknown_flag_rejected(self, capsys):
        code, _, err = invoke(capsys, "diff", "--f", "z", "--z", "0", "--n", "2", "--bogus")
        assert code == 2 and "unrecognized arguments" in err

    def test_negative_order(self, capsys):
        code, _, _ = invoke(capsys, "diff", "--f", "z", "--z", "0", "--n", "-2")
        assert code == 2

    def test_bad_number(self, capsys):
        code, _, err = invoke(capsys, "diff", "--f", "z", "--z", "zero", "--n", "2")
        assert code == 2 and "not a number" in err


class TestSerialization:
    @pytest.mark.parametrize("argv", [
        ("diff", "--f", "gaussian", "--z", "1/3", "--n", "4"),
        ("newton", "--f", "1/(z+1)", "--z0", "1", "--eval", "7/4"),
        ("euler", "--f", "1/(z+1)", "--n-terms", "12", "--reference", "ln2"),
        ("bessel", "--n-max", "40"),
        ("oracle", "--f", "two_sided_exponential", "--kind", "fourier-forward", "--z", "1/3", "--n", "5"),
    ])
    def test_json_round_trip(self, capsys, argv):
        code, out, _ = invoke(capsys, *argv)
        assert code == 0
        assert dump_json(json.loads(out)) + "\n" == out

    def test_deterministic(self, capsys):
        argv = ("diff", "--f", "bessel_recip_sqrt", "--z", "0", "--n", "200")
        assert invoke(capsys, *argv) == invoke(capsys, *argv)

    def test_precision_env(self, capsys, monkeypatch):
        monkeypatch.setenv("NEWTONFORGE_PRECISION", "90")
        data = invoke_json(capsys, "diff", "--f", "1/(z+1)", "--z", "0", "--n", "3")
        assert data["exact"] is False and data["precision_bits"] == 90
        data = invoke_json(capsys, "diff", "--f", "1/(z+1)", "--z", "0", "--n", "3", "--precision", "auto")
        assert data["exact"] is True


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "newtonforge", "sum", "--f", "1", "--y", "0", "--n", "10"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == "1024"
