import json
import subprocess
import sys

import pytest

from blocktype.cli import EXIT_DIAGRAM, EXIT_OK, EXIT_USAGE, main

from conftest import CORPUS


def _path(stem):
    return str(CORPUS / f"{stem}.bdt.json")


def _json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    return code, json.loads(capsys.readouterr().out)


class TestCheck:
    def test_text_output(self, capsys):
        assert main(["check", _path("convert_real")]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "A(dt:real) :: real ⇒° real × real"
        assert out[1] == "A(dt) = [s ↝ s, s + dt]"

    def test_generic_with_type(self, capsys):
        assert main(["check", _path("integrated_sum"), "--generic", "--type", "real"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "A_type(dt) = [s ↝ s, s + 4·dt]" in out

    def test_single_dash_options(self, capsys):
        assert main(["check", _path("compare_and"), "-const"]) == EXIT_OK
        assert "A(x:'a:numeral, y:'a, z:'b:numeral_nzero)" in capsys.readouterr().out

    def test_json_report(self, capsys):
        code, rep = _json(capsys, "check", _path("compare"))
        assert code == EXIT_OK
        assert set(rep) == {"version", "name", "definitions", "arities", "diagnostics"}
        assert rep["definitions"][0]["simplified"] == "[() ↝ 1 ≠ 2]"
        assert rep["diagnostics"][0]["code"] == "Warning"

    def test_type_error(self, capsys):
        code, rep = _json(capsys, "check", _path("bool_integrator"))
        assert code == EXIT_DIAGRAM
        diag = rep["diagnostics"][0]
        assert diag["code"] == "TypeError"
        assert diag["location"] == "Integrator.in0"
        assert diag["blocks"] == ["Integrator"]

    def test_text_error(self, capsys):
        assert main(["check", _path("bool_integrator")]) == EXIT_DIAGRAM
        assert capsys.readouterr().out.strip() == "error: TypeError: bool vs real at Integrator.in0"

    def test_non_convergence(self, capsys):
        code, rep = _json(capsys, "check", _path("mux_loop"))
        assert code == EXIT_DIAGRAM
        assert rep["diagnostics"][0]["bound"] == 4

    def test_parse_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.bdt.json"
        bad.write_text('{"version": 1, "blocks": [}')
        code, rep = _json(capsys, "check", str(bad))
        assert code == EXIT_DIAGRAM
        d = rep["diagnostics"][0]
        assert d["code"] == "SyntaxError" and d["line"] == 1

    def test_structural_error(self, capsys, tmp_path):
        f = tmp_path / "s.bdt.json"
        f.write_text(json.dumps({"version": 1, "name": "S", "blocks": [{"id": "g", "kind": "Gain"}], "wires": []}))
        code, rep = _json(capsys, "check", str(f))
        assert code == EXIT_DIAGRAM
        assert rep["diagnostics"][0]["errors"][0]["code"] == "BadPortCount"


class TestUsage:
    def test_missing_file(self, capsys):
        assert main(["check", "/nonexistent.bdt.json"]) == EXIT_USAGE

    def test_unknown_option(self, capsys):
        assert main(["check", _path("bool_integrator"), "--bogus"]) == EXIT_USAGE

    def test_bad_type_choice(self, capsys):
        assert main(["check", _path("bool_integrator"), "--type", "complex"]) == EXIT_USAGE

    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK

    def test_bad_dt(self, capsys):
        assert main(["simulate", _path("constant_sum"), "--generic", "--dt", "0"]) == EXIT_USAGE


class TestSimulate:
    def test_csv_to_file(self, capsys, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["simulate", _path("integrated_sum"), "--generic", "--out", str(out)])
        assert code == EXIT_OK
        rows = out.read_text().splitlines()
        assert rows[0] == "time,Scope"
        assert len(rows) == 1002
        assert float(rows[-1].split(",")[1]) == pytest.approx(40.0, rel=0.02)

    def test_json_final(self, capsys):
        code, rep = _json(capsys, "simulate", _path("constant_sum"), "--generic", "--horizon", "1")
        assert code == EXIT_OK
        assert rep["final"] == {"Scope": 4.0}
        assert rep["steps"] == 101

    def test_rejected_diagram(self, capsys):
        assert main(["simulate", _path("bool_integrator")]) == EXIT_DIAGRAM


class TestArity:
    def test_arity_text(self, capsys):
        assert main(["arity", _path("mux_chain")]) == EXIT_OK
        assert "Mux1.out0: 4" in capsys.readouterr().out.splitlines()

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "blocktype", "arity", _path("mux_flat")],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert "Mux.out0: 4" in proc.stdout
