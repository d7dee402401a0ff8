import json
import subprocess
import sys

import pytest
import yaml

from qldpc_transversal import cli, codelib


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


class TestBuild:
    def test_registered_recipe_round_trip(self, capsys, tmp_path):
        out = tmp_path / "steane.yaml"
        code, _, err = run(capsys, "build", "steane", "--out", str(out))
        assert code == 0 and "[[7,1]]" in err
        loaded, defaults = cli.descriptor_to_code(out.read_text())
        steane = codelib.build_named("steane")
        assert loaded.h_x == steane.h_x and loaded.l_x == steane.l_x and loaded.l_z == steane.l_z
        assert defaults == {"q": 2}
        side = json.loads((tmp_path / "steane.yaml.provenance.json").read_text())
        assert side["command"] == "build" and len(side["sha256"]) == 64

    def test_recipe_file(self, capsys, tmp_path):
        recipe = tmp_path / "hp.yaml"
        recipe.write_text(yaml.safe_dump({"construction": "hypergraph_product", "a": {"bmat": "1 2\n11\n"}, "b": "rep3"}))
        code, out, err = run(capsys, "build", str(recipe))
        assert code == 0
        assert yaml.safe_load(out)["name"] == "hp"

    def test_bad_inputs(self, capsys, tmp_path):
        assert run(capsys, "build", "nonexistent")[0] == 2
        assert run(capsys, "build", "rep3")[0] == 2
        bad = tmp_path / "bad.yaml"
        bad.write_text("construction: css\nh_x: rep3\n")
        assert run(capsys, "build", str(bad))[0] == 2

    def test_construction_failure_exits_one(self, capsys, tmp_path):
        recipe = tmp_path / "d.yaml"
        recipe.write_text(yaml.safe_dump({"construction": "direct", "c0": "hamming7_sym", "k": 1, "d_x": 1, "q": 3}))
        code, _, err = run(capsys, "build", str(recipe))
        assert code == 1 and "construction failed" in err

    def test_deterministic(self, capsys):
        first = run(capsys, "build", "kirkman")[1]
        second = run(capsys, "build", "kirkman")[1]
        assert first == second


class TestCheck:
    def test_steane_pass(self, capsys):
        code, out, _ = run(capsys, "check", "steane")
        rep = report(out)
        assert code == 0 and rep["passed"] == "true" and rep["w"] == "3"

    def test_steane_t_fails(self, capsys):
        code, out, _ = run(capsys, "check", "steane", "--q", "3")
        assert code == 1
        assert report(out)["passed"] == "false"
        lines = out.splitlines()
        assert "1 0 0 - 4 8" in lines
        assert "3 0 0,1,2 - 1 2" in lines

    def test_target_w(self, capsys):
        code, out, _ = run(capsys, "check", "kirkman", "--target-w", "1")
        rep = report(out)
        assert code == 0 and rep["w"] == "1 1 1" and rep["p_values"] == "3"

    def test_search_without_solution(self, capsys):
        code, _, err = run(capsys, "check", "steane", "--q", "3", "--search")
        assert code == 1 and "no phase vector" in err

    def test_support_specs(self, capsys):
        assert run(capsys, "check", "steane", "--support", "mask:1111111")[0] == 0
        assert run(capsys, "check", "steane", "--support", "mask:111")[0] == 2
        assert run(capsys, "check", "steane", "--support", "left")[0] == 2
        assert run(capsys, "check", "steane", "--support", "weird")[0] == 2

    def test_missing_q(self, capsys, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(cli.code_to_descriptor(codelib.build_named("steane")))
        assert run(capsys, "check", str(path))[0] == 2

    def test_descriptor_is_validated(self, capsys, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("format: other\n")
        assert run(capsys, "check", str(path), "--q", "2")[0] == 2
        doc = yaml.safe_load(cli.code_to_descriptor(codelib.build_named("steane")))
        doc["l_z"] = "1 7\n1000000\n"
        path.write_text(yaml.safe_dump(doc))
        assert run(capsys, "check", str(path), "--q", "2")[0] == 2


class TestDistance:
    def test_steane(self, capsys):
        code, out, _ = run(capsys, "distance", "steane", "--kind", "X", "--expect", "3")
        rep = report(out)
        assert code == 0 and rep["weight_found"] == "3" and rep["witness"] == "0 1 3"
        assert rep["max_check_weight"] == "4 3"

    def test_expect_mismatch(self, capsys):
        assert run(capsys, "distance", "steane", "--kind", "Z", "--expect", "4")[0] == 1

    def test_threads_flag(self, capsys):
        one = run(capsys, "distance", "cycle10", "--kind", "X")[1]
        two = run(capsys, "distance", "cycle10", "--kind", "X", "--threads", "2")[1]
        assert one == two

    def test_bad_threads(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["distance", "steane", "--kind", "X", "--threads", "0"])
        assert exc.value.code == 2


class TestVerifySim:
    def test_pass_and_fail(self, capsys, tmp_path):
        gates = tmp_path / "s.gates"
        gates.write_text("PHASE 2 uniform 1\n")
        code, out, _ = run(capsys, "verify-sim", "steane", str(gates), "--expected", "linear:3")
        assert code == 0 and report(out)["passed"] == "true"
        code, out, _ = run(capsys, "verify-sim", "steane", str(gates), "--expected", "linear:1")
        assert code == 1 and report(out)["failure"] == "logical phase differs from the expected value"

    def test_expected_file(self, capsys, tmp_path):
        gates = tmp_path / "s.gates"
        gates.write_text("PHASE 2 uniform 1\n")
        table = tmp_path / "e.yaml"
        table.write_text("labels:\n  '0': 0\n  '1': 3\n")
        assert run(capsys, "verify-sim", "steane", str(gates), "--expected", str(table))[0] == 0

    def test_two_blocks_cz_expectation(self, capsys, tmp_path):
        gates = tmp_path / "cz.gates"
        gates.write_text("CZ 1 " + " ".join(f"{t},{t + 7}" for t in range(7)) + "\n")
        code, out, _ = run(capsys, "verify-sim", "steane", str(gates), "--blocks", "2", "--expected", "cz:0,1")
        assert code == 0, out

    def test_input_errors(self, capsys, tmp_path):
        gates = tmp_path / "g"
        gates.write_text("BOGUS\n")
        assert run(capsys, "verify-sim", "steane", str(gates), "--expected", "linear:3")[0] == 2
        gates.write_text("PHASE 2 uniform 1\n")
        assert run(capsys, "verify-sim", "steane", str(gates), "--expected", "linear:3,1")[0] == 2
        assert run(capsys, "verify-sim", "steane", str(tmp_path / "none"), "--expected", "linear:3")[0] == 2
        assert run(capsys, "verify-sim", "kirkman", str(gates), "--expected", "linear:0,0,0")[0] == 2


def test_list_and_export(capsys, tmp_path):
    code, out, _ = run(capsys, "list")
    assert code == 0 and "kirkman_i0\tgraph 15x35" in out
    code, out, _ = run(capsys, "export", "rep3")
    assert out == "2 3\n110\n011\n"
    code, out, _ = run(capsys, "export", "steane")
    assert yaml.safe_load(out)["construction"] == "css"
    assert run(capsys, "export", "nothing")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qldpc_transversal", "check", "steane"], capture_output=True, text=True)
    assert proc.returncode == 0 and "passed: true" in proc.stdout
