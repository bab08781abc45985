import json

import pytest

import lamptwist.cli as cli
from lamptwist import (
    GroupParams,
    Torsion,
    WreathAutomorphism,
    automorphism_from_dict,
    automorphism_to_dict,
    fileformat,
)
from lamptwist.finite import OracleCheck


@pytest.fixture(autouse=True)
def in_tmp_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_finite_case_writes_file(self, capsys, tmp_path):
        code, out, err = run(capsys, "classify", "5", "1")
        assert code == 0 and err == ""
        assert "Z_5 wr Z^1: admits finite, R = 2" in out
        assert "automorphism file: automorphism-n5-k1.json" in out
        aut = automorphism_from_dict(fileformat.load(tmp_path / "automorphism-n5-k1.json"))
        assert aut.is_valid

    def test_infinite_case(self, capsys, tmp_path):
        code, out, _ = run(capsys, "classify", "2", "3")
        assert code == 0
        assert out == "Z_2 wr Z^3: R-infinity (modulus is even)\n"
        assert not list(tmp_path.iterdir())

    def test_rank_parity_case(self, capsys):
        code, out, _ = run(capsys, "classify", "9", "3")
        assert code == 0
        assert "R-infinity (modulus divisible by 3 and rank odd)" in out

    def test_no_write(self, capsys, tmp_path):
        code, out, _ = run(capsys, "classify", "5", "1", "--no-write")
        assert code == 0
        assert "admits finite" in out and "automorphism file" not in out
        assert not list(tmp_path.iterdir())

    def test_out_path(self, capsys, tmp_path):
        code, out, _ = run(capsys, "classify", "9", "2", "--out", "block.json")
        assert code == 0 and "automorphism file: block.json" in out
        assert (tmp_path / "block.json").exists()

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "classify", "5", "2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["command"] == "classify"
        assert payload["always_infinite"] is False
        assert payload["reidemeister"] == 4
        assert payload["automorphism_file"] == "automorphism-n5-k2.json"

    def test_json_infinite(self, capsys):
        code, out, _ = run(capsys, "classify", "6", "1", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["always_infinite"] is True
        assert payload["reidemeister"] is None

    def test_bad_modulus(self, capsys):
        code, _, err = run(capsys, "classify", "1", "1")
        assert code == 1 and err.startswith("error:")


class TestConstruct:
    def test_writes_and_reports(self, capsys, tmp_path):
        code, out, _ = run(capsys, "construct", "7", "2")
        assert code == 0
        assert "Z_7 wr Z^2: constructed automorphism, R = 4" in out
        assert (tmp_path / "automorphism-n7-k2.json").exists()

    def test_always_infinite_pair_rejected(self, capsys, tmp_path):
        code, _, err = run(capsys, "construct", "2", "1")
        assert code == 1
        assert "infinite Reidemeister number" in err
        assert not list(tmp_path.iterdir())

    def test_json(self, capsys):
        code, out, _ = run(capsys, "construct", "9", "2", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["reidemeister"] == "3"


class TestReidemeister:
    def test_certified_pipeline(self, capsys):
        run(capsys, "construct", "5", "1")
        code, out, _ = run(capsys, "reidemeister", "automorphism-n5-k1.json")
        assert code == 0
        assert out == "R_quotient = 2\ncertificate = certified\nR = 2\n"

    def test_infinite_quotient(self, capsys, tmp_path):
        aut = WreathAutomorphism.identity(GroupParams(5, 2))
        fileformat.save(tmp_path / "ident.json", automorphism_to_dict(aut))
        code, out, _ = run(capsys, "reidemeister", "ident.json")
        assert code == 0
        assert "R_quotient = infinite" in out
        assert "certificate = skipped" in out
        assert "R = infinite" in out

    def test_unknown_exits_three(self, capsys, tmp_path):
        aut = WreathAutomorphism(
            GroupParams(9, 1), ((-1,),), Torsion(9, 1, [((0,), 1), ((1,), 3)])
        )
        fileformat.save(tmp_path / "wide.json", automorphism_to_dict(aut))
        code, out, _ = run(capsys, "reidemeister", "wide.json")
        assert code == 3
        assert "certificate = unknown" in out and "R = unknown" in out

    def test_emit_certificate_roundtrip(self, capsys, tmp_path):
        run(capsys, "construct", "7", "1")
        code, _, _ = run(
            capsys, "reidemeister", "automorphism-n7-k1.json", "--emit-certificate", "cert.json"
        )
        assert code == 0
        code, out, _ = run(capsys, "verify", "cert.json")
        assert code == 0
        assert "certificate ok (3 witnesses)" in out
        assert "witness (0,) ok" in out

    def test_invalid_automorphism_rejected(self, capsys, tmp_path):
        data = automorphism_to_dict(
            WreathAutomorphism(GroupParams(5, 1), ((-1,),), Torsion.delta(5, 1, (0,), 2))
        )
        data["matrix"] = [[2]]
        fileformat.save(tmp_path / "bad.json", data)
        code, _, err = run(capsys, "reidemeister", "bad.json")
        assert code == 1 and "error:" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "reidemeister", "nope.json")
        assert code == 1 and "error:" in err

    def test_json(self, capsys):
        run(capsys, "construct", "25", "2")
        code, out, _ = run(capsys, "reidemeister", "automorphism-n25-k2.json", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload == {
            "command": "reidemeister",
            "quotient": "4",
            "certificate": "certified",
            "reidemeister": "4",
        }


class TestVerify:
    def test_tampered_witness_rejected(self, capsys, tmp_path):
        run(capsys, "construct", "5", "1")
        run(capsys, "reidemeister", "automorphism-n5-k1.json", "--emit-certificate", "c.json")
        data = fileformat.load(tmp_path / "c.json")
        data["witnesses"][0]["preimage"][0]["coeff"] += 1
        fileformat.save(tmp_path / "c.json", data)
        code, out, _ = run(capsys, "verify", "c.json")
        assert code == 2
        assert "problem:" in out and "certificate rejected" in out

    def test_wrong_schema(self, capsys, tmp_path):
        fileformat.save(tmp_path / "x.json", {"schema": 1, "extra": True})
        code, _, err = run(capsys, "verify", "x.json")
        assert code == 1 and "error:" in err


class TestValidate:
    def test_valid_file(self, capsys):
        run(capsys, "construct", "5", "3")
        code, out, _ = run(capsys, "validate", "automorphism-n5-k3.json")
        assert code == 0
        assert "matrix_unimodular = true" in out
        assert "u_is_unit = true" in out
        assert "cocycle_consistent = true" in out
        assert out.rstrip().endswith("valid")

    def test_invalid_file(self, capsys, tmp_path):
        data = automorphism_to_dict(
            WreathAutomorphism(GroupParams(6, 1), ((-1,),), Torsion.delta(6, 1, (0,), 2))
        )
        fileformat.save(tmp_path / "nonunit.json", data)
        code, out, _ = run(capsys, "validate", "nonunit.json")
        assert code == 2
        assert "u_is_unit = false" in out
        assert "failure:" in out
        assert out.rstrip().endswith("invalid")

    def test_json(self, capsys):
        run(capsys, "construct", "7", "1")
        code, out, _ = run(capsys, "validate", "automorphism-n7-k1.json", "--format", "json")
        assert code == 0
        assert json.loads(out)["valid"] is True


class TestOracle:
    def test_tbft_text(self, capsys):
        code, out, _ = run(capsys, "oracle", "3", "2", "1")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[-1] == "oracle: 4 pass, 0 fail"
        assert all(line.startswith("CHECK tbft n=3;m=2;k=1") for line in lines[:-1])
        assert all(" PASS " in line for line in lines[:-1])

    def test_projection_needs_divisor(self, capsys):
        code, _, err = run(capsys, "oracle", "15", "2", "1", "--check", "projection")
        assert code == 1 and "--divisor" in err

    def test_divisor_must_divide(self, capsys):
        code, _, err = run(
            capsys, "oracle", "15", "2", "1", "--check", "projection", "--divisor", "4"
        )
        assert code == 1 and "divisor" in err

    def test_unknown_check_name(self, capsys):
        code, _, err = run(capsys, "oracle", "3", "2", "1", "--check", "bogus")
        assert code == 1 and "unknown check" in err

    def test_projection(self, capsys):
        code, out, _ = run(
            capsys, "oracle", "15", "2", "1", "--check", "projection", "--divisor", "5"
        )
        assert code == 0
        assert "CHECK projection-diagram" in out
        assert "CHECK projection-bound" in out
        assert " FAIL " not in out

    def test_restriction_and_shift(self, capsys):
        code, out, _ = run(capsys, "oracle", "3", "2", "1", "--check", "restriction,shift")
        assert code == 0
        assert "CHECK restriction-bound" in out
        assert "CHECK shift-count" in out

    def test_aut_file(self, capsys):
        run(capsys, "construct", "5", "1")
        code, out, _ = run(
            capsys, "oracle", "5", "2", "1", "--aut", "automorphism-n5-k1.json"
        )
        assert code == 0
        assert out.strip().splitlines() == [
            "CHECK tbft n=5;m=2;k=1;aut=descended(u=2*D[0],M=[-1]) PASS 2 2",
            "oracle: 1 pass, 0 fail",
        ]

    def test_json(self, capsys):
        code, out, _ = run(capsys, "oracle", "3", "2", "1", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True
        assert len(payload["checks"]) == 4

    def test_budget_guard(self, capsys):
        code, _, err = run(capsys, "oracle", "7", "3", "2", "--budget", "100")
        assert code == 1 and "budget" in err

    def test_failing_check_exits_two(self, capsys, monkeypatch):
        broken = OracleCheck("tbft", "n=3;m=2;k=1", False, 9, 8)
        monkeypatch.setattr(cli, "verify_tbft_finite", lambda g, f: broken)
        code, out, _ = run(capsys, "oracle", "3", "2", "1")
        assert code == 2
        assert "oracle: 0 pass, 4 fail" in out


class TestHarness:
    def test_help_exits_zero(self, capsys):
        assert cli.main(["--help"]) == 0
        capsys.readouterr()

    def test_missing_subcommand(self, capsys):
        assert cli.main([]) == 1
        capsys.readouterr()

    def test_deterministic_output(self, capsys):
        first = run(capsys, "classify", "25", "3", "--no-write")
        second = run(capsys, "classify", "25", "3", "--no-write")
        assert first == second
        run(capsys, "construct", "9", "2")
        a = run(capsys, "reidemeister", "automorphism-n9-k2.json", "--format", "json")
        b = run(capsys, "reidemeister", "automorphism-n9-k2.json", "--format", "json")
        assert a == b
