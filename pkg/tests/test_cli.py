import json
import subprocess
import sys

import pytest

from monores.cli import main
from monores.linalg import HVector
from monores.operators import operator_from_json

LAP99 = '{"kind": "laplacian_1d", "params": {"n": 99}}'
SHIFT4 = '{"kind": "right_shift", "params": {"dim": 4}}'
DIAG5 = '{"kind": "diagonal", "params": {"weights": [1, 2, 3, 4, 5]}}'


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestProbeUnbounded:
    def test_small_table_bytes(self, capsys):
        code, out, _ = run(["probe-unbounded", "--max-n", "5"], capsys)
        assert code == 0
        assert out == "n,ratio\n1,1.0\n2,2.0\n3,3.0\n4,4.0\n5,5.0\n"

    def test_json_format(self, capsys):
        code, out, _ = run(["probe-unbounded", "--max-n", "3", "--format", "json"], capsys)
        assert code == 0
        assert json.loads(out)["rows"] == [[1, 1.0], [2, 2.0], [3, 3.0]]


class TestCertify:
    def test_laplacian_passes(self, capsys):
        code, out, _ = run(["certify", "--operator", LAP99, "--samples", "20"], capsys)
        assert code == 0
        assert "monotonicity: pass" in out
        assert "non-expansiveness: pass" in out

    def test_right_shift_fails_with_witness(self, capsys):
        code, out, _ = run(["certify", "--operator", SHIFT4, "--samples", "10"], capsys)
        assert code == 1
        assert "monotonicity: fail" in out
        witness_line = next(l for l in out.splitlines() if l.startswith("witness="))
        witness = HVector.from_json(json.loads(witness_line[len("witness="):]))
        assert witness.dim == 4

    def test_report_file(self, tmp_path, capsys):
        out_path = tmp_path / "cert.json"
        code, _, _ = run(
            ["certify", "--operator", DIAG5, "--format", "json", "--output", str(out_path)],
            capsys,
        )
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert {c["property"] for c in doc["certificates"]} == {
            "monotonicity",
            "non-expansiveness",
        }


class TestResolve:
    def test_json_document_and_operator_round_trip(self, tmp_path, capsys):
        rhs = json.dumps({"weight": 1.0, "coeffs": [1.0, 0.0, 0.0, 0.0, 0.0]})
        code, out, _ = run(
            ["resolve", "--operator", DIAG5, "--rhs", rhs, "--lambda", "1.0",
             "--format", "json"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["u"]["coeffs"][0] == pytest.approx(0.5, abs=1e-15)
        assert doc["residual"] <= 1e-10
        again = operator_from_json(doc["operator"])
        assert again.dim == 5

    def test_csv_to_file_prints_residual(self, tmp_path, capsys):
        out_path = tmp_path / "u.csv"
        code, out, _ = run(
            ["resolve", "--operator", DIAG5, "--lambda", "0.5", "--seed", "3",
             "--output", str(out_path)],
            capsys,
        )
        assert code == 0
        assert out.startswith("residual=")
        lines = out_path.read_text().splitlines()
        assert lines[0] == "index,u"
        assert len(lines) == 6

    def test_csv_to_stdout_moves_residual_to_stderr(self, capsys):
        code, out, err = run(["resolve", "--operator", DIAG5, "--lambda", "2.0"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "index,u"
        assert err.startswith("residual=")

    def test_missing_lambda_is_usage_error(self, capsys):
        code, _, err = run(["resolve", "--operator", DIAG5], capsys)
        assert code == 2
        assert "usage error" in err

    def test_operator_file_path(self, tmp_path, capsys):
        op_path = tmp_path / "op.json"
        op_path.write_text(DIAG5)
        code, _, _ = run(
            ["resolve", "--operator", str(op_path), "--lambda", "1.0"], capsys
        )
        assert code == 0

    def test_bootstrap_method(self, capsys):
        code, out, _ = run(
            ["resolve", "--operator", LAP99, "--lambda", "0.05", "--method", "bootstrap",
             "--format", "json", "--seed", "1"],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["residual"] <= 1e-9


class TestBootstrapDemo:
    def test_stage_table(self, capsys):
        code, out, _ = run(
            ["bootstrap-demo", "--operator", LAP99, "--lambda", "0.1", "--seed", "2"],
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "stage,lambda,factor,iterations,final_residual"
        assert len(lines) > 2  # several stages for a downward target

    def test_json_schema(self, capsys):
        code, out, _ = run(
            ["bootstrap-demo", "--operator", DIAG5, "--lambda", "0.3",
             "--format", "json"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"stages"}
        assert all(
            set(s) == {"lambda", "factor", "iterations", "final_residual"}
            for s in doc["stages"]
        )

    def test_determinism_byte_identical(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            code, _, _ = run(
                ["bootstrap-demo", "--operator", LAP99, "--lambda", "0.05",
                 "--seed", "11", "--output", str(p)],
                capsys,
            )
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestBanachDemo:
    def test_table_and_bound_dominance(self, capsys):
        code, out, _ = run(
            ["banach-demo", "--contraction-k", "0.5", "--dim", "3", "--seed", "4"],
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "iter,residual,apriori_bound"
        for line in lines[1:]:
            _, residual, bound = line.split(",")
            assert float(residual) <= float(bound) + 1e-12

    def test_json_has_fixed_point(self, capsys):
        code, out, _ = run(
            ["banach-demo", "--contraction-k", "0.3", "--format", "json"], capsys
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["converged"] is True
        assert doc["k"] == 0.3
        assert len(doc["residuals"]) == doc["iterations"]

    def test_k_validation(self, capsys):
        code, _, err = run(["banach-demo", "--contraction-k", "1.0"], capsys)
        assert code == 2
        assert "usage error" in err


class TestHeatFlow:
    def test_trajectory_csv(self, capsys):
        code, out, _ = run(
            ["heat-flow", "--operator", LAP99, "--tau", "0.01", "--steps", "5",
             "--seed", "6"],
            capsys,
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "step,time,norm"
        norms = [float(l.split(",")[2]) for l in lines[1:]]
        assert len(norms) == 6
        assert all(b <= a * (1 + 1e-10) for a, b in zip(norms, norms[1:]))

    def test_dump_states_json(self, capsys):
        code, out, _ = run(
            ["heat-flow", "--operator", DIAG5, "--tau", "0.5", "--steps", "2",
             "--format", "json", "--dump-states"],
            capsys,
        )
        assert code == 0
        doc = json.loads(out)
        assert len(doc["states"]) == 3
        HVector.from_json(doc["states"][0])


class TestConfigAndErrors:
    def test_config_file_supplies_flags(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"operator": json.loads(DIAG5), "lambda": 1.0}))
        # operator comes as a JSON object; pass it through a file instead
        op_path = tmp_path / "op.json"
        op_path.write_text(DIAG5)
        cfg.write_text(json.dumps({"operator": str(op_path), "lambda": 1.0, "seed": 5}))
        code, out, _ = run(
            ["resolve", "--config", str(cfg), "--format", "json"], capsys
        )
        assert code == 0
        assert json.loads(out)["lambda"] == 1.0

    def test_flags_override_config(self, tmp_path, capsys):
        op_path = tmp_path / "op.json"
        op_path.write_text(DIAG5)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"operator": str(op_path), "lambda": 1.0}))
        code, out, _ = run(
            ["resolve", "--config", str(cfg), "--lambda", "2.0", "--format", "json"],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["lambda"] == 2.0

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"mystery": 1}))
        code, _, err = run(["probe-unbounded", "--config", str(cfg)], capsys)
        assert code == 2
        assert "unknown config fields" in err

    def test_unknown_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["probe-unbounded", "--mystery", "1"])
        assert info.value.code == 2

    def test_bad_operator_json(self, capsys):
        code, _, err = run(["certify", "--operator", '{"kind": "nope", "params": {}}'], capsys)
        assert code == 2
        assert "usage error" in err

    def test_json_errors_flag(self, capsys):
        code, _, err = run(
            ["certify", "--operator", '{"bad": 1}', "--json-errors"], capsys
        )
        assert code == 2
        doc = json.loads(err)
        assert doc["error"] == "usage"

    def test_numerical_error_exit_code(self, capsys):
        op = '{"kind": "multiplication", "params": {"samples": [-1.0, 1.0]}}'
        rhs = json.dumps({"weight": 1.0, "coeffs": [1.0, 1.0]})
        code, _, err = run(
            ["resolve", "--operator", op, "--rhs", rhs, "--lambda", "1.0"], capsys
        )
        assert code == 3
        assert "numerical error" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "monores", "probe-unbounded", "--max-n", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "n,ratio\n1,1.0\n2,2.0\n3,3.0\n"
