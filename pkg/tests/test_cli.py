import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from orthodisc.cli import EXIT_OK, EXIT_PARSE, EXIT_UNROUTABLE, EXIT_VALIDATION, main
from tests.oracles import binomial_sigma

SAMPLES = Path(__file__).resolve().parent.parent / "sample_inputs"


def sample(name):
    return str(SAMPLES / name)


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None), out


class TestValidate:
    def test_hadamard_valid(self, capsys):
        code, rec, _ = run_json(capsys, "validate", sample("hadamard.json"))
        assert code == EXIT_OK and rec["valid"]

    def test_printed_two_qubit_set_rejected(self, capsys):
        code, rec, _ = run_json(capsys, "validate", sample("two_qubit_printed.json"))
        assert code == EXIT_VALIDATION
        err = rec["errors"][0]
        assert err["check"] == "states" and err["states"] == [1, 2]
        assert err["overlap"] == pytest.approx(0.5)

    def test_complement_rows_rejected(self, capsys):
        code, rec, _ = run_json(capsys, "validate", sample("complement_arrays.json"))
        assert code == EXIT_VALIDATION
        assert "complement" in rec["errors"][0]["message"]

    @pytest.mark.parametrize("name", ["two_qubit.json", "two_qubit_family.json", "single_family.json", "bell.json"])
    def test_other_samples_valid(self, capsys, name):
        assert main(["validate", sample(name)]) == EXIT_OK

    def test_table_output(self, capsys):
        main(["validate", sample("hadamard.json")])
        assert capsys.readouterr().out.strip().endswith("valid")

    def test_malformed_json_reports_position(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text('{"states": [\n  [1, 0],\n  oops]}')
        assert main(["validate", str(p)]) == EXIT_PARSE
        assert "line 3" in capsys.readouterr().err

    def test_bad_field_named(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"states": [[[1, 0], "x"], [[0, 0], [1, 0]]]}))
        assert main(["validate", str(p)]) == EXIT_PARSE
        assert "states[0][1]" in capsys.readouterr().err

    def test_states_and_family_exclusive(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"states": [[1, 0], [0, 1]], "family": {"kind": "bell"}}))
        assert main(["validate", str(p)]) == EXIT_PARSE

    def test_missing_file(self):
        assert main(["validate", "/nonexistent.json"]) == EXIT_PARSE


class TestRun:
    def test_state_one_noiseless(self, capsys):
        code, rec, _ = run_json(capsys, "run", sample("hadamard.json"), "--state", "1")
        assert code == EXIT_OK
        assert rec["counts"] == {"0": 8192}
        assert rec["ancilla_probabilities"][0]["0"] == 1.0
        assert rec["decoded_state"] == 1 and rec["correct"]
        assert rec["post_measurement_overlap"]["min"] >= 1 - 1e-9

    def test_state_two_readout_noise(self, capsys):
        code, rec, _ = run_json(
            capsys, "run", sample("hadamard.json"), "--state", "2", "--noise-readout", "0.1"
        )
        assert code == EXIT_OK
        p1 = rec["ancilla_probabilities"][0]["1"]
        assert abs(p1 - 0.9) <= 3 * binomial_sigma(0.9, 8192)
        assert rec["decoded_state"] == 2

    @pytest.mark.parametrize("state, key", [(1, "00"), (2, "01"), (3, "10"), (4, "11")])
    def test_two_qubit_signatures(self, capsys, state, key):
        _, rec, _ = run_json(capsys, "run", sample("two_qubit.json"), "--state", str(state), "--shots", "256")
        assert rec["counts"] == {key: 256}

    def test_bell_on_ibmqx4_unroutable(self, capsys):
        assert main(["run", sample("bell.json"), "--device", "ibmqx4"]) == EXIT_UNROUTABLE
        assert "unroutable" in capsys.readouterr().err

    def test_bell_without_device(self, capsys):
        code, rec, _ = run_json(capsys, "run", sample("bell.json"), "--state", "3", "--shots", "100")
        assert code == EXIT_OK and rec["correct"]

    def test_two_qubit_on_ibmqx4(self, capsys):
        code, rec, _ = run_json(
            capsys, "run", sample("two_qubit.json"), "--state", "4", "--device", "ibmqx4", "--shots", "100"
        )
        assert code == EXIT_OK and rec["counts"] == {"11": 100}
        assert rec["post_measurement_overlap"]["min"] >= 1 - 1e-9

    def test_json_byte_identical(self, capsys):
        argv = ["run", sample("hadamard.json"), "--noise-readout", "0.2", "--noise-depol1", "0.05", "--seed", "5", "--shots", "500"]
        _, _, a = run_json(capsys, *argv)
        _, _, b = run_json(capsys, *argv)
        assert a == b

    def test_record_supports_replay(self, capsys):
        _, rec, _ = run_json(capsys, "run", sample("hadamard.json"), "--seed", "9")
        assert rec["config"]["seed"] == 9 and rec["config"]["shots"] == 8192
        assert len(rec["input"]["sha256"]) == 64
        assert set(rec["config"]["noise"]) == {"readout_flip", "depol1", "depol2"}

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert main(["run", sample("hadamard.json"), "--format", "json", "--out", str(out), "--shots", "10"]) == 0
        assert json.loads(out.read_text())["command"] == "run"

    def test_majority_tie_goes_to_lower_index(self, capsys):
        # |0> = (phi1 + phi2)/sqrt2 read with fully random readout: search a seed giving a tie
        for seed in range(200):
            _, rec, _ = run_json(
                capsys, "run", sample("hadamard.json"), "--shots", "2", "--seed", str(seed), "--noise-readout", "0.5"
            )
            if rec["majority_tie"]:
                assert rec["decoded_state"] == 1
                return
        pytest.fail("no tie found")

    @pytest.mark.parametrize(
        "argv",
        [["--state", "3"], ["--shots", "0"], ["--noise-readout", "0.7"], ["--device", "nope"], ["--layout", "a,b"], ["--layout", "0,1"], ["--device", "ibmqx4", "--layout", "0,0"]],
    )
    def test_bad_options(self, argv):
        assert main(["run", sample("hadamard.json"), *argv]) == EXIT_PARSE

    def test_invalid_set_exit_code(self):
        assert main(["run", sample("two_qubit_printed.json")]) == EXIT_VALIDATION


class TestTomo:
    def test_printed_statistics(self, capsys):
        code, rec, _ = run_json(capsys, "tomo", sample("stats_zero.json"))
        assert code == EXIT_OK
        assert rec["fidelity"] == pytest.approx(math.sqrt(0.969), abs=5e-5)
        assert rec["max_abs_dev"] == pytest.approx(0.05248, abs=5e-5)

    def test_target_from_stats_file(self, capsys):
        _, rec, _ = run_json(capsys, "tomo", sample("stats_one.json"))
        assert rec["theoretical"][1][1] == [1.0, 0.0]

    def test_pole_state(self, tmp_path, capsys):
        p = tmp_path / "s.json"
        p.write_text(json.dumps({"px0": 0.5, "py0": 0.5, "pz0": 1.0}))
        _, rec, _ = run_json(capsys, "tomo", str(p), "--target", "0")
        assert rec["fidelity"] == pytest.approx(1) and rec["max_abs_dev"] == pytest.approx(0)

    def test_orthogonal(self, tmp_path, capsys):
        p = tmp_path / "s.json"
        p.write_text(json.dumps({"px0": 0.5, "py0": 0.5, "pz0": 0.0}))
        _, rec, _ = run_json(capsys, "tomo", str(p), "--target", "0")
        assert rec["fidelity"] == pytest.approx(0, abs=1e-9)

    def test_missing_basis(self, tmp_path, capsys):
        p = tmp_path / "s.json"
        p.write_text(json.dumps({"px0": 0.5, "pz0": 1.0}))
        assert main(["tomo", str(p)]) == EXIT_PARSE
        assert "py0" in capsys.readouterr().err

    def test_malformed_probability(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps({"px0": 1.5, "py0": 0.5, "pz0": 1.0}))
        assert main(["tomo", str(p)]) == EXIT_PARSE

    def test_unphysical_reported(self, tmp_path, capsys):
        p = tmp_path / "s.json"
        p.write_text(json.dumps({"px0": 1.0, "py0": 1.0, "pz0": 1.0}))
        _, rec, _ = run_json(capsys, "tomo", str(p))
        assert rec["physical"] is False


class TestExport:
    def test_single_ibmqx4(self, tmp_path, capsys):
        out = tmp_path / "c.qasm"
        assert main(["export", sample("hadamard.json"), "--device", "ibmqx4", "--out", str(out)]) == EXIT_OK
        golden = Path(__file__).parent / "golden" / "single_ibmqx4.qasm"
        assert out.read_text() == golden.read_text()
        assert "3 gates" in capsys.readouterr().out

    def test_two_family_abstract(self, capsys):
        assert main(["export", sample("two_qubit_family.json")]) == EXIT_OK
        golden = Path(__file__).parent / "golden" / "two_family_abstract.qasm"
        assert capsys.readouterr().out == golden.read_text()

    def test_bell_ibmqx2_writes_nothing(self, tmp_path):
        out = tmp_path / "bell.qasm"
        assert main(["export", sample("bell.json"), "--device", "ibmqx2", "--out", str(out)]) == EXIT_UNROUTABLE
        assert not out.exists()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "orthodisc", "validate", sample("hadamard.json")], capture_output=True, text=True
    )
    assert proc.returncode == 0
