import json
import subprocess
import sys

import numpy as np
import pytest

from qcdist.cli import main
from qcdist.circuits import ProblemInstance, instance_to_json, parse_circuit, serialize_circuit
from qcdist.jsonutil import dumps
from qcdist.simulate import density_to_json

from helpers import decohere_circuit, identity_circuit, z_circuit


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "id.circ").write_text(serialize_circuit(identity_circuit()))
    (tmp_path / "dec.circ").write_text(serialize_circuit(decohere_circuit()))
    inst = ProblemInstance(identity_circuit(), decohere_circuit(), "QCD", 1.0, 0.25)
    (tmp_path / "inst.json").write_text(dumps(instance_to_json(inst)))
    inst_z = ProblemInstance(identity_circuit(), z_circuit(), "QCD", 2.0, 0.25)
    (tmp_path / "inst_z.json").write_text(dumps(instance_to_json(inst_z)))
    zero = np.diag([1.0, 0.0]).astype(complex)
    one = np.diag([0.0, 1.0]).astype(complex)
    (tmp_path / "zero.json").write_text(dumps(density_to_json(zero)))
    (tmp_path / "one.json").write_text(dumps(density_to_json(one)))
    return tmp_path


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_validate_ok(workdir, capsys):
    code, out = run_cli(capsys, "validate", workdir / "id.circ")
    assert code == 0 and out["valid"]


def test_validate_liveness_failure(workdir, capsys):
    bad = workdir / "bad.circ"
    bad.write_text("circuit bad inputs 1\ntrace 0\ngate H 0\nend\n")
    code, out = run_cli(capsys, "validate", bad)
    assert code == 1
    assert not out["valid"]
    assert any("wire" in v for v in out["violations"])


def test_validate_corrupted_unitary(workdir, capsys):
    bad = workdir / "corrupt.circ"
    bad.write_text(
        "circuit bad inputs 1\nunitary 1 0 1.0,0.0 0.1,0.0 0.0,0.0 1.0,0.0\nend\n"
    )
    code, out = run_cli(capsys, "validate", bad)
    assert code == 1
    assert any("unitary" in v for v in out["violations"])


def test_distance_trace(workdir, capsys):
    code, out = run_cli(capsys, "distance", "trace", workdir / "zero.json", workdir / "one.json")
    assert code == 0
    assert abs(out["value"] - 2.0) < 1e-12


def test_distance_fidelity_identical(workdir, capsys):
    code, out = run_cli(capsys, "distance", "fidelity", workdir / "zero.json", workdir / "zero.json")
    assert code == 0
    assert abs(out["value"] - 1.0) < 1e-12


def test_distance_dimension_mismatch_exit_2(workdir, capsys):
    four = workdir / "four.json"
    four.write_text(dumps(density_to_json(np.eye(4, dtype=complex) / 4)))
    code, _ = run_cli(capsys, "distance", "fidelity", workdir / "zero.json", four)
    assert code == 2


def test_distance_dnorm_instance(workdir, capsys):
    code, out = run_cli(
        capsys, "distance", "dnorm", workdir / "inst.json", "--restarts", 8, "--seed", 5
    )
    assert code == 0
    assert abs(out["value"] - 1.0) < 1e-6


def test_distance_dnorm_two_circuit_files(workdir, capsys):
    code, out = run_cli(
        capsys, "distance", "dnorm", workdir / "id.circ", workdir / "dec.circ", "--restarts", 8
    )
    assert code == 0
    assert abs(out["value"] - 1.0) < 1e-6


def test_distance_maxfid(workdir, capsys):
    code, out = run_cli(
        capsys, "distance", "maxfid", workdir / "id.circ", workdir / "dec.circ", "--restarts", 8
    )
    assert code == 0
    assert abs(out["value"] - 1.0) < 1e-6


def test_reduce_ci2qcd_writes_syntactic_pair(workdir, capsys):
    out_dir = workdir / "out"
    code, out = run_cli(capsys, "reduce", "ci2qcd", workdir / "inst.json", "--out", out_dir)
    assert code == 0
    r0 = (out_dir / "r0.circ").read_text()
    r1 = (out_dir / "r1.circ").read_text()
    r0_body = r0.strip().splitlines()
    r1_body = r1.strip().splitlines()
    assert r1_body[-2] == "decohere 0"
    # identical gate lists apart from the trailing decohere (headers carry
    # the circuit names)
    assert r1_body[1:-2] == r0_body[1:-1]
    parse_circuit(r0), parse_circuit(r1)


def test_reduce_parity_then_distance(workdir, capsys):
    out_dir = workdir / "pout"
    code, _ = run_cli(capsys, "reduce", "parity", workdir / "inst.json", "--count", 2, "--out", out_dir)
    assert code == 0
    code, out = run_cli(
        capsys, "distance", "dnorm", out_dir / "p0.circ", out_dir / "p1.circ", "--restarts", 8
    )
    assert code == 0
    assert abs(out["value"] - 0.5) < 1e-4


def test_reduce_polarize_derived_params_exit_3(workdir, capsys):
    code, out = run_cli(
        capsys, "reduce", "polarize", workdir / "inst.json", "--precision", 1, "--out", workdir / "sx"
    )
    assert code == 3
    assert out["error"] == "size_cap"
    assert out["certificate"]["s"] == 1024


def test_reduce_polarize_override(workdir, capsys):
    out_dir = workdir / "sout"
    code, out = run_cli(
        capsys,
        "reduce", "polarize", workdir / "inst.json",
        "--precision", 1, "--override", "1,1,1", "--out", out_dir,
    )
    assert code == 0
    assert out["certificate"]["overridden"]
    parse_circuit((out_dir / "s0.circ").read_text())


def test_protocol_exact_values(workdir, capsys):
    code, out = run_cli(
        capsys, "protocol", workdir / "inst_z.json", "--trials", 200, "--restarts", 8
    )
    assert code == 0
    assert abs(out["p_accept_exact"] - 1.0) < 1e-9
    assert out["accepts"] == 200


def test_protocol_estimate_concentrates(workdir, capsys):
    code, out = run_cli(
        capsys, "protocol", workdir / "inst.json", "--trials", 10000, "--seed", 2, "--restarts", 8
    )
    assert code == 0
    assert abs(out["p_accept_exact"] - 0.75) < 1e-6
    assert abs(out["estimate"] - 0.75) < 0.02


def test_protocol_identical_circuits(workdir, capsys):
    inst = ProblemInstance(identity_circuit(), identity_circuit("id2"), "QCD", 1.0, 0.5)
    path = workdir / "inst_same.json"
    path.write_text(dumps(instance_to_json(inst)))
    code, out = run_cli(capsys, "protocol", path, "--trials", 10000, "--restarts", 4)
    assert code == 0
    assert abs(out["estimate"] - 0.5) < 0.02


def test_unknown_flag_rejected(workdir):
    with pytest.raises(SystemExit) as info:
        main(["validate", str(workdir / "id.circ"), "--frobnicate"])
    assert info.value.code == 2


def test_byte_stable_output(workdir):
    cmd = [
        sys.executable, "-m", "qcdist", "distance", "dnorm",
        str(workdir / "inst.json"), "--restarts", "4", "--seed", "12",
    ]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
