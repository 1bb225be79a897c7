import numpy as np

from qcdist.circuits import parse_circuit
from qcdist.dilation import dilate, dilated_apply, dilated_isometry, dilated_unitary
from qcdist.simulate import apply

from helpers import decohere_circuit, random_circuit, random_density


def test_unitary_circuit_dilates_to_itself():
    c = parse_circuit("circuit u inputs 2\ngate H 0\ngate CNOT 0 1\nend")
    d = dilate(c)
    assert (d.k, d.l) == (0, 0)
    assert len(d.unitary_circuit.gates) == 2
    assert d.output_wires == [0, 1]


def test_single_decohere_dilation():
    d = dilate(decohere_circuit())
    assert (d.k, d.l) == (1, 1)
    kinds = [g.label for g in d.unitary_circuit.gates]
    assert kinds == ["CNOT"]
    rng = np.random.default_rng(0)
    rho = random_density(rng, 2)
    assert np.abs(dilated_apply(d, rho) - apply(decohere_circuit(), rho)).max() < 1e-12


def test_single_trace_dilation():
    c = parse_circuit("circuit tr inputs 1\ntrace 0\nend")
    d = dilate(c)
    assert (d.k, d.l) == (0, 1)
    assert d.output_wires == []
    assert d.garbage_wires == [0]
    assert len(d.unitary_circuit.gates) == 0


def test_dilation_reproduces_apply_on_random_circuits():
    rng = np.random.default_rng(1)
    for _ in range(25):
        c = random_circuit(rng, int(rng.integers(1, 3)), int(rng.integers(0, 8)))
        d = dilate(c)
        assert d.unitary_circuit.n_in == c.n_in + d.k
        assert c.n_in + d.k == c.n_out + d.l
        assert all(g.kind == "unitary" for g in d.unitary_circuit.gates)
        rho = random_density(rng, 2**c.n_in)
        assert np.abs(dilated_apply(d, rho) - apply(c, rho)).max() < 1e-10


def test_dilation_counts_linear_in_gates():
    rng = np.random.default_rng(2)
    c = random_circuit(rng, 2, 8)
    d = dilate(c)
    assert d.k <= len(c.gates)
    assert d.l <= len(c.gates)


def test_canonical_output_layout():
    # Trace the first input so output and garbage wires would be swapped
    # without routing.
    c = parse_circuit("circuit mix inputs 2\ntrace 0\nancilla\ngate H 1\nend")
    d = dilate(c)
    assert d.output_wires == list(range(d.n_out))
    assert d.garbage_wires == list(range(d.n_out, d.n_wires))
    rng = np.random.default_rng(3)
    rho = random_density(rng, 4)
    assert np.abs(dilated_apply(d, rho) - apply(c, rho)).max() < 1e-10


def test_isometry_matches_unitary_embedding():
    rng = np.random.default_rng(4)
    c = random_circuit(rng, 1, 5)
    d = dilate(c)
    w = dilated_isometry(d)
    assert w.shape == (2 ** (c.n_out + d.l), 2**c.n_in)
    assert np.abs(w.conj().T @ w - np.eye(2**c.n_in)).max() < 1e-10
    u = dilated_unitary(d)
    assert np.abs(u @ u.conj().T - np.eye(u.shape[0])).max() < 1e-10
