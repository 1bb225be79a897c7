import numpy as np
import pytest

from qcdist.circuits import parse_circuit
from qcdist.distances import trace_norm
from qcdist.simulate import (
    Channel,
    NotCompletelyPositiveError,
    adjoint_apply,
    apply,
    apply_extended,
    channel_apply,
    channel_from_choi,
    channel_mix,
    choi_of,
    density_from_json,
    density_to_json,
    kraus_of,
)
from qcdist.linalg import partial_trace

from helpers import (
    decohere_circuit,
    identity_circuit,
    random_circuit,
    random_density,
    random_hermitian,
    random_state,
    z_circuit,
)

PHI_PLUS = np.zeros(4, dtype=complex)
PHI_PLUS[0] = PHI_PLUS[3] = 1 / np.sqrt(2)


def test_apply_empty_circuit():
    rng = np.random.default_rng(0)
    rho = random_density(rng, 2)
    assert np.abs(apply(identity_circuit(), rho) - rho).max() == 0.0


def test_apply_decohere_plus_state():
    plus = np.full((2, 2), 0.5, dtype=complex)
    assert np.abs(apply(decohere_circuit(), plus) - np.eye(2) / 2).max() < 1e-15


def test_apply_hadamard():
    h = parse_circuit("circuit h inputs 1\ngate H 0\nend")
    out = apply(h, np.diag([1.0, 0.0]).astype(complex))
    assert np.abs(out - np.full((2, 2), 0.5)).max() < 1e-15


def test_apply_extended_zero_ref_is_apply():
    rng = np.random.default_rng(1)
    c = random_circuit(rng, 1, 4)
    rho = random_density(rng, 2)
    assert np.abs(apply_extended(c, rho, 0) - apply(c, rho)).max() == 0.0


def test_apply_extended_identity_leaves_state():
    rng = np.random.default_rng(2)
    rho = random_density(rng, 4)
    assert np.abs(apply_extended(identity_circuit(), rho, 1) - rho).max() == 0.0


def test_apply_extended_decohere_on_entangled_input():
    rho = np.outer(PHI_PLUS, PHI_PLUS.conj())
    out = apply_extended(decohere_circuit(), rho, 1)
    expect = np.zeros((4, 4), dtype=complex)
    expect[0, 0] = expect[3, 3] = 0.5
    assert np.abs(out - expect).max() < 1e-15


def test_choi_identity_is_unnormalized_phi_plus():
    ch = choi_of(identity_circuit())
    assert np.abs(ch.choi - 2 * np.outer(PHI_PLUS, PHI_PLUS.conj())).max() < 1e-15


def test_choi_decohere_pattern():
    ch = choi_of(decohere_circuit())
    expect = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
    assert np.abs(ch.choi - expect).max() < 1e-15


def test_choi_trace_gate():
    c = parse_circuit("circuit tr inputs 1\ntrace 0\nend")
    ch = choi_of(c)
    assert (ch.n_in, ch.n_out) == (1, 0)
    assert np.abs(ch.choi - np.eye(2)).max() < 1e-15


def test_kraus_unitary_channel_single_operator():
    ch = choi_of(z_circuit())
    ops = kraus_of(ch)
    assert len(ops) == 1
    z = np.diag([1.0, -1.0])
    phase = ops[0][0, 0] / z[0, 0]
    assert np.abs(ops[0] - phase * z).max() < 1e-10
    assert abs(abs(phase) - 1.0) < 1e-12


def test_kraus_decohere_projectors():
    ops = kraus_of(choi_of(decohere_circuit()))
    assert len(ops) == 2
    total = sum(np.abs(op) for op in ops)
    assert np.abs(total - np.eye(2)).max() < 1e-12


def test_mixture_of_identity_and_z_acts_like_decohere():
    ch_i = choi_of(identity_circuit())
    ch_z = choi_of(z_circuit())
    mix = channel_mix([ch_i, ch_z], [0.5, 0.5])
    # same channel as {sqrt(1/2) I, sqrt(1/2) Z}
    rng = np.random.default_rng(3)
    rho = random_density(rng, 2)
    z = np.diag([1.0, -1.0])
    expect = 0.5 * rho + 0.5 * z @ rho @ z
    assert np.abs(channel_apply(mix, rho) - expect).max() < 1e-12
    rebuilt = sum(a @ rho @ a.conj().T for a in mix.kraus)
    assert np.abs(rebuilt - expect).max() < 1e-12


def test_kraus_rejects_negative_choi():
    bad = Channel(1, 1, -np.eye(4, dtype=complex), ())
    with pytest.raises(NotCompletelyPositiveError):
        kraus_of(bad)


def test_adjoint_identity_and_unitality():
    rng = np.random.default_rng(4)
    ch = choi_of(identity_circuit())
    m = random_hermitian(rng, 2)
    assert np.abs(adjoint_apply(ch, m) - m).max() < 1e-12
    c = random_circuit(rng, 2, 5)
    ch2 = choi_of(c)
    eye_out = np.eye(ch2.dim_out, dtype=complex)
    assert np.abs(adjoint_apply(ch2, eye_out) - np.eye(ch2.dim_in)).max() < 1e-9


def test_adjoint_duality():
    rng = np.random.default_rng(5)
    for _ in range(10):
        c = random_circuit(rng, 1, 5)
        ch = choi_of(c)
        rho = random_density(rng, ch.dim_in)
        m = random_hermitian(rng, ch.dim_out)
        lhs = np.trace(m @ channel_apply(ch, rho))
        rhs = np.trace(adjoint_apply(ch, m) @ rho)
        assert abs(lhs - rhs) < 1e-10


def test_random_circuits_yield_admissible_channels():
    rng = np.random.default_rng(6)
    for _ in range(200):
        c = random_circuit(rng, int(rng.integers(1, 3)), int(rng.integers(0, 9)), max_live=4)
        ch = choi_of(c)  # choi_of itself asserts PSD + trace preservation
        tp = partial_trace(ch.choi, [ch.dim_out, ch.dim_in], [1])
        assert np.abs(tp - np.eye(ch.dim_in)).max() < 1e-9


def test_apply_agrees_with_choi_reconstruction():
    rng = np.random.default_rng(7)
    for _ in range(20):
        c = random_circuit(rng, 1, 6)
        ch = choi_of(c)
        rho = random_density(rng, 2)
        assert np.abs(apply(c, rho) - channel_apply(ch, rho)).max() < 1e-10


def test_apply_extended_reference_growth_consistency():
    rng = np.random.default_rng(8)
    c = random_circuit(rng, 1, 4)
    rho = random_density(rng, 2)
    sigma = random_density(rng, 2)
    joint = np.kron(rho, sigma)
    small = apply_extended(c, rho, 0)
    big = apply_extended(c, joint, 1)
    dims = [2**c.n_out, 2]
    assert np.abs(partial_trace(big, dims, [0]) - small).max() < 1e-10


def test_trace_preservation_gives_unit_output_tnorm():
    rng = np.random.default_rng(9)
    for _ in range(10):
        c = random_circuit(rng, 1, 5)
        ch = choi_of(c)
        psi = random_state(rng, 2 * ch.dim_in)
        from qcdist.simulate import channel_apply_ext

        out = channel_apply_ext(ch, np.outer(psi, psi.conj()), 2)
        assert abs(trace_norm(out) - 1.0) < 1e-9


def test_density_json_roundtrip():
    rng = np.random.default_rng(10)
    rho = random_density(rng, 4)
    import json

    from qcdist.jsonutil import dumps

    back = density_from_json(json.loads(dumps(density_to_json(rho))))
    assert np.array_equal(back, rho)


def test_channel_from_choi_validates():
    ch = channel_from_choi(1, 1, np.diag([1.0, 0, 0, 1.0]).astype(complex))
    assert len(ch.kraus) == 2
    with pytest.raises(ValueError, match="admissible"):
        channel_from_choi(1, 1, np.eye(4, dtype=complex))  # not trace preserving
