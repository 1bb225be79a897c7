"""Shared test utilities: random objects and standard small circuits."""

import numpy as np

from qcdist.circuits import (
    Circuit,
    ancilla_gate,
    decohere_gate,
    parse_circuit,
    trace_gate,
    unitary_gate,
)


def random_unitary(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(rng, dim):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_hermitian(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def purification(rng, rho, d_aux):
    """Random purification of rho on system (x) auxiliary."""
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    u = random_unitary(rng, d_aux)
    psi = np.zeros(rho.shape[0] * d_aux, dtype=complex)
    for i in range(rho.shape[0]):
        psi += np.sqrt(w[i]) * np.kron(v[:, i], u[:, i % d_aux])
    return psi / np.linalg.norm(psi)


def identity_circuit(name="id"):
    return parse_circuit(f"circuit {name} inputs 1\nend")


def decohere_circuit(name="dec"):
    return parse_circuit(f"circuit {name} inputs 1\ndecohere 0\nend")


def z_circuit(name="z"):
    return parse_circuit(f"circuit {name} inputs 1\ngate Z 0\nend")


def depolarizing_circuit(name="dep"):
    return parse_circuit(
        f"circuit {name} inputs 1\ntrace 0\nancilla\ngate H 0\ndecohere 0\nend"
    )


def constant_circuit(name, which):
    """Type-(1, 1) circuit whose image is the single state |0>, |1>, or |+>."""
    tail = {"zero": "", "one": "gate X 0\n", "plus": "gate H 0\n"}[which]
    return parse_circuit(f"circuit {name} inputs 1\ntrace 0\nancilla\n{tail}end")


def random_circuit(rng, n_in, n_gates, max_live=4):
    """Random valid circuit; keeps at least one live wire."""
    gates = []
    live = n_in
    for _ in range(n_gates):
        options = ["u1", "deco"]
        if live >= 2:
            options += ["u2", "trace"]
        if live < max_live:
            options.append("ancilla")
        kind = options[rng.integers(0, len(options))]
        if kind == "u1":
            gates.append(unitary_gate(random_unitary(rng, 2), (int(rng.integers(0, live)),)))
        elif kind == "u2":
            w = rng.choice(live, size=2, replace=False)
            gates.append(unitary_gate(random_unitary(rng, 4), (int(w[0]), int(w[1]))))
        elif kind == "deco":
            gates.append(decohere_gate(int(rng.integers(0, live))))
        elif kind == "ancilla":
            gates.append(ancilla_gate())
            live += 1
        else:
            gates.append(trace_gate(int(rng.integers(0, live))))
            live -= 1
    return Circuit("rand", n_in, tuple(gates))


def random_11_circuit(rng, name="q", min_ops=1, max_ops=4):
    """Random type-(1, 1) circuit mixing unitaries, decoherence, resets,
    and traced-out interactions."""
    gates = []
    for _ in range(int(rng.integers(min_ops, max_ops))):
        choice = rng.integers(0, 4)
        if choice == 0:
            gates.append(unitary_gate(random_unitary(rng, 2), (0,)))
        elif choice == 1:
            gates.append(decohere_gate(0))
        elif choice == 2:
            gates.append(trace_gate(0))
            gates.append(ancilla_gate())
            gates.append(unitary_gate(random_unitary(rng, 2), (0,)))
        else:
            gates.append(ancilla_gate())
            gates.append(unitary_gate(random_unitary(rng, 4), (0, 1)))
            gates.append(trace_gate(1))
    return Circuit(name, 1, tuple(gates))
