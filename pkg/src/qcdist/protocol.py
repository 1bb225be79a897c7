"""The blind taste-test: simulate the distinguishability protocol exactly.

One round: the prover prepares a joint state, sends the circuit-input half
to the verifier; the verifier applies Q_i for a uniform i in {0, 1} and
returns the output; the prover measures output + private space with a
binary projector and answers j; the verifier accepts iff i = j.

Acceptance probabilities are computed exactly on density matrices (the
protocol's final message is a single classical bit, so intermediate
collapse is unobservable); Monte Carlo sampling exists to exercise the
operational reading.  Trial t draws from the PCG64 stream spawned as
SeedSequence(seed, spawn_key=(t,)), so trials are independent and the
tally is reproducible for any execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2

import numpy as np

from .circuits import Circuit
from .distances import DiamondWitness, OptimizerConfig, diamond_norm, trace_norm
from .linalg import as_matrix, as_state, dag
from .simulate import apply_extended, choi_of


@dataclass(eq=False)
class ProverStrategy:
    """Input state on circuit-input (x) private space, plus a binary
    measurement on circuit-output (x) private space (outcome 0 means
    "the verifier applied Q0")."""

    psi: np.ndarray
    measurement: np.ndarray

    def __post_init__(self):
        self.psi = as_state(self.psi)
        self.measurement = as_matrix(self.measurement)
        norm = float(np.linalg.norm(self.psi))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"prover state norm {norm} differs from 1")
        m = self.measurement
        if float(np.abs(m @ m - m).max()) > 1e-9 or float(np.abs(m - dag(m)).max()) > 1e-9:
            raise ValueError("prover measurement is not an orthogonal projector")


@dataclass(eq=False)
class ProtocolResult:
    p_accept_exact: float
    trials: int | None
    accepts: int | None
    estimate: float | None
    dnorm_witness_value: float
    seed: int | None = None


def _private_qubits(strat: ProverStrategy, c: Circuit) -> int:
    total = int(log2(strat.psi.size))
    if 2**total != strat.psi.size:
        raise ValueError(f"prover state dimension {strat.psi.size} is not a power of 2")
    priv = total - c.n_in
    if priv < 0:
        raise ValueError(
            f"prover state on {total} qubits is too small for {c.n_in} circuit inputs"
        )
    dout = 2 ** (c.n_out + priv)
    if strat.measurement.shape != (dout, dout):
        raise ValueError(
            f"measurement is {strat.measurement.shape}, expected side {dout} "
            f"(output {c.n_out} + private {priv} qubits)"
        )
    return priv


def optimal_prover(q0: Circuit, q1: Circuit, cfg: OptimizerConfig | None = None) -> ProverStrategy:
    """The strategy built from the diamond-norm witness.

    The prover prepares the witness input and measures with the Helstrom
    projector for the two possible outputs, attaining acceptance
    1/2 + 1/4 ||Q0 - Q1||_diamond.
    """
    witness = optimal_prover_witness(q0, q1, cfg)[1]
    return ProverStrategy(psi=witness.psi, measurement=witness.measurement)


def optimal_prover_witness(
    q0: Circuit, q1: Circuit, cfg: OptimizerConfig | None = None
) -> tuple[ProverStrategy, DiamondWitness]:
    """Optimal strategy together with the underlying diamond-norm witness."""
    witness = diamond_norm(choi_of(q0), choi_of(q1), cfg)
    return ProverStrategy(psi=witness.psi, measurement=witness.measurement), witness


def _output_pair(q0: Circuit, q1: Circuit, strat: ProverStrategy):
    priv = _private_qubits(strat, q0)
    rho_in = np.outer(strat.psi, strat.psi.conj())
    rho0 = apply_extended(q0, rho_in, priv)
    rho1 = apply_extended(q1, rho_in, priv)
    return rho0, rho1


def acceptance_probability(q0: Circuit, q1: Circuit, strat: ProverStrategy) -> float:
    """Exact acceptance probability of the strategy in one protocol round."""
    if (q0.n_in, q0.n_out) != (q1.n_in, q1.n_out):
        raise ValueError("circuits disagree on type")
    rho0, rho1 = _output_pair(q0, q1, strat)
    m = strat.measurement
    p = 0.5 * np.real(np.trace(m @ rho0)) + 0.5 * (1.0 - np.real(np.trace(m @ rho1)))
    return float(min(max(p, 0.0), 1.0))


def run_protocol(
    q0: Circuit,
    q1: Circuit,
    strat: ProverStrategy,
    trials: int,
    seed: int,
) -> ProtocolResult:
    """Exact acceptance probability plus a Monte Carlo tally.

    Per trial the verifier's coin and the prover's outcome are drawn from
    that trial's own random stream; outcome probabilities tr(M rho_i) are
    computed exactly rather than by simulating collapse.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if (q0.n_in, q0.n_out) != (q1.n_in, q1.n_out):
        raise ValueError("circuits disagree on type")
    rho0, rho1 = _output_pair(q0, q1, strat)
    m = strat.measurement
    p_answer0 = (
        float(np.real(np.trace(m @ rho0))),
        float(np.real(np.trace(m @ rho1))),
    )
    p_exact = 0.5 * p_answer0[0] + 0.5 * (1.0 - p_answer0[1])
    accepts = 0
    root = np.random.SeedSequence(seed)
    for child in root.spawn(trials):
        rng = np.random.Generator(np.random.PCG64(child))
        i = int(rng.integers(0, 2))
        j = 0 if rng.random() < p_answer0[i] else 1
        accepts += int(i == j)
    return ProtocolResult(
        p_accept_exact=float(min(max(p_exact, 0.0), 1.0)),
        trials=trials,
        accepts=accepts,
        estimate=accepts / trials,
        dnorm_witness_value=trace_norm(rho0 - rho1),
        seed=seed,
    )


def result_to_json(res: ProtocolResult) -> dict:
    return {
        "p_accept_exact": float(res.p_accept_exact),
        "trials": res.trials,
        "accepts": res.accepts,
        "estimate": None if res.estimate is None else float(res.estimate),
        "dnorm_witness_value": float(res.dnorm_witness_value),
        "seed": res.seed,
    }
