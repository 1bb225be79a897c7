"""Exact circuit action on density matrices and superoperator extraction.

Wires are qubits with wire 0 most significant in the computational basis.
The Choi matrix convention is J(Phi) = sum_ij Phi(|i><j|) (x) |i><j| with
the output factor first and no normalization, so a trace-preserving map has
tr_out J = I_in and an admissible map has J >= 0.  Kraus operators are
recovered from scaled Choi eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, replay_liveness
from .linalg import (
    DIM_CAP,
    TOL_HERM,
    TOL_PSD,
    TOL_TRACE,
    SizeCapError,
    as_matrix,
    dag,
    herm_defect,
    partial_trace,
    spectral,
)
from . import linalg

#: Choi eigenvalues below this are dropped during Kraus extraction
#: (rank deflation for numerically rank-deficient Choi matrices).
KRAUS_EIG_CUTOFF = 1e-12

TOL_CHANNEL = 1e-9

_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)


class NotCompletelyPositiveError(ValueError):
    """Choi matrix has a negative eigenvalue beyond tolerance."""


class InternalConsistencyError(RuntimeError):
    """A simulator-derived object violated an invariant it must satisfy."""


def require_density(rho, tol_herm=TOL_HERM, tol_trace=TOL_TRACE, tol_psd=TOL_PSD) -> np.ndarray:
    """Validate Hermiticity, unit trace, and positivity of a density matrix."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    d = herm_defect(rho)
    if d > tol_herm:
        raise ValueError(f"density matrix not Hermitian: defect {d:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol_trace:
        raise ValueError(f"density matrix trace {tr} differs from 1")
    wmin = float(np.linalg.eigvalsh((rho + dag(rho)) / 2).min())
    if wmin < -tol_psd:
        raise ValueError(f"density matrix has eigenvalue {wmin:.3e} < -{tol_psd:.1e}")
    return rho


def _apply_unitary(rho: np.ndarray, u: np.ndarray, wires, n: int) -> np.ndarray:
    """Conjugate rho (n qubits) by u acting on the given wires."""
    a = len(wires)
    dim = 2**n
    t = rho.reshape([2] * (2 * n))
    u_t = u.reshape([2] * (2 * a))
    rows = list(wires)
    t = np.tensordot(u_t, t, axes=(list(range(a, 2 * a)), rows))
    t = np.moveaxis(t, list(range(a)), rows)
    cols = [n + w for w in wires]
    t = np.tensordot(u_t.conj(), t, axes=(list(range(a, 2 * a)), cols))
    t = np.moveaxis(t, list(range(a)), cols)
    return t.reshape(dim, dim)


def _decohere(rho: np.ndarray, wire: int, n: int) -> np.ndarray:
    """Zero every entry whose row and column disagree on the wire's bit."""
    bits = (np.arange(2**n) >> (n - 1 - wire)) & 1
    return np.where(bits[:, None] == bits[None, :], rho, 0.0)


def _insert_zero_qubit(rho: np.ndarray, pos: int, n: int) -> np.ndarray:
    """Tensor in a fresh |0> qubit and move it to qubit position ``pos``."""
    out = np.kron(rho, _P0)
    m = n + 1
    if pos == m - 1:
        return out
    t = out.reshape([2] * (2 * m))
    t = np.moveaxis(t, [m - 1, 2 * m - 1], [pos, m + pos])
    return t.reshape(2**m, 2**m)


def simulate(c: Circuit, rho: np.ndarray, ref_qubits: int = 0, cap: int = DIM_CAP) -> np.ndarray:
    """Run ``c`` on the first n_in qubits of ``rho``, identity on the rest.

    Pure linear action: works for any operator input of the right size, not
    only density matrices.
    """
    replay_liveness(c, cap=cap)
    rho = as_matrix(rho)
    live = c.n_in
    total = live + ref_qubits
    if rho.shape != (2**total, 2**total):
        raise ValueError(
            f"input operator is {rho.shape}, expected side {2**total} "
            f"for {c.n_in} input wires and {ref_qubits} reference qubits"
        )
    max_wires = int(math.log2(cap))
    for g in c.gates:
        if g.kind == "unitary":
            rho = _apply_unitary(rho, g.matrix, g.wires, total)
        elif g.kind == "decohere":
            rho = _decohere(rho, g.wires[0], total)
        elif g.kind == "ancilla":
            if total + 1 > max_wires:
                raise SizeCapError(
                    f"{total + 1} qubits mid-circuit exceed the cap of {max_wires}"
                )
            rho = _insert_zero_qubit(rho, live, total)
            live += 1
            total += 1
        elif g.kind == "trace":
            w = g.wires[0]
            rho = partial_trace(rho, [2] * total, [q for q in range(total) if q != w])
            live -= 1
            total -= 1
        else:
            raise ValueError(f"unknown gate kind {g.kind!r}")
    return rho


def apply(c: Circuit, rho: np.ndarray, cap: int = DIM_CAP) -> np.ndarray:
    """Exact action of the circuit's channel on a density matrix."""
    rho = require_density(rho)
    if rho.shape[0] != 2**c.n_in:
        raise ValueError(
            f"density matrix side {rho.shape[0]} does not match {c.n_in} input wires"
        )
    return simulate(c, rho, 0, cap)


def apply_extended(c: Circuit, rho: np.ndarray, ref_qubits: int, cap: int = DIM_CAP) -> np.ndarray:
    """(Q (x) I)(rho): the circuit on the first n_in qubits, reference untouched."""
    rho = require_density(rho)
    if ref_qubits < 0:
        raise ValueError("ref_qubits must be nonnegative")
    if rho.shape[0] != 2 ** (c.n_in + ref_qubits):
        raise ValueError(
            f"density matrix side {rho.shape[0]} does not match "
            f"{c.n_in} input wires plus {ref_qubits} reference qubits"
        )
    return simulate(c, rho, ref_qubits, cap)


@dataclass(eq=False)
class Channel:
    """Concrete superoperator: Choi matrix plus derived Kraus operators."""

    n_in: int
    n_out: int
    choi: np.ndarray
    kraus: tuple[np.ndarray, ...]

    @property
    def dim_in(self) -> int:
        return 2**self.n_in

    @property
    def dim_out(self) -> int:
        return 2**self.n_out


def _choi_to_kraus(choi: np.ndarray, n_in: int, n_out: int, tol_cp: float = TOL_PSD):
    din, dout = 2**n_in, 2**n_out
    w, v = spectral(choi)
    if w[-1] < -tol_cp:
        raise NotCompletelyPositiveError(
            f"Choi matrix has eigenvalue {w[-1]:.3e}; the map is not completely positive"
        )
    ops = []
    for i in range(len(w)):
        if w[i] > KRAUS_EIG_CUTOFF:
            ops.append(math.sqrt(w[i]) * v[:, i].reshape(dout, din))
    return tuple(ops)


def _choi_from_kraus(kraus, n_in: int, n_out: int) -> np.ndarray:
    d = 2 ** (n_in + n_out)
    j = np.zeros((d, d), dtype=np.complex128)
    for a in kraus:
        vec = a.reshape(-1)
        j += np.outer(vec, vec.conj())
    return j


def _check_channel(ch: Channel, tol: float = TOL_CHANNEL) -> list[str]:
    problems = []
    d = herm_defect(ch.choi)
    if d > tol:
        problems.append(f"Choi not Hermitian: defect {d:.3e}")
    else:
        wmin = float(np.linalg.eigvalsh((ch.choi + dag(ch.choi)) / 2).min())
        if wmin < -tol:
            problems.append(f"Choi eigenvalue {wmin:.3e}: not completely positive")
    tp = partial_trace(ch.choi, [ch.dim_out, ch.dim_in], [1])
    tp_defect = float(np.abs(tp - np.eye(ch.dim_in)).max())
    if tp_defect > tol:
        problems.append(f"not trace preserving: tr_out(choi) deviates by {tp_defect:.3e}")
    ksum = sum(dag(a) @ a for a in ch.kraus) if ch.kraus else np.zeros((ch.dim_in,) * 2)
    ksum_defect = float(np.abs(ksum - np.eye(ch.dim_in)).max())
    if ksum_defect > tol:
        problems.append(f"Kraus completeness deviates by {ksum_defect:.3e}")
    rebuild = _choi_from_kraus(ch.kraus, ch.n_in, ch.n_out)
    rb_defect = float(np.abs(rebuild - ch.choi).max())
    if rb_defect > tol:
        problems.append(f"Kraus rebuild of Choi deviates by {rb_defect:.3e}")
    return problems


def channel_from_choi(n_in: int, n_out: int, choi) -> Channel:
    """Build a Channel from a Choi matrix, validating admissibility."""
    choi = as_matrix(choi)
    d = 2 ** (n_in + n_out)
    if choi.shape != (d, d):
        raise ValueError(f"Choi matrix is {choi.shape}, expected {(d, d)}")
    ch = Channel(n_in, n_out, choi, _choi_to_kraus(choi, n_in, n_out))
    problems = _check_channel(ch)
    if problems:
        raise ValueError("not an admissible channel: " + "; ".join(problems))
    return ch


def choi_of(c: Circuit, cap: int = DIM_CAP) -> Channel:
    """Extract the circuit's channel as a Choi matrix.

    Runs the circuit once per input basis matrix unit |i><j| with j >= i
    (the j < i blocks follow from Phi(X^dagger) = Phi(X)^dagger), which
    keeps every simulation at the circuit's own width instead of doubling
    it with reference qubits.  The result is checked for complete
    positivity and trace preservation; a failure beyond tolerance is a
    simulator bug, not a property of the circuit, and raises
    InternalConsistencyError.
    """
    n = c.n_in
    m = c.n_out
    din = 2**n
    dout = 2**m
    linalg.check_cap(dout * din, cap, "Choi matrix")
    blocks = np.zeros((dout, din, dout, din), dtype=np.complex128)
    for i in range(din):
        for j in range(i, din):
            unit = np.zeros((din, din), dtype=np.complex128)
            unit[i, j] = 1.0
            out = simulate(c, unit, 0, cap)
            blocks[:, i, :, j] = out
            if j != i:
                blocks[:, j, :, i] = dag(out)
    choi = blocks.reshape(dout * din, dout * din)
    choi = (choi + dag(choi)) / 2
    ch = Channel(n, m, choi, _choi_to_kraus(choi, n, m))
    problems = _check_channel(ch)
    if problems:
        raise InternalConsistencyError(
            f"circuit {c.name!r} produced an inadmissible channel: " + "; ".join(problems)
        )
    return ch


def kraus_of(ch: Channel) -> list[np.ndarray]:
    """Kraus operators from scaled eigenvectors of the Choi matrix."""
    return list(_choi_to_kraus(ch.choi, ch.n_in, ch.n_out))


def channel_apply(ch: Channel, x) -> np.ndarray:
    """Phi(x) = sum_i A_i x A_i^dagger; linear, defined for any operator x."""
    x = as_matrix(x)
    if x.shape != (ch.dim_in, ch.dim_in):
        raise ValueError(f"operator is {x.shape}, channel input dim is {ch.dim_in}")
    out = np.zeros((ch.dim_out, ch.dim_out), dtype=np.complex128)
    for a in ch.kraus:
        out += a @ x @ dag(a)
    return out


def channel_apply_ext(ch: Channel, x, ref_dim: int) -> np.ndarray:
    """(Phi (x) I_ref)(x) for an operator on input (x) reference."""
    x = as_matrix(x)
    side = ch.dim_in * ref_dim
    if x.shape != (side, side):
        raise ValueError(f"operator is {x.shape}, expected side {side}")
    if not ch.kraus:
        return np.zeros((ch.dim_out * ref_dim,) * 2, dtype=np.complex128)
    k = np.stack(ch.kraus)
    x4 = x.reshape(ch.dim_in, ref_dim, ch.dim_in, ref_dim)
    out = np.einsum("koi,irjs,kpj->orps", k, x4, k.conj(), optimize=True)
    return out.reshape(ch.dim_out * ref_dim, ch.dim_out * ref_dim)


def adjoint_apply(ch: Channel, m) -> np.ndarray:
    """Dual action Phi^dagger(M) = sum_i A_i^dagger M A_i (unital for TP maps)."""
    m = as_matrix(m)
    if m.shape != (ch.dim_out, ch.dim_out):
        raise ValueError(f"operator is {m.shape}, channel output dim is {ch.dim_out}")
    out = np.zeros((ch.dim_in, ch.dim_in), dtype=np.complex128)
    for a in ch.kraus:
        out += dag(a) @ m @ a
    return out


def adjoint_apply_ext(ch: Channel, m, ref_dim: int) -> np.ndarray:
    """(Phi^dagger (x) I_ref)(M) for an operator on output (x) reference."""
    m = as_matrix(m)
    side = ch.dim_out * ref_dim
    if m.shape != (side, side):
        raise ValueError(f"operator is {m.shape}, expected side {side}")
    if not ch.kraus:
        return np.zeros((ch.dim_in * ref_dim,) * 2, dtype=np.complex128)
    k = np.stack(ch.kraus)
    m4 = m.reshape(ch.dim_out, ref_dim, ch.dim_out, ref_dim)
    out = np.einsum("koi,orps,kpj->irjs", k.conj(), m4, k, optimize=True)
    return out.reshape(ch.dim_in * ref_dim, ch.dim_in * ref_dim)


def channel_tensor(a: Channel, b: Channel) -> Channel:
    """Parallel composition Phi (x) Psi (first channel on the leading qubits)."""
    kraus = tuple(np.kron(ka, kb) for ka in a.kraus for kb in b.kraus)
    n_in = a.n_in + b.n_in
    n_out = a.n_out + b.n_out
    linalg.check_cap(2 ** (n_in + n_out), context="tensored Choi")
    return Channel(n_in, n_out, _choi_from_kraus(kraus, n_in, n_out), kraus)


def channel_mix(channels, weights) -> Channel:
    """Convex mixture of channels of equal type."""
    channels = list(channels)
    weights = [float(w) for w in weights]
    if len(channels) != len(weights) or not channels:
        raise ValueError("need equally many channels and weights")
    if abs(sum(weights) - 1.0) > TOL_TRACE or any(w < 0 for w in weights):
        raise ValueError(f"weights must be a distribution, got {weights}")
    n_in, n_out = channels[0].n_in, channels[0].n_out
    if any(ch.n_in != n_in or ch.n_out != n_out for ch in channels):
        raise ValueError("mixed channels must agree on type")
    choi = sum(w * ch.choi for w, ch in zip(weights, channels))
    return Channel(n_in, n_out, choi, _choi_to_kraus(choi, n_in, n_out))


def density_to_json(rho) -> dict:
    """Matrix JSON with a ``qubits`` wrapper field."""
    rho = as_matrix(rho)
    n = int(round(math.log2(rho.shape[0])))
    if 2**n != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"matrix of shape {rho.shape} is not a qubit operator")
    out = {"qubits": n}
    out.update(linalg.matrix_to_json(rho))
    return out


def density_from_json(obj: dict, cap: int = DIM_CAP) -> np.ndarray:
    m = linalg.matrix_from_json(obj, cap=cap)
    n = int(obj.get("qubits", -1))
    if m.shape != (2**n, 2**n):
        raise ValueError(
            f"matrix shape {m.shape} does not match declared qubit count {n}"
        )
    return m
