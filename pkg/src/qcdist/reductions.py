"""Constructive transformations between circuit pairs.

* ``controlled_join``: one unitary circuit that applies either of two
  dilations depending on a fresh control qubit.
* ``ci_to_qcd``: the reduction from closeness-of-images to channel
  distinguishability.  The joined dilation runs on control + inputs, the
  original output wires are traced, and the garbage wires (plus control)
  become the output; the second circuit additionally decoheres the control.
* ``tensor_power``: k parallel copies of each circuit.
* ``parity_mix``: uniform mixtures of r-fold tensor products with even/odd
  parity of branch choices; satisfies the exact law
  ||R0 - R1||_diamond = 2 (||Q0 - Q1||_diamond / 2)^r.
* ``polarize``: parity(r) -> tensor(s) -> parity(t) pipeline driving a
  promise gap (a, b) with 2b < a^2 to (2 - 2^-n, 2^-n), with a bound
  certificate per stage.

All emitted gates are exact explicit unitaries; nothing is approximated in
a fixed basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import (
    Circuit,
    Gate,
    ancilla_gate,
    decohere_gate,
    named_gate,
    trace_gate,
    unitary_gate,
)
from .dilation import SWAP, DilatedCircuit, dilate
from .linalg import DIM_CAP, SizeCapError


class ConstructionError(ValueError):
    """A reduction cannot be realized within the gate-arity cap."""


def _controlled(u: np.ndarray, branch: int) -> np.ndarray:
    """Block embedding: apply ``u`` when the (leading) control is ``branch``."""
    dim = u.shape[0]
    out = np.eye(2 * dim, dtype=np.complex128)
    if branch == 0:
        out[:dim, :dim] = u
    else:
        out[dim:, dim:] = u
    return out


def _phase(theta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * theta)]).astype(np.complex128)


def _global_phase(alpha: float) -> np.ndarray:
    return np.exp(1j * alpha) * np.eye(2, dtype=np.complex128)


def _cphase(theta: float) -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * theta)]).astype(np.complex128)


def _unitary_eig(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal eigen-decomposition of a unitary matrix.

    Diagonalizes the commuting Hermitian pair (X + X^dag)/2, (X - X^dag)/2i
    through a generic real combination; retries with a different mixing
    coefficient if a degeneracy collapses two distinct eigenphases.
    """
    a = (x + x.conj().T) / 2
    b = (x - x.conj().T) / 2j
    for t in (0.6180339887498949, 0.0, 1.0, 2.414213562373095, 0.1353352832366127):
        _, vecs = np.linalg.eigh(a + t * b)
        d = vecs.conj().T @ x @ vecs
        if np.abs(d - np.diag(np.diag(d))).max() < 1e-11:
            return vecs, np.diag(d)
    raise ConstructionError("failed to diagonalize a unitary gate for joining")


def _identity_like(m: np.ndarray) -> bool:
    return bool(np.abs(m - np.eye(m.shape[0])).max() == 0.0)


def _controlled_2q_gates(u: np.ndarray, branch: int, wires: tuple[int, int, int]) -> list[Gate]:
    """Exact realization of a controlled 2-qubit gate by 1- and 2-qubit gates.

    Splits the multiplexor U (+) V (with V = I, or U and I swapped for the
    other branch) as (I (x) W) Delta (I (x) T) where Delta is diagonal, then
    compiles Delta into phase, controlled-phase, and CNOT gates; the
    three-body phase term is folded into two-body terms by conjugating with
    a CNOT.  Keeping every emitted gate at arity <= 2 is what lets the
    output of one join be joined again.
    """
    c, t1, t2 = wires
    eye = np.eye(4, dtype=np.complex128)
    top, bot = (u, eye) if branch == 0 else (eye, u)
    w_mat, mu = _unitary_eig(top @ bot.conj().T)
    d = np.exp(1j * np.angle(mu) / 2)
    t_mat = np.diag(d.conj()) @ w_mat.conj().T @ top
    if (
        np.abs(w_mat @ np.diag(d) @ t_mat - top).max() > 1e-11
        or np.abs(w_mat @ np.diag(d.conj()) @ t_mat - bot).max() > 1e-11
    ):
        raise ConstructionError("multiplexor split failed to reconstruct the gate")
    gates: list[Gate] = []
    if not _identity_like(t_mat):
        gates.append(unitary_gate(t_mat, (t1, t2)))
    # Diagonal of Delta over basis (control, t1, t2): d on the 0-branch,
    # conj(d) on the 1-branch.  Interpolate the phase exponents.
    theta = np.angle(np.concatenate([d, d.conj()]))

    def th(xc, x1, x2):
        return theta[4 * xc + 2 * x1 + x2]

    alpha = th(0, 0, 0)
    beta = {c: th(1, 0, 0) - alpha, t1: th(0, 1, 0) - alpha, t2: th(0, 0, 1) - alpha}
    gamma = {
        (c, t1): th(1, 1, 0) - alpha - beta[c] - beta[t1],
        (c, t2): th(1, 0, 1) - alpha - beta[c] - beta[t2],
        (t1, t2): th(0, 1, 1) - alpha - beta[t1] - beta[t2],
    }
    omega = th(1, 1, 1) - alpha - sum(beta.values()) - sum(gamma.values())
    if alpha != 0.0:
        gates.append(unitary_gate(_global_phase(alpha), (c,)))
    for wire, angle in beta.items():
        if angle != 0.0:
            gates.append(unitary_gate(_phase(angle), (wire,)))
    for (wa, wb), angle in gamma.items():
        if angle != 0.0:
            gates.append(unitary_gate(_cphase(angle), (wa, wb)))
    if omega != 0.0:
        gates.append(named_gate("CNOT", (t1, t2)))
        gates.append(unitary_gate(_cphase(-omega / 2), (c, t2)))
        gates.append(named_gate("CNOT", (t1, t2)))
        gates.append(unitary_gate(_cphase(omega / 2), (c, t2)))
        gates.append(unitary_gate(_cphase(omega / 2), (c, t1)))
    if not _identity_like(w_mat):
        gates.append(unitary_gate(w_mat, (t1, t2)))
    return gates


def _controlled_gates(g: Gate, branch: int) -> list[Gate]:
    """Controlled version of one dilation gate (control = wire 0)."""
    shifted = tuple(w + 1 for w in g.wires)
    if g.arity == 1:
        return [unitary_gate(_controlled(g.matrix, branch), (0,) + shifted)]
    if g.arity == 2:
        return _controlled_2q_gates(g.matrix, branch, (0,) + shifted)
    raise ConstructionError(
        f"cannot control a {g.arity}-qubit gate within the arity cap of 3"
    )


def controlled_join(p0: DilatedCircuit, p1: DilatedCircuit) -> DilatedCircuit:
    """Join two dilations under a fresh control wire (wire 0).

    The result applies p0's unitary when the control is |0> and p1's when
    it is |1>.  Controlled 1-qubit gates are emitted directly; controlled
    2-qubit gates are decomposed exactly into 1- and 2-qubit gates so that
    joined circuits can be dilated and joined again; a 3-qubit source gate
    would need a 4-qubit controlled gate and is refused.  The narrower
    dilation is padded with untouched trailing wires, initialized |0> and
    classified as garbage.
    """
    if p0.n_in != p1.n_in or p0.n_out != p1.n_out:
        raise ConstructionError(
            f"dilations disagree on type: ({p0.n_in},{p0.n_out}) vs ({p1.n_in},{p1.n_out})"
        )
    n_wires = max(p0.n_wires, p1.n_wires)
    m = p0.n_out
    gates: list[Gate] = []
    for branch, p in ((0, p0), (1, p1)):
        for g in p.unitary_circuit.gates:
            gates.extend(_controlled_gates(g, branch))
    joined = Circuit("joined", 1 + n_wires, tuple(gates))
    return DilatedCircuit(
        unitary_circuit=joined,
        k=n_wires - p0.n_in,
        l=n_wires - m,
        output_wires=[0] + [1 + w for w in range(m)],
        garbage_wires=[1 + w for w in range(m, n_wires)],
    )


def ci_to_qcd(q0: Circuit, q1: Circuit) -> tuple[Circuit, Circuit]:
    """Compile a Close Images pair into a distinguishability pair.

    Output circuits have type (1 + n, 1 + l): control and original inputs
    in; control and garbage out.  The original output wires are traced
    immediately after the joined dilation, and the second circuit appends a
    decoherence gate on the control, so the channel identity
    (D (x) I) o R0 = R1 is syntactically visible.
    """
    if (q0.n_in, q0.n_out) != (q1.n_in, q1.n_out):
        raise ConstructionError("circuits disagree on type")
    joined = controlled_join(dilate(q0), dilate(q1))
    n = q0.n_in
    m = q0.n_out
    k = joined.k
    gates: list[Gate] = [ancilla_gate() for _ in range(k)]
    gates.extend(joined.unitary_circuit.gates)
    # Dilation outputs sit at wires 1..m after the control shift; each
    # trace shifts the next one down to index 1.
    gates.extend(trace_gate(1) for _ in range(m))
    r0 = Circuit("r0", 1 + n, tuple(gates))
    r1 = Circuit("r1", 1 + n, tuple(gates) + (decohere_gate(0),))
    return r0, r1


class _WireTracker:
    """Live-wire bookkeeping for compositions that interleave blocks.

    Handles are stable names for wires; the tracker translates them to the
    current live indices, appends ancillas at the top index, and shifts
    indices down across traces, mirroring the IR's liveness rules.
    """

    def __init__(self, n_in: int, cap: int = DIM_CAP):
        self.gates: list[Gate] = []
        self.pos: dict[object, int] = {i: i for i in range(n_in)}
        self.live = n_in
        self.max_wires = int(math.log2(cap))
        if n_in > self.max_wires:
            raise SizeCapError(
                f"{n_in} input wires exceed the cap of {self.max_wires}"
            )

    def ancilla(self, handle) -> None:
        if self.live + 1 > self.max_wires:
            raise SizeCapError(
                f"{self.live + 1} live wires exceed the cap of {self.max_wires}"
            )
        self.gates.append(ancilla_gate())
        self.pos[handle] = self.live
        self.live += 1

    def unitary(self, matrix, handles, label=None) -> None:
        wires = tuple(self.pos[h] for h in handles)
        self.gates.append(unitary_gate(matrix, wires, label))

    def named(self, name, handles) -> None:
        self.gates.append(named_gate(name, tuple(self.pos[h] for h in handles)))

    def decohere(self, handle) -> None:
        self.gates.append(decohere_gate(self.pos[handle]))

    def trace(self, handle) -> None:
        idx = self.pos.pop(handle)
        self.gates.append(trace_gate(idx))
        for h, p in self.pos.items():
            if p > idx:
                self.pos[h] = p - 1
        self.live -= 1

    def route_outputs(self, order) -> None:
        """Emit SWAPs so the listed handles end at wires 0, 1, 2, ..."""
        order = list(order)
        if len(order) != self.live:
            raise ValueError("output order must cover every live wire")
        for target, handle in enumerate(order):
            cur = self.pos[handle]
            if cur == target:
                continue
            other = next(h for h, p in self.pos.items() if p == target)
            self.gates.append(unitary_gate(SWAP, (target, cur)))
            self.pos[handle], self.pos[other] = target, cur


def _emit_joined_block(tracker: _WireTracker, joined: DilatedCircuit, control, block_id) -> list:
    """Instantiate a controlled-join block inside a larger composition.

    Returns the handles carrying the block's channel output, in order.
    The block's ancillas are freshly created and its garbage is traced
    before returning, so the caller only sees inputs and outputs.
    """
    n = joined.n_in - 1  # block's own channel inputs (control excluded)
    m = joined.n_out - 1
    n_dil = joined.n_wires - 1
    wire_handle = {0: control}
    for i in range(n):
        wire_handle[1 + i] = ("in", block_id, i)
    for j in range(n_dil - n):
        h = ("anc", block_id, j)
        tracker.ancilla(h)
        wire_handle[1 + n + j] = h
    for g in joined.unitary_circuit.gates:
        tracker.unitary(g.matrix, [wire_handle[w] for w in g.wires], g.label)
    # Canonical dilation layout: channel output on dilation wires 0..m-1,
    # garbage on m..n_dil-1 (all shifted by the control).
    for w in range(m, n_dil):
        tracker.trace(wire_handle[1 + w])
    return [wire_handle[1 + w] for w in range(m)]


def mix_with_parity(pairs, odd: bool, name: str, cap: int = DIM_CAP) -> Circuit:
    """Uniform mixture of branch tensor products with fixed choice parity.

    ``pairs`` is a sequence of circuit pairs; block i applies either
    pairs[i][0] or pairs[i][1].  The mixture is uniform over all branch
    strings whose parity is even (``odd=False``) or odd (``odd=True``).

    Realization: r - 1 fair classical coins are generated by
    (ancilla, H, decohere), their parity is accumulated into one extra
    wire with CNOTs (flipped once more via X in the odd variant), block i
    is the controlled join of block i's dilations driven by coin i (the
    last block by the parity wire), and every coin and garbage wire is
    traced.  Decohered controls make this exactly the stated mixture.
    """
    pairs = list(pairs)
    r = len(pairs)
    if r < 1:
        raise ConstructionError("need at least one circuit pair")
    joins = []
    for a, b in pairs:
        if (a.n_in, a.n_out) != (b.n_in, b.n_out):
            raise ConstructionError("each pair must agree on type")
        joins.append(controlled_join(dilate(a), dilate(b)))
    n_total = sum(p[0].n_in for p in pairs)
    tracker = _WireTracker(n_total, cap)
    offsets = []
    acc = 0
    for a, _ in pairs:
        offsets.append(acc)
        acc += a.n_in
    # Rename the tracker's integer input handles to block-local names.
    for i, (a, _) in enumerate(pairs):
        for j in range(a.n_in):
            tracker.pos[("in", i, j)] = tracker.pos.pop(offsets[i] + j)
    tracker.ancilla("parity")
    if odd:
        tracker.named("X", ["parity"])
    outputs = []
    for i, joined in enumerate(joins):
        if i < r - 1:
            coin = ("coin", i)
            tracker.ancilla(coin)
            tracker.named("H", [coin])
            tracker.decohere(coin)
            tracker.named("CNOT", [coin, "parity"])
            control = coin
        else:
            control = "parity"
        outputs.extend(_emit_joined_block(tracker, joined, control, i))
        if i < r - 1:
            tracker.trace(("coin", i))
    tracker.trace("parity")
    tracker.route_outputs(outputs)
    return Circuit(name, n_total, tuple(tracker.gates))


def parity_mix(q0: Circuit, q1: Circuit, r: int, cap: int = DIM_CAP) -> tuple[Circuit, Circuit]:
    """Even/odd parity mixtures of r-fold branch products of (q0, q1).

    r = 1 selects branch 0 for the even mixture and branch 1 for the odd
    one, i.e. the input pair itself; it is returned unchanged rather than
    wrapped in coin plumbing.
    """
    if r < 1:
        raise ConstructionError(f"parity order must be >= 1, got {r}")
    if r == 1:
        return q0, q1
    pairs = [(q0, q1)] * r
    return (
        mix_with_parity(pairs, odd=False, name="p0", cap=cap),
        mix_with_parity(pairs, odd=True, name="p1", cap=cap),
    )


def _tensor_copies(c: Circuit, k: int, name: str, cap: int = DIM_CAP) -> Circuit:
    """k parallel copies of c, outputs in copy-major order."""
    n = c.n_in
    tracker = _WireTracker(n * k, cap)
    for i in range(k):
        for j in range(n):
            tracker.pos[("in", i, j)] = tracker.pos.pop(i * n + j)
    locals_: list[list] = [[("in", i, j) for j in range(n)] for i in range(k)]
    fresh = 0
    for i in range(k):
        wires = locals_[i]
        for g in c.gates:
            if g.kind == "unitary":
                tracker.unitary(g.matrix, [wires[w] for w in g.wires], g.label)
            elif g.kind == "decohere":
                tracker.decohere(wires[g.wires[0]])
            elif g.kind == "ancilla":
                h = ("w", i, fresh)
                fresh += 1
                tracker.ancilla(h)
                wires.append(h)
            elif g.kind == "trace":
                tracker.trace(wires.pop(g.wires[0]))
            else:
                raise ConstructionError(f"unknown gate kind {g.kind!r}")
    outputs = [h for wires in locals_ for h in wires]
    tracker.route_outputs(outputs)
    return Circuit(name, n * k, tuple(tracker.gates))


def tensor_power(q0: Circuit, q1: Circuit, k: int, cap: int = DIM_CAP) -> tuple[Circuit, Circuit]:
    """(q0^(x)k, q1^(x)k): k parallel copies of each circuit."""
    if k < 1:
        raise ConstructionError(f"tensor power must be >= 1, got {k}")
    if k == 1:
        return q0, q1
    return (
        _tensor_copies(q0, k, "t0", cap),
        _tensor_copies(q1, k, "t1", cap),
    )


@dataclass(eq=False)
class PolarizationParams:
    """Promise constants plus the derived stage sizes of the pipeline.

    Requires 0 < b < a < 2 and 2b < a^2.  The derived sizes are
    r = ceil(log(16 n) / log(a^2 / (2 b))), s = floor((b/2)^(-r) / 4),
    t = ceil((n + 1) / 2).
    """

    n: int
    a: float
    b: float
    r: int = field(init=False)
    s: int = field(init=False)
    t: int = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"precision parameter must be >= 1, got {self.n}")
        if not (0.0 < self.b < self.a < 2.0):
            raise ValueError(f"need 0 < b < a < 2, got a={self.a}, b={self.b}")
        if not (2 * self.b < self.a**2):
            raise ValueError(f"need 2b < a^2, got a={self.a}, b={self.b}")
        # The epsilon guards keep exact integer ratios from rounding up.
        ratio = math.log(16 * self.n) / math.log(self.a**2 / (2 * self.b))
        self.r = math.ceil(ratio - 1e-9)
        self.s = math.floor((self.b / 2) ** (-self.r) / 4 + 1e-9)
        self.t = (self.n + 2) // 2


def _parity_map(x: float, r: int) -> float:
    return 2.0 * (x / 2.0) ** r


def _stage_certificates(a: float, b: float, r: int, s: int, t: int) -> list[dict]:
    yes = [a, 2.0]
    no = [0.0, b]
    stages = []
    yes = [_parity_map(yes[0], r), _parity_map(yes[1], r)]
    no = [0.0, _parity_map(no[1], r)]
    stages.append(
        {
            "stage": 1,
            "construction": "parity_mix",
            "params": {"r": r},
            "guaranteed_interval_yes": list(yes),
            "guaranteed_interval_no": list(no),
        }
    )
    yes = [2.0 - 2.0 * math.exp(-s * yes[0] ** 2 / 8.0), 2.0]
    no = [0.0, min(s * no[1], 2.0)]
    stages.append(
        {
            "stage": 2,
            "construction": "tensor_power",
            "params": {"k": s},
            "guaranteed_interval_yes": list(yes),
            "guaranteed_interval_no": list(no),
        }
    )
    yes = [_parity_map(yes[0], t), _parity_map(yes[1], t)]
    no = [0.0, _parity_map(no[1], t)]
    stages.append(
        {
            "stage": 3,
            "construction": "parity_mix",
            "params": {"r": t},
            "guaranteed_interval_yes": list(yes),
            "guaranteed_interval_no": list(no),
        }
    )
    return stages


def polarization_certificate(params: PolarizationParams, override=None) -> dict:
    """Bound certificate for the pipeline at the given (possibly overridden) sizes."""
    r, s, t = override if override is not None else (params.r, params.s, params.t)
    stages = _stage_certificates(params.a, params.b, r, s, t)
    return {
        "a": float(params.a),
        "b": float(params.b),
        "n": int(params.n),
        "r": int(r),
        "s": int(s),
        "t": int(t),
        "overridden": override is not None,
        "stages": stages,
        "final_interval_yes": stages[-1]["guaranteed_interval_yes"],
        "final_interval_no": stages[-1]["guaranteed_interval_no"],
    }


def polarize(
    q0: Circuit,
    q1: Circuit,
    params: PolarizationParams,
    override: tuple[int, int, int] | None = None,
    cap: int = DIM_CAP,
) -> tuple[Circuit, Circuit, dict]:
    """Drive the promise gap of (q0, q1) to (2 - 2^-n, 2^-n).

    Pipeline: parity_mix with r, tensor_power with s, parity_mix with t,
    matching the bound formulas stage by stage.  With the derived
    parameters the stage sizes are usually astronomical; the construction
    then refuses with a SizeCapError carrying the certificate (use
    ``override=(r, s, t)`` for desk-scale runs), never silently truncating.
    """
    cert = polarization_certificate(params, override)
    r, s, t = cert["r"], cert["s"], cert["t"]
    if min(r, s, t) < 1:
        raise ConstructionError(f"stage sizes must be >= 1, got {(r, s, t)}")
    try:
        c0, c1 = parity_mix(q0, q1, r, cap)
        c0, c1 = tensor_power(c0, c1, s, cap)
        c0, c1 = parity_mix(c0, c1, t, cap)
    except SizeCapError as exc:
        err = SizeCapError(
            f"polarization with (r, s, t) = {(r, s, t)} exceeds the size cap: {exc}; "
            "pass an explicit override for desk-scale experiments"
        )
        err.certificate = cert
        raise err from exc
    return (
        Circuit("s0", c0.n_in, c0.gates),
        Circuit("s1", c1.n_in, c1.gates),
        cert,
    )
