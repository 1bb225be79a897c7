"""Mixed-state quantum circuit IR: data model, text format, validation.

A circuit is an ordered gate list over live wires.  Wires are numbered by
liveness order: an ``ancilla`` gate appends a fresh |0> wire at the highest
index, a ``trace`` gate removes its wire and shifts higher indices down by
one, and ``decohere`` applies the single-qubit channel
D(s) = |0><0|s|0><0| + |1><1|s|1><1| in place.  Unitary gates carry exact
explicit matrices of arity <= 3; the named gates H, X, Z, T, CNOT, CZ are
parser sugar for hard-coded matrices.

Text format (one construct per line, '#' starts a comment):

    circuit <name> inputs <n>
    gate <H|X|Z|T|CNOT|CZ> <wire...>
    unitary <arity> <wire...> <4^arity entries as re,im pairs, row-major>
    ancilla
    trace <wire>
    decohere <wire>
    end

Instances pair two circuits of equal type with promise constants, and are
stored as JSON: {"q0": <text>, "q1": <text>, "kind": "CI"|"QCD", "a": .., "b": ..}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import DIM_CAP, SizeCapError, as_matrix, dag
from .jsonutil import format_float

TOL_UNITARY = 1e-9
UNITARY_ARITY_CAP = 3

_SQ2 = 1.0 / math.sqrt(2.0)

STANDARD_GATES: dict[str, np.ndarray] = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "T": np.array([[1, 0], [0, complex(_SQ2, _SQ2)]], dtype=np.complex128),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=np.complex128,
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(np.complex128),
}


class CircuitError(ValueError):
    """Base class for circuit IR failures."""


class CircuitParseError(CircuitError):
    """Syntax or structural failure while parsing circuit text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LivenessError(CircuitError):
    """A gate referenced a wire that is not live at that point."""

    def __init__(self, message: str, wire: int | None = None, line: int | None = None):
        self.wire = wire
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnitarityError(CircuitError):
    """A unitary gate's matrix fails U^dagger U = I within tolerance."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Gate:
    """One circuit construct.

    kind is one of "unitary", "ancilla", "trace", "decohere".  Only
    unitary gates carry a matrix; ``label`` remembers named-gate sugar so
    serialization can round-trip the readable form.
    """

    kind: str
    wires: tuple[int, ...] = ()
    matrix: np.ndarray | None = None
    label: str | None = None

    @property
    def arity(self) -> int:
        return len(self.wires)


def unitary_gate(matrix, wires, label: str | None = None) -> Gate:
    """Exact unitary gate on ``wires`` (first listed wire is most significant)."""
    m = as_matrix(matrix)
    wires = tuple(int(w) for w in wires)
    a = len(wires)
    if a < 1 or a > UNITARY_ARITY_CAP:
        raise CircuitError(f"unitary arity {a} outside 1..{UNITARY_ARITY_CAP}")
    if m.shape != (2**a, 2**a):
        raise CircuitError(f"unitary on {a} wires must be {2**a}x{2**a}, got {m.shape}")
    if len(set(wires)) != a:
        raise CircuitError(f"unitary wires must be distinct, got {wires}")
    defect = unitarity_defect(m)
    if defect > TOL_UNITARY:
        raise UnitarityError(f"matrix is not unitary: defect {defect:.3e}")
    return Gate("unitary", wires, m, label)


def named_gate(name: str, wires) -> Gate:
    if name not in STANDARD_GATES:
        raise CircuitError(f"unknown standard gate {name!r}")
    return unitary_gate(STANDARD_GATES[name], wires, label=name)


def ancilla_gate() -> Gate:
    return Gate("ancilla")


def trace_gate(wire: int) -> Gate:
    return Gate("trace", (int(wire),))


def decohere_gate(wire: int) -> Gate:
    return Gate("decohere", (int(wire),))


def unitarity_defect(m: np.ndarray) -> float:
    return float(np.linalg.norm(dag(m) @ m - np.eye(m.shape[0])))


@dataclass(eq=False)
class Circuit:
    """A named gate sequence on ``n_in`` input wires."""

    name: str
    n_in: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.gates = tuple(self.gates)
        if self.n_in < 0:
            raise CircuitError(f"n_in must be nonnegative, got {self.n_in}")

    @property
    def n_out(self) -> int:
        """Output wire count; raises LivenessError if the gate list is invalid."""
        return replay_liveness(self)[-1]


def replay_liveness(c: Circuit, cap: int = DIM_CAP, lines: list[int] | None = None) -> list[int]:
    """Walk the gate list tracking the live wire count.

    Returns the live count after each gate (ending with n_out), raising
    LivenessError on the first out-of-range wire reference.  ``lines``
    optionally maps gate index -> source line for error messages.
    """
    live = c.n_in
    counts = [live]
    max_wires = int(math.log2(cap))
    if live > max_wires:
        raise SizeCapError(
            f"{live} input wires exceed the cap of {max_wires} (2^{max_wires} = {cap})"
        )
    for idx, g in enumerate(c.gates):
        line = lines[idx] if lines is not None else None
        where = f"gate {idx + 1}" if line is None else "gate"
        for w in g.wires:
            if w < 0 or w >= live:
                raise LivenessError(
                    f"{where} references wire {w} but only wires 0..{live - 1} are live",
                    wire=w,
                    line=line,
                )
        if g.kind == "ancilla":
            live += 1
            if live > max_wires:
                raise SizeCapError(
                    f"{live} live wires exceed the cap of {max_wires} (2^{max_wires} = {cap})"
                )
        elif g.kind == "trace":
            live -= 1
        counts.append(live)
    return counts


def validate(c: Circuit, cap: int = DIM_CAP) -> list[str]:
    """Structural validation report; empty iff the circuit is valid.

    Checks gate shapes, wire distinctness, unitarity, liveness bookkeeping,
    and the dimension cap.  Never raises; admissibility of the realized
    channel is checked downstream via the Choi matrix.
    """
    report: list[str] = []
    if c.n_in < 0:
        report.append(f"n_in is negative: {c.n_in}")
        return report
    live = c.n_in
    max_wires = int(math.log2(cap))
    if live > max_wires:
        report.append(f"{live} input wires exceed the cap of {max_wires}")
        return report
    for idx, g in enumerate(c.gates):
        tag = f"gate {idx + 1} ({g.kind})"
        if g.kind == "unitary":
            a = g.arity
            if a < 1 or a > UNITARY_ARITY_CAP:
                report.append(f"{tag}: arity {a} outside 1..{UNITARY_ARITY_CAP}")
                continue
            if g.matrix is None or g.matrix.shape != (2**a, 2**a):
                report.append(f"{tag}: matrix shape does not match arity {a}")
                continue
            if len(set(g.wires)) != a:
                report.append(f"{tag}: wires {g.wires} are not distinct")
            defect = unitarity_defect(g.matrix)
            if defect > TOL_UNITARY:
                report.append(f"{tag}: unitarity defect {defect:.3e} > {TOL_UNITARY:.1e}")
        elif g.kind == "ancilla":
            if g.wires:
                report.append(f"{tag}: ancilla takes no wires, got {g.wires}")
        elif g.kind in ("trace", "decohere"):
            if len(g.wires) != 1:
                report.append(f"{tag}: takes exactly one wire, got {g.wires}")
        else:
            report.append(f"{tag}: unknown gate kind {g.kind!r}")
            continue
        bad = [w for w in g.wires if w < 0 or w >= live]
        if bad:
            report.append(
                f"{tag}: references wire {bad[0]} but only wires 0..{live - 1} are live"
            )
            return report
        if g.kind == "ancilla":
            live += 1
            if live > max_wires:
                report.append(f"{tag}: {live} live wires exceed the cap of {max_wires}")
                return report
        elif g.kind == "trace":
            live -= 1
    return report


def parse_circuit(text: str, cap: int = DIM_CAP) -> Circuit:
    """Parse the line-based circuit format; errors carry line numbers."""
    header: tuple[str, int] | None = None
    gates: list[Gate] = []
    lines: list[int] = []
    ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if ended:
            raise CircuitParseError("content after 'end'", lineno)
        tokens = stripped.split()
        if header is None:
            if len(tokens) != 4 or tokens[0] != "circuit" or tokens[2] != "inputs":
                raise CircuitParseError(
                    "expected 'circuit <name> inputs <n>'", lineno
                )
            try:
                n_in = int(tokens[3])
            except ValueError:
                raise CircuitParseError(f"bad input count {tokens[3]!r}", lineno)
            if n_in < 0:
                raise CircuitParseError(f"negative input count {n_in}", lineno)
            header = (tokens[1], n_in)
            continue
        if tokens[0] == "end":
            if len(tokens) != 1:
                raise CircuitParseError("unexpected tokens after 'end'", lineno)
            ended = True
            continue
        gates.append(_parse_gate_line(tokens, lineno))
        lines.append(lineno)
    if header is None:
        raise CircuitParseError("empty circuit text", None)
    if not ended:
        raise CircuitParseError("missing 'end'", None)
    c = Circuit(header[0], header[1], tuple(gates))
    replay_liveness(c, cap=cap, lines=lines)
    return c


def _parse_gate_line(tokens: list[str], lineno: int) -> Gate:
    op = tokens[0]
    try:
        if op == "gate":
            if len(tokens) < 3:
                raise CircuitParseError("expected 'gate <name> <wire...>'", lineno)
            name = tokens[1]
            if name not in STANDARD_GATES:
                raise CircuitParseError(f"unknown standard gate {name!r}", lineno)
            wires = [int(t) for t in tokens[2:]]
            return named_gate(name, wires)
        if op == "unitary":
            if len(tokens) < 2:
                raise CircuitParseError("expected 'unitary <arity> <wire...> <entries>'", lineno)
            arity = int(tokens[1])
            if arity < 1 or arity > UNITARY_ARITY_CAP:
                raise CircuitParseError(
                    f"unitary arity {arity} outside 1..{UNITARY_ARITY_CAP}", lineno
                )
            wires = [int(t) for t in tokens[2 : 2 + arity]]
            if len(wires) != arity:
                raise CircuitParseError("fewer wires than arity", lineno)
            entry_tokens = tokens[2 + arity :]
            dim = 2**arity
            if len(entry_tokens) != dim * dim:
                raise CircuitParseError(
                    f"expected {dim * dim} matrix entries, got {len(entry_tokens)}",
                    lineno,
                )
            entries = []
            for tok in entry_tokens:
                re_s, sep, im_s = tok.partition(",")
                if not sep:
                    raise CircuitParseError(f"bad complex entry {tok!r}", lineno)
                entries.append(complex(float(re_s), float(im_s)))
            m = np.array(entries, dtype=np.complex128).reshape(dim, dim)
            return unitary_gate(m, wires)
        if op == "ancilla":
            if len(tokens) != 1:
                raise CircuitParseError("'ancilla' takes no arguments", lineno)
            return ancilla_gate()
        if op == "trace":
            if len(tokens) != 2:
                raise CircuitParseError("expected 'trace <wire>'", lineno)
            return trace_gate(int(tokens[1]))
        if op == "decohere":
            if len(tokens) != 2:
                raise CircuitParseError("expected 'decohere <wire>'", lineno)
            return decohere_gate(int(tokens[1]))
    except CircuitParseError:
        raise
    except UnitarityError as exc:
        raise UnitarityError(str(exc), lineno) from None
    except ValueError as exc:
        raise CircuitParseError(str(exc), lineno) from None
    raise CircuitParseError(f"unknown construct {op!r}", lineno)


def serialize_circuit(c: Circuit) -> str:
    """Emit circuit text; parse(serialize(c)) is structurally equal to c.

    Unitary entries print with 17 significant digits, which round-trips
    doubles exactly.
    """
    if not c.name or any(ch.isspace() for ch in c.name):
        raise CircuitError(f"circuit name {c.name!r} is not a single token")
    out = [f"circuit {c.name} inputs {c.n_in}"]
    for g in c.gates:
        if g.kind == "unitary":
            if g.label is not None and g.label in STANDARD_GATES:
                out.append(f"gate {g.label} {' '.join(map(str, g.wires))}")
            else:
                entries = " ".join(
                    f"{format_float(z.real)},{format_float(z.imag)}"
                    for z in g.matrix.reshape(-1)
                )
                out.append(
                    f"unitary {g.arity} {' '.join(map(str, g.wires))} {entries}"
                )
        elif g.kind == "ancilla":
            out.append("ancilla")
        elif g.kind == "trace":
            out.append(f"trace {g.wires[0]}")
        elif g.kind == "decohere":
            out.append(f"decohere {g.wires[0]}")
        else:
            raise CircuitError(f"unknown gate kind {g.kind!r}")
    out.append("end")
    return "\n".join(out) + "\n"


def circuits_equal(a: Circuit, b: Circuit) -> bool:
    """Structural equality: name, inputs, and every gate (matrices exactly)."""
    if a.name != b.name or a.n_in != b.n_in or len(a.gates) != len(b.gates):
        return False
    for ga, gb in zip(a.gates, b.gates):
        if ga.kind != gb.kind or ga.wires != gb.wires:
            return False
        if ga.kind == "unitary" and not np.array_equal(ga.matrix, gb.matrix):
            return False
    return True


@dataclass(eq=False)
class ProblemInstance:
    """A Close Images or circuit-distinguishability instance.

    Both circuits must be of the same type (n, m).  Promise constants obey
    0 <= b < a <= 1 for kind "CI" and 0 <= b < a <= 2 for kind "QCD".
    """

    q0: Circuit
    q1: Circuit
    kind: str
    a: float
    b: float

    def __post_init__(self):
        if self.kind not in ("CI", "QCD"):
            raise ValueError(f"instance kind must be 'CI' or 'QCD', got {self.kind!r}")
        t0 = (self.q0.n_in, self.q0.n_out)
        t1 = (self.q1.n_in, self.q1.n_out)
        if t0 != t1:
            raise ValueError(f"circuits disagree on type: {t0} vs {t1}")
        hi = 1.0 if self.kind == "CI" else 2.0
        if not (0.0 <= self.b < self.a <= hi):
            raise ValueError(
                f"promise constants must satisfy 0 <= b < a <= {hi}, "
                f"got a={self.a}, b={self.b}"
            )


def instance_to_json(inst: ProblemInstance) -> dict:
    return {
        "q0": serialize_circuit(inst.q0),
        "q1": serialize_circuit(inst.q1),
        "kind": inst.kind,
        "a": float(inst.a),
        "b": float(inst.b),
    }


def instance_from_json(obj: dict, cap: int = DIM_CAP) -> ProblemInstance:
    try:
        q0 = parse_circuit(obj["q0"], cap=cap)
        q1 = parse_circuit(obj["q1"], cap=cap)
        kind = obj["kind"]
        a = float(obj["a"])
        b = float(obj["b"])
    except KeyError as exc:
        raise ValueError(f"instance JSON missing field {exc}") from exc
    return ProblemInstance(q0, q1, kind, a, b)
