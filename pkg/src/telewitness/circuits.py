"""Generalized qudit gates, the singlet-preparation circuit, and the
reverse-circuit realization of the spin-zero measurement.

Gate set on a dimension-d wire (w = exp(2*pi*i/d)):

    X|k> = |k+1 mod d>        Z|k> = w^k |k>
    H|k> = (1/sqrt(d)) sum_l w^{kl} |l>
    CNOT|k,l> = |k, k+l mod d>
    PARITY|k> = (-1)^k |k>

PARITY realizes the half-power of Z needed by the preparation circuit:
diag(e^{i*pi*k}) equals the literal integer power Z^(d/2) for even d and
extends it to odd d, producing the (-1)^k singlet amplitudes either way.

Serialization: one gate per line, ``KIND wire[,wire] d``, with the kind
suffixed ``^-1`` for an inverted gate (e.g. ``X^-1 1 3``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import dagger, kron
from .spin import singlet_state

GATE_KINDS = ("X", "Z", "H", "CNOT", "PARITY")


def standard_gates(d: int) -> dict[str, np.ndarray]:
    """The five generator matrices for local dimension d."""
    d = int(d)
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    omega = np.exp(2j * np.pi / d)
    x = np.zeros((d, d), dtype=complex)
    for k in range(d):
        x[(k + 1) % d, k] = 1.0
    z = np.diag(omega ** np.arange(d))
    h = omega ** np.outer(np.arange(d), np.arange(d)) / np.sqrt(d)
    cnot = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            cnot[k * d + (k + l) % d, k * d + l] = 1.0
    parity = np.diag((-1.0 + 0j) ** np.arange(d))
    return {"X": x, "Z": z, "H": h, "CNOT": cnot, "PARITY": parity}


@dataclass(frozen=True)
class Gate:
    """A single named gate instance on one or two wires."""

    kind: str
    wires: tuple[int, ...]
    d: int
    inverse: bool = False

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        expected = 2 if self.kind == "CNOT" else 1
        if len(self.wires) != expected:
            raise ValueError(f"{self.kind} takes {expected} wire(s), got {self.wires}")

    def matrix(self) -> np.ndarray:
        m = standard_gates(self.d)[self.kind]
        return dagger(m) if self.inverse else m

    def inverted(self) -> "Gate":
        return Gate(self.kind, self.wires, self.d, not self.inverse)


@dataclass(frozen=True)
class QuditCircuit:
    """Ordered gate list on wires of equal local dimension."""

    d: int
    wire_count: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.wire_count not in (1, 2):
            raise ValueError("only one- and two-wire circuits are supported")
        for g in self.gates:
            if g.d != self.d:
                raise ValueError(f"gate dimension {g.d} != circuit dimension {self.d}")
            if any(w < 0 or w >= self.wire_count for w in g.wires):
                raise ValueError(f"gate wires {g.wires} out of range for {self.wire_count} wires")

    def inverted(self) -> "QuditCircuit":
        """Gate-wise inverse: reversed order, each gate conjugate-transposed."""
        return QuditCircuit(self.d, self.wire_count, tuple(g.inverted() for g in reversed(self.gates)))

    def unitary(self) -> np.ndarray:
        u = np.eye(self.d**self.wire_count, dtype=complex)
        for g in self.gates:
            u = _embed(g, self.wire_count) @ u
        return u


def _embed(gate: Gate, wire_count: int) -> np.ndarray:
    d = gate.d
    m = gate.matrix()
    if wire_count == 1:
        return m
    if gate.kind == "CNOT":
        if gate.wires == (0, 1):
            return m
        swap = np.zeros((d * d, d * d), dtype=complex)
        for k in range(d):
            for l in range(d):
                swap[l * d + k, k * d + l] = 1.0
        return swap @ m @ swap
    if gate.wires == (0,):
        return kron(m, np.eye(d))
    return kron(np.eye(d), m)


def apply_circuit(circuit: QuditCircuit, state: np.ndarray) -> np.ndarray:
    """Apply the circuit's gates in order to a pure-state vector."""
    v = np.asarray(state, dtype=complex).reshape(-1)
    if v.shape[0] != circuit.d**circuit.wire_count:
        raise ValueError(
            f"state dimension {v.shape[0]} != {circuit.d}^{circuit.wire_count}"
        )
    for g in circuit.gates:
        v = _embed(g, circuit.wire_count) @ v
    return v


def singlet_prep_circuit(d: int) -> QuditCircuit:
    """Four-layer circuit mapping |0,0> to the two-particle singlet:
    Hadamard on the control, CNOT, then PARITY on wire 0 and the
    index-negating H^2 followed by X^-1 on wire 1."""
    gates = (
        Gate("H", (0,), d),
        Gate("CNOT", (0, 1), d),
        Gate("PARITY", (0,), d),
        Gate("H", (1,), d),
        Gate("H", (1,), d),
        Gate("X", (1,), d, inverse=True),
    )
    return QuditCircuit(d, 2, gates)


def spin_zero_meas_via_circuit(d: int, state: np.ndarray) -> float:
    """Probability of outcome (0, 0) after running the inverse
    preparation circuit; equals <state| pi0 |state>."""
    out = apply_circuit(singlet_prep_circuit(d).inverted(), state)
    return float(np.abs(out[0]) ** 2)


def spin_zero_overlap(d: int, state: np.ndarray) -> float:
    """Independent oracle |<singlet|state>|^2 for the circuit measurement."""
    v = np.asarray(state, dtype=complex).reshape(-1)
    return float(np.abs(np.vdot(singlet_state(d), v)) ** 2)


def circuit_to_lines(circuit: QuditCircuit) -> list[str]:
    lines = []
    for g in circuit.gates:
        kind = g.kind + ("^-1" if g.inverse else "")
        wires = ",".join(str(w) for w in g.wires)
        lines.append(f"{kind} {wires} {g.d}")
    return lines


def circuit_from_lines(lines, wire_count: int = 2) -> QuditCircuit:
    gates = []
    d = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'KIND wire[,wire] d', got {line!r}")
        kind_token, wire_token, d_token = parts
        inverse = kind_token.endswith("^-1")
        kind = kind_token[:-3] if inverse else kind_token
        try:
            wires = tuple(int(w) for w in wire_token.split(","))
            gate_d = int(d_token)
        except ValueError:
            raise ValueError(f"line {lineno}: malformed wires or dimension in {line!r}") from None
        if d is None:
            d = gate_d
        elif gate_d != d:
            raise ValueError(f"line {lineno}: dimension {gate_d} differs from earlier {d}")
        gates.append(Gate(kind, wires, gate_d, inverse))
    if d is None:
        raise ValueError("no gates found")
    return QuditCircuit(d, wire_count, tuple(gates))
