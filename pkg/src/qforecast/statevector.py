"""Dense statevector simulation of n-qubit circuits.

Bit convention: qubit 0 is the least-significant bit of the basis-state
index, so |q1 q0> = |10> is index 2.  Amplitudes are complex128.  Gate
application mutates the amplitude buffer in place (strided index pairs
for single-qubit gates, swaps for CNOT) and returns the same StateVector
for chaining; callers that need the old state must copy first.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .kernels import impl as _k

MAX_QUBITS = 24

_SQRT1_2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """One circuit gate: H, RX, RY, RZ, or CNOT.

    Rotations carry exactly one angle (radians); CNOT carries a control.
    """

    kind: str
    target: int
    control: Optional[int] = None
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("h", "rx", "ry", "rz", "cnot"):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in ("rx", "ry", "rz"):
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} does not take an angle")
        if self.kind == "cnot":
            if self.control is None:
                raise ValueError("cnot requires a control qubit")
            if self.control == self.target:
                raise ValueError("cnot control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind} does not take a control")

    def dagger(self) -> "Gate":
        """Inverse gate: H and CNOT are involutions, rotations negate."""
        if self.kind in ("rx", "ry", "rz"):
            return Gate(self.kind, self.target, angle=-self.angle)
        return self


def h(target: int) -> Gate:
    return Gate("h", target)


def rx(target: int, angle: float) -> Gate:
    return Gate("rx", target, angle=angle)


def ry(target: int, angle: float) -> Gate:
    return Gate("ry", target, angle=angle)


def rz(target: int, angle: float) -> Gate:
    return Gate("rz", target, angle=angle)


def cnot(control: int, target: int) -> Gate:
    return Gate("cnot", target, control=control)


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 unitary of a single-qubit gate (half-angle convention)."""
    if gate.kind == "h":
        return np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=np.complex128)
    half = gate.angle / 2.0
    c, s = math.cos(half), math.sin(half)
    if gate.kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if gate.kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if gate.kind == "rz":
        return np.array([[c - 1j * s, 0.0], [0.0, c + 1j * s]], dtype=np.complex128)
    raise ValueError(f"{gate.kind} has no single-qubit matrix")


class StateVector:
    """Complex amplitudes of an n-qubit register (length 2**n_qubits)."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm_sq(self) -> float:
        a = self.amplitudes
        return float(np.sum(a.real * a.real + a.imag * a.imag))

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits})"


def zero_state(n_qubits: int) -> StateVector:
    """|0...0>: amplitude 1 at index 0."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _check_qubit(state: StateVector, q: int, what: str):
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"{what} {q} out of range for {state.n_qubits} qubits")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate in place and return the state."""
    _check_qubit(state, gate.target, "target qubit")
    if gate.kind == "cnot":
        _check_qubit(state, gate.control, "control qubit")
        _k.apply_cnot(state.amplitudes, gate.control, gate.target)
    else:
        u = gate_matrix(gate)
        _k.apply_1q(state.amplitudes, gate.target, u[0, 0], u[0, 1], u[1, 0], u[1, 1])
    return state


def apply_circuit(state: StateVector, gates) -> StateVector:
    """Apply gates in list order (first element acts first)."""
    for gate in gates:
        apply_gate(state, gate)
    return state


def expval_z(state: StateVector, qubit: int) -> float:
    """<Z_qubit>: sum of |amp|^2 signed +1 where the qubit's bit is 0.

    Exact expectation over the state; no collapse, no sampling.
    """
    _check_qubit(state, qubit, "qubit")
    return _k.expval_z_c(state.amplitudes, qubit)
