"""Circuit construction: feature map, entanglement layers, ansatz.

The network is: H on every qubit, RY(x_i) data encoding, then L layers of
[entanglement CNOTs + per-qubit RX(theta) RY(phi) RZ(omega)], measured in
Z on every qubit.  The rotation axis order is fixed as x, then y, then z;
tests depend on it.
"""

import enum
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .statevector import Gate, cnot, h, rx, ry, rz


class EntanglementTopology(enum.Enum):
    """The two CNOT layouts used by the network variants."""

    PAIRS_THEN_TIE = "pairs_then_tie"
    CASCADE_RING = "cascade_ring"


@dataclass(frozen=True)
class AnsatzConfig:
    n_qubits: int
    n_layers: int
    topology: EntanglementTopology

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError("ansatz needs at least 2 qubits to entangle")
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")

    @property
    def n_quantum_params(self) -> int:
        return 3 * self.n_qubits * self.n_layers


@dataclass
class ParameterVector:
    """Trainable parameters: rotation angles plus the affine readout.

    ``quantum`` is flat with layout [layer][qubit][axis], axes ordered
    (x, y, z).  ``flatten``/``unflatten`` round-trip the full vector as
    [quantum..., readout_weights..., readout_bias].
    """

    quantum: np.ndarray
    readout_weights: np.ndarray
    readout_bias: float

    def angle(self, layer: int, qubit: int, axis: int, n_qubits: int) -> float:
        return self.quantum[(layer * n_qubits + qubit) * 3 + axis]

    def angles_view(self, config: AnsatzConfig) -> np.ndarray:
        """(L, n, 3) view of the quantum angles."""
        return self.quantum.reshape(config.n_layers, config.n_qubits, 3)

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.quantum, self.readout_weights, [self.readout_bias]])

    @classmethod
    def unflatten(cls, config: AnsatzConfig, flat: np.ndarray) -> "ParameterVector":
        nq = config.n_quantum_params
        n = config.n_qubits
        if flat.shape[0] != nq + n + 1:
            raise ValueError(
                f"expected {nq + n + 1} parameters, got {flat.shape[0]}"
            )
        return cls(
            quantum=flat[:nq].copy(),
            readout_weights=flat[nq : nq + n].copy(),
            readout_bias=float(flat[-1]),
        )

    def validate(self, config: AnsatzConfig):
        if self.quantum.shape[0] != config.n_quantum_params:
            raise ValueError(
                f"quantum parameter count {self.quantum.shape[0]} does not match "
                f"config ({config.n_quantum_params})"
            )
        if self.readout_weights.shape[0] != config.n_qubits:
            raise ValueError("readout weight count must equal n_qubits")
        if not (
            np.all(np.isfinite(self.quantum))
            and np.all(np.isfinite(self.readout_weights))
            and np.isfinite(self.readout_bias)
        ):
            raise ValueError("parameters must be finite")


def parameter_count(config: AnsatzConfig) -> int:
    """Total trainable parameters: 3nL angles + n readout weights + bias."""
    return config.n_quantum_params + config.n_qubits + 1


def init_parameters(config: AnsatzConfig, rng: np.random.Generator) -> ParameterVector:
    """Angles uniform in [-pi, pi), weights uniform in [-0.1, 0.1), bias 0."""
    return ParameterVector(
        quantum=rng.uniform(-np.pi, np.pi, config.n_quantum_params),
        readout_weights=rng.uniform(-0.1, 0.1, config.n_qubits),
        readout_bias=0.0,
    )


@dataclass
class CircuitSpec:
    """Ordered gate list with the trainable-angle positions marked.

    parameter_slots[k] = (gate index, axis) for flat quantum parameter k.
    """

    n_qubits: int
    gates: List[Gate]
    parameter_slots: List[Tuple[int, int]] = field(default_factory=list)


def build_feature_map(x, n_qubits: int) -> List[Gate]:
    """H on q0..q(n-1), then RY(x_i) on each qubit, in that order."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != n_qubits:
        raise ValueError(
            f"feature vector length {x.shape[0]} does not match {n_qubits} qubits"
        )
    gates = [h(q) for q in range(n_qubits)]
    gates += [ry(q, float(x[q])) for q in range(n_qubits)]
    return gates


def build_entanglement(topology: EntanglementTopology, n_qubits: int) -> List[Gate]:
    """CNOT pattern of one entanglement layer.

    PAIRS_THEN_TIE entangles (0,1), (2,3), ... then ties adjacent pairs
    with (1,2), (3,4), ...; CASCADE_RING chains 0->1->...->(n-1) and
    closes the ring with (n-1)->0.  For n = 2 the ring degenerates to
    [0->1, 1->0].
    """
    if n_qubits < 2:
        raise ValueError("entanglement requires at least 2 qubits")
    gates = []
    if topology is EntanglementTopology.PAIRS_THEN_TIE:
        for q in range(0, n_qubits - 1, 2):
            gates.append(cnot(q, q + 1))
        for q in range(1, n_qubits - 1, 2):
            gates.append(cnot(q, q + 1))
    elif topology is EntanglementTopology.CASCADE_RING:
        for q in range(n_qubits - 1):
            gates.append(cnot(q, q + 1))
        gates.append(cnot(n_qubits - 1, 0))
    else:
        raise ValueError(f"unknown topology {topology!r}")
    return gates


def build_ansatz(config: AnsatzConfig, params: ParameterVector) -> CircuitSpec:
    """L layers of [entanglement, then RX RY RZ per qubit], RX first."""
    params.validate(config)
    angles = params.angles_view(config)
    gates: List[Gate] = []
    slots: List[Tuple[int, int]] = []
    ent = build_entanglement(config.topology, config.n_qubits)
    for layer in range(config.n_layers):
        gates.extend(ent)
        for q in range(config.n_qubits):
            for axis, maker in enumerate((rx, ry, rz)):
                slots.append((len(gates), axis))
                gates.append(maker(q, float(angles[layer, q, axis])))
    return CircuitSpec(config.n_qubits, gates, slots)


def assemble(x, config: AnsatzConfig, params: ParameterVector) -> CircuitSpec:
    """Feature map followed by the ansatz, as one circuit."""
    fm = build_feature_map(x, config.n_qubits)
    body = build_ansatz(config, params)
    offset = len(fm)
    return CircuitSpec(
        config.n_qubits,
        fm + body.gates,
        [(idx + offset, axis) for idx, axis in body.parameter_slots],
    )


def format_circuit(spec: CircuitSpec) -> str:
    """One gate per line, stable text form for debugging and dumps."""
    lines = []
    for g in spec.gates:
        if g.kind == "cnot":
            lines.append(f"cnot q{g.control} -> q{g.target}")
        elif g.kind == "h":
            lines.append(f"h q{g.target}")
        else:
            lines.append(f"{g.kind} q{g.target} {g.angle:+.12f}")
    return "\n".join(lines)
