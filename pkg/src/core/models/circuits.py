"""
Modelos de circuito: compuertas, circuitos y distribuciones de resultados.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from src.core.models.errors import DimensionError, PhysicalityError

MAX_QUBITS = 12


class GateKind(Enum):
    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    U1 = "u1"
    CNOT = "cnot"
    TOFFOLI = "toffoli"
    CSWAP = "cswap"


_ARITY = {
    GateKind.CNOT: (1, 1),
    GateKind.TOFFOLI: (2, 1),
    GateKind.CSWAP: (1, 2),
}


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate with its target and control qubits.

    ``param`` holds the angle of RX/RY/RZ; ``matrix`` the 2x2 unitary of U1.
    """

    kind: GateKind
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    param: float = 0.0
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        controls, targets = _ARITY.get(self.kind, (0, 1))
        if len(self.controls) != controls or len(self.targets) != targets:
            raise DimensionError(
                f"{self.kind.name} takes {controls} control(s) and {targets} target(s), "
                f"got {self.controls} / {self.targets}"
            )
        qubits = self.qubits()
        if len(set(qubits)) != len(qubits) or min(qubits) < 0:
            raise DimensionError(f"{self.kind.name} has repeated or negative qubit indices {qubits}")
        if self.kind is GateKind.U1:
            if self.matrix is None:
                raise PhysicalityError("U1 gate needs a matrix")
            matrix = np.array(self.matrix, dtype=complex)
            if matrix.shape != (2, 2) or not np.allclose(matrix @ matrix.conj().T, np.eye(2), atol=1e-12, rtol=0):
                raise PhysicalityError("U1 gate matrix is not a 2x2 unitary")
            matrix.setflags(write=False)
            object.__setattr__(self, "matrix", matrix)

    def qubits(self) -> Tuple[int, ...]:
        return tuple(self.controls) + tuple(self.targets)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list with the qubits that get measured at the end.

    ``coincidence_outcomes`` lists the measured bit strings whose total probability
    equals the HOM coincidence probability for this circuit.
    """

    num_qubits: int
    gates: Tuple[Gate, ...]
    measured: Tuple[int, ...]
    coincidence_outcomes: FrozenSet[str] = field(default_factory=frozenset)
    name: str = "circuit"

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise DimensionError(f"Circuits support 1..{MAX_QUBITS} qubits, got {self.num_qubits}")
        if not self.measured or len(set(self.measured)) != len(self.measured):
            raise DimensionError("Measured qubit list must be nonempty and duplicate-free")
        for q in self.measured:
            if not 0 <= q < self.num_qubits:
                raise DimensionError(f"Measured qubit {q} out of range")
        for gate in self.gates:
            if max(gate.qubits()) >= self.num_qubits:
                raise DimensionError(f"{gate.kind.name} acts on {gate.qubits()} outside {self.num_qubits} qubits")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured", tuple(self.measured))
        object.__setattr__(self, "coincidence_outcomes", frozenset(self.coincidence_outcomes))


class CircuitBuilder:
    """Small fluent helper to assemble a ``Circuit``."""

    def __init__(self, num_qubits: int, name: str = "circuit"):
        self.num_qubits = num_qubits
        self.name = name
        self._gates: List[Gate] = []

    def add(self, kind: GateKind, *targets: int, controls: Tuple[int, ...] = (), param: float = 0.0,
            matrix: Optional[np.ndarray] = None) -> "CircuitBuilder":
        self._gates.append(Gate(kind, tuple(targets), tuple(controls), param, matrix))
        return self

    def build(self, measured: Tuple[int, ...], coincidence_outcomes=()) -> Circuit:
        return Circuit(self.num_qubits, tuple(self._gates), tuple(measured), frozenset(coincidence_outcomes), self.name)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Bit string -> probability (``shots == 0``) or bit string -> count (sampled)."""

    values: Dict[str, float]
    shots: int = 0

    def __post_init__(self):
        if self.shots < 0:
            raise DimensionError("shots must be nonnegative")
        total = sum(self.values.values())
        if self.shots == 0 and abs(total - 1.0) > 1e-10:
            raise PhysicalityError(f"Probabilities sum to {total!r}")
        if self.shots > 0 and int(round(total)) != self.shots:
            raise PhysicalityError(f"Counts sum to {total!r}, expected {self.shots}")
        object.__setattr__(self, "values", dict(sorted(self.values.items())))

    @property
    def exact(self) -> bool:
        return self.shots == 0

    def probability(self, outcome: str) -> float:
        value = self.values.get(outcome, 0.0)
        return value if self.exact else value / self.shots

    def total_probability(self, outcomes) -> float:
        return float(sum(self.probability(o) for o in outcomes))
