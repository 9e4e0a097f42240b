"""
Simulador denso de vector de estado y constructores de circuitos Swap Test
(fotón puro, dos modos internos y entrelazamiento con el entorno).
"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.core.models.circuits import Circuit, CircuitBuilder, Gate, GateKind, OutcomeDistribution
from src.core.models.errors import DimensionError, ParameterRangeError, PhysicalityError
from src.core.models.states import PauliAxis, PureState
from src.core.services import qstate
from src.infrastructure.logging.logger import logger
from src.shared.rng import SeedLike, make_rng

UnitarySpec = Union[None, PauliAxis, np.ndarray]

_SQRT2_INV = 1.0 / np.sqrt(2.0)
_FIXED = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
_PARAMETRIC = {
    GateKind.RX: lambda t: qstate.rotation_unitary(PauliAxis.AXIS2, t),
    GateKind.RY: lambda t: qstate.rotation_unitary(PauliAxis.AXIS3, t),
    GateKind.RZ: lambda t: qstate.rotation_unitary(PauliAxis.AXIS1, t),
}
_PAULI_GATE = {PauliAxis.AXIS1: GateKind.Z, PauliAxis.AXIS2: GateKind.X, PauliAxis.AXIS3: GateKind.Y}


def gate_matrix(gate: Gate) -> np.ndarray:
    """2x2 matrix of the single-qubit part of ``gate`` (X for CNOT/Toffoli)."""
    if gate.kind in _FIXED:
        return _FIXED[gate.kind]
    if gate.kind in _PARAMETRIC:
        return _PARAMETRIC[gate.kind](gate.param)
    if gate.kind is GateKind.U1:
        return gate.matrix
    if gate.kind in (GateKind.CNOT, GateKind.TOFFOLI):
        return _FIXED[GateKind.X]
    raise DimensionError(f"{gate.kind.name} has no single-qubit matrix")


def _apply_on_axis(tensor: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(tensor, axis, 0)
    out = np.tensordot(matrix, moved, axes=([1], [0]))
    return np.moveaxis(out, 0, axis)


def _apply_controlled(tensor: np.ndarray, matrix: np.ndarray, controls: Sequence[int], target: int) -> np.ndarray:
    if not controls:
        return _apply_on_axis(tensor, matrix, target)
    index = [slice(None)] * tensor.ndim
    for c in controls:
        index[c] = 1
    index = tuple(index)
    sub_target = target - sum(1 for c in controls if c < target)
    result = tensor.copy()
    result[index] = _apply_on_axis(tensor[index], matrix, sub_target)
    return result


def _expand(gate: Gate):
    """Controlled-swap as CNOT - Toffoli - CNOT; every other gate is primitive."""
    if gate.kind is GateKind.CSWAP:
        (control,) = gate.controls
        a, b = gate.targets
        yield Gate(GateKind.CNOT, (a,), (b,))
        yield Gate(GateKind.TOFFOLI, (b,), (control, a))
        yield Gate(GateKind.CNOT, (a,), (b,))
    else:
        yield gate


def evolve(circuit: Circuit, initial: Optional[PureState] = None) -> np.ndarray:
    """Final amplitude tensor of shape [2] * num_qubits."""
    n = circuit.num_qubits
    if initial is None:
        initial = PureState.zero(n)
    if initial.num_qubits != n:
        raise DimensionError(f"Initial state has {initial.num_qubits} qubits, circuit needs {n}")
    tensor = np.array(initial.amplitudes, dtype=complex).reshape([2] * n)
    for gate in circuit.gates:
        for primitive in _expand(gate):
            tensor = _apply_controlled(tensor, gate_matrix(primitive), primitive.controls, primitive.targets[0])
    return tensor


def _marginal(tensor: np.ndarray, measured: Sequence[int]) -> np.ndarray:
    probabilities = np.abs(tensor) ** 2
    traced = tuple(q for q in range(tensor.ndim) if q not in measured)
    if traced:
        probabilities = probabilities.sum(axis=traced)
    kept = [q for q in range(tensor.ndim) if q in measured]
    order = [kept.index(q) for q in measured]
    flat = np.transpose(probabilities, order).reshape(-1)
    return flat / flat.sum()


def run(circuit: Circuit, initial: Optional[PureState] = None, shots: int = 0, seed: SeedLike = None) -> OutcomeDistribution:
    """Simulate ``circuit`` and measure its measured qubits.

    Args:
        circuit: Circuit to run.
        initial: Starting state, |0...0> when omitted.
        shots: 0 returns the exact Born marginal; otherwise i.i.d. samples are drawn.
        seed: Integer seed or numpy Generator for the sampled mode.

    Returns:
        OutcomeDistribution: Probabilities (exact) or counts (sampled), keyed by bit string
        in the order of ``circuit.measured``.
    """
    if shots < 0:
        raise ParameterRangeError(f"shots must be nonnegative, got {shots}")
    probabilities = _marginal(evolve(circuit, initial), circuit.measured)
    width = len(circuit.measured)
    labels = [format(i, f"0{width}b") for i in range(probabilities.size)]
    if shots == 0:
        return OutcomeDistribution({label: float(p) for label, p in zip(labels, probabilities)}, 0)
    counts = make_rng(seed).multinomial(shots, probabilities)
    logger.debug(f"Sampled {shots} shots of {circuit.name}")
    return OutcomeDistribution({label: int(c) for label, c in zip(labels, counts)}, shots)


def coincidence_probability(circuit: Circuit, distribution: OutcomeDistribution) -> float:
    """Probability (or frequency) of the outcomes that stand for a HOM coincidence."""
    return distribution.total_probability(circuit.coincidence_outcomes)


def _add_unitary(builder: CircuitBuilder, unitary: UnitarySpec, qubit: int) -> None:
    if unitary is None:
        return
    if isinstance(unitary, PauliAxis):
        builder.add(_PAULI_GATE[unitary], qubit)
        return
    matrix = np.asarray(unitary, dtype=complex)
    if matrix.shape != (2, 2) or not qstate.is_unitary(matrix):
        raise PhysicalityError("Operation must be a 2x2 unitary")
    builder.add(GateKind.U1, qubit, matrix=matrix)


def _add_direction(builder: CircuitBuilder, direction: Optional[Tuple[float, float]], qubit: int) -> None:
    if direction is None:
        return
    theta, phi = direction
    builder.add(GateKind.RY, qubit, param=theta).add(GateKind.RZ, qubit, param=phi)


def _add_swap_test(builder: CircuitBuilder, ancilla: int, a: int, b: int) -> None:
    builder.add(GateKind.H, ancilla)
    builder.add(GateKind.CSWAP, a, b, controls=(ancilla,))
    builder.add(GateKind.H, ancilla)


def build_swap_test_single(theta: float, phi: float, unitary: UnitarySpec = None) -> Circuit:
    """Swap test between |psi> on A and U|psi> on B (qubits A=0, B=1, ancilla C=2).

    The ancilla reads "1" with probability (1 - |<psi|U|psi>|^2)/2, the HOM coincidence.
    """
    builder = CircuitBuilder(3, name="swap_test_single")
    for qubit in (0, 1):
        _add_direction(builder, (theta, phi), qubit)
    _add_unitary(builder, unitary, 1)
    _add_swap_test(builder, 2, 0, 1)
    return builder.build(measured=(2,), coincidence_outcomes={"1"})


def _check_pair(name: str, pair: Sequence[complex]) -> Tuple[complex, complex]:
    c0, c1 = (complex(v) for v in pair)
    norm = abs(c0) ** 2 + abs(c1) ** 2
    if abs(norm - 1.0) > 1e-10:
        raise PhysicalityError(f"{name} coefficients are not normalized: {norm!r}")
    return c0, c1


def _add_schmidt_pair(builder: CircuitBuilder, coefficients: Tuple[complex, complex], first: int, second: int) -> None:
    c0, c1 = coefficients
    builder.add(GateKind.RY, first, param=2.0 * float(np.arctan2(abs(c1), abs(c0))))
    if abs(c0) > 0 and abs(c1) > 0:
        delta = float(np.angle(c1) - np.angle(c0))
        if delta != 0.0:
            builder.add(GateKind.RZ, first, param=delta)
    builder.add(GateKind.CNOT, second, controls=(first,))


def build_swap_test_two_mode(
    alpha: Sequence[complex],
    beta: Sequence[complex],
    direction: Optional[Tuple[float, float]] = None,
    unitary: UnitarySpec = None,
) -> Circuit:
    """Two-degree-of-freedom swap test (6 qubits).

    Photon A is alpha0|00> + alpha1|11> on (pol_A=0, tb_A=1), photon B is
    beta0|00> + beta1|11> on (pol_B=2, tb_B=3). ``direction`` rotates both
    polarization qubits, ``unitary`` then acts on pol_B. Ancillas 4 and 5
    control the swap of the polarization and time-bin pairs; outcomes "01" and
    "10" together give (1 - |<A|B>|^2)/2.
    """
    alpha = _check_pair("alpha", alpha)
    beta = _check_pair("beta", beta)
    builder = CircuitBuilder(6, name="swap_test_two_mode")
    _add_schmidt_pair(builder, alpha, 0, 1)
    _add_schmidt_pair(builder, beta, 2, 3)
    _add_direction(builder, direction, 0)
    _add_direction(builder, direction, 2)
    _add_unitary(builder, unitary, 2)
    builder.add(GateKind.H, 4).add(GateKind.H, 5)
    builder.add(GateKind.CSWAP, 0, 2, controls=(4,))
    builder.add(GateKind.CSWAP, 1, 3, controls=(5,))
    builder.add(GateKind.H, 4).add(GateKind.H, 5)
    return builder.build(measured=(4, 5), coincidence_outcomes={"01", "10"})


def build_swap_test_external(lam: float, direction: Tuple[float, float] = (0.0, 0.0), unitary: UnitarySpec = None) -> Circuit:
    """Swap test on photons entangled with their own environment qubit (5 qubits).

    Qubits: A=0, B=1, env_A=2, env_B=3, ancilla=4. Each system qubit ends with the
    reduced state lambda|phi><phi| + (1-lambda)|phi_perp><phi_perp|; the ancilla reads
    "1" with the coincidence probability, det(rho) when U = I.
    """
    if not 0.0 <= lam <= 1.0:
        raise ParameterRangeError(f"lambda={lam!r} outside [0, 1]")
    builder = CircuitBuilder(5, name="swap_test_external")
    env_angle = 2.0 * float(np.arcsin(np.sqrt(1.0 - lam)))
    for system, env in ((0, 2), (1, 3)):
        builder.add(GateKind.RY, env, param=env_angle)
        builder.add(GateKind.CNOT, system, controls=(env,))
        _add_direction(builder, direction, system)
    _add_unitary(builder, unitary, 1)
    _add_swap_test(builder, 4, 0, 1)
    return builder.build(measured=(4,), coincidence_outcomes={"1"})
