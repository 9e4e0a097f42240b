"""
Álgebra lineal de uno y pocos qubits: estados, matrices densidad, operadores de Pauli,
conversión Stokes/Bloch, traza parcial, fidelidad, pureza y entropía.
"""
from typing import Iterable, List, Tuple, Union

import numpy as np

from src.core.models.errors import DimensionError, PhysicalityError
from src.core.models.states import DensityMatrix, PauliAxis, PureState, StokesVector

State = Union[PureState, DensityMatrix]

DOP_NEGATIVE_LIMIT = -1e-9

_IDENTITY = np.eye(2, dtype=complex)
# s1 <-> Z, s2 <-> X, s3 <-> Y
_PAULI = {
    PauliAxis.AXIS1: np.array([[1, 0], [0, -1]], dtype=complex),
    PauliAxis.AXIS2: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliAxis.AXIS3: np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def pauli_matrix(axis: PauliAxis) -> np.ndarray:
    """Return the 2x2 matrix of sigma_axis (a fresh copy)."""
    return _PAULI[PauliAxis.parse(axis)].copy()


def rotation_unitary(axis: PauliAxis, theta: float) -> np.ndarray:
    """exp(-i theta sigma_axis / 2).

    Args:
        axis: Rotation axis on the Poincaré sphere.
        theta: Angle in radians, positive counterclockwise in the plane (axis+1, axis+2).

    Returns:
        np.ndarray: 2x2 unitary.
    """
    sigma = _PAULI[PauliAxis.parse(axis)]
    return np.cos(theta / 2.0) * _IDENTITY - 1j * np.sin(theta / 2.0) * sigma


def stokes_rotation_matrix(axis: PauliAxis, theta: float) -> np.ndarray:
    """3x3 rotation acting on (s1, s2, s3) that matches ``rotation_unitary``."""
    axis = PauliAxis.parse(axis)
    first, second = axis.plane()
    matrix = np.eye(3)
    c, s = np.cos(theta), np.sin(theta)
    i, j = first.index, second.index
    matrix[i, i], matrix[i, j] = c, -s
    matrix[j, i], matrix[j, j] = s, c
    return matrix


def state_from_angles(theta: float, phi: float) -> PureState:
    """R_Z(phi) R_Y(theta) |0>, whose Stokes vector is (cos t, cos p sin t, sin p sin t)."""
    ry = np.array(
        [[np.cos(theta / 2.0), -np.sin(theta / 2.0)], [np.sin(theta / 2.0), np.cos(theta / 2.0)]],
        dtype=complex,
    )
    rz = np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]], dtype=complex)
    vector = rz @ ry @ np.array([1.0, 0.0], dtype=complex)
    return PureState(num_qubits=1, amplitudes=vector)


def preparation_unitary(theta: float, phi: float) -> np.ndarray:
    """The 2x2 matrix R_Z(phi) R_Y(theta); maps |0> to the direction state and |1> to its orthogonal."""
    return rotation_unitary(PauliAxis.AXIS1, phi) @ rotation_unitary(PauliAxis.AXIS3, theta)


def angles_of(stokes: StokesVector) -> Tuple[float, float]:
    """Inverse of ``state_from_angles`` for the direction of ``stokes``.

    Returns:
        Tuple[float, float]: (theta in [0, pi], phi in [0, 2 pi)).
    """
    vector = stokes.as_array()
    norm = np.linalg.norm(vector)
    if norm == 0:
        return 0.0, 0.0
    s1, s2, s3 = vector / norm
    theta = float(np.arccos(np.clip(s1, -1.0, 1.0)))
    phi = float(np.arctan2(s3, s2) % (2.0 * np.pi))
    return theta, phi


def density_from_stokes(stokes: StokesVector) -> DensityMatrix:
    """rho = (I + s1 sigma1 + s2 sigma2 + s3 sigma3) / 2."""
    entries = _IDENTITY.copy()
    for axis in PauliAxis:
        entries = entries + stokes.component(axis) * _PAULI[axis]
    return DensityMatrix(entries / 2.0)


def _as_density(state: State) -> DensityMatrix:
    return state.projector() if isinstance(state, PureState) else state


def _num_qubits(state: State) -> int:
    return state.num_qubits


def partial_trace(state: State, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the qubits listed in ``keep`` (kept in ascending order).

    Args:
        state: Global pure state or density matrix on n qubits.
        keep: Indices of the qubits to keep.

    Raises:
        DimensionError: If ``keep`` is empty or contains an index out of range.

    Returns:
        DensityMatrix: Trace-one Hermitian matrix of size 2^len(keep).
    """
    n = _num_qubits(state)
    kept: List[int] = sorted(set(int(k) for k in keep))
    if not kept:
        raise DimensionError("partial_trace needs at least one qubit to keep")
    if kept[0] < 0 or kept[-1] >= n:
        raise DimensionError(f"Qubit indices {kept} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in kept]
    dk, dt = 2 ** len(kept), 2 ** len(traced)

    if isinstance(state, PureState):
        psi = state.amplitudes.reshape([2] * n).transpose(kept + traced).reshape(dk, dt)
        reduced = psi @ psi.conj().T
    else:
        rho = state.entries.reshape([2] * (2 * n))
        perm = kept + traced + [n + q for q in kept] + [n + q for q in traced]
        rho = rho.transpose(perm).reshape(dk, dt, dk, dt)
        reduced = np.einsum("ajbj->ab", rho)
    # symmetrize away rounding noise
    reduced = (reduced + reduced.conj().T) / 2.0
    return DensityMatrix(reduced / np.trace(reduced).real)


def stokes_of(state: State, qubit_index: int = 0) -> StokesVector:
    """Stokes vector tr(rho sigma_j) of the reduced state on ``qubit_index``."""
    n = _num_qubits(state)
    if not 0 <= qubit_index < n:
        raise DimensionError(f"Qubit index {qubit_index} out of range for {n} qubits")
    if n == 1:
        rho = _as_density(state).entries
    else:
        rho = partial_trace(state, [qubit_index]).entries
    values = [float(np.real(np.trace(rho @ _PAULI[axis]))) for axis in PauliAxis]
    return StokesVector.from_array(np.clip(values, -1.0, 1.0))


def _determinant_2x2(rho: DensityMatrix) -> float:
    if rho.dim != 2:
        raise DimensionError(f"Expected a 2x2 density matrix, got {rho.dim}x{rho.dim}")
    return float(np.real(np.linalg.det(rho.entries)))


def dop_of(rho: DensityMatrix) -> float:
    """Degree of polarization sqrt(1 - 4 det rho).

    Raises:
        PhysicalityError: If 1 - 4 det rho is below -1e-9.
    """
    value = 1.0 - 4.0 * _determinant_2x2(rho)
    if value < DOP_NEGATIVE_LIMIT:
        raise PhysicalityError(f"1 - 4 det(rho) = {value!r} is negative")
    return float(np.sqrt(min(max(value, 0.0), 1.0)))


def purity_of(rho: DensityMatrix) -> float:
    """tr(rho^2)."""
    return float(np.real(np.trace(rho.entries @ rho.entries)))


def entropy_of(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits, with 0 log 0 = 0."""
    eigenvalues = np.linalg.eigvalsh(rho.entries)
    eigenvalues = eigenvalues[eigenvalues > 1e-15]
    return float(max(0.0, -np.sum(eigenvalues * np.log2(eigenvalues))))


def _embed(matrix: np.ndarray, qubit_index: int, num_qubits: int) -> np.ndarray:
    full = np.array([[1.0 + 0j]])
    for q in range(num_qubits):
        full = np.kron(full, matrix if q == qubit_index else _IDENTITY)
    return full


def apply_single_qubit(state: State, unitary: np.ndarray, qubit_index: int = 0) -> State:
    """Apply a 2x2 unitary to one qubit of a pure state or density matrix."""
    n = _num_qubits(state)
    if not 0 <= qubit_index < n:
        raise DimensionError(f"Qubit index {qubit_index} out of range for {n} qubits")
    full = _embed(np.asarray(unitary, dtype=complex), qubit_index, n)
    if isinstance(state, PureState):
        vector = full @ state.amplitudes
        return PureState(num_qubits=n, amplitudes=vector / np.linalg.norm(vector))
    entries = full @ state.entries @ full.conj().T
    return DensityMatrix((entries + entries.conj().T) / 2.0)


def rotate_about_axis(state: State, axis: PauliAxis, theta: float, qubit_index: int = 0) -> State:
    """Rotate the Stokes vector of one qubit by ``theta`` about ``axis``.

    The rotation is counterclockwise in the cyclic plane (axis+1, axis+2) and is
    implemented as the unitary exp(-i theta sigma_axis / 2).
    """
    return apply_single_qubit(state, rotation_unitary(axis, theta), qubit_index)


def state_overlap_fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 for two pure states of equal size."""
    if a.num_qubits != b.num_qubits:
        raise DimensionError("States act on different numbers of qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def is_unitary(matrix: np.ndarray, tolerance: float = 1e-12) -> bool:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.allclose(matrix @ matrix.conj().T, np.eye(matrix.shape[0]), atol=tolerance, rtol=0.0))
