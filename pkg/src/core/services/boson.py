"""
Motor de interferencia de dos fotones en segunda cuantización: álgebra de operadores
de creación sobre modos etiquetados, divisor de haz simétrico y probabilidad de coincidencia.
"""
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from src.core.models.errors import DimensionError, PhysicalityError
from src.core.models.modes import (
    POLARIZATION,
    POLARIZATION_TIME_BIN,
    InternalSpace,
    ModeLabel,
    PairKey,
    TwoPhotonState,
    pair_key,
)
from src.core.services import qstate

ModeMap = Callable[[ModeLabel], List[Tuple[ModeLabel, complex]]]

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _single_photon(psi, space: InternalSpace) -> np.ndarray:
    vector = np.asarray(psi, dtype=complex).reshape(-1)
    if vector.size != space.dim:
        raise DimensionError(f"Single-photon state has {vector.size} amplitudes, space needs {space.dim}")
    norm = float(np.sum(np.abs(vector) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise PhysicalityError(f"Single-photon state is not normalized: {norm!r}")
    return vector


def _transform(state: TwoPhotonState, mode_map: ModeMap) -> TwoPhotonState:
    """Apply a linear map on creation operators a+_m -> sum_n c_nm a+_n to every term."""
    terms: Dict[PairKey, complex] = {}
    for (p, q), coefficient in state.terms.items():
        for p_out, cp in mode_map(p):
            for q_out, cq in mode_map(q):
                key = pair_key(p_out, q_out)
                terms[key] = terms.get(key, 0j) + coefficient * cp * cq
    return TwoPhotonState(space=state.space, terms=terms)


def inject(psi_a, psi_b, space: InternalSpace = POLARIZATION) -> TwoPhotonState:
    """a+(psi_a) b+(psi_b) |0> expanded over mode pairs.

    Args:
        psi_a: Internal state of the photon entering port 0.
        psi_b: Internal state of the photon entering port 1.
        space: Internal label space both states are written in.

    Raises:
        PhysicalityError: If either input is not normalized.
    """
    vec_a = _single_photon(psi_a, space)
    vec_b = _single_photon(psi_b, space)
    basis = space.basis()
    terms: Dict[PairKey, complex] = {}
    for i, label_a in enumerate(basis):
        for j, label_b in enumerate(basis):
            key = pair_key(ModeLabel(0, label_a), ModeLabel(1, label_b))
            terms[key] = terms.get(key, 0j) + vec_a[i] * vec_b[j]
    return TwoPhotonState(space=space, terms=terms)


def _full_internal(unitary: np.ndarray, space: InternalSpace) -> np.ndarray:
    unitary = np.asarray(unitary, dtype=complex)
    if unitary.ndim != 2 or unitary.shape[0] != unitary.shape[1]:
        raise DimensionError(f"Unitary must be square, got shape {unitary.shape}")
    if not qstate.is_unitary(unitary):
        raise PhysicalityError("Internal transformation is not unitary")
    if unitary.shape[0] == space.dim:
        return unitary
    if unitary.shape[0] == space.leading_dim:
        return np.kron(unitary, np.eye(space.dim // space.leading_dim))
    raise DimensionError(
        f"Unitary of size {unitary.shape[0]} fits neither the space ({space.dim}) nor its first factor"
    )


def apply_internal_unitary(state: TwoPhotonState, port: int, unitary: np.ndarray) -> TwoPhotonState:
    """Apply ``unitary`` to the internal labels of the photon in ``port``; identity elsewhere.

    A unitary sized like the first factor (polarization) acts as U (x) I on the rest.
    """
    if port not in (0, 1):
        raise DimensionError(f"Port must be 0 or 1, got {port}")
    space = state.space
    full = _full_internal(unitary, space)
    basis = space.basis()

    def mode_map(mode: ModeLabel) -> List[Tuple[ModeLabel, complex]]:
        if mode.spatial != port:
            return [(mode, 1.0)]
        column = space.index_of(mode.internal)
        return [(ModeLabel(port, basis[n]), full[n, column]) for n in range(space.dim) if full[n, column] != 0]

    return _transform(state, mode_map)


def _beamsplitter_map(mode: ModeLabel) -> List[Tuple[ModeLabel, complex]]:
    other = 1 - mode.spatial
    return [
        (mode, _INV_SQRT2),
        (ModeLabel(other, mode.internal), 1j * _INV_SQRT2),
    ]


def beamsplit(state: TwoPhotonState) -> TwoPhotonState:
    """Symmetric beamsplitter a+ -> (a+ + i b+)/sqrt(2), b+ -> (b+ + i a+)/sqrt(2)."""
    return _transform(state, _beamsplitter_map)


def coincidence_probability(state: TwoPhotonState) -> float:
    """Total probability of pairs with one photon at each spatial output."""
    return float(
        sum(prob for (p, q), prob in state.probabilities().items() if p.spatial != q.spatial)
    )


def hom_coincidence(psi, unitary: np.ndarray, space: InternalSpace = POLARIZATION) -> float:
    """Inject psi on both ports, apply ``unitary`` on port 1, interfere, return P_coinc."""
    state = apply_internal_unitary(inject(psi, psi, space), 1, unitary)
    return coincidence_probability(beamsplit(state))


def pair_coincidence(psi_a, psi_b, unitary: np.ndarray, space: InternalSpace = POLARIZATION) -> float:
    """Like ``hom_coincidence`` but with different photons on each port."""
    state = apply_internal_unitary(inject(psi_a, psi_b, space), 1, unitary)
    return coincidence_probability(beamsplit(state))


def mixture_coincidence(
    ensemble: Sequence[Tuple[float, np.ndarray]],
    unitary: np.ndarray,
    space: InternalSpace = POLARIZATION,
) -> float:
    """Coincidence for photons drawn independently from an incoherent ensemble.

    Args:
        ensemble: (weight, pure internal state) pairs with weights summing to one.
        unitary: Transformation applied to the photon in port 1.
        space: Internal label space.
    """
    weights = [w for w, _ in ensemble]
    if abs(sum(weights) - 1.0) > 1e-10 or min(weights) < 0:
        raise PhysicalityError("Ensemble weights must be nonnegative and sum to one")
    total = 0.0
    for weight_a, psi_a in ensemble:
        for weight_b, psi_b in ensemble:
            if weight_a * weight_b == 0:
                continue
            total += weight_a * weight_b * pair_coincidence(psi_a, psi_b, unitary, space)
    return total


def time_bin_state(alpha: complex, beta: complex) -> np.ndarray:
    """alpha|H,t0> + beta|V,t1> written in ``POLARIZATION_TIME_BIN``."""
    vector = np.zeros(POLARIZATION_TIME_BIN.dim, dtype=complex)
    vector[POLARIZATION_TIME_BIN.index_of(("H", "t0"))] = alpha
    vector[POLARIZATION_TIME_BIN.index_of(("V", "t1"))] = beta
    return vector


def entangled_photon(p: float, basis: np.ndarray) -> np.ndarray:
    """sqrt(p)|phi,t0> + sqrt(1-p)|phi_perp,t1> where ``basis`` columns are |phi>, |phi_perp>."""
    t0 = np.array([1.0, 0.0], dtype=complex)
    t1 = np.array([0.0, 1.0], dtype=complex)
    return np.sqrt(p) * np.kron(basis[:, 0], t0) + np.sqrt(1.0 - p) * np.kron(basis[:, 1], t1)

