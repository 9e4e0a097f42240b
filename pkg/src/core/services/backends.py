"""
Estrategias que producen probabilidades de coincidencia: modelo analítico,
circuitos Swap Test y motor bosónico.
"""
from abc import ABC, abstractmethod
from typing import Dict, Union

import numpy as np

from src.core.models.errors import ParameterRangeError
from src.core.models.modes import POLARIZATION, POLARIZATION_TIME_BIN
from src.core.models.sources import ExternallyMixed, InternalEntangled, SourceModel
from src.core.models.states import PauliAxis
from src.core.services import boson, circuit, hom, qstate
from src.core.services.circuit import UnitarySpec


def unitary_matrix(operation: UnitarySpec) -> np.ndarray:
    """2x2 matrix of an operation given as None (identity), a Pauli axis or a matrix."""
    if operation is None:
        return np.eye(2, dtype=complex)
    if isinstance(operation, PauliAxis):
        return qstate.pauli_matrix(operation)
    return np.asarray(operation, dtype=complex)


class CoincidenceBackend(ABC):
    name = "abstract"

    @abstractmethod
    def exact_probability(self, source: SourceModel, operation: UnitarySpec) -> float:
        """Exact coincidence probability when ``operation`` acts on the second photon.

        Args:
            source (SourceModel): Photon source feeding both ports.
            operation (UnitarySpec): None for U = I, a PauliAxis, or a 2x2 unitary.

        Returns:
            float: Coincidence probability in [0, 1/2].
        """
        ...

    def measure(self, source: SourceModel, operation: UnitarySpec, shots: int, rng: np.random.Generator) -> float:
        """Exact value when ``shots`` is 0, else the observed coincidence frequency."""
        p = self.exact_probability(source, operation)
        if shots == 0:
            return p
        return float(rng.binomial(shots, min(max(p, 0.0), 1.0)) / shots)


class AnalyticBackend(CoincidenceBackend):
    name = "analytic"

    def exact_probability(self, source: SourceModel, operation: UnitarySpec) -> float:
        if operation is None:
            return hom.coincidence_identity(source)
        if isinstance(operation, PauliAxis):
            return hom.coincidence_pauli(source, operation)
        return hom.coincidence_unitary(source, unitary_matrix(operation))


class CircuitBackend(CoincidenceBackend):
    name = "circuit"

    def build(self, source: SourceModel, operation: UnitarySpec):
        direction = qstate.angles_of(source.direction)
        if isinstance(source, InternalEntangled):
            schmidt = (np.sqrt(source.p), np.sqrt(1.0 - source.p))
            return circuit.build_swap_test_two_mode(schmidt, schmidt, direction=direction, unitary=operation)
        if isinstance(source, ExternallyMixed):
            return circuit.build_swap_test_external(source.lam, direction, operation)
        return circuit.build_swap_test_single(direction[0], direction[1], operation)

    def exact_probability(self, source: SourceModel, operation: UnitarySpec) -> float:
        built = self.build(source, operation)
        return circuit.coincidence_probability(built, circuit.run(built))

    def measure(self, source: SourceModel, operation: UnitarySpec, shots: int, rng: np.random.Generator) -> float:
        if shots == 0:
            return self.exact_probability(source, operation)
        built = self.build(source, operation)
        return circuit.coincidence_probability(built, circuit.run(built, shots=shots, seed=rng))


class BosonBackend(CoincidenceBackend):
    name = "boson"

    def exact_probability(self, source: SourceModel, operation: UnitarySpec) -> float:
        unitary = unitary_matrix(operation)
        basis = qstate.preparation_unitary(*qstate.angles_of(source.direction))
        if isinstance(source, InternalEntangled):
            photon = boson.entangled_photon(source.p, basis)
            return boson.hom_coincidence(photon, unitary, POLARIZATION_TIME_BIN)
        if isinstance(source, ExternallyMixed):
            ensemble = [(source.lam, basis[:, 0]), (1.0 - source.lam, basis[:, 1])]
            return boson.mixture_coincidence(ensemble, unitary, POLARIZATION)
        return boson.hom_coincidence(basis[:, 0], unitary, POLARIZATION)


_BACKENDS: Dict[str, CoincidenceBackend] = {
    AnalyticBackend.name: AnalyticBackend(),
    CircuitBackend.name: CircuitBackend(),
    BosonBackend.name: BosonBackend(),
}


def get_backend(backend: Union[str, CoincidenceBackend]) -> CoincidenceBackend:
    """Resolve a backend by name ("analytic", "circuit", "boson").

    Raises:
        ParameterRangeError: For an unknown name.
    """
    if isinstance(backend, CoincidenceBackend):
        return backend
    try:
        return _BACKENDS[str(backend).strip().lower()]
    except KeyError:
        raise ParameterRangeError(f"Unknown backend {backend!r}; choose one of {sorted(_BACKENDS)}")


def available_backends():
    return sorted(_BACKENDS)
