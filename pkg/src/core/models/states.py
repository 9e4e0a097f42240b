"""
Modelos de estados cuánticos de pocos qubits.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from src.core.models.errors import DimensionError, ParameterRangeError, PhysicalityError

NORM_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-12
EIGENVALUE_FLOOR = -1e-10
STOKES_NORM_SLACK = 1e-9


class PauliAxis(Enum):
    """Poincaré-sphere axis. Axis1 is Z (H/V), Axis2 is X (±45), Axis3 is Y (R/L)."""

    AXIS1 = 1
    AXIS2 = 2
    AXIS3 = 3

    @property
    def index(self) -> int:
        """Zero-based position of this axis inside a Stokes triple."""
        return self.value - 1

    def plane(self) -> Tuple["PauliAxis", "PauliAxis"]:
        """The two remaining axes in cyclic order (axis+1, axis+2)."""
        return (
            PauliAxis((self.value % 3) + 1),
            PauliAxis(((self.value + 1) % 3) + 1),
        )

    @classmethod
    def parse(cls, value) -> "PauliAxis":
        """Accept 1/2/3, "1", "axis1" or an existing PauliAxis."""
        if isinstance(value, PauliAxis):
            return value
        text = str(value).strip().lower().replace("axis", "").replace("sigma", "")
        try:
            return cls(int(text))
        except ValueError:
            raise ParameterRangeError(f"Unknown Pauli axis: {value!r}")


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``num_qubits`` qubits (qubit 0 is the most significant bit)."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = _frozen(self.amplitudes).reshape(-1)
        if self.num_qubits < 1:
            raise DimensionError(f"num_qubits must be positive, got {self.num_qubits}")
        if amplitudes.size != 2 ** self.num_qubits:
            raise DimensionError(
                f"Expected {2 ** self.num_qubits} amplitudes for {self.num_qubits} qubits, got {amplitudes.size}"
            )
        norm = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise PhysicalityError(f"State is not normalized: sum |a|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "PureState":
        """Build a state from a flat amplitude list, inferring the qubit count.

        Args:
            amplitudes: Sequence of complex amplitudes, length a power of two.
            normalize: Rescale to unit norm before validation.

        Returns:
            PureState: The validated state.
        """
        vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
        num_qubits = int(round(np.log2(vector.size))) if vector.size > 0 else 0
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise PhysicalityError("Cannot normalize the zero vector")
            vector = vector / norm
        return cls(num_qubits=num_qubits, amplitudes=vector)

    @classmethod
    def zero(cls, num_qubits: int) -> "PureState":
        """Computational ground state |0...0>."""
        vector = np.zeros(2 ** num_qubits, dtype=complex)
        vector[0] = 1.0
        return cls(num_qubits=num_qubits, amplitudes=vector)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise DimensionError(f"Density matrix must be square and nonempty, got shape {entries.shape}")
        if not np.allclose(entries, entries.conj().T, atol=HERMITIAN_TOLERANCE, rtol=0.0):
            raise PhysicalityError("Density matrix is not Hermitian")
        trace = complex(np.trace(entries))
        if abs(trace - 1.0) > NORM_TOLERANCE:
            raise PhysicalityError(f"Density matrix trace is {trace!r}, expected 1")
        smallest = float(np.min(np.linalg.eigvalsh(entries)))
        if smallest < EIGENVALUE_FLOOR:
            raise PhysicalityError(f"Density matrix has negative eigenvalue {smallest!r}")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def num_qubits(self) -> int:
        """Number of qubits, when the dimension is a power of two."""
        count = int(round(np.log2(self.dim)))
        if 2 ** count != self.dim:
            raise DimensionError(f"Dimension {self.dim} is not a qubit register")
        return count


@dataclass(frozen=True)
class StokesVector:
    """Signed Stokes triple with s1 = <Z>, s2 = <X>, s3 = <Y>."""

    s1: float
    s2: float
    s3: float

    def __post_init__(self):
        for name in ("s1", "s2", "s3"):
            value = float(getattr(self, name))
            if not -1.0 - STOKES_NORM_SLACK <= value <= 1.0 + STOKES_NORM_SLACK:
                raise ParameterRangeError(f"{name}={value!r} outside [-1, 1]")
            object.__setattr__(self, name, value)
        if self.norm() > 1.0 + STOKES_NORM_SLACK:
            raise PhysicalityError(f"Stokes vector norm {self.norm()!r} exceeds 1")

    @classmethod
    def from_array(cls, values) -> "StokesVector":
        s1, s2, s3 = (float(v) for v in values)
        return cls(s1, s2, s3)

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3], dtype=float)

    def component(self, axis: PauliAxis) -> float:
        return float(self.as_array()[axis.index])

    def norm(self) -> float:
        return float(np.sqrt(self.s1 ** 2 + self.s2 ** 2 + self.s3 ** 2))

    def scaled(self, factor: float) -> "StokesVector":
        return StokesVector.from_array(self.as_array() * factor)

    @classmethod
    def along(cls, axis: PauliAxis, sign: float = 1.0) -> "StokesVector":
        """Unit vector along one axis."""
        values = np.zeros(3)
        values[axis.index] = 1.0 if sign >= 0 else -1.0
        return cls.from_array(values)
