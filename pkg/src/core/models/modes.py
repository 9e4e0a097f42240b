"""
Modelos del motor bosónico: etiquetas de modo, espacio interno y estados de dos fotones.
"""
import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

import numpy as np

from src.core.models.errors import DimensionError, PhysicalityError

MAX_INTERNAL_LABELS = 8
NORMALIZATION_TOLERANCE = 1e-10
AMPLITUDE_CUTOFF = 1e-15

InternalLabel = Tuple[str, ...]


@dataclass(frozen=True, order=True)
class ModeLabel:
    """One bosonic mode: spatial port (0 or 1) plus internal labels such as ("H", "t0")."""

    spatial: int
    internal: InternalLabel

    def __post_init__(self):
        if self.spatial not in (0, 1):
            raise DimensionError(f"Spatial port must be 0 or 1, got {self.spatial}")

    def __str__(self) -> str:
        return f"{self.spatial}:{','.join(self.internal)}"


@dataclass(frozen=True)
class InternalSpace:
    """Cartesian product of small label factors; the first factor is the qubit being measured."""

    factors: Tuple[Tuple[str, ...], ...]

    def __post_init__(self):
        if not self.factors or any(len(f) == 0 for f in self.factors):
            raise DimensionError("Internal space needs at least one nonempty factor")
        if self.dim > MAX_INTERNAL_LABELS:
            raise DimensionError(f"Internal space has {self.dim} labels, limit is {MAX_INTERNAL_LABELS}")

    @property
    def dim(self) -> int:
        return int(np.prod([len(f) for f in self.factors]))

    @property
    def leading_dim(self) -> int:
        return len(self.factors[0])

    def basis(self) -> List[InternalLabel]:
        return [tuple(labels) for labels in itertools.product(*self.factors)]

    def index_of(self, label: InternalLabel) -> int:
        return self.basis().index(tuple(label))


POLARIZATION = InternalSpace((("H", "V"),))
POLARIZATION_TIME_BIN = InternalSpace((("H", "V"), ("t0", "t1")))

PairKey = Tuple[ModeLabel, ModeLabel]


def pair_key(first: ModeLabel, second: ModeLabel) -> PairKey:
    """Unordered pair stored as a sorted tuple."""
    return (first, second) if first <= second else (second, first)


@dataclass(frozen=True)
class TwoPhotonState:
    """Two photons written as sum_K c_K a+_p a+_q |0> over unordered mode pairs K = {p, q}.

    ``terms`` holds the creation-operator coefficients c_K. A doubly occupied mode
    (p == q) has norm sqrt(2), so its probability is 2 |c_K|^2; ``amplitude`` returns
    the normalized amplitude in both cases.
    """

    space: InternalSpace
    terms: Mapping[PairKey, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned: Dict[PairKey, complex] = {}
        for (p, q), coefficient in self.terms.items():
            if abs(coefficient) > AMPLITUDE_CUTOFF:
                key = pair_key(p, q)
                cleaned[key] = cleaned.get(key, 0j) + complex(coefficient)
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))
        total = self.norm()
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise PhysicalityError(f"Two-photon state is not normalized: total probability {total!r}")

    def amplitude(self, first: ModeLabel, second: ModeLabel) -> complex:
        key = pair_key(first, second)
        coefficient = self.terms.get(key, 0j)
        return coefficient * np.sqrt(2.0) if key[0] == key[1] else coefficient

    def probabilities(self) -> Dict[PairKey, float]:
        return {key: float(abs(self.amplitude(*key)) ** 2) for key in self.terms}

    def norm(self) -> float:
        return float(sum(self.probabilities().values()))
