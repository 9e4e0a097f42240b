"""
Modelos de fuente: fotón puro, entrelazamiento interno y mezcla externa.
"""
from dataclasses import dataclass, replace
from typing import Dict

import numpy as np

from src.core.models.errors import ParameterRangeError, PhysicalityError
from src.core.models.states import StokesVector

UNIT_NORM_TOLERANCE = 1e-9


def _check_unit(direction: StokesVector) -> None:
    if abs(direction.norm() - 1.0) > UNIT_NORM_TOLERANCE:
        raise PhysicalityError(f"Direction must be a unit Stokes vector, norm is {direction.norm()!r}")


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterRangeError(f"{name}={value!r} outside [0, 1]")


@dataclass(frozen=True)
class SourceModel:
    """Common interface of the three source kinds.

    ``direction`` is the unit Stokes vector of |phi>; ``weight`` is the population of
    |phi> (p for internal entanglement, lambda for external mixing, 1 for pure photons).
    """

    direction: StokesVector

    kind = "abstract"

    @property
    def weight(self) -> float:
        return 1.0

    def mean_stokes(self) -> StokesVector:
        """Time-averaged Stokes vector <s> = (2 weight - 1) direction."""
        return self.direction.scaled(2.0 * self.weight - 1.0)

    def dop(self) -> float:
        return abs(2.0 * self.weight - 1.0)

    def with_direction(self, direction: StokesVector) -> "SourceModel":
        return replace(self, direction=direction)

    def describe(self) -> Dict[str, float]:
        return {
            "kind": self.kind,
            "weight": self.weight,
            "s1": self.direction.s1,
            "s2": self.direction.s2,
            "s3": self.direction.s3,
        }


@dataclass(frozen=True)
class PurePolarized(SourceModel):
    kind = "pure"

    def __post_init__(self):
        _check_unit(self.direction)


@dataclass(frozen=True)
class InternalEntangled(SourceModel):
    """sqrt(p)|phi>|xi> + sqrt(1-p)|phi_perp>|xi_perp>; the global photon state stays pure."""

    p: float = 1.0
    kind = "internal"

    def __post_init__(self):
        _check_unit(self.direction)
        _check_probability("p", self.p)

    @property
    def weight(self) -> float:
        return self.p


@dataclass(frozen=True)
class ExternallyMixed(SourceModel):
    """lambda |phi><phi| + (1-lambda) |phi_perp><phi_perp|, from environment entanglement or mixing."""

    lam: float = 1.0
    kind = "external"

    def __post_init__(self):
        _check_unit(self.direction)
        _check_probability("lambda", self.lam)

    @property
    def weight(self) -> float:
        return self.lam


def direction_from_angles(theta: float, phi: float) -> StokesVector:
    """Unit vector (cos t, cos p sin t, sin p sin t)."""
    return StokesVector(
        float(np.cos(theta)),
        float(np.cos(phi) * np.sin(theta)),
        float(np.sin(phi) * np.sin(theta)),
    )
