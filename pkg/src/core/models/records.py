"""
Modelos del protocolo de tomografía: coincidencias, detectores y registro de Stokes.
"""
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from src.core.models.errors import ParameterRangeError
from src.core.models.states import PauliAxis, StokesVector


class Classification(Enum):
    PURE_INTERNAL = "PureInternal"
    EXTERNAL_OR_MIXTURE = "ExternalOrMixture"


@dataclass(frozen=True)
class CoincidenceSet:
    """Estimated coincidence probabilities for U in {I, sigma1, sigma2, sigma3}."""

    p_identity: float
    p_axis1: float
    p_axis2: float
    p_axis3: float
    shots_per_setting: int = 0

    def __post_init__(self):
        for name in ("p_identity", "p_axis1", "p_axis2", "p_axis3"):
            value = float(getattr(self, name))
            if not -1e-12 <= value <= 1.0 + 1e-12:
                raise ParameterRangeError(f"{name}={value!r} outside [0, 1]")
            object.__setattr__(self, name, min(max(value, 0.0), 1.0))
        if self.shots_per_setting < 0:
            raise ParameterRangeError("shots_per_setting must be nonnegative")

    def p_axis(self, axis: PauliAxis) -> float:
        return (self.p_axis1, self.p_axis2, self.p_axis3)[PauliAxis.parse(axis).index]

    @classmethod
    def from_stokes(cls, stokes: StokesVector, p_identity: float = 0.0, shots_per_setting: int = 0) -> "CoincidenceSet":
        """Coincidences a source with mean Stokes vector ``stokes`` would give."""
        values = [(1.0 - stokes.component(axis) ** 2) / 2.0 - p_identity for axis in PauliAxis]
        return cls(p_identity, *values, shots_per_setting=shots_per_setting)


@dataclass(frozen=True)
class DetectorConfig:
    """Detector efficiencies, polarization-dependent-loss transmissions and pair budget."""

    eta0: float = 0.9
    eta1: float = 0.9
    eta_h: float = 0.9
    eta_v: float = 0.7
    pairs_n: int = 1_000_000

    def __post_init__(self):
        for name in ("eta0", "eta1", "eta_h", "eta_v"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterRangeError(f"{name}={value!r} outside [0, 1]")
        if not self.eta_h > self.eta_v:
            raise ParameterRangeError(f"eta_h ({self.eta_h}) must exceed eta_v ({self.eta_v})")
        if self.pairs_n < 1:
            raise ParameterRangeError("pairs_n must be positive")


@dataclass(frozen=True)
class CountTriple:
    c0: float
    c1: float
    c01: float


@dataclass(frozen=True)
class SignDecision:
    sign: int
    confident: bool
    predicted_same_sign: float = 0.0
    predicted_opposite_sign: float = 0.0


@dataclass(frozen=True)
class RotationMeasurement:
    """One rotated setting: rotation about ``axis`` by ``theta``, re-measuring ``measured_axis``."""

    axis: PauliAxis
    xi: float
    theta: float
    measured_axis: PauliAxis
    partner_axis: PauliAxis
    pre_abs: Tuple[float, float]
    post_abs: float
    p_coincidence: float
    decision: SignDecision


@dataclass(frozen=True)
class TomographyDiagnostics:
    coincidences: CoincidenceSet
    rotations: Tuple[RotationMeasurement, ...] = ()
    counts: Optional[CountTriple] = None
    eta_pdl_estimate: Optional[float] = None
    eta_pdl_stderr: Optional[float] = None
    estimator_warning: bool = False


@dataclass(frozen=True)
class StokesRecord:
    """Result of one full tomography run."""

    s: StokesVector
    dop: float
    global_purity: float
    classification: Classification
    sign_confidence: Tuple[bool, bool, bool]
    global_sign_ambiguous: bool = False
    diagnostics: Optional[TomographyDiagnostics] = field(default=None, compare=False)

    @property
    def degenerate(self) -> bool:
        return self.global_sign_ambiguous or not all(self.sign_confidence)

    def to_dict(self) -> Dict[str, Any]:
        """Plain dictionary for JSON export."""
        payload: Dict[str, Any] = {
            "s1": self.s.s1,
            "s2": self.s.s2,
            "s3": self.s.s3,
            "dop": self.dop,
            "global_purity": self.global_purity,
            "classification": self.classification.value,
            "sign_confidence": list(self.sign_confidence),
            "global_sign_ambiguous": self.global_sign_ambiguous,
        }
        if self.diagnostics is not None:
            diag = self.diagnostics
            payload["diagnostics"] = {
                "coincidences": asdict(diag.coincidences),
                "rotations": [
                    {
                        "axis": r.axis.value,
                        "xi": r.xi,
                        "theta": r.theta,
                        "measured_axis": r.measured_axis.value,
                        "partner_axis": r.partner_axis.value,
                        "pre_abs": list(r.pre_abs),
                        "post_abs": r.post_abs,
                        "p_coincidence": r.p_coincidence,
                        "sign_product": r.decision.sign,
                        "confident": r.decision.confident,
                    }
                    for r in diag.rotations
                ],
                "counts": asdict(diag.counts) if diag.counts is not None else None,
                "eta_pdl_estimate": diag.eta_pdl_estimate,
                "eta_pdl_stderr": diag.eta_pdl_stderr,
                "estimator_warning": diag.estimator_warning,
            }
        return payload
