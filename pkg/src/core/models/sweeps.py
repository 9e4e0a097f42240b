"""
Modelos de campañas de simulación: configuración, filas por estado y agregados.
"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

from src.core.models.errors import ParameterRangeError
from src.core.models.records import CoincidenceSet
from src.shared.rng import DEFAULT_SEED

SOURCE_KINDS = ("pure", "internal", "external")
FULL_SCALE_STATES = 10000

CSV_COLUMNS = (
    "state_index",
    "theta",
    "phi",
    "dop_true",
    "s1_true",
    "s2_true",
    "s3_true",
    "p_I",
    "p_1",
    "p_2",
    "p_3",
    "epsilon",
)

BENCHMARK_COLUMNS = (
    "shots",
    "total_rounds",
    "st_mean",
    "st_stderr",
    "st_median",
    "qst_mean",
    "qst_stderr",
    "qst_median",
)


@dataclass(frozen=True)
class SweepConfig:
    """Parameters shared by the pure, DOP and shots campaigns."""

    num_states: int = 1000
    shots_per_setting: int = 10000
    backend: str = "circuit"
    source_kind: str = "pure"
    dop_grid: Tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    shots_grid: Tuple[int, ...] = (100, 1000, 10000, 100000)
    seed: int = DEFAULT_SEED
    workers: int = 1
    histogram_bins: int = 20
    full_scale: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dop_grid", tuple(float(d) for d in self.dop_grid))
        object.__setattr__(self, "shots_grid", tuple(int(s) for s in self.shots_grid))
        if self.num_states < 1:
            raise ParameterRangeError("num_states must be at least 1")
        if self.shots_per_setting < 0:
            raise ParameterRangeError("shots_per_setting must be nonnegative")
        if self.source_kind not in SOURCE_KINDS:
            raise ParameterRangeError(f"Unknown source kind {self.source_kind!r}; choose one of {SOURCE_KINDS}")
        if any(not 0.0 <= d <= 1.0 for d in self.dop_grid):
            raise ParameterRangeError(f"DOP grid values must lie in [0, 1]: {self.dop_grid}")
        if any(s < 1 for s in self.shots_grid):
            raise ParameterRangeError(f"Shot counts must be positive: {self.shots_grid}")
        if self.workers < 1 or self.histogram_bins < 1:
            raise ParameterRangeError("workers and histogram_bins must be positive")

    @property
    def effective_num_states(self) -> int:
        return FULL_SCALE_STATES if self.full_scale else self.num_states

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["dop_grid"] = list(self.dop_grid)
        payload["shots_grid"] = list(self.shots_grid)
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "SweepConfig":
        known = {k: v for k, v in payload.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass(frozen=True)
class SweepRow:
    state_index: int
    theta: float
    phi: float
    dop_true: float
    s_true: Tuple[float, float, float]
    coincidences: CoincidenceSet
    epsilon: float

    def as_csv(self) -> Tuple:
        c = self.coincidences
        return (
            self.state_index, self.theta, self.phi, self.dop_true, *self.s_true,
            c.p_identity, c.p_axis1, c.p_axis2, c.p_axis3, self.epsilon,
        )


@dataclass(frozen=True)
class SweepAggregate:
    """Statistics of the error over the states of one campaign point."""

    count: int
    mean: float
    median: float
    std: float
    stderr: float
    zero_count: int = 0
    histogram_edges: Tuple[float, ...] = ()
    histogram_counts: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["histogram_edges"] = list(self.histogram_edges)
        payload["histogram_counts"] = list(self.histogram_counts)
        return payload


@dataclass(frozen=True)
class DopPoint:
    dop: float
    error: SweepAggregate
    dop_estimate: SweepAggregate

    def to_dict(self) -> Dict[str, Any]:
        return {"dop": self.dop, "error": self.error.to_dict(), "dop_estimate": self.dop_estimate.to_dict()}


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    kind: str
    rows: Tuple[SweepRow, ...]
    aggregate: SweepAggregate
    dop_points: Tuple[DopPoint, ...] = ()
    correlation: Optional[Dict[str, float]] = field(default=None, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "kind": self.kind,
            "num_rows": len(self.rows),
            "aggregate": self.aggregate.to_dict(),
            "dop_points": [point.to_dict() for point in self.dop_points],
        }
        if self.correlation is not None:
            payload["correlation"] = dict(self.correlation)
        return payload


@dataclass(frozen=True)
class BenchmarkPoint:
    shots: int
    total_rounds: int
    st: SweepAggregate
    qst: SweepAggregate

    def as_csv(self) -> Tuple:
        return (
            self.shots, self.total_rounds,
            self.st.mean, self.st.stderr, self.st.median,
            self.qst.mean, self.qst.stderr, self.qst.median,
        )


@dataclass(frozen=True)
class ShotsBenchmark:
    config: SweepConfig
    points: Tuple[BenchmarkPoint, ...]
    st_slope: Optional[float]
    qst_slope: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [
                {"shots": p.shots, "total_rounds": p.total_rounds, "st": p.st.to_dict(), "qst": p.qst.to_dict()}
                for p in self.points
            ],
            "st_slope": self.st_slope,
            "qst_slope": self.qst_slope,
        }
