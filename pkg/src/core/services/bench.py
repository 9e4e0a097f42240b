"""
Campañas de simulación: barridos de estados puros al azar, barridos de DOP con
entrelazamiento interno o externo y comparación contra QST estándar según los disparos.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

from src.core.models.errors import ParameterRangeError
from src.core.models.records import CoincidenceSet
from src.core.models.sources import ExternallyMixed, InternalEntangled, PurePolarized, SourceModel, direction_from_angles
from src.core.models.sweeps import (
    BenchmarkPoint,
    DopPoint,
    ShotsBenchmark,
    SweepAggregate,
    SweepConfig,
    SweepResult,
    SweepRow,
)
from src.core.services import tomo
from src.infrastructure.logging.logger import logger
from src.shared.rng import derive_rng

T = TypeVar("T")


def sample_bloch_uniform(rng: np.random.Generator) -> Tuple[float, float]:
    """Area-uniform direction: cos(theta) uniform on [-1, 1], phi uniform on [0, 2 pi)."""
    theta = float(np.arccos(rng.uniform(-1.0, 1.0)))
    phi = float(rng.uniform(0.0, 2.0 * np.pi))
    return theta, phi


def make_source(kind: str, theta: float, phi: float, dop: float = 1.0) -> SourceModel:
    """Source of the given kind along (theta, phi) whose DOP is ``dop``."""
    direction = direction_from_angles(theta, phi)
    weight = (1.0 + dop) / 2.0
    if kind == "pure":
        return PurePolarized(direction)
    if kind == "internal":
        return InternalEntangled(direction, p=weight)
    if kind == "external":
        return ExternallyMixed(direction, lam=weight)
    raise ParameterRangeError(f"Unknown source kind {kind!r}")


def _map(fn: Callable[[int], T], items: Iterable[int], workers: int) -> List[T]:
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def aggregate(values: Sequence[float], bins: int = 20) -> SweepAggregate:
    """Mean, median, standard deviation, standard error and a log10 histogram.

    Exact zeros cannot go into the log histogram and are counted apart.
    """
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise ParameterRangeError("Cannot aggregate an empty sample")
    std = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
    positive = data[data > 0.0]
    edges: Tuple[float, ...] = ()
    counts: Tuple[int, ...] = ()
    if positive.size:
        hist, bin_edges = np.histogram(np.log10(positive), bins=bins)
        edges = tuple(float(e) for e in bin_edges)
        counts = tuple(int(c) for c in hist)
    return SweepAggregate(
        count=int(data.size),
        mean=float(np.mean(data)),
        median=float(np.median(data)),
        std=std,
        stderr=std / float(np.sqrt(data.size)),
        zero_count=int(data.size - positive.size),
        histogram_edges=edges,
        histogram_counts=counts,
    )


def _sweep_row(cfg: SweepConfig, kind: str, dop: float, grid_index: int, index: int) -> SweepRow:
    theta, phi = sample_bloch_uniform(derive_rng(cfg.seed, index))
    source = make_source(kind, theta, phi, dop)
    measured = tomo.measure_coincidences(
        cfg.backend, source, cfg.shots_per_setting, derive_rng(cfg.seed, index, grid_index, 0)
    )
    return SweepRow(
        state_index=index,
        theta=theta,
        phi=phi,
        dop_true=source.dop(),
        s_true=tuple(source.mean_stokes().as_array().tolist()),
        coincidences=measured,
        epsilon=tomo.error_epsilon(source, measured),
    )


def error_angle_correlation(result: SweepResult) -> Dict[str, float]:
    """Pearson r of the error against theta and phi."""
    errors = np.array([row.epsilon for row in result.rows])
    out = {}
    for name in ("theta", "phi"):
        angles = np.array([getattr(row, name) for row in result.rows])
        if errors.size < 2 or np.std(errors) == 0.0 or np.std(angles) == 0.0:
            out[name] = 0.0
        else:
            out[name] = float(np.corrcoef(errors, angles)[0, 1])
    return out


def run_pure_sweep(cfg: SweepConfig) -> SweepResult:
    """Random pure states over the Poincaré sphere, four settings each."""
    n = cfg.effective_num_states
    logger.info(f"Pure sweep: {n} states, {cfg.shots_per_setting} shots/setting, backend={cfg.backend}")
    rows = tuple(_map(lambda i: _sweep_row(cfg, "pure", 1.0, 0, i), range(n), cfg.workers))
    result = SweepResult(
        config=cfg,
        kind="pure",
        rows=rows,
        aggregate=aggregate([row.epsilon for row in rows], cfg.histogram_bins),
    )
    correlation = error_angle_correlation(result)
    logger.debug(f"Pure sweep done: median error {result.aggregate.median:.3e}, correlation {correlation}")
    return SweepResult(result.config, result.kind, result.rows, result.aggregate, correlation=correlation)


def dop_points_from_rows(rows: Sequence[SweepRow], dop_grid: Sequence[float], num_states: int,
                         bins: int = 20) -> Tuple[DopPoint, ...]:
    """Per-DOP aggregates, rows being grouped in grid order ``num_states`` at a time."""
    points = []
    for g, dop in enumerate(dop_grid):
        chunk = rows[g * num_states:(g + 1) * num_states]
        estimates = [tomo.estimate_dop_from_coincidences(row.coincidences) for row in chunk]
        points.append(DopPoint(
            dop=float(dop),
            error=aggregate([row.epsilon for row in chunk], bins),
            dop_estimate=aggregate(estimates, bins),
        ))
    return tuple(points)


def run_dop_sweep(cfg: SweepConfig, kind: str) -> SweepResult:
    """Mean error and DOP estimate at every point of ``cfg.dop_grid``.

    Directions are shared across grid points and across source kinds for equal seeds.
    """
    if kind not in ("internal", "external"):
        raise ParameterRangeError(f"DOP sweeps need an internal or external source, got {kind!r}")
    if not cfg.dop_grid:
        raise ParameterRangeError("DOP grid is empty")
    n = cfg.effective_num_states
    logger.info(f"DOP sweep ({kind}): grid {list(cfg.dop_grid)}, {n} states per point")
    rows: List[SweepRow] = []
    for g, dop in enumerate(cfg.dop_grid):
        rows.extend(_map(lambda i: _sweep_row(cfg, kind, dop, g, i), range(n), cfg.workers))
        logger.debug(f"DOP {dop}: done")
    points = dop_points_from_rows(rows, cfg.dop_grid, n, cfg.histogram_bins)
    return SweepResult(
        config=cfg,
        kind=kind,
        rows=tuple(rows),
        aggregate=aggregate([row.epsilon for row in rows], cfg.histogram_bins),
        dop_points=points,
    )


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log10(y) against log10(x)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise ParameterRangeError("loglog_slope needs at least two strictly positive points")
    return float(np.polyfit(np.log10(x), np.log10(y), 1)[0])


def _benchmark_errors(cfg: SweepConfig, shots_index: int, shots: int, index: int) -> Tuple[float, float]:
    theta, phi = sample_bloch_uniform(derive_rng(cfg.seed, index))
    source = make_source("pure", theta, phi)
    measured = tomo.measure_coincidences(cfg.backend, source, shots, derive_rng(cfg.seed, index, shots_index, 0))
    _, qst_stokes = tomo.standard_qst(source, shots, derive_rng(cfg.seed, index, shots_index, 1))
    qst_coincidences = CoincidenceSet.from_stokes(qst_stokes, shots_per_setting=shots)
    return tomo.error_epsilon(source, measured), tomo.error_epsilon(source, qst_coincidences)


def run_shots_benchmark(cfg: SweepConfig) -> ShotsBenchmark:
    """Mean error of both methods on the same states for each entry of ``cfg.shots_grid``.

    Total rounds are counted as 3 x shots for both methods.
    """
    if not cfg.shots_grid:
        raise ParameterRangeError("Shots grid is empty")
    n = cfg.effective_num_states
    logger.info(f"Shots benchmark: {list(cfg.shots_grid)} shots, {n} states per point")
    points = []
    for k, shots in enumerate(cfg.shots_grid):
        pairs = _map(lambda i: _benchmark_errors(cfg, k, shots, i), range(n), cfg.workers)
        st_errors = [p[0] for p in pairs]
        qst_errors = [p[1] for p in pairs]
        points.append(BenchmarkPoint(
            shots=shots,
            total_rounds=3 * shots,
            st=aggregate(st_errors, cfg.histogram_bins),
            qst=aggregate(qst_errors, cfg.histogram_bins),
        ))
        logger.debug(f"{shots} shots: ST {points[-1].st.mean:.3e}, QST {points[-1].qst.mean:.3e}")
    rounds = [p.total_rounds for p in points]
    if len(points) > 1:
        st_slope = loglog_slope(rounds, [p.st.mean for p in points])
        qst_slope = loglog_slope(rounds, [p.qst.mean for p in points])
    else:
        st_slope = qst_slope = None
    return ShotsBenchmark(config=cfg, points=tuple(points), st_slope=st_slope, qst_slope=qst_slope)
