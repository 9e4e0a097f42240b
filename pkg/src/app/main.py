import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

# Determinar si estamos ejecutando desde un ejecutable de PyInstaller o como script normal
FROZEN = getattr(sys, "frozen", False)

if not FROZEN:
    # Raíz del proyecto para que los imports ``src.`` funcionen como script
    BASE_DIR = os.path.abspath(os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", ".."))
    if BASE_DIR not in sys.path:
        sys.path.insert(0, BASE_DIR)

from src import __version__  # noqa: E402
from src.core.models.errors import HOMTomoError  # noqa: E402
from src.core.models.records import DetectorConfig  # noqa: E402
from src.core.models.sources import (  # noqa: E402
    ExternallyMixed,
    InternalEntangled,
    PurePolarized,
    SourceModel,
    direction_from_angles,
)
from src.core.models.states import PauliAxis, StokesVector  # noqa: E402
from src.core.models.sweeps import BENCHMARK_COLUMNS, CSV_COLUMNS, SweepConfig  # noqa: E402
from src.core.services import bench, tomo  # noqa: E402
from src.core.services.backends import available_backends  # noqa: E402
from src.infrastructure.config.config_loader import ConfigError, Settings, load_settings  # noqa: E402
from src.infrastructure.logging.logger import logger  # noqa: E402
from src.infrastructure.persistence.manifest import RunManifest  # noqa: E402
from src.infrastructure.persistence.results_writer import write_json, write_rows_csv  # noqa: E402
from src.shared.rng import fresh_seed  # noqa: E402

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEGENERATE = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Turns usage errors into ConfigError so they map to exit code 1."""

    def error(self, message):
        raise ConfigError(message)


def _csv_floats(text: str) -> Tuple[float, ...]:
    return tuple(float(item) for item in text.split(",") if item.strip())


def _csv_ints(text: str) -> Tuple[int, ...]:
    return tuple(int(item) for item in text.split(",") if item.strip())


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Configuration file (INI)")
    parser.add_argument("--output", help="Output directory")
    parser.add_argument("--seed", help="Integer seed or 'random'")
    parser.add_argument("--backend", choices=available_backends())


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="homtomo", description="Two-photon interference tomography lab")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Show debug messages on the console")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p_tomo = sub.add_parser("tomo", help="Run the full tomography protocol on one source")
    _add_common(p_tomo)
    p_tomo.add_argument("--source", choices=("pure", "internal", "external"))
    p_tomo.add_argument("--theta", type=float)
    p_tomo.add_argument("--phi", type=float)
    p_tomo.add_argument("--p", type=float, help="Schmidt weight of an internally entangled source")
    p_tomo.add_argument("--lambda", dest="lam", type=float, help="Weight of an externally mixed source")
    p_tomo.add_argument("--axis", help="Align the source with a Stokes axis: 1, 2, 3, -1, -2 or -3")
    p_tomo.add_argument("--exact", action="store_true", help="Exact probabilities instead of sampling")
    p_tomo.add_argument("--shots", type=int)
    p_tomo.add_argument("--eta-h", dest="eta_h", type=float)
    p_tomo.add_argument("--eta-v", dest="eta_v", type=float)
    p_tomo.add_argument("--eta0", type=float)
    p_tomo.add_argument("--eta1", type=float)
    p_tomo.add_argument("--pairs", dest="pairs_n", type=int)
    p_tomo.add_argument("--degenerate-tol", dest="degenerate_tol", type=float)

    p_sweep = sub.add_parser("sweep", help="Random-state or DOP sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--kind", choices=("pure", "internal", "external"))
    p_sweep.add_argument("--num-states", dest="num_states", type=int)
    p_sweep.add_argument("--shots", type=int)
    p_sweep.add_argument("--exact", action="store_true")
    p_sweep.add_argument("--dop-grid", dest="dop_grid", type=_csv_floats)
    p_sweep.add_argument("--workers", type=int)
    p_sweep.add_argument("--full-scale", dest="full_scale", action="store_true", default=None)

    p_bench = sub.add_parser("bench", help="Error against shots, compared with standard QST")
    _add_common(p_bench)
    p_bench.add_argument("--num-states", dest="num_states", type=int)
    p_bench.add_argument("--shots-grid", dest="shots_grid", type=_csv_ints)
    p_bench.add_argument("--workers", type=int)
    p_bench.add_argument("--full-scale", dest="full_scale", action="store_true", default=None)

    p_replay = sub.add_parser("replay", help="Re-run a command from its manifest")
    p_replay.add_argument("manifest", help="manifest.json or the directory holding it")
    p_replay.add_argument("--output", help="Output directory (defaults to the manifest's directory)")
    return parser


def _pick(flag: Any, configured: Any) -> Any:
    return configured if flag is None else flag


def _resolve_seed(flag: Optional[str], configured: Any) -> int:
    raw = str(_pick(flag, configured)).strip().lower()
    if raw == "random":
        seed = fresh_seed()
        logger.info(f"Drew random seed {seed}")
        return seed
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"Seed must be an integer or 'random', got {raw!r}")


def _resolve_output(args: argparse.Namespace, settings: Settings) -> Path:
    return Path(_pick(getattr(args, "output", None), settings["output"]["directory"]))


def resolve_tomo(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    """Defaults < config file < flags for the tomo command."""
    cfg = settings["tomo"]
    det = settings["detector"]
    shots = 0 if args.exact else _pick(args.shots, cfg["shots"])
    return {
        "source": _pick(args.source, cfg["source"]),
        "theta": _pick(args.theta, cfg["theta"]),
        "phi": _pick(args.phi, cfg["phi"]),
        "p": _pick(args.p, cfg["p"]),
        "lambda": _pick(args.lam, cfg["lambda"]),
        "axis": args.axis,
        "backend": _pick(args.backend, cfg["backend"]),
        "shots": int(shots),
        "degenerate_tol": _pick(args.degenerate_tol, cfg["degenerate_tol"]),
        "detector": {key: _pick(getattr(args, key), det[key]) for key in ("eta0", "eta1", "eta_h", "eta_v", "pairs_n")},
        "seed": _resolve_seed(args.seed, settings["run"]["seed"]),
    }


def resolve_sweep(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    cfg = settings["sweep"]
    shots = 0 if args.exact else _pick(args.shots, cfg["shots"])
    return SweepConfig(
        num_states=_pick(args.num_states, cfg["num_states"]),
        shots_per_setting=int(shots),
        backend=_pick(args.backend, cfg["backend"]),
        source_kind=_pick(args.kind, cfg["kind"]),
        dop_grid=_pick(args.dop_grid, cfg["dop_grid"]),
        seed=_resolve_seed(args.seed, settings["run"]["seed"]),
        workers=_pick(args.workers, cfg["workers"]),
        histogram_bins=cfg["histogram_bins"],
        full_scale=_pick(args.full_scale, cfg["full_scale"]),
    ).to_dict()


def resolve_bench(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    cfg = settings["bench"]
    return SweepConfig(
        num_states=_pick(args.num_states, cfg["num_states"]),
        backend=_pick(args.backend, cfg["backend"]),
        shots_grid=_pick(args.shots_grid, cfg["shots_grid"]),
        seed=_resolve_seed(args.seed, settings["run"]["seed"]),
        workers=_pick(args.workers, cfg["workers"]),
        full_scale=_pick(args.full_scale, cfg["full_scale"]),
    ).to_dict()


def _direction(resolved: Dict[str, Any]) -> StokesVector:
    axis = resolved.get("axis")
    if axis is None:
        return direction_from_angles(resolved["theta"], resolved["phi"])
    text = str(axis).strip()
    sign = -1.0 if text.startswith("-") else 1.0
    return StokesVector.along(PauliAxis.parse(text.lstrip("+-")), sign)


def build_source(resolved: Dict[str, Any]) -> SourceModel:
    kind = resolved["source"]
    direction = _direction(resolved)
    if kind == "pure":
        return PurePolarized(direction)
    if kind == "internal":
        return InternalEntangled(direction, p=resolved["p"])
    if kind == "external":
        return ExternallyMixed(direction, lam=resolved["lambda"])
    raise ConfigError(f"Unknown source kind {kind!r}")


def run_tomo(resolved: Dict[str, Any], output: Path) -> Tuple[int, List[str]]:
    source = build_source(resolved)
    det = DetectorConfig(**resolved["detector"])
    logger.info(f"Tomography of {source.kind} source with backend={resolved['backend']} shots={resolved['shots']}")
    record = tomo.full_tomography(
        resolved["backend"], source, shots=resolved["shots"], det=det,
        seed=resolved["seed"], degenerate_tol=resolved["degenerate_tol"],
    )
    payload = record.to_dict()
    payload["source"] = source.describe()
    write_json(output / "tomo_record.json", payload)
    print(json.dumps({k: payload[k] for k in ("s1", "s2", "s3", "dop", "global_purity", "classification")},
                     sort_keys=True))
    if record.degenerate:
        logger.warning("Record written with low-confidence signs")
        return EXIT_DEGENERATE, ["tomo_record.json"]
    return EXIT_OK, ["tomo_record.json"]


def run_sweep(resolved: Dict[str, Any], output: Path) -> Tuple[int, List[str]]:
    cfg = SweepConfig.from_dict(resolved)
    if cfg.source_kind == "pure":
        result = bench.run_pure_sweep(cfg)
    else:
        result = bench.run_dop_sweep(cfg, cfg.source_kind)
    write_rows_csv(output / "rows.csv", CSV_COLUMNS, (row.as_csv() for row in result.rows))
    write_json(output / "aggregate.json", result.to_dict())
    logger.info(f"Sweep finished: mean error {result.aggregate.mean:.3e}, median {result.aggregate.median:.3e}")
    return EXIT_OK, ["rows.csv", "aggregate.json"]


def run_bench(resolved: Dict[str, Any], output: Path) -> Tuple[int, List[str]]:
    cfg = SweepConfig.from_dict(resolved)
    result = bench.run_shots_benchmark(cfg)
    write_rows_csv(output / "benchmark.csv", BENCHMARK_COLUMNS, (point.as_csv() for point in result.points))
    write_json(output / "aggregate.json", result.to_dict())
    logger.info(f"Benchmark finished: slopes ST={result.st_slope}, QST={result.qst_slope}")
    return EXIT_OK, ["benchmark.csv", "aggregate.json"]


RUNNERS: Dict[str, Callable[[Dict[str, Any], Path], Tuple[int, List[str]]]] = {
    "tomo": run_tomo,
    "sweep": run_sweep,
    "bench": run_bench,
}

RESOLVERS = {
    "tomo": resolve_tomo,
    "sweep": resolve_sweep,
    "bench": resolve_bench,
}


def execute(command: str, resolved: Dict[str, Any], output: Path) -> int:
    """Run ``command`` with a resolved config and write its results plus the manifest."""
    if command not in RUNNERS:
        raise ConfigError(f"Unknown command {command!r}")
    manifest = RunManifest(command=command, config=resolved, seed=int(resolved["seed"]), version=__version__)
    output.mkdir(parents=True, exist_ok=True)
    code, outputs = RUNNERS[command](resolved, output)
    manifest.finish(outputs).write(output)
    logger.info(f"Results written to {output}")
    return code


def cmd_tomo(args: argparse.Namespace, settings: Settings) -> int:
    return execute("tomo", resolve_tomo(args, settings), _resolve_output(args, settings))


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    return execute("sweep", resolve_sweep(args, settings), _resolve_output(args, settings))


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    return execute("bench", resolve_bench(args, settings), _resolve_output(args, settings))


def cmd_replay(args: argparse.Namespace, settings: Settings) -> int:
    manifest = RunManifest.load(Path(args.manifest))
    source_dir = Path(args.manifest) if Path(args.manifest).is_dir() else Path(args.manifest).parent
    output = Path(args.output) if args.output else source_dir
    logger.info(f"Replaying '{manifest.command}' recorded with version {manifest.version}")
    if manifest.version != __version__:
        logger.warning(f"Manifest comes from version {manifest.version}, running {__version__}")
    return execute(manifest.command, manifest.config, output)


COMMANDS = {
    "tomo": cmd_tomo,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "replay": cmd_replay,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logger.set_console_level(logging.DEBUG)
        settings, _ = load_settings(getattr(args, "config", None))
        return COMMANDS[args.command](args, settings)
    except (HOMTomoError, ValueError, TypeError, KeyError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    logger.info("HOM Tomography Lab starting...")
    sys.exit(main())
