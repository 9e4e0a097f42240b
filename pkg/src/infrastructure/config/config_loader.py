import configparser
import os
import sys
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import appdirs

from src.core.models.errors import HOMTomoError
from src.infrastructure.logging.logger import logger
from src.shared.rng import DEFAULT_SEED

APP_NAME = "HOMTomoLab"
CONFIG_FILE_NAME = "homtomo.ini"
CONFIG_ENV = "HOMTOMO_CONFIG"
OUTPUT_DIR_ENV = "HOMTOMO_OUTPUT_DIR"

Settings = Dict[str, Dict[str, Any]]

DEFAULT_SETTINGS: Settings = {
    "run": {
        "seed": str(DEFAULT_SEED),
    },
    "tomo": {
        "source": "pure",
        "theta": 0.0,
        "phi": 0.0,
        "p": 1.0,
        "lambda": 1.0,
        "backend": "analytic",
        "shots": 0,
        "degenerate_tol": 0.02,
    },
    "sweep": {
        "kind": "pure",
        "num_states": 1000,
        "shots": 10000,
        "backend": "circuit",
        "dop_grid": (0.0, 0.25, 0.5, 0.75, 1.0),
        "workers": 1,
        "histogram_bins": 20,
        "full_scale": False,
    },
    "bench": {
        "num_states": 1000,
        "shots_grid": (100, 1000, 10000, 100000),
        "backend": "circuit",
        "workers": 1,
        "full_scale": False,
    },
    "detector": {
        "eta0": 0.9,
        "eta1": 0.9,
        "eta_h": 0.9,
        "eta_v": 0.7,
        "pairs_n": 1000000,
    },
    "output": {
        "directory": "results",
    },
}


class ConfigError(HOMTomoError, ValueError):
    """Invalid configuration file or value."""


def _get_prioritized_config_paths(explicit: Optional[str] = None) -> List[Path]:
    """Determines a prioritized list of absolute paths to check for homtomo.ini
    The order of paths reflects the priority for searching.

    Args:
        explicit (Optional[str]): Path given with ``--config``; always searched first.

    Returns:
        List[Path]: A list of Paths to potential homtomo.ini files in order of priority.
    """
    paths: List[Path] = []

    # 1. Explicit path
    if explicit:
        paths.append(Path(explicit).expanduser().resolve())

    # 2. Environment override
    env_path = os.environ.get(CONFIG_ENV)
    if env_path:
        paths.append(Path(env_path).expanduser().resolve())

    # 3. User config directory
    paths.append(Path(appdirs.user_config_dir(APP_NAME)) / CONFIG_FILE_NAME)

    # 4. If running in a PyInstaller bundle
    if getattr(sys, "frozen", False):
        paths.append(Path(sys.executable).parent / "configs" / CONFIG_FILE_NAME)

    # 5. Project directory
    project_dir = Path(__file__).resolve().parent.parent.parent.parent / "configs"
    paths.append(project_dir / CONFIG_FILE_NAME)

    # Remove duplicates while preserving order
    unique_paths = []
    for p in paths:
        if p not in unique_paths:
            unique_paths.append(p)

    return unique_paths


def _find_config_file_in_paths(config_search_paths: List[Path]) -> Optional[Path]:
    """Searches for homtomo.ini in the given list of paths.

    Args:
        config_search_paths (List[Path]): A list of paths to check for homtomo.ini.

    Returns:
        Optional[Path]: The Path to the found configuration file, or None if not found.
    """
    logger.debug("Searching for configuration files in the following prioritized paths:")
    for path in config_search_paths:
        logger.debug(f"  - Checking: {path}")

        if path.is_file():
            logger.info(f"  -> Found configuration file: {path}")
            return path

        # Directories may hold the file
        elif path.is_dir():
            candidate = path / CONFIG_FILE_NAME
            if candidate.is_file():
                logger.info(f"  -> Found configuration file: {candidate}")
                return candidate

        elif path.parent.is_dir():
            logger.debug(f"  - File not found: {path}")
        else:
            logger.debug(f"  - Parent directory not found: {path.parent}")

    logger.warning("No configuration file found in any of the searched paths; using built-in defaults.")
    return None


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_value(raw: str, default: Any) -> Any:
    """Convert ``raw`` to the type of ``default`` (bool, int, float, tuple or str).

    Raises:
        ValueError: If ``raw`` cannot be read as that type.
    """
    if isinstance(default, bool):
        return _parse_bool(raw)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        item_type = type(default[0]) if default else float
        return tuple(item_type(item.strip()) for item in raw.split(",") if item.strip())
    return raw.strip()


def _merge(settings: Settings, parser: configparser.ConfigParser, source: Path) -> None:
    for section in parser.sections():
        if section not in settings:
            logger.warning(f"Ignoring unknown section [{section}] in {source}")
            continue
        for key, raw in parser.items(section):
            if key not in settings[section]:
                logger.warning(f"Ignoring unknown key '{key}' in [{section}] of {source}")
                continue
            try:
                settings[section][key] = parse_value(raw, DEFAULT_SETTINGS[section][key])
            except ValueError as e:
                raise ConfigError(f"Invalid value for [{section}] {key} in {source}: {e}")


def load_settings(explicit: Optional[str] = None) -> Tuple[Settings, Optional[Path]]:
    """Load the built-in defaults overridden by the first configuration file found.

    Args:
        explicit (Optional[str]): Path from ``--config``. Unlike the other
            locations it must exist.

    Raises:
        ConfigError: If the explicit file is missing or any file is malformed.

    Returns:
        Tuple[Settings, Optional[Path]]: Settings per section and the file used, if any.
    """
    if explicit and not Path(explicit).expanduser().is_file():
        raise ConfigError(f"Configuration file not found: {explicit}")

    settings = deepcopy(DEFAULT_SETTINGS)
    config_file_path = _find_config_file_in_paths(_get_prioritized_config_paths(explicit))

    if config_file_path:
        logger.info(f"Loading settings from: {config_file_path}")
        parser = configparser.ConfigParser()
        try:
            with open(config_file_path, "r", encoding="utf-8") as f:
                parser.read_file(f)
        except configparser.Error as e:
            raise ConfigError(f"Malformed configuration file {config_file_path}: {e}")
        _merge(settings, parser, config_file_path)

    output_override = os.environ.get(OUTPUT_DIR_ENV)
    if output_override:
        logger.debug(f"Output directory overridden by {OUTPUT_DIR_ENV}: {output_override}")
        settings["output"]["directory"] = output_override

    return settings, config_file_path
