"""
Manifiesto de ejecución: comando, configuración resuelta y semilla de cada resultado.
"""
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.infrastructure.persistence.results_writer import read_json, write_json

MANIFEST_NAME = "manifest.json"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    """Everything needed to replay a command and check its output."""

    command: str
    config: Dict[str, Any]
    seed: int
    version: str
    started_at: str = field(default_factory=utc_now)
    finished_at: Optional[str] = None
    outputs: List[str] = field(default_factory=list)

    def finish(self, outputs: List[str]) -> "RunManifest":
        self.outputs = sorted(outputs)
        self.finished_at = utc_now()
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def write(self, directory: Path) -> Path:
        return write_json(Path(directory) / MANIFEST_NAME, self.to_dict())

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        """Read a manifest file, or ``manifest.json`` inside a directory."""
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        data = read_json(path)
        missing = [key for key in ("command", "config", "seed", "version") if key not in data]
        if missing:
            raise ValueError(f"Manifest {path} lacks {missing}")
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)
