from __future__ import annotations

from importlib.resources import files
from pathlib import Path


def data_path(name: str) -> Path:
    """Path of a file bundled under ``focalner/data``."""
    return Path(str(files("focalner") / "data" / name))
