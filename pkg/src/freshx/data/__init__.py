"""Bundled 20-entity smoke dataset (two kinds, 64 samples, binary target)."""

from importlib import resources
from pathlib import Path


def smoke_paths() -> tuple[Path, Path]:
    """Paths of the long-format series CSV and the targets CSV."""
    root = resources.files(__name__)
    return Path(str(root / "smoke_long.csv")), Path(str(root / "smoke_targets.csv"))
