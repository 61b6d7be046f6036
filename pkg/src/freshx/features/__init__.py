from freshx.features.registry import (
    CATALOG,
    DEFAULT_GRID,
    MappingSpec,
    extract_block,
    extract_feature,
    load_grid,
    registry,
)

__all__ = ["CATALOG", "DEFAULT_GRID", "MappingSpec", "extract_block", "extract_feature", "load_grid", "registry"]
