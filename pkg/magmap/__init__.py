"""
magmap package

Mapas de anomalía magnética: rejilla, muestreo bilineal, ficheros,
generación sintética y variantes de baja resolución.
"""

from .grid import (
    MagneticMap,
    OutOfBoundsError,
    GridParseError,
    DimensionMismatchError,
    sample,
    load_grid,
    save_grid,
)
from .synthetic import (
    SyntheticMapSpec,
    SyntheticBump,
    InvalidSpecError,
    draw_bumps,
    render_bumps,
    generate_synthetic,
    degrade_resolution,
    upward_continue,
    lowres_variant,
)

__all__ = [
    "MagneticMap",
    "OutOfBoundsError",
    "GridParseError",
    "DimensionMismatchError",
    "sample",
    "load_grid",
    "save_grid",
    "SyntheticMapSpec",
    "SyntheticBump",
    "InvalidSpecError",
    "draw_bumps",
    "render_bumps",
    "generate_synthetic",
    "degrade_resolution",
    "upward_continue",
    "lowres_variant",
]
