# harness/maps.py
"""
Fuente de mapa de un experimento: fichero de rejilla o mapa sintético auto-dimensionado.

El mapa sintético cubre el corredor de vuelo de todos los casos que lo comparten:
    este  [-margin, duration·v_max + margin]
    norte [-margin, (N_max - 1)·track_spacing + margin]
Así todos los casos de un barrido vuelan sobre el mismo campo.
"""
from __future__ import annotations

import logging
import math
from typing import Dict, Iterable, List, Sequence, Tuple

from harness.trial_config import TrialConfig
from magmap.grid import MagneticMap, load_grid
from magmap.synthetic import SyntheticMapSpec, generate_synthetic, lowres_variant

logger = logging.getLogger(__name__)


def corridor_extent(cfgs: Sequence[TrialConfig]) -> Tuple[float, float, float, float]:
    """(east_min, east_max, north_min, north_max) que cubre todos los casos, con margen."""
    margin = max(c.map.margin for c in cfgs)
    east_span = max(c.duration * c.reference.max_velocity for c in cfgs)
    north_span = max((c.group_size - 1) * c.reference.track_spacing for c in cfgs)
    return (-margin, east_span + margin, -margin, north_span + margin)


def synthetic_spec_for(cfgs: Sequence[TrialConfig]) -> SyntheticMapSpec:
    """SyntheticMapSpec para el corredor común de `cfgs` (usa los ajustes del primero)."""
    settings = cfgs[0].map
    e0, e1, n0, n1 = corridor_extent(cfgs)
    cell = settings.cell_size
    width = math.ceil((e1 - e0) / cell) * cell
    height = math.ceil((n1 - n0) / cell) * cell
    if settings.bump_count is not None:
        bump_count = settings.bump_count
    else:
        bump_count = int(round(settings.bumps_per_km2 * width * height / 1e6))
    return SyntheticMapSpec(
        seed=settings.seed,
        extent=(width, height),
        cell_size=cell,
        baseline=settings.baseline,
        bump_count=bump_count,
        bump_amplitude_range=settings.amplitude_range,
        bump_sigma_range=settings.sigma_range,
        origin_east=e0,
        origin_north=n0,
    )


def build_base_map(cfgs: Sequence[TrialConfig]) -> MagneticMap:
    """Mapa de alta resolución compartido por `cfgs` (todos con el mismo base_key)."""
    settings = cfgs[0].map
    if settings.source == "file":
        magnetic_map = load_grid(settings.grid_path)
        logger.info(f"🗺️  Mapa cargado de {settings.grid_path}: {magnetic_map!r}")
        return magnetic_map
    return generate_synthetic(synthetic_spec_for(cfgs))


def map_for_case(base: MagneticMap, cfg: TrialConfig) -> MagneticMap:
    """Aplica la variante de baja resolución si el caso la pide."""
    if cfg.map.resolution == "high":
        return base
    logger.info(
        f"🌫️  Variante de baja resolución ({cfg.map.lowres_method}) para '{cfg.name}'"
    )
    return lowres_variant(
        base,
        method=cfg.map.lowres_method,
        smoothing_sigma=cfg.map.smoothing_sigma,
        height=cfg.map.upward_height,
    )


def maps_for_cases(cfgs: Iterable[TrialConfig]) -> List[MagneticMap]:
    """
    Un mapa por caso, construyendo una sola vez cada mapa base y cada variante.
    Los casos con el mismo `map.base_key()` comparten mapa base.
    """
    cfgs = list(cfgs)
    groups: Dict[tuple, List[TrialConfig]] = {}
    for c in cfgs:
        groups.setdefault(c.map.base_key(), []).append(c)
    bases = {key: build_base_map(group) for key, group in groups.items()}

    variants: Dict[tuple, MagneticMap] = {}
    out = []
    for c in cfgs:
        base = bases[c.map.base_key()]
        vkey = (c.map.base_key(), c.map.resolution, c.map.lowres_method, c.map.smoothing_sigma, c.map.upward_height)
        if vkey not in variants:
            variants[vkey] = map_for_case(base, c)
        out.append(variants[vkey])
    return out
