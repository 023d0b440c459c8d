# tests/conftest.py
import copy
from typing import Any, Dict

import numpy as np
import pytest

from harness.trial_config import from_dict
from magmap.grid import MagneticMap
from magmap.synthetic import SyntheticMapSpec, generate_synthetic


# ============================================================
# Mapas de prueba
# ============================================================

PLANE_A, PLANE_B, PLANE_C = 100.0, 0.5, -0.25


def plane_value(east, north):
    """Campo lineal: la interpolación bilineal lo reproduce exactamente."""
    return PLANE_A + PLANE_B * np.asarray(east) + PLANE_C * np.asarray(north)


def make_plane_map(origin_east=0.0, origin_north=0.0, cell=10.0, n_rows=5, n_cols=6) -> MagneticMap:
    eastings = origin_east + np.arange(n_cols) * cell
    northings = origin_north + np.arange(n_rows) * cell
    # fila 0 = más al norte
    values = plane_value(eastings[None, :], northings[::-1, None])
    return MagneticMap(origin_east, origin_north, cell, values)


@pytest.fixture
def plane_map() -> MagneticMap:
    return make_plane_map()


@pytest.fixture(scope="session")
def small_spec() -> SyntheticMapSpec:
    return SyntheticMapSpec(
        seed=11,
        extent=(4000.0, 3000.0),
        cell_size=50.0,
        bump_count=25,
        origin_east=-500.0,
        origin_north=-500.0,
    )


@pytest.fixture(scope="session")
def small_map(small_spec) -> MagneticMap:
    return generate_synthetic(small_spec)


# ============================================================
# Configuraciones de ensayo reducidas
# ============================================================

TINY_CONFIG: Dict[str, Any] = {
    "name": "tiny",
    "group_size": 4,
    "duration_s": 20.0,
    "warmup_s": 2.0,
    "n_trials": 2,
    "workers": 1,
    "master_seed": 99,
    "pf": {"particle_count": 100},
    "map": {"cell_size": 100.0, "margin": 2000.0},
}


def tiny_config_dict(**overrides) -> Dict[str, Any]:
    """Copia de TINY_CONFIG con overrides de primer nivel o de sección."""
    data = copy.deepcopy(TINY_CONFIG)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key].update(value)
        else:
            data[key] = value
    return data


def noiseless_config_dict(**overrides) -> Dict[str, Any]:
    """Sin ruido, sin dispersión inicial y sobre la recta: el estimado debe coincidir con la verdad."""
    data = tiny_config_dict(
        init_position_sigma=0.0,
        noise={
            "sigma_r": 0.0, "sigma_m": 0.0, "sigma_v": 0.0,
            "sigma_g_deg_s": 0.0, "bias_fraction": 0.0,
        },
        reference={"random_phase": False},
        ekf={"init_position_std": 0.0, "init_heading_std_deg": 0.0},
        pf={
            "particle_count": 50, "position_std": 0.0, "heading_std": 0.0, "gamma_std": 0.0,
            "init_position_std": 0.0, "init_heading_std_deg": 0.0, "init_gamma_std_deg": 0.0,
        },
    )
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key].update(value)
        else:
            data[key] = value
    return data


@pytest.fixture
def tiny_config():
    return from_dict(tiny_config_dict())


@pytest.fixture
def noiseless_config():
    return from_dict(noiseless_config_dict())
