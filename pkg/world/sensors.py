# world/sensors.py
"""
Síntesis de medidas ruidosas.

- Odometría (velocidad y yaw rate) a 10 Hz: verdad + bias de encendido + N(0, σ).
  Dos muestras por paso de filtro, que se promedian.
- Magnetómetro a 5 Hz: mapa en la posición real + N(0, σ_m).
- Ranging a 5 Hz por cada pareja activa: distancia real + N(0, σ_r).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from comm.schedule import edge_set
from config import Config
from magmap.grid import MagneticMap, OutOfBoundsError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseConfig:
    """
    Desviaciones típicas del ruido de sensores. `sigma_g` en rad/s.

    `bias_v` / `bias_g` fijan un bias común a todos los UAV; si son None,
    cada UAV sortea su bias de encendido ~ N(0, bias_fraction·σ) por ensayo.
    """

    sigma_r: float = Config.SIGMA_R
    sigma_m: float = Config.SIGMA_M
    sigma_v: float = Config.SIGMA_V
    sigma_g: float = math.radians(Config.SIGMA_G_DEG_S)
    bias_fraction: float = Config.BIAS_FRACTION
    bias_v: Optional[float] = None
    bias_g: Optional[float] = None

    def __post_init__(self):
        for name in ("sigma_r", "sigma_m", "sigma_v", "sigma_g", "bias_fraction"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} debe ser finito y >= 0 (recibido {value})")

    @classmethod
    def noiseless(cls) -> "NoiseConfig":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SensorBiases:
    """Bias de encendido por UAV (constantes durante un ensayo)."""

    v: np.ndarray
    g: np.ndarray


@dataclass
class WorldSnapshot:
    """
    Estado real del grupo al final de un paso y control real aplicado durante él.

    positions: (N, 2) este/norte; thetas: (N,); v, omega: (N,) comandados
    """

    positions: np.ndarray
    thetas: np.ndarray
    v: np.ndarray
    omega: np.ndarray

    @property
    def n_uavs(self) -> int:
        return int(self.positions.shape[0])


@dataclass
class SensorFrame:
    """
    Medidas de un paso k. Las muestras de odometría vienen en (N, substeps);
    `v` y `omega` son su media por UAV.
    """

    k: int
    odometry_v: np.ndarray
    odometry_omega: np.ndarray
    mag: np.ndarray
    ranges: Dict[Tuple[int, int], float] = field(default_factory=dict)

    @property
    def v(self) -> np.ndarray:
        return self.odometry_v.mean(axis=1)

    @property
    def omega(self) -> np.ndarray:
        return self.odometry_omega.mean(axis=1)

    def range_for(self, uav: int) -> Tuple[Optional[float], Optional[int]]:
        """(distancia, compañero) del UAV en este paso, o (None, None)."""
        for (i, j), d in self.ranges.items():
            if uav == i:
                return d, j
            if uav == j:
                return d, i
        return None, None


def draw_turn_on_biases(noise: NoiseConfig, n_uavs: int, rng: np.random.Generator) -> SensorBiases:
    """Sortea (o fija) los bias de encendido de velocidad y yaw rate."""
    bias_v = rng.normal(0.0, noise.bias_fraction * noise.sigma_v, n_uavs)
    bias_g = rng.normal(0.0, noise.bias_fraction * noise.sigma_g, n_uavs)
    if noise.bias_v is not None:
        bias_v = np.full(n_uavs, float(noise.bias_v))
    if noise.bias_g is not None:
        bias_g = np.full(n_uavs, float(noise.bias_g))
    return SensorBiases(v=bias_v, g=bias_g)


def sense(
    truth: WorldSnapshot,
    k: int,
    noise: NoiseConfig,
    rng: np.random.Generator,
    magnetic_map: MagneticMap,
    biases: Optional[SensorBiases] = None,
    odometry_substeps: int = Config.ODOMETRY_SUBSTEPS,
) -> SensorFrame:
    """
    Genera las medidas del paso k.

    Raises:
        OutOfBoundsError: si algún UAV está fuera del mapa
    """
    n = truth.n_uavs
    if biases is None:
        biases = SensorBiases(v=np.zeros(n), g=np.zeros(n))

    # orden de consumo del RNG fijo: velocidad, yaw rate, magnetómetro, ranging
    odo_v = truth.v[:, None] + biases.v[:, None] + rng.normal(0.0, noise.sigma_v, (n, odometry_substeps))
    odo_w = truth.omega[:, None] + biases.g[:, None] + rng.normal(0.0, noise.sigma_g, (n, odometry_substeps))
    mag_noise = rng.normal(0.0, noise.sigma_m, n)

    east, north = truth.positions[:, 0], truth.positions[:, 1]
    inside = magnetic_map.contains(east, north)
    if not np.all(inside):
        bad = int(np.flatnonzero(~inside)[0]) + 1
        raise OutOfBoundsError(f"UAV {bad} fuera del mapa en k={k}: ({east[bad - 1]:.1f}, {north[bad - 1]:.1f})")
    mag = magnetic_map.sample_points(east, north) + mag_noise

    ranges = {}
    edges = edge_set(n, k)
    range_noise = rng.normal(0.0, noise.sigma_r, len(edges))
    for (i, j), eps in zip(edges, range_noise):
        d = float(np.hypot(*(truth.positions[i - 1] - truth.positions[j - 1])))
        ranges[(i, j)] = d + float(eps)

    return SensorFrame(k=k, odometry_v=odo_v, odometry_omega=odo_w, mag=mag, ranges=ranges)
