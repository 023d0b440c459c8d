# magnetic_pf/filter.py
"""
Agente de localización magnética de un UAV: encadena propagación, actualización
de pesos, remuestreo y esperanza sobre el paquete completo de k - s.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from magmap.grid import MagneticMap
from magnetic_pf.particles import (
    Particle,
    ParticleSet,
    PfConfig,
    WeightCollapseError,
    expectation,
    log_likelihoods,
    propagate,
    resample,
    weight_update,
)
from world.kinematics import ControlMeasurement, Pose2D

logger = logging.getLogger(__name__)


@dataclass
class FilterStats:
    """Contadores de calidad del ensayo."""

    weight_resets: int = 0
    off_map_updates: int = 0        # pasos con todas las partículas fuera del mapa
    resamples: int = 0
    last_ess: float = float("nan")


class MagneticParticleFilter:
    """
    Filtro de partículas de un UAV (`uav_id`, base 1).

    Args:
        uav_id: UAV propietario; las posiciones relativas deben calcularse respecto a él
        initial_pose: pose de traspaso
        cfg: PfConfig
        rng: generador propio del filtro
    """

    def __init__(self, uav_id: int, initial_pose: Pose2D, cfg: PfConfig, rng: np.random.Generator):
        self.uav_id = uav_id
        self.cfg = cfg
        self.rng = rng
        self.particles = ParticleSet.initialize(initial_pose, cfg, rng)
        self.stats = FilterStats(last_ess=float(len(self.particles)))
        self.estimate: Particle = expectation(self.particles)

    def step(
        self,
        control: ControlMeasurement,
        rel_positions: np.ndarray,
        measurements: np.ndarray,
        magnetic_map: MagneticMap,
        k: Optional[int] = None,
    ) -> Particle:
        """Un ciclo completo del filtro. Devuelve la esperanza del estado."""
        self.particles = propagate(self.particles, control, self.cfg, self.rng)

        ll = log_likelihoods(self.particles.states, rel_positions, measurements, magnetic_map, self.cfg.magnetic_sigma)
        if np.isneginf(ll).all():
            self.stats.off_map_updates += 1

        try:
            self.particles = weight_update(
                self.particles, rel_positions, measurements, magnetic_map, self.cfg, log_lik=ll
            )
        except WeightCollapseError as e:
            self.stats.weight_resets += 1
            m = len(self.particles)
            self.particles = ParticleSet(self.particles.states, np.full(m, 1.0 / m))
            logger.warning(f"⚠️ UAV {self.uav_id} k={k}: {e}; pesos reiniciados a uniforme")

        self.stats.last_ess = self.particles.ess()
        resampled = resample(self.particles, self.cfg, self.rng)
        if resampled is not self.particles:
            self.stats.resamples += 1
        self.particles = resampled

        self.estimate = expectation(self.particles)
        logger.debug(
            f"PF UAV {self.uav_id} k={k}: ({self.estimate.x:.1f}, {self.estimate.y:.1f}) "
            f"γ={self.estimate.gamma:.4f} ESS={self.stats.last_ess:.0f}"
        )
        return self.estimate
