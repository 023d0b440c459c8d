"""
magnetic_pf package

Filtro de partículas de 4 estados [x, y, θ, γ] que ancla globalmente al grupo
contra el mapa de anomalía magnética.
"""

from .particles import (
    Particle,
    ParticleSet,
    PfConfig,
    WeightCollapseError,
    propagate,
    rotate_relative,
    predicted_positions,
    predicted_positions_batch,
    log_likelihoods,
    weight_update,
    resample,
    expectation,
)
from .resampling import effective_sample_size, systematic_resample_indices
from .filter import FilterStats, MagneticParticleFilter

__all__ = [
    "Particle",
    "ParticleSet",
    "PfConfig",
    "WeightCollapseError",
    "propagate",
    "rotate_relative",
    "predicted_positions",
    "predicted_positions_batch",
    "log_likelihoods",
    "weight_update",
    "resample",
    "expectation",
    "effective_sample_size",
    "systematic_resample_indices",
    "FilterStats",
    "MagneticParticleFilter",
]
