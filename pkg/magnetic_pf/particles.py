# magnetic_pf/particles.py
"""
Filtro de partículas magnético de 4 estados por UAV: p = [x, y, θ, γ].

γ es el error de rotación del grupo: las posiciones relativas del EKF se giran γ
antes de sumarlas a la posición de la partícula para predecir dónde está cada UAV.
La verosimilitud es el producto, sobre los N UAV, de gaussianas entre la lectura
del magnetómetro y el mapa en la posición predicha.

Los pesos se manejan en dominio logarítmico (resta del máximo) para que el
producto de N=16 gaussianas no se desborde hacia cero.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from config import Config
from magmap.grid import MagneticMap
from magnetic_pf.resampling import effective_sample_size, systematic_resample_indices
from utils.helpers import circular_mean, wrap_angle
from world.kinematics import ControlMeasurement, Pose2D, propagate_states

logger = logging.getLogger(__name__)

X, Y, THETA, GAMMA = range(4)


class WeightCollapseError(ArithmeticError):
    """Todos los pesos son cero (partículas fuera del mapa o desbordamiento)."""


@dataclass(frozen=True)
class Particle:
    x: float
    y: float
    theta: float
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))
        object.__setattr__(self, "gamma", wrap_angle(float(self.gamma)))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta, self.gamma], dtype=float)

    def pose(self) -> Pose2D:
        return Pose2D(self.x, self.y, self.theta)


@dataclass(frozen=True)
class PfConfig:
    """
    Args:
        particle_count: M
        position_std: ruido de proceso en x, y por paso (m)
        heading_std: ruido de proceso en θ por paso (rad)
        gamma_std: paseo aleatorio de γ por paso (rad)
        magnetic_sigma: σ_m de la verosimilitud (nT)
        resample_threshold: se remuestrea si ESS < threshold·M
        ts: periodo (s)
        init_*: dispersión inicial alrededor de la pose de traspaso
    """

    particle_count: int = Config.PARTICLE_COUNT
    position_std: float = Config.PF_POSITION_STD
    heading_std: float = Config.PF_HEADING_STD
    gamma_std: float = Config.PF_GAMMA_STD
    magnetic_sigma: float = Config.SIGMA_M
    resample_threshold: float = Config.RESAMPLE_THRESHOLD
    ts: float = Config.TS
    init_position_std: float = Config.PF_INIT_POSITION_STD
    init_heading_std: float = math.radians(Config.PF_INIT_HEADING_STD_DEG)
    init_gamma_std: float = math.radians(Config.PF_INIT_GAMMA_STD_DEG)

    def __post_init__(self):
        if self.particle_count < 1:
            raise ValueError(f"particle_count debe ser >= 1 (recibido {self.particle_count})")
        for name in ("position_std", "heading_std", "gamma_std", "init_position_std", "init_heading_std", "init_gamma_std"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} debe ser >= 0")
        if not self.magnetic_sigma > 0:
            raise ValueError(f"magnetic_sigma debe ser > 0 (recibido {self.magnetic_sigma})")
        if not 0 <= self.resample_threshold <= 1:
            raise ValueError(f"resample_threshold debe estar en [0, 1] (recibido {self.resample_threshold})")


@dataclass
class ParticleSet:
    """M partículas en un array (M, 4) y sus pesos normalizados (M,)."""

    states: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float).reshape(-1, 4)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if self.weights.size != self.states.shape[0]:
            raise ValueError("states y weights deben tener el mismo número de partículas")

    def __len__(self) -> int:
        return int(self.states.shape[0])

    @property
    def particles(self) -> List[Particle]:
        return [Particle(*row) for row in self.states]

    def ess(self) -> float:
        return effective_sample_size(self.weights)

    def copy(self) -> "ParticleSet":
        return ParticleSet(self.states.copy(), self.weights.copy())

    @classmethod
    def from_particles(cls, particles, weights: Optional[np.ndarray] = None) -> "ParticleSet":
        states = np.array([p.as_array() for p in particles], dtype=float)
        if weights is None:
            weights = np.full(len(states), 1.0 / len(states))
        return cls(states, np.asarray(weights, dtype=float))

    @classmethod
    def initialize(cls, center: Pose2D, cfg: PfConfig, rng: np.random.Generator) -> "ParticleSet":
        """Posiciones N(centro, σ), rumbo N(θ0, σθ), γ N(0, σγ); pesos uniformes."""
        m = cfg.particle_count
        states = np.empty((m, 4))
        states[:, X] = center.x + rng.normal(0.0, cfg.init_position_std, m)
        states[:, Y] = center.y + rng.normal(0.0, cfg.init_position_std, m)
        states[:, THETA] = wrap_angle(center.theta + rng.normal(0.0, cfg.init_heading_std, m))
        states[:, GAMMA] = wrap_angle(rng.normal(0.0, cfg.init_gamma_std, m))
        return cls(states, np.full(m, 1.0 / m))


def propagate(pset: ParticleSet, control: ControlMeasurement, cfg: PfConfig, rng: np.random.Generator) -> ParticleSet:
    """Avanza cada partícula con la odometría propia + ruido de proceso; γ hace un paseo aleatorio."""
    m = len(pset)
    states = np.empty_like(pset.states)
    states[:, :3] = propagate_states(pset.states[:, :3], control.v, control.omega, cfg.ts)
    states[:, X] += rng.normal(0.0, cfg.position_std, m)
    states[:, Y] += rng.normal(0.0, cfg.position_std, m)
    states[:, THETA] = wrap_angle(states[:, THETA] + rng.normal(0.0, cfg.heading_std, m))
    states[:, GAMMA] = wrap_angle(pset.states[:, GAMMA] + rng.normal(0.0, cfg.gamma_std, m))
    return ParticleSet(states, pset.weights.copy())


def rotate_relative(rel, gamma):
    """
    Gira posiciones relativas un ángulo γ:
        x' = cos γ·x - sin γ·y
        y' = sin γ·x + cos γ·y

    Args:
        rel: (..., 2)
        gamma: escalar o array difundible contra rel[..., 0]
    """
    rel = np.asarray(rel, dtype=float)
    c, s = np.cos(gamma), np.sin(gamma)
    out = np.empty(np.broadcast(rel[..., 0], c).shape + (2,))
    out[..., 0] = c * rel[..., 0] - s * rel[..., 1]
    out[..., 1] = s * rel[..., 0] + c * rel[..., 1]
    return out


def predicted_positions(particle: Particle, rel_positions: np.ndarray) -> np.ndarray:
    """(N, 2): posición de la partícula + rel(i/j) girado por su γ."""
    rel = np.asarray(rel_positions, dtype=float).reshape(-1, 2)
    return np.array([particle.x, particle.y]) + rotate_relative(rel, particle.gamma)


def predicted_positions_batch(states: np.ndarray, rel_positions: np.ndarray) -> np.ndarray:
    """Versión vectorizada: (M, N, 2) para todas las partículas."""
    rel = np.asarray(rel_positions, dtype=float).reshape(-1, 2)
    rotated = rotate_relative(rel[None, :, :], states[:, GAMMA][:, None])
    return states[:, None, :2] + rotated


def log_likelihoods(
    states: np.ndarray,
    rel_positions: np.ndarray,
    measurements: np.ndarray,
    magnetic_map: MagneticMap,
    magnetic_sigma: float,
) -> np.ndarray:
    """
    log p(y | p) por partícula (sin constante). -inf si alguna posición predicha cae fuera del mapa.
    """
    pred = predicted_positions_batch(states, rel_positions)
    expected = magnetic_map.sample_points(pred[..., 0], pred[..., 1])     # (M, N), NaN fuera
    residual = (np.asarray(measurements, dtype=float)[None, :] - expected) / magnetic_sigma
    ll = -0.5 * np.sum(residual * residual, axis=1)
    ll[np.isnan(ll)] = -np.inf
    return ll


def weight_update(
    pset: ParticleSet,
    rel_positions: np.ndarray,
    measurements: np.ndarray,
    magnetic_map: MagneticMap,
    cfg: PfConfig,
    log_lik: Optional[np.ndarray] = None,
) -> ParticleSet:
    """
    w_k ∝ p(y_k | p_k) · w_{k-1}, normalizado. `log_lik` permite reutilizar
    las log-verosimilitudes ya calculadas.

    Raises:
        WeightCollapseError: si todas las partículas quedan con peso 0
    """
    ll = log_lik if log_lik is not None else log_likelihoods(
        pset.states, rel_positions, measurements, magnetic_map, cfg.magnetic_sigma
    )
    with np.errstate(divide="ignore"):
        log_w = np.log(pset.weights) + ll
    peak = np.max(log_w)
    if not np.isfinite(peak):
        raise WeightCollapseError("todas las partículas tienen verosimilitud nula")
    w = np.exp(log_w - peak)
    return ParticleSet(pset.states, w / w.sum())


def resample(pset: ParticleSet, cfg: PfConfig, rng: np.random.Generator) -> ParticleSet:
    """Remuestreo sistemático si ESS < resample_threshold·M; si no, devuelve el mismo conjunto."""
    m = len(pset)
    if pset.ess() >= cfg.resample_threshold * m:
        return pset
    idx = systematic_resample_indices(pset.weights, rng)
    return ParticleSet(pset.states[idx].copy(), np.full(m, 1.0 / m))


def expectation(pset: ParticleSet) -> Particle:
    """Media ponderada en x, y; media circular ponderada en θ y γ."""
    w = pset.weights
    return Particle(
        x=float(np.dot(w, pset.states[:, X])),
        y=float(np.dot(w, pset.states[:, Y])),
        theta=circular_mean(pset.states[:, THETA], w),
        gamma=circular_mean(pset.states[:, GAMMA], w),
    )
