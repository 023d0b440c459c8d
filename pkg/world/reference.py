# world/reference.py
"""
Trayectorias de referencia (rectas este-oeste separadas 1000 m) y controlador de seguimiento.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from config import Config
from utils.helpers import wrap_angle
from world.kinematics import ControlMeasurement, Pose2D


@dataclass(frozen=True)
class ReferenceProfile:
    """
    Perfil de referencia de un UAV: recta y = track_offset_north rumbo este,
    velocidad v(t) = baseline + amplitude·sin(ω·t + phase).
    """

    track_offset_north: float
    vel_amplitude: float = Config.VEL_AMPLITUDE
    vel_baseline: float = Config.VEL_BASELINE
    vel_angular_frequency: float = Config.VEL_ANGULAR_FREQUENCY
    vel_phase: float = 0.0

    def __post_init__(self):
        if not (self.vel_baseline > self.vel_amplitude >= 0):
            raise ValueError(
                f"se requiere vel_baseline > vel_amplitude >= 0 "
                f"(baseline={self.vel_baseline}, amplitude={self.vel_amplitude})"
            )

    @property
    def max_velocity(self) -> float:
        return self.vel_baseline + self.vel_amplitude


@dataclass(frozen=True)
class ControllerGains:
    k_cross: float = Config.K_CROSS
    k_heading: float = Config.K_HEADING
    omega_limit: float = Config.OMEGA_LIMIT


def reference_velocity(profile: ReferenceProfile, t: float) -> float:
    """Velocidad de referencia en m/s en el instante t (s)."""
    return profile.vel_baseline + profile.vel_amplitude * math.sin(profile.vel_angular_frequency * t + profile.vel_phase)


def track_controller(
    estimated_pose: Pose2D,
    profile: ReferenceProfile,
    t: float,
    limits: ControllerGains = ControllerGains(),
) -> ControlMeasurement:
    """
    Feed-forward de velocidad + ley proporcional sobre error lateral y de rumbo.

    ω = clip(-k_cross·(y - y_ref) - k_heading·wrap(θ), ±omega_limit)
    """
    cross_track = estimated_pose.y - profile.track_offset_north
    omega = -limits.k_cross * cross_track - limits.k_heading * wrap_angle(estimated_pose.theta)
    omega = float(np.clip(omega, -limits.omega_limit, limits.omega_limit))
    return ControlMeasurement(v=reference_velocity(profile, t), omega=omega)
