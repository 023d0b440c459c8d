# world/kinematics.py
"""
Modelo cinemático 2D de los UAV (bicicleta simplificada).

Regla discreta común a la verdad, al EKF y al filtro de partículas:
    θ' = θ + Ts·ω
    x' = x + Ts·v·cos(θ')
    y' = y + Ts·v·sin(θ')
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.helpers import wrap_angle


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "Pose2D":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    def distance_to(self, other: "Pose2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class ControlMeasurement:
    v: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise ValueError(f"control no finito: v={self.v}, omega={self.omega}")
        if self.v < 0:
            raise ValueError(f"v debe ser >= 0 (recibido {self.v})")


def propagate_states(states: np.ndarray, v, omega, ts: float) -> np.ndarray:
    """
    Aplica la regla discreta a un array (..., 3) de [x, y, θ].
    `v` y `omega` se difunden contra las dimensiones iniciales de `states`.
    """
    states = np.asarray(states, dtype=float)
    v = np.asarray(v, dtype=float)
    omega = np.asarray(omega, dtype=float)
    heading = states[..., 2] + ts * omega
    out = np.empty(np.broadcast(states[..., 0], heading).shape + (3,))
    out[..., 0] = states[..., 0] + ts * v * np.cos(heading)
    out[..., 1] = states[..., 1] + ts * v * np.sin(heading)
    out[..., 2] = wrap_angle(heading)
    return out


def motion_jacobian(state, v: float, omega: float, ts: float) -> np.ndarray:
    """Jacobiano 3x3 de la regla discreta respecto a [x, y, θ]."""
    heading = float(state[2]) + ts * omega
    return np.array([
        [1.0, 0.0, -ts * v * math.sin(heading)],
        [0.0, 1.0, ts * v * math.cos(heading)],
        [0.0, 0.0, 1.0],
    ])


def step_true_pose(pose: Pose2D, control: ControlMeasurement, ts: float) -> Pose2D:
    """Avanza una pose real con el control comandado (sin ruido)."""
    if ts <= 0:
        raise ValueError(f"Ts debe ser > 0 (recibido {ts})")
    return Pose2D.from_array(propagate_states(pose.as_array(), control.v, control.omega, ts))


def deadreckon(state: np.ndarray, controls: np.ndarray, ts: float) -> np.ndarray:
    """
    Integra una secuencia de controles.

    Args:
        state: (..., 3) estado inicial
        controls: (S, ..., 2) controles [v, omega] por paso
        ts: periodo

    Returns:
        Estado tras los S pasos (S=0 devuelve una copia del estado)
    """
    out = np.array(state, dtype=float, copy=True)
    for ctrl in np.asarray(controls, dtype=float):
        out = propagate_states(out, ctrl[..., 0], ctrl[..., 1], ts)
    return out


def poses_to_array(poses) -> np.ndarray:
    return np.array([p.as_array() for p in poses], dtype=float).reshape(-1, 3)


def array_to_poses(arr: np.ndarray) -> Tuple[Pose2D, ...]:
    return tuple(Pose2D.from_array(row) for row in np.asarray(arr, dtype=float).reshape(-1, 3))
