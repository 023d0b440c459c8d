# ranging_ekf/ekf.py
"""
EKF cooperativo de sólo distancias sobre las N poses apiladas.

Estado x = [x1, y1, θ1, ..., xN, yN, θN]. La predicción usa la odometría de cada
UAV con la regla cinemática discreta; la corrección usa las distancias medidas
por las parejas activas del paso. Sólo se observa la geometría relativa del grupo.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from comm.packets import Packet
from comm.schedule import edge_set
from config import Config
from utils.helpers import wrap_angle
from world.kinematics import ControlMeasurement, Pose2D, array_to_poses, deadreckon, motion_jacobian, propagate_states
from world.sensors import NoiseConfig

logger = logging.getLogger(__name__)

# distancia estimada mínima para que el jacobiano de rango esté definido
DEGENERATE_DISTANCE = 1e-6


class DegenerateGeometryError(ArithmeticError):
    """Dos UAV estimados en el mismo punto: el jacobiano de distancia no existe."""


@dataclass(frozen=True)
class EkfConfig:
    """
    Args:
        process_noise: bloque 3x3 de Q por UAV
        ranging_variance: σ_r² (R = σ_r²·I)
        ts: periodo del filtro (s)
    """

    process_noise: np.ndarray
    ranging_variance: float
    ts: float = Config.TS

    def __post_init__(self):
        q = np.asarray(self.process_noise, dtype=float)
        if q.shape != (3, 3):
            raise ValueError(f"process_noise debe ser 3x3 (recibido {q.shape})")
        if not np.allclose(q, q.T) or np.linalg.eigvalsh(q).min() < -1e-12:
            raise ValueError("process_noise debe ser simétrica semidefinida positiva")
        if not self.ranging_variance > 0:
            raise ValueError(f"ranging_variance debe ser > 0 (recibido {self.ranging_variance})")
        object.__setattr__(self, "process_noise", q)

    @classmethod
    def from_noise(cls, noise: NoiseConfig, ts: float = Config.TS, inflation: float = Config.Q_INFLATION) -> "EkfConfig":
        """Q = inflation · diag(σv²Ts², σv²Ts², (σg·Ts)²); con σ_r = 0 se usa un suelo pequeño en R."""
        q = inflation * np.diag([
            (noise.sigma_v * ts) ** 2,
            (noise.sigma_v * ts) ** 2,
            (noise.sigma_g * ts) ** 2,
        ])
        ranging_variance = max(noise.sigma_r ** 2, 1e-6)
        return cls(process_noise=q, ranging_variance=ranging_variance, ts=ts)


@dataclass
class EkfEstimate:
    state: np.ndarray
    covariance: np.ndarray
    time_index: int = 0

    @property
    def n_uavs(self) -> int:
        return int(self.state.size // 3)

    def poses(self) -> Tuple[Pose2D, ...]:
        return array_to_poses(self.state)

    def positions(self) -> np.ndarray:
        return self.state.reshape(-1, 3)[:, :2].copy()

    def pose(self, uav: int) -> Pose2D:
        return Pose2D.from_array(self.state[3 * (uav - 1): 3 * uav])

    def copy(self) -> "EkfEstimate":
        return EkfEstimate(self.state.copy(), self.covariance.copy(), self.time_index)

    @classmethod
    def initial(
        cls,
        poses: Sequence[Pose2D],
        position_std: float = Config.EKF_INIT_POSITION_STD,
        heading_std: float = math.radians(Config.EKF_INIT_HEADING_STD_DEG),
        time_index: int = 0,
    ) -> "EkfEstimate":
        """Estimado inicial en las poses de traspaso con P0 = diag(σp², σp², σθ²) por UAV."""
        state = np.concatenate([p.as_array() for p in poses])
        block = [position_std ** 2, position_std ** 2, heading_std ** 2]
        covariance = np.diag(np.tile(block, len(poses)))
        return cls(state=state, covariance=covariance, time_index=time_index)


def _controls_array(controls, n_uavs: int) -> np.ndarray:
    if isinstance(controls, np.ndarray):
        arr = np.asarray(controls, dtype=float).reshape(n_uavs, 2)
    else:
        arr = np.array([[c.v, c.omega] for c in controls], dtype=float)
    if arr.shape != (n_uavs, 2):
        raise ValueError(f"se esperaban controles para {n_uavs} UAV, recibido {arr.shape}")
    return arr


def predict(est: EkfEstimate, controls, cfg: EkfConfig) -> EkfEstimate:
    """
    Predicción: cada bloque de pose avanza con la regla discreta y P <- F·P·Fᵀ + Q.

    Args:
        est: estimado en time_index
        controls: N ControlMeasurement o array (N, 2) de [v, omega]
        cfg: EkfConfig

    Returns:
        Estimado en time_index + 1
    """
    n = est.n_uavs
    ctrl = _controls_array(controls, n)
    poses = est.state.reshape(n, 3)

    F = np.zeros((3 * n, 3 * n))
    for i in range(n):
        F[3 * i:3 * i + 3, 3 * i:3 * i + 3] = motion_jacobian(poses[i], ctrl[i, 0], ctrl[i, 1], cfg.ts)

    new_state = propagate_states(poses, ctrl[:, 0], ctrl[:, 1], cfg.ts).reshape(-1)
    Q = np.kron(np.eye(n), cfg.process_noise)
    P = F @ est.covariance @ F.T + Q
    P = 0.5 * (P + P.T)
    return EkfEstimate(state=new_state, covariance=P, time_index=est.time_index + 1)


def range_jacobian_row(state: np.ndarray, i: int, j: int) -> Tuple[float, np.ndarray]:
    """
    Distancia estimada entre UAV i y j (ids base 1) y su fila de jacobiano.

    Raises:
        DegenerateGeometryError: si la distancia estimada < 1e-6 m
    """
    xi, yi = state[3 * (i - 1)], state[3 * (i - 1) + 1]
    xj, yj = state[3 * (j - 1)], state[3 * (j - 1) + 1]
    dx, dy = xi - xj, yi - yj
    d = math.hypot(dx, dy)
    if d < DEGENERATE_DISTANCE:
        raise DegenerateGeometryError(f"UAV {i} y {j} estimados a {d:.2e} m")
    row = np.zeros(state.size)
    row[3 * (i - 1)] = dx / d
    row[3 * (i - 1) + 1] = dy / d
    row[3 * (j - 1)] = -dx / d
    row[3 * (j - 1) + 1] = -dy / d
    return d, row


def correct(
    est: EkfEstimate,
    ranges: Iterable[Tuple[int, int, float]],
    cfg: EkfConfig,
    k: Optional[int] = None,
) -> Tuple[EkfEstimate, int]:
    """
    Corrección por lotes con todas las distancias simultáneas del paso.

    Args:
        est: estimado predicho
        ranges: (i, j, d_ij) medidos
        cfg: EkfConfig (R = ranging_variance·I)
        k: paso de las medidas; si se da, cada par debe pertenecer a edge_set(N, k)

    Returns:
        (estimado corregido con la forma de Joseph y P simetrizada, pares descartados).
        Los pares con geometría degenerada se descartan con un aviso.
    """
    ranges = list(ranges)
    n = est.n_uavs
    if k is not None:
        allowed = set(edge_set(n, k))
        extra = [(i, j) for i, j, _ in ranges if (min(i, j), max(i, j)) not in allowed]
        if extra:
            raise ValueError(f"pares {extra} no pertenecen al calendario del paso {k}")

    rows, innovations = [], []
    skipped = 0
    for i, j, d_meas in ranges:
        if not d_meas > 0:
            raise ValueError(f"distancia medida no positiva para ({i},{j}): {d_meas}")
        try:
            d_est, row = range_jacobian_row(est.state, i, j)
        except DegenerateGeometryError as e:
            logger.warning(f"⚠️ Par ({i},{j}) descartado en la corrección: {e}")
            skipped += 1
            continue
        rows.append(row)
        innovations.append(d_meas - d_est)

    if not rows:
        return est.copy(), skipped

    H = np.vstack(rows)
    nu = np.asarray(innovations)
    R = cfg.ranging_variance * np.eye(len(rows))
    P = est.covariance
    S = H @ P @ H.T + R
    K = np.linalg.solve(S, H @ P).T     # K = P Hᵀ S⁻¹ (S y P simétricas)

    state = est.state + K @ nu
    state[2::3] = wrap_angle(state[2::3])
    I_KH = np.eye(P.shape[0]) - K @ H
    P_new = I_KH @ P @ I_KH.T + K @ R @ K.T
    P_new = 0.5 * (P_new + P_new.T)
    return EkfEstimate(state=state, covariance=P_new, time_index=est.time_index), skipped


def update(
    est: EkfEstimate,
    ranges: Iterable[Tuple[int, int, float]],
    cfg: EkfConfig,
    k: Optional[int] = None,
) -> EkfEstimate:
    """Como `correct`, devolviendo sólo el estimado."""
    return correct(est, ranges, cfg, k=k)[0]


def estimate_with_deadreckoning(est: EkfEstimate, own_controls, ts: float = Config.TS) -> Tuple[Pose2D, ...]:
    """
    x̂_k = x_{k-s} + Δx: integra los controles propios de (k-s, k] sobre el estimado en k-s.

    Args:
        est: estimado en k - s
        own_controls: array (s, N, 2); cada UAV usa sólo su propia odometría
        ts: periodo

    Returns:
        Poses por UAV en k
    """
    n = est.n_uavs
    controls = np.asarray(own_controls, dtype=float).reshape(-1, n, 2)
    return array_to_poses(deadreckon(est.state.reshape(n, 3), controls, ts))


def relative_positions(poses, self_id: int) -> np.ndarray:
    """
    Posición de cada UAV i relativa al UAV `self_id` (base 1): p_i - p_j.

    Args:
        poses: secuencia de Pose2D o array (N, 2|3)

    Returns:
        Array (N, 2)
    """
    if isinstance(poses, np.ndarray):
        pos = np.asarray(poses, dtype=float)[:, :2]
    else:
        pos = np.array([[p.x, p.y] for p in poses], dtype=float)
    return pos - pos[self_id - 1]


class CooperativeRangingEkf:
    """
    EKF apilado que consume paquetes completos en orden (k-s, en cada paso).

    Todos los UAV del grupo reciben el mismo paquete completo, así que el estimado
    es idéntico en cada uno; el simulador mantiene una única instancia por ensayo.
    """

    def __init__(self, initial: EkfEstimate, cfg: EkfConfig):
        self.estimate = initial
        self.cfg = cfg
        self.skipped_pairs = 0

    @property
    def n_uavs(self) -> int:
        return self.estimate.n_uavs

    def predict(self, controls) -> EkfEstimate:
        self.estimate = predict(self.estimate, controls, self.cfg)
        return self.estimate

    def update(self, ranges, k: Optional[int] = None) -> EkfEstimate:
        self.estimate, skipped = correct(self.estimate, ranges, self.cfg, k=k)
        self.skipped_pairs += skipped
        return self.estimate

    def step(self, packet: Packet) -> EkfEstimate:
        """Predicción con la odometría del paquete y corrección con sus distancias."""
        if packet.time_index != self.estimate.time_index + 1:
            raise ValueError(
                f"paquete k={packet.time_index} fuera de orden (estimado en k={self.estimate.time_index})"
            )
        self.predict(packet.controls(self.n_uavs))
        if self.n_uavs > 1:
            self.update(packet.ranges(), k=packet.time_index)
        return self.estimate

    def relative_positions(self, self_id: int) -> np.ndarray:
        return relative_positions(self.estimate.state.reshape(-1, 3), self_id)
