# harness/trial.py
"""
Un ensayo completo del simulador.

Por paso k (Ts = 0.2 s):
  1. Control de cada UAV a partir de su estimado global en k-1.
  2. Verdad: dos subpasos de 0.1 s con el control comandado.
  3. Sensores: odometría (2 muestras), magnetómetro y ranging de las parejas del paso.
  4. Cada UAV guarda su registro d_k e intercambia su almacén con su pareja.
  5. Con el paquete completo de j = k - s: EKF (predicción + distancias),
     filtro(s) de partículas magnético(s) y, por último, dead reckoning incremental
     con la odometría propia de (j, k] para obtener la pose en k.
  6. Sombra de dead reckoning puro (referencia de comparación).

El EKF apilado se ejecuta una vez por ensayo: todos los UAV reciben el mismo
paquete completo. Por defecto sólo el UAV 1 (el reportado) ejecuta filtro de
partículas; el resto se guía con EKF + dead reckoning (`pf.all_uavs` lo cambia).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from comm.packets import IncompletePacketError, PacketStore, UavRecord, exchange
from comm.schedule import edge_set, propagation_steps
from harness.metrics import compute_distance_errors, compute_position_errors
from harness.trial_config import TrialConfig
from magmap.grid import MagneticMap, OutOfBoundsError
from magnetic_pf.filter import MagneticParticleFilter
from ranging_ekf.ekf import CooperativeRangingEkf, EkfEstimate, relative_positions
from world.kinematics import ControlMeasurement, Pose2D, array_to_poses, deadreckon, propagate_states
from world.reference import ReferenceProfile, track_controller
from world.sensors import WorldSnapshot, draw_turn_on_biases, sense

logger = logging.getLogger(__name__)

REPORTED_UAV = 1


class TrajectoryLeftMapError(RuntimeError):
    """Una posición real salió de la extensión del mapa."""


@dataclass
class TrialFlags:
    weight_resets: int = 0
    off_map_updates: int = 0
    left_map: bool = False
    incomplete_packets: bool = False
    dropped_exchanges: int = 0
    skipped_pairs: int = 0

    @property
    def has_issues(self) -> bool:
        return bool(self.weight_resets or self.off_map_updates or self.left_map or self.incomplete_packets)


@dataclass
class TrialResult:
    """Resultado de un ensayo: series por paso, resumen y banderas de calidad."""

    trial: int
    seed: int
    case: str
    group_size: int
    time: np.ndarray
    position_error: np.ndarray
    dr_error: np.ndarray
    avg_position_error: float
    dr_avg_error: float
    dr_final_error: float
    measured_pair_error: Optional[float]
    unmeasured_pair_error: Optional[float]
    steps_completed: int
    flags: TrialFlags = field(default_factory=TrialFlags)
    traces: Optional[Dict[str, pd.DataFrame]] = None

    def to_row(self) -> dict:
        """Fila de trials.csv."""
        nan = float("nan")
        return {
            "case": self.case,
            "trial": self.trial,
            "seed": self.seed,
            "group_size": self.group_size,
            "avg_position_error": self.avg_position_error,
            "dr_avg_error": self.dr_avg_error,
            "dr_final_error": self.dr_final_error,
            "measured_pair_error": nan if self.measured_pair_error is None else self.measured_pair_error,
            "unmeasured_pair_error": nan if self.unmeasured_pair_error is None else self.unmeasured_pair_error,
            "weight_resets": self.flags.weight_resets,
            "off_map_updates": self.flags.off_map_updates,
            "left_map": int(self.flags.left_map),
            "incomplete_packets": int(self.flags.incomplete_packets),
            "steps_completed": self.steps_completed,
        }


def _measured_control(v: float, omega: float) -> ControlMeasurement:
    return ControlMeasurement(v=max(float(v), 0.0), omega=float(omega))


class _TrialRunner:
    """Estado mutable de un ensayo; `run()` recorre los pasos y captura los abortos."""

    def __init__(self, cfg: TrialConfig, seed: int, magnetic_map: MagneticMap, keep_traces: bool):
        self.cfg = cfg
        self.map = magnetic_map
        self.keep_traces = keep_traces
        n = self.n = cfg.group_size
        self.ts = cfg.ts
        self.n_steps = cfg.n_steps

        # flujos independientes: verdad, sensores, comunicación y uno por filtro de partículas
        streams = np.random.SeedSequence(seed).spawn(3 + n)
        self.truth_rng = np.random.default_rng(streams[0])
        self.sensor_rng = np.random.default_rng(streams[1])
        self.comm_rng = np.random.default_rng(streams[2])

        ref = cfg.reference
        phases = self.truth_rng.uniform(0.0, 2.0 * math.pi, n)
        if not ref.random_phase:
            phases = np.zeros(n)
        self.profiles = [
            ReferenceProfile(i * ref.track_spacing, ref.amplitude, ref.baseline, ref.angular_frequency, float(phases[i]))
            for i in range(n)
        ]
        self.handoff = np.array([[0.0, p.track_offset_north, 0.0] for p in self.profiles])
        self.truth = self.handoff.copy()
        self.truth[:, :2] += self.truth_rng.normal(0.0, cfg.init_position_sigma, (n, 2))
        self.biases = draw_turn_on_biases(cfg.noise, n, self.truth_rng)

        self.s = propagation_steps(n)
        self.stores = {u: PacketStore(n, self.s) for u in range(1, n + 1)}
        self.ekf = CooperativeRangingEkf(
            EkfEstimate.initial(array_to_poses(self.handoff), cfg.ekf.init_position_std, cfg.ekf.init_heading_std),
            cfg.ekf_config(),
        )
        pf_uavs = range(1, n + 1) if cfg.pf_all_uavs else [REPORTED_UAV]
        self.pfs = {
            u: MagneticParticleFilter(u, Pose2D(*self.handoff[u - 1]), cfg.pf, np.random.default_rng(streams[2 + u]))
            for u in pf_uavs
        }

        self.own_controls = np.zeros((self.n_steps + 1, n, 2))
        self.estimate = self.handoff.copy()
        self.dr = self.handoff.copy()

        shape = (self.n_steps + 1, n, 3)
        self.truth_hist = np.full(shape, np.nan)
        self.est_hist = np.full(shape, np.nan)
        self.dr_hist = np.full(shape, np.nan)
        self.ekf_hist = np.full(shape, np.nan)
        self.truth_hist[0] = self.truth
        self.est_hist[0] = self.estimate
        self.dr_hist[0] = self.dr

        self.flags = TrialFlags()
        self.steps_completed = 0
        self.trace_rows: Dict[str, List[dict]] = {"truth": [], "ekf": [], "pf": [], "packets": []}
        if keep_traces:
            self._trace_truth(0)

    # ------------------------------------------------------------------
    def run(self) -> None:
        for k in range(1, self.n_steps + 1):
            try:
                self.step(k)
            except TrajectoryLeftMapError as e:
                self.flags.left_map = True
                logger.warning(f"⚠️ Ensayo abortado en k={k}: {e}")
                break
            except IncompletePacketError as e:
                self.flags.incomplete_packets = True
                logger.warning(f"⚠️ Ensayo abortado en k={k}: {e}")
                break
            self.steps_completed = k
        for pf in self.pfs.values():
            self.flags.weight_resets += pf.stats.weight_resets
            self.flags.off_map_updates += pf.stats.off_map_updates
        self.flags.skipped_pairs = self.ekf.skipped_pairs

    def step(self, k: int) -> None:
        n, ts = self.n, self.ts
        t_prev = (k - 1) * ts

        commands = [
            track_controller(Pose2D(*self.estimate[i]), self.profiles[i], t_prev, self.cfg.controller)
            for i in range(n)
        ]
        cmd_v = np.array([c.v for c in commands])
        cmd_w = np.array([c.omega for c in commands])
        substeps = self.cfg.odometry_substeps
        for _ in range(substeps):
            self.truth = propagate_states(self.truth, cmd_v, cmd_w, ts / substeps)

        snapshot = WorldSnapshot(self.truth[:, :2].copy(), self.truth[:, 2].copy(), cmd_v, cmd_w)
        try:
            frame = sense(snapshot, k, self.cfg.noise, self.sensor_rng, self.map, self.biases, substeps)
        except OutOfBoundsError as e:
            raise TrajectoryLeftMapError(str(e)) from e

        self.own_controls[k, :, 0] = frame.v
        self.own_controls[k, :, 1] = frame.omega
        for u in range(1, n + 1):
            d, partner = frame.range_for(u)
            record = UavRecord(
                v=float(frame.v[u - 1]),
                omega=float(frame.omega[u - 1]),
                mag=float(frame.mag[u - 1]),
                range_m=d,
                partner=partner,
            )
            self.stores[u].add_own(k, u, record)
        self.flags.dropped_exchanges += exchange(
            self.stores, edge_set(n, k), k, self.cfg.packet_loss, self.comm_rng
        )

        self.dr = propagate_states(self.dr, self.own_controls[k, :, 0], self.own_controls[k, :, 1], ts)

        j = k - self.s
        if j >= 1:
            anchor = self._filter_packet(j)
            self.estimate = deadreckon(anchor, self.own_controls[j + 1:k + 1], ts)
        else:
            self.estimate = self.dr.copy()

        self.truth_hist[k] = self.truth
        self.est_hist[k] = self.estimate
        self.dr_hist[k] = self.dr
        if self.keep_traces:
            self._trace_truth(k)

    def _filter_packet(self, j: int) -> np.ndarray:
        """EKF + filtros de partículas sobre el paquete completo de j; devuelve las poses ancla en j."""
        n = self.n
        packet = self.stores[REPORTED_UAV].complete_packet(j)
        est = self.ekf.step(packet)
        states = est.state.reshape(n, 3)
        self.ekf_hist[j] = states
        anchor = states.copy()

        for u, pf in self.pfs.items():
            own_packet = self.stores[u].complete_packet(j)
            rec = own_packet.entries[u]
            rel = relative_positions(states, u)
            particle = pf.step(_measured_control(rec.v, rec.omega), rel, own_packet.magnetics(n), self.map, k=j)
            anchor[u - 1] = [particle.x, particle.y, particle.theta]
            if self.keep_traces:
                self.trace_rows["pf"].append({
                    "k": j, "uav": u, "x_pf": particle.x, "y_pf": particle.y,
                    "theta_pf": particle.theta, "gamma_pf": particle.gamma, "ess": pf.stats.last_ess,
                })

        if self.keep_traces:
            cov = est.covariance
            for i in range(n):
                block = cov[3 * i:3 * i + 3, 3 * i:3 * i + 3]
                self.trace_rows["ekf"].append({
                    "k": j, "uav": i + 1, "x_est": states[i, 0], "y_est": states[i, 1],
                    "theta_est": states[i, 2], "cov_trace": float(np.trace(block)),
                })
            self.trace_rows["packets"].extend(packet.rows())
        return anchor

    def _trace_truth(self, k: int) -> None:
        for i in range(self.n):
            self.trace_rows["truth"].append({
                "k": k, "uav": i + 1, "x_true": self.truth[i, 0],
                "y_true": self.truth[i, 1], "theta_true": self.truth[i, 2],
            })


def run_trial(
    cfg: TrialConfig,
    seed: int,
    magnetic_map: Optional[MagneticMap] = None,
    trial_index: int = 0,
    keep_traces: bool = False,
) -> TrialResult:
    """
    Ejecuta un ensayo. Determinista para (cfg, seed, mapa).

    Si la trayectoria sale del mapa o un paquete no llega completo, el ensayo se
    detiene y se devuelve el resultado parcial con la bandera correspondiente.
    """
    if magnetic_map is None:
        from harness.maps import maps_for_cases
        magnetic_map = maps_for_cases([cfg])[0]

    runner = _TrialRunner(cfg, seed, magnetic_map, keep_traces)
    runner.run()

    last = runner.steps_completed + 1
    truth = runner.truth_hist[:last]
    ts = cfg.ts

    pos = compute_position_errors(
        truth[:, REPORTED_UAV - 1, :2],
        runner.est_hist[:last, REPORTED_UAV - 1, :2],
        runner.dr_hist[:last, REPORTED_UAV - 1, :2],
        ts=ts,
        warmup=cfg.warmup,
    )
    dist = compute_distance_errors(truth[:, :, :2], runner.ekf_hist[:last, :, :2], cfg.group_size)

    traces = None
    if keep_traces:
        traces = {name: pd.DataFrame(rows) for name, rows in runner.trace_rows.items()}

    result = TrialResult(
        trial=trial_index,
        seed=int(seed),
        case=cfg.name,
        group_size=cfg.group_size,
        time=np.arange(last) * ts,
        position_error=pos.series,
        dr_error=pos.dr_series,
        avg_position_error=pos.average,
        dr_avg_error=pos.dr_average,
        dr_final_error=pos.dr_final,
        measured_pair_error=dist.measured,
        unmeasured_pair_error=dist.unmeasured,
        steps_completed=runner.steps_completed,
        flags=runner.flags,
        traces=traces,
    )
    logger.debug(
        f"Ensayo {trial_index} ({cfg.name}): error medio {result.avg_position_error:.2f} m, "
        f"DR final {result.dr_final_error:.2f} m"
    )
    return result
