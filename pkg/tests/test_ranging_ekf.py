# tests/test_ranging_ekf.py
"""
Pruebas del EKF cooperativo de distancias: predicción, corrección por lotes,
geometría degenerada, dead reckoning incremental y posiciones relativas.

Cómo ejecutar solo este módulo:
    python -m pytest tests/test_ranging_ekf.py -q
"""
import math

import numpy as np
import pytest

from comm.packets import Packet, UavRecord
from comm.schedule import edge_set
from ranging_ekf.ekf import (
    CooperativeRangingEkf,
    EkfConfig,
    EkfEstimate,
    correct,
    estimate_with_deadreckoning,
    predict,
    range_jacobian_row,
    relative_positions,
    update,
)
from world.kinematics import ControlMeasurement, Pose2D, array_to_poses, deadreckon, propagate_states
from world.sensors import NoiseConfig


def _config(sigma_r=1.0):
    return EkfConfig.from_noise(NoiseConfig(sigma_r=sigma_r), ts=0.2, inflation=2.0)


def _estimate(poses, position_std=10.0, heading_std=0.0):
    return EkfEstimate.initial([Pose2D(*p) for p in poses], position_std, heading_std)


def _is_psd(P):
    return np.allclose(P, P.T) and np.linalg.eigvalsh(P).min() > -1e-9


# ------------------------------------------------------------
# Configuración
# ------------------------------------------------------------

def test_config_from_noise():
    cfg = _config()
    assert cfg.ranging_variance == pytest.approx(1.0)
    assert cfg.process_noise[0, 0] == pytest.approx(2.0 * (0.3 * 0.2) ** 2)
    assert EkfConfig.from_noise(NoiseConfig.noiseless()).ranging_variance > 0


def test_config_rejects_invalid_matrices():
    with pytest.raises(ValueError):
        EkfConfig(process_noise=np.eye(2), ranging_variance=1.0)
    with pytest.raises(ValueError):
        EkfConfig(process_noise=-np.eye(3), ranging_variance=1.0)
    with pytest.raises(ValueError):
        EkfConfig(process_noise=np.eye(3), ranging_variance=0.0)


# ------------------------------------------------------------
# Predicción
# ------------------------------------------------------------

def test_predict_follows_kinematics():
    est = _estimate([(0.0, 0.0, 0.0), (0.0, 1000.0, 0.0)])
    controls = [ControlMeasurement(50.0, 0.01), ControlMeasurement(45.0, 0.0)]
    out = predict(est, controls, _config())
    expected = deadreckon(est.state.reshape(2, 3), np.array([[[50.0, 0.01], [45.0, 0.0]]]), 0.2)
    assert out.state == pytest.approx(expected.reshape(-1))
    assert out.time_index == est.time_index + 1
    assert _is_psd(out.covariance)
    assert np.trace(out.covariance) > np.trace(est.covariance)


def test_predict_accepts_array_and_checks_shape():
    est = _estimate([(0.0, 0.0, 0.0), (0.0, 1000.0, 0.0)])
    out = predict(est, np.array([[50.0, 0.0], [50.0, 0.0]]), _config())
    assert out.state[0] == pytest.approx(10.0)
    with pytest.raises(ValueError):
        predict(est, [ControlMeasurement(50.0, 0.0)], _config())


# ------------------------------------------------------------
# Corrección
# ------------------------------------------------------------

def test_range_jacobian_row():
    state = np.array([0.0, 0.0, 0.0, 3.0, 4.0, 0.0])
    d, row = range_jacobian_row(state, 1, 2)
    assert d == pytest.approx(5.0)
    assert row == pytest.approx([-0.6, -0.8, 0.0, 0.6, 0.8, 0.0])


def test_range_jacobian_at_random_states():
    rng = np.random.default_rng(31)
    eps = 1e-6
    n = 4
    for _ in range(100):
        state = np.column_stack([
            rng.uniform(-2000, 2000, n), rng.uniform(-2000, 2000, n), rng.uniform(-math.pi, math.pi, n),
        ]).reshape(-1)
        i, j = (int(u) for u in rng.choice(np.arange(1, n + 1), size=2, replace=False))
        _, row = range_jacobian_row(state, i, j)
        num = np.empty(state.size)
        for col in range(state.size):
            d = np.zeros(state.size)
            d[col] = eps
            num[col] = (range_jacobian_row(state + d, i, j)[0] - range_jacobian_row(state - d, i, j)[0]) / (2 * eps)
        assert np.linalg.norm(row - num) / np.linalg.norm(row) < 1e-5


def test_covariance_stays_symmetric_psd_over_five_minutes():
    n, ts, steps = 4, 0.2, 1500
    noise = NoiseConfig()
    rng = np.random.default_rng(8)
    truth = np.array([[0.0, 1000.0 * i, 0.0] for i in range(n)])
    agent = CooperativeRangingEkf(
        EkfEstimate.initial(array_to_poses(truth), 1.0, math.radians(1.0)),
        EkfConfig.from_noise(noise, ts=ts),
    )
    min_eig = np.inf
    for k in range(1, steps + 1):
        t = k * ts
        v = 50.0 + 10.0 * np.sin(0.05 * t + np.arange(n))
        omega = 0.01 * np.sin(0.02 * t + np.arange(n))
        truth = propagate_states(truth, v, omega, ts)
        measured = np.column_stack([v + rng.normal(0.0, noise.sigma_v, n), omega + rng.normal(0.0, noise.sigma_g, n)])
        agent.predict(measured)
        ranges = [
            (i, j, float(np.hypot(*(truth[i - 1, :2] - truth[j - 1, :2]))) + rng.normal(0.0, noise.sigma_r))
            for i, j in edge_set(n, k)
        ]
        P = agent.update(ranges, k=k).covariance
        assert np.array_equal(P, P.T)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(P).min()))
    assert min_eig >= -1e-9
    assert agent.skipped_pairs == 0


def test_update_pulls_distance_to_measurement_and_keeps_centroid():
    est = _estimate([(0.0, 0.0, 0.0), (1010.0, 0.0, 0.0)])
    out = update(est, [(1, 2, 1000.0)], _config())
    xs = out.state[0::3]
    assert abs((xs[1] - xs[0]) - 1000.0) < 0.1
    # la traslación común no es observable con distancias
    assert xs.mean() == pytest.approx(est.state[0::3].mean())
    # rumbos sin cambio (columnas de rumbo nulas en H, P diagonal)
    assert out.state[2::3] == pytest.approx(est.state[2::3])
    assert np.trace(out.covariance) < np.trace(est.covariance)
    assert _is_psd(out.covariance)


def test_update_validates_schedule_and_values():
    est = _estimate([(0.0, 0.0, 0.0), (0.0, 1000.0, 0.0), (0.0, 2000.0, 0.0), (0.0, 3000.0, 0.0)])
    # k = 0 -> E0 = {(1,2), (3,4)}
    update(est, [(1, 2, 1000.0), (3, 4, 1000.0)], _config(), k=0)
    with pytest.raises(ValueError):
        update(est, [(1, 3, 2000.0)], _config(), k=0)
    with pytest.raises(ValueError):
        update(est, [(1, 2, -1.0)], _config())


def test_degenerate_pair_is_skipped():
    est = _estimate([(5.0, 5.0, 0.0), (5.0, 5.0, 0.0)])
    out = update(est, [(1, 2, 1000.0)], _config())
    assert np.array_equal(out.state, est.state)

    agent = CooperativeRangingEkf(est, _config())
    agent.update([(1, 2, 1000.0)])
    assert agent.skipped_pairs == 1


def test_correct_reports_skipped_pairs_and_uses_the_rest():
    est = _estimate([(5.0, 5.0, 0.0), (5.0, 5.0, 0.0), (0.0, 1000.0, 0.0), (0.0, 2000.0, 0.0)])
    out, skipped = correct(est, [(1, 2, 1000.0), (3, 4, 1010.0)], _config())
    assert skipped == 1
    assert not np.array_equal(out.state, est.state)
    assert np.array_equal(update(est, [(1, 2, 1000.0), (3, 4, 1010.0)], _config()).state, out.state)

    agent = CooperativeRangingEkf(est, _config())
    agent.update([(1, 2, 1000.0), (3, 4, 1010.0)])
    agent.update([(1, 2, 1000.0)])
    assert agent.skipped_pairs == 2


# ------------------------------------------------------------
# Agente, dead reckoning y posiciones relativas
# ------------------------------------------------------------

def _packet(k, n, ranges=()):
    entries = {u: UavRecord(v=50.0, omega=0.0, mag=0.0) for u in range(1, n + 1)}
    for i, j, d in ranges:
        entries[i] = UavRecord(50.0, 0.0, 0.0, range_m=d, partner=j)
        entries[j] = UavRecord(50.0, 0.0, 0.0, range_m=d, partner=i)
    return Packet(k, entries)


def test_agent_consumes_packets_in_order():
    est = _estimate([(0.0, 0.0, 0.0), (0.0, 1000.0, 0.0)], position_std=1.0)
    agent = CooperativeRangingEkf(est, _config())
    # k = 1 -> E1 = {(1,2)} con N = 2
    out = agent.step(_packet(1, 2, ranges=[(1, 2, 1000.0)]))
    assert out.time_index == 1
    assert out.state[0] == pytest.approx(10.0, abs=1e-6)
    with pytest.raises(ValueError):
        agent.step(_packet(3, 2))


def test_single_uav_agent_only_predicts():
    agent = CooperativeRangingEkf(_estimate([(0.0, 0.0, 0.0)]), _config())
    out = agent.step(_packet(1, 1))
    assert out.state == pytest.approx([10.0, 0.0, 0.0])


def test_estimate_with_deadreckoning():
    est = _estimate([(0.0, 0.0, 0.0), (0.0, 1000.0, math.pi / 2)])
    own = np.array([[[50.0, 0.0], [20.0, 0.0]]] * 3)
    poses = estimate_with_deadreckoning(est, own, ts=0.2)
    assert poses[0].x == pytest.approx(30.0)
    assert poses[1].y == pytest.approx(1012.0)
    assert estimate_with_deadreckoning(est, np.zeros((0, 2, 2)))[1] == est.pose(2)


def test_relative_positions():
    poses = [Pose2D(0.0, 0.0, 0.0), Pose2D(100.0, 1000.0, 0.0), Pose2D(-50.0, 2000.0, 0.0)]
    rel = relative_positions(poses, 2)
    assert rel[1] == pytest.approx([0.0, 0.0])
    assert rel[0] == pytest.approx([-100.0, -1000.0])
    assert rel[2] == pytest.approx([-150.0, 1000.0])
    arr = np.array([[p.x, p.y, p.theta] for p in poses])
    assert np.array_equal(relative_positions(arr, 2), rel)
