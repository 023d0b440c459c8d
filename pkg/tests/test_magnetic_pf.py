# tests/test_magnetic_pf.py
"""
Pruebas del filtro de partículas magnético: remuestreo sistemático, rotación γ,
verosimilitud, colapso de pesos y el agente MagneticParticleFilter.

Cómo ejecutar solo este módulo:
    python -m pytest tests/test_magnetic_pf.py -q
"""
import math

import numpy as np
import pytest

from magmap.grid import MagneticMap
from magnetic_pf.filter import MagneticParticleFilter
from magnetic_pf.particles import (
    Particle,
    ParticleSet,
    PfConfig,
    WeightCollapseError,
    expectation,
    log_likelihoods,
    predicted_positions,
    predicted_positions_batch,
    propagate,
    resample,
    rotate_relative,
    weight_update,
)
from magnetic_pf.resampling import effective_sample_size, systematic_resample_indices
from tests.conftest import plane_value
from world.kinematics import ControlMeasurement, Pose2D


def _cfg(**kwargs):
    base = dict(particle_count=200, position_std=0.0, heading_std=0.0, gamma_std=0.0,
                magnetic_sigma=1.0, init_position_std=0.0, init_heading_std=0.0, init_gamma_std=0.0)
    base.update(kwargs)
    return PfConfig(**base)


# ------------------------------------------------------------
# Remuestreo
# ------------------------------------------------------------

def test_effective_sample_size_limits():
    assert effective_sample_size(np.full(50, 1 / 50)) == pytest.approx(50.0)
    assert effective_sample_size(np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)


def test_systematic_resampling_counts():
    w = np.array([0.5, 0.25, 0.125, 0.125, 0.0])
    idx = systematic_resample_indices(w, np.random.default_rng(3))
    counts = np.bincount(idx, minlength=w.size)
    m = w.size
    assert counts.sum() == m
    assert counts[4] == 0
    for c, expected in zip(counts, m * w):
        assert math.floor(expected) <= c <= math.ceil(expected)


def test_systematic_resampling_never_picks_zero_weight():
    w = np.zeros(100)
    w[[7, 42]] = 0.5
    idx = systematic_resample_indices(w, np.random.default_rng(0))
    assert set(idx) == {7, 42}


def test_systematic_resampling_preserves_weighted_mean():
    rng = np.random.default_rng(12)
    m = 1000
    values = rng.uniform(0.0, 1.0, m)
    weights = rng.dirichlet(np.full(m, 0.5))
    target = float(np.dot(weights, values))
    means = np.array([values[systematic_resample_indices(weights, rng)].mean() for _ in range(100)])
    assert abs(means.mean() - target) < 0.005
    assert np.all(np.abs(means - target) < 0.05)


def test_resample_only_below_threshold():
    cfg = _cfg(particle_count=4, resample_threshold=0.5)
    uniform = ParticleSet(np.zeros((4, 4)), np.full(4, 0.25))
    assert resample(uniform, cfg, np.random.default_rng(0)) is uniform

    skewed = ParticleSet(np.arange(16, dtype=float).reshape(4, 4), np.array([0.97, 0.01, 0.01, 0.01]))
    out = resample(skewed, cfg, np.random.default_rng(0))
    assert out is not skewed
    assert out.weights == pytest.approx(np.full(4, 0.25))


# ------------------------------------------------------------
# Geometría y verosimilitud
# ------------------------------------------------------------

def test_rotate_relative_quarter_turn():
    out = rotate_relative(np.array([[1.0, 0.0], [0.0, 2.0]]), math.pi / 2)
    assert out[0] == pytest.approx([0.0, 1.0], abs=1e-12)
    assert out[1] == pytest.approx([-2.0, 0.0], abs=1e-12)


def test_batch_prediction_matches_single_particle():
    rel = np.array([[0.0, 0.0], [100.0, 1000.0], [-30.0, 2000.0]])
    particles = [Particle(10.0, 20.0, 0.1, 0.01), Particle(-5.0, 3.0, 0.0, -0.02)]
    pset = ParticleSet.from_particles(particles)
    batch = predicted_positions_batch(pset.states, rel)
    for m, p in enumerate(particles):
        assert batch[m] == pytest.approx(predicted_positions(p, rel))
    # el propio UAV (rel = 0) queda en la posición de la partícula
    assert batch[:, 0] == pytest.approx(pset.states[:, :2])


def test_log_likelihood_off_map_is_minus_infinity(plane_map):
    states = np.array([[10.0, 10.0, 0.0, 0.0], [1000.0, 10.0, 0.0, 0.0]])
    ll = log_likelihoods(states, np.zeros((1, 2)), np.array([plane_value(10.0, 10.0)]), plane_map, 1.0)
    assert ll[0] == pytest.approx(0.0)
    assert ll[1] == -np.inf


def test_likelihood_is_invariant_to_uav_order(small_map):
    rng = np.random.default_rng(4)
    rel = np.column_stack([rng.uniform(-200.0, 200.0, 6), 400.0 * np.arange(6)])
    rel -= rel[0]
    truth = np.array([1000.0, 200.0])
    measurements = small_map.sample_points(truth[0] + rel[:, 0], truth[1] + rel[:, 1]) + rng.normal(0.0, 10.0, 6)
    states = np.column_stack([
        truth[0] + rng.normal(0.0, 20.0, 50), truth[1] + rng.normal(0.0, 20.0, 50),
        np.zeros(50), rng.normal(0.0, 0.01, 50),
    ])
    ll = log_likelihoods(states, rel, measurements, small_map, 10.0)
    perm = rng.permutation(6)
    ll_perm = log_likelihoods(states, rel[perm], measurements[perm], small_map, 10.0)
    np.testing.assert_allclose(ll_perm, ll, rtol=1e-12, atol=1e-12)


def test_one_sigma_residual_weight_ratio(plane_map):
    # plane_value crece 0.5 nT por metro hacia el este: 2 m = 1 nT = 1 sigma
    states = np.array([[20.0, 20.0, 0.0, 0.0], [22.0, 20.0, 0.0, 0.0]])
    pset = ParticleSet(states, np.full(2, 0.5))
    out = weight_update(pset, np.zeros((1, 2)), np.array([plane_value(20.0, 20.0)]), plane_map, _cfg(particle_count=2))
    assert out.weights[0] / out.weights[1] == pytest.approx(math.exp(0.5), rel=1e-12)


def test_featureless_map_keeps_uniform_weights():
    flat = MagneticMap(0.0, 0.0, 100.0, np.full((6, 6), 42.0))
    rng = np.random.default_rng(9)
    states = np.column_stack([rng.uniform(0, 500, 40), rng.uniform(0, 500, 40), np.zeros(40), rng.normal(0, 0.01, 40)])
    pset = ParticleSet(states, np.full(40, 1 / 40))
    rel = np.array([[0.0, 0.0], [0.0, 0.0]])
    out = weight_update(pset, rel, np.array([40.0, 51.0]), flat, _cfg(particle_count=40, magnetic_sigma=10.0))
    assert out.weights == pytest.approx(np.full(40, 1 / 40), rel=1e-12)


def test_weights_favor_consistent_particle(plane_map):
    truth = (20.0, 20.0)
    offsets = [(0.0, 0.0), (4.0, 0.0), (-6.0, 0.0), (8.0, 0.0)]
    states = np.array([[truth[0] + dx, truth[1] + dy, 0.0, 0.0] for dx, dy in offsets])
    pset = ParticleSet(states, np.full(4, 0.25))
    out = weight_update(pset, np.zeros((1, 2)), np.array([plane_value(*truth)]), plane_map, _cfg(particle_count=4))
    assert int(np.argmax(out.weights)) == 0
    assert out.weights.sum() == pytest.approx(1.0)


def test_weight_collapse_when_all_off_map(plane_map):
    pset = ParticleSet(np.array([[1e4, 1e4, 0.0, 0.0]] * 3), np.full(3, 1 / 3))
    with pytest.raises(WeightCollapseError):
        weight_update(pset, np.zeros((1, 2)), np.array([0.0]), plane_map, _cfg(particle_count=3))


def test_expectation_uses_circular_mean():
    states = np.array([[0.0, 0.0, math.pi - 0.1, 0.0], [2.0, 4.0, -math.pi + 0.1, 0.0]])
    est = expectation(ParticleSet(states, np.array([0.5, 0.5])))
    assert est.x == pytest.approx(1.0)
    assert est.y == pytest.approx(2.0)
    assert abs(abs(est.theta) - math.pi) < 1e-9


def test_propagate_without_noise_is_kinematic():
    pset = ParticleSet(np.array([[0.0, 0.0, 0.0, 0.05]]), np.array([1.0]))
    out = propagate(pset, ControlMeasurement(50.0, 0.0), _cfg(particle_count=1), np.random.default_rng(0))
    assert out.states[0] == pytest.approx([10.0, 0.0, 0.0, 0.05])


def test_gamma_random_walk_variance_grows_linearly():
    cfg = _cfg(particle_count=5000, gamma_std=0.001)
    pset = ParticleSet.initialize(Pose2D(0.0, 0.0, 0.0), cfg, np.random.default_rng(0))
    rng = np.random.default_rng(1)
    still = ControlMeasurement(0.0, 0.0)
    for _ in range(1000):
        pset = propagate(pset, still, cfg, rng)
    expected = 0.001 * math.sqrt(1000)
    assert pset.states[:, 3].std() == pytest.approx(expected, rel=0.15)
    # la posición no se mueve sin velocidad ni ruido de posición
    assert np.all(pset.states[:, :2] == 0.0)


def test_pf_config_validation():
    with pytest.raises(ValueError):
        _cfg(particle_count=0)
    with pytest.raises(ValueError):
        _cfg(magnetic_sigma=0.0)
    with pytest.raises(ValueError):
        _cfg(resample_threshold=1.5)


# ------------------------------------------------------------
# Agente
# ------------------------------------------------------------

def test_filter_resets_weights_when_everything_is_off_map(plane_map):
    pf = MagneticParticleFilter(1, Pose2D(1e4, 1e4, 0.0), _cfg(particle_count=20), np.random.default_rng(0))
    est = pf.step(ControlMeasurement(0.0, 0.0), np.zeros((1, 2)), np.array([0.0]), plane_map, k=1)
    assert pf.stats.weight_resets == 1
    assert pf.stats.off_map_updates == 1
    assert pf.particles.weights == pytest.approx(np.full(20, 1 / 20))
    assert est.x == pytest.approx(1e4)


def test_partial_off_map_is_not_counted(plane_map):
    pf = MagneticParticleFilter(1, Pose2D(20.0, 20.0, 0.0), _cfg(particle_count=4), np.random.default_rng(0))
    pf.particles = ParticleSet(
        np.array([[20.0, 20.0, 0.0, 0.0], [25.0, 20.0, 0.0, 0.0], [1e4, 20.0, 0.0, 0.0], [20.0, -1e4, 0.0, 0.0]]),
        np.full(4, 0.25),
    )
    pf.step(ControlMeasurement(0.0, 0.0), np.zeros((1, 2)), np.array([plane_value(20.0, 20.0)]), plane_map, k=1)
    assert pf.stats.off_map_updates == 0
    assert pf.stats.weight_resets == 0
    assert pf.particles.weights.sum() == pytest.approx(1.0)


def test_filter_tracks_exact_measurements(small_map):
    cfg = _cfg(particle_count=50)
    pf = MagneticParticleFilter(1, Pose2D(0.0, 1000.0, 0.0), cfg, np.random.default_rng(0))
    pose = Pose2D(0.0, 1000.0, 0.0)
    rel = np.array([[0.0, 0.0], [0.0, -500.0]])
    for k in range(1, 11):
        pose = Pose2D(pose.x + 10.0, pose.y, 0.0)
        mags = small_map.sample_points(np.array([pose.x, pose.x]), np.array([pose.y, pose.y - 500.0]))
        est = pf.step(ControlMeasurement(50.0, 0.0), rel, mags, small_map, k=k)
    assert est.x == pytest.approx(pose.x, abs=1e-6)
    assert est.y == pytest.approx(pose.y, abs=1e-6)
    assert pf.stats.weight_resets == 0


def test_weights_stay_normalized_every_step(small_map):
    cfg = PfConfig(particle_count=500, magnetic_sigma=10.0)
    pf = MagneticParticleFilter(1, Pose2D(0.0, 1000.0, 0.0), cfg, np.random.default_rng(3))
    rng = np.random.default_rng(4)
    rel = np.array([[0.0, 0.0], [0.0, 1000.0]])
    pose = Pose2D(0.0, 1000.0, 0.0)
    for k in range(1, 101):
        pose = Pose2D(pose.x + 10.0, pose.y, 0.0)
        mags = small_map.sample_points(np.array([pose.x, pose.x]), np.array([pose.y, pose.y + 1000.0]))
        pf.step(ControlMeasurement(50.0, 0.0), rel, mags + rng.normal(0.0, 10.0, 2), small_map, k=k)
        assert abs(pf.particles.weights.sum() - 1.0) < 1e-9
    assert pf.stats.weight_resets == 0


def test_filter_is_reproducible(small_map):
    cfg = _cfg(particle_count=100, position_std=0.5, heading_std=0.001, gamma_std=0.001, init_position_std=5.0)
    rel = np.zeros((1, 2))
    estimates = []
    for _ in range(2):
        pf = MagneticParticleFilter(1, Pose2D(100.0, 100.0, 0.0), cfg, np.random.default_rng(7))
        mag = small_map.sample_points(np.array([110.0]), np.array([100.0]))
        estimates.append(pf.step(ControlMeasurement(50.0, 0.0), rel, mag, small_map))
    assert estimates[0] == estimates[1]
