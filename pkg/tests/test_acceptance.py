# tests/test_acceptance.py
"""
Lotes Monte Carlo a escala de escritorio con las tendencias que debe reproducir el simulador:
- estructura: los pares medidos conservan la distancia mejor que los no medidos
- más UAV -> menos error, y el PF acota la deriva del dead reckoning
- el grupo grande se degrada menos con el mapa de baja resolución
- sobre un mapa sin rasgos el PF no mejora al dead reckoning

Tardan varios minutos; quedan fuera de la batería rápida.

Cómo ejecutar solo este módulo:
    python -m pytest tests/test_acceptance.py -q -m slow
"""
import numpy as np
import pytest

from harness.maps import maps_for_cases
from harness.monte_carlo import run_monte_carlo
from harness.trial_config import from_dict
from magmap.grid import MagneticMap

pytestmark = [pytest.mark.slow, pytest.mark.integration]

GROUP_SIZES = (1, 4, 8)
TREND_TRIALS = 6


def _cfg(name, **overrides):
    data = {"name": name, "master_seed": 2024, "workers": 1}
    data.update(overrides)
    return from_dict(data)


def _mean(summary, column):
    return summary.stats[column]["mean"]


@pytest.fixture(scope="module")
def trend_summaries():
    """(N, resolución) -> MonteCarloSummary; 10 min de vuelo y 1000 partículas."""
    cases = {
        (n, res): _cfg(
            f"n{n}_{res}",
            group_size=n,
            duration_s=600.0,
            n_trials=TREND_TRIALS,
            pf={"particle_count": 1000},
            map={"resolution": res},
        )
        for n in GROUP_SIZES
        for res in ("high", "low")
        if res == "high" or n in (1, 8)
    }
    keys = list(cases)
    maps = maps_for_cases([cases[key] for key in keys])
    return {key: run_monte_carlo(cases[key], magnetic_map=m) for key, m in zip(keys, maps)}


def test_measured_pairs_keep_their_distance():
    cfg = _cfg("estructura", group_size=8, duration_s=300.0, n_trials=5, pf={"particle_count": 500})
    summary = run_monte_carlo(cfg)
    measured = _mean(summary, "measured_pair_error")
    unmeasured = _mean(summary, "unmeasured_pair_error")
    assert measured < 2.0 * cfg.noise.sigma_r
    assert measured < unmeasured


def test_error_decreases_with_group_size(trend_summaries):
    errors = [_mean(trend_summaries[(n, "high")], "avg_position_error") for n in GROUP_SIZES]
    assert errors[0] > errors[1] > errors[2]


def test_particle_filter_bounds_dead_reckoning_drift(trend_summaries):
    summary = trend_summaries[(8, "high")]
    assert _mean(summary, "avg_position_error") < 0.2 * _mean(summary, "dr_final_error")
    assert summary.flags.get("left_map", 0) == 0


def test_large_group_is_more_robust_to_low_resolution(trend_summaries):
    def inflation(n):
        low = _mean(trend_summaries[(n, "low")], "avg_position_error")
        high = _mean(trend_summaries[(n, "high")], "avg_position_error")
        return low / high

    assert inflation(8) < inflation(1)


def test_featureless_map_reduces_to_dead_reckoning():
    cfg = _cfg("sin_rasgos", group_size=1, duration_s=300.0, n_trials=10, pf={"particle_count": 1000})
    # 30 km x 10 km de campo constante alrededor de la pista
    flat = MagneticMap(-5000.0, -5000.0, 1000.0, np.full((11, 31), 50.0))
    summary = run_monte_carlo(cfg, magnetic_map=flat)
    ratio = _mean(summary, "avg_position_error") / _mean(summary, "dr_avg_error")
    assert 0.8 <= ratio <= 1.2
    assert summary.flags.get("weight_resets", 0) == 0
