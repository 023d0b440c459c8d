# tests/test_harness_metrics.py
"""
Pruebas de harness.metrics: errores de distancia (pares medidos / no medidos),
errores de posición con ventana de calentamiento, CDF y cuartiles.

Cómo ejecutar solo este módulo:
    python -m pytest tests/test_harness_metrics.py -q
"""
import math

import numpy as np
import pandas as pd
import pytest

from harness.metrics import (
    boxplot_stats,
    compute_distance_errors,
    compute_position_errors,
    empirical_cdf,
    pair_distance_errors,
    summarize,
)


def _tracks(n, steps=5):
    """UAV i sobre la recta y = 1000·(i-1), todos en el mismo easting."""
    base = np.column_stack([np.zeros(n), 1000.0 * np.arange(n)])
    return np.repeat(base[None, :, :], steps, axis=0)


# ------------------------------------------------------------
# Distancias
# ------------------------------------------------------------

def test_translation_does_not_change_distance_errors():
    truth = _tracks(8)
    est = truth + np.array([25.0, -40.0])
    res = compute_distance_errors(truth, est, 8)
    assert res.measured == pytest.approx(0.0, abs=1e-9)
    assert res.unmeasured == pytest.approx(0.0, abs=1e-9)


def test_measured_and_unmeasured_averages():
    truth = _tracks(8)
    est = truth.copy()
    est[:, 0, 1] += 3.0   # UAV 1 se acerca 3 m a todos los demás
    res = compute_distance_errors(truth, est, 8)
    # UAV 1 participa en 3 de 12 pares medidos y 4 de 16 no medidos
    assert res.measured == pytest.approx(3.0 * 3 / 12)
    assert res.unmeasured == pytest.approx(3.0 * 4 / 16)
    assert res.per_pair[(1, 2)] == pytest.approx(3.0)
    assert res.per_pair[(2, 3)] == pytest.approx(0.0)


def test_small_groups_report_not_applicable():
    res4 = compute_distance_errors(_tracks(4), _tracks(4), 4)
    assert res4.measured == pytest.approx(0.0)
    assert res4.unmeasured is None
    res1 = compute_distance_errors(_tracks(1), _tracks(1), 1)
    assert res1.measured is None and res1.unmeasured is None


def test_missing_steps_are_ignored():
    truth = _tracks(2, steps=4)
    est = truth.copy()
    est[0] = np.nan
    est[1:, 1, 1] += 2.0
    errs = pair_distance_errors(truth, est)
    assert np.isnan(errs[(1, 2)][0])
    assert compute_distance_errors(truth, est, 2).measured == pytest.approx(2.0)


# ------------------------------------------------------------
# Posición
# ------------------------------------------------------------

def test_position_errors_with_warmup():
    truth = np.zeros((6, 2))
    est = np.column_stack([np.arange(6, dtype=float), np.zeros(6)])
    dr = np.column_stack([np.zeros(6), 2.0 * np.arange(6)])
    res = compute_position_errors(truth, est, dr, ts=1.0, warmup=3.0)
    assert res.series == pytest.approx(np.arange(6, dtype=float))
    assert res.average == pytest.approx(4.0)       # pasos 3, 4, 5
    assert res.dr_average == pytest.approx(8.0)
    assert res.dr_final == pytest.approx(10.0)


def test_position_errors_short_run_uses_all_steps():
    truth = np.zeros((3, 2))
    est = np.array([[0.0, 0.0], [3.0, 4.0], [6.0, 8.0]])
    res = compute_position_errors(truth, est, est, ts=0.2, warmup=60.0)
    assert res.average == pytest.approx(5.0)


# ------------------------------------------------------------
# Agregados
# ------------------------------------------------------------

def test_empirical_cdf():
    df = empirical_cdf([3.0, 1.0, 2.0, float("nan")])
    assert list(df.columns) == ["error", "cdf"]
    assert df["error"].tolist() == [1.0, 1.0, 2.0, 3.0]
    assert df["cdf"].tolist() == pytest.approx([0.0, 1 / 3, 2 / 3, 1.0])
    assert df["cdf"].is_monotonic_increasing
    assert empirical_cdf([]).empty


def test_boxplot_stats():
    stats = boxplot_stats(pd.Series([1.0, 2.0, 3.0, 4.0, 5.0]))
    assert stats["q1"] == pytest.approx(2.0)
    assert stats["median"] == pytest.approx(3.0)
    assert stats["q3"] == pytest.approx(4.0)
    assert stats["std"] == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert stats["n"] == 5
    assert boxplot_stats([])["n"] == 0


def test_summarize_ignores_nan():
    out = summarize([2.0, 4.0, float("nan"), float("inf")])
    assert out == {"mean": 3.0, "std": 1.0, "n": 2}
    assert math.isnan(summarize([])["mean"])
