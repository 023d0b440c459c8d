"""
harness package

Orquestación de experimentos: configuración, ensayos, lotes Monte Carlo,
métricas y exportación de resultados.
"""

from .trial_config import (
    TrialConfig,
    ConfigError,
    load_config,
    from_dict,
    with_overrides,
    sweep_cases,
)
from .metrics import (
    compute_distance_errors,
    compute_position_errors,
    empirical_cdf,
    boxplot_stats,
)
from .trial import TrialResult, TrialFlags, TrajectoryLeftMapError, run_trial
from .monte_carlo import MonteCarloSummary, run_monte_carlo, run_sweep, summarize_trials, trial_seeds

__all__ = [
    "TrialConfig",
    "ConfigError",
    "load_config",
    "from_dict",
    "with_overrides",
    "sweep_cases",
    "compute_distance_errors",
    "compute_position_errors",
    "empirical_cdf",
    "boxplot_stats",
    "TrialResult",
    "TrialFlags",
    "TrajectoryLeftMapError",
    "run_trial",
    "MonteCarloSummary",
    "run_monte_carlo",
    "run_sweep",
    "summarize_trials",
    "trial_seeds",
]
