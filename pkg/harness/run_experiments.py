# harness/run_experiments.py
"""
CLI de experimentos.

Subcomandos:
    run     --config <yaml> [--trials N] [--seed S] [--workers W] [--traces] --out <dir>
    sweep   --config <yaml> [--trials N] [--seed S] [--workers W] --out <dir>
    mapgen  --spec <yaml> --out <grid> [--smooth <m>] [--upward <m>]
    analyze --in <dir> [--out <dir>]

Cada ejecución escribe en <dir>:
    trials.csv (por caso en <dir>/<caso>/ para barridos), cdf_<caso>.csv, boxplot_<caso>.csv,
    summary.json, REPORT.md y los logs (run.log, quality_flags.log, trials_summary.log).

Uso típico:
    python -m harness.run_experiments run --config configs/baseline.yaml --trials 20 --seed 2024 --out reports/baseline
    python -m harness.run_experiments sweep --config configs/sweeps.yaml --out reports/sweeps
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import yaml

from config import Config
from harness.exports import (
    export_boxplot_to_csv,
    export_case,
    export_cdf_to_csv,
    export_summary_to_json,
    load_trials,
)
from harness.monte_carlo import MonteCarloSummary, run_monte_carlo, run_sweep
from harness.report import write_report
from harness.trial_config import load_config
from magmap.grid import save_grid
from magmap.synthetic import InvalidSpecError, SyntheticMapSpec, degrade_resolution, generate_synthetic, upward_continue
from utils.logger_manager import RunLogger

logger = logging.getLogger(__name__)

MAP_SPEC_KEYS = {
    "seed", "extent", "cell_size", "baseline", "bump_count",
    "amplitude_range", "sigma_range", "origin_east", "origin_north",
}


# --------------------------------------------------------------------------------------------------
# Salidas
# --------------------------------------------------------------------------------------------------
def _write_outputs(
    summaries: Sequence[MonteCarloSummary],
    out_dir: Path,
    run_logger: Optional[RunLogger] = None,
    config_echo: Optional[dict] = None,
    per_case_dirs: bool = False,
) -> None:
    for summary in summaries:
        export_case(summary, out_dir, trials_subdir=per_case_dirs)
        if run_logger is not None:
            run_logger.log_summary(summary)
    export_summary_to_json(summaries, out_dir=out_dir, config_echo=config_echo)
    write_report(summaries, out_dir)


def load_map_spec(path: Path) -> SyntheticMapSpec:
    """Lee el YAML de mapgen (claves de MAP_SPEC_KEYS) y devuelve un SyntheticMapSpec validado."""
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise InvalidSpecError(f"{path}: el documento YAML debe ser un mapa")
    unknown = set(data) - MAP_SPEC_KEYS
    if unknown:
        raise InvalidSpecError(f"claves desconocidas en {path}: {sorted(unknown)}")
    if "seed" not in data or "extent" not in data:
        raise InvalidSpecError(f"{path}: 'seed' y 'extent' son obligatorios")
    try:
        spec = SyntheticMapSpec(
            seed=int(data["seed"]),
            extent=tuple(float(v) for v in data["extent"]),
            cell_size=float(data.get("cell_size", Config.MAP_CELL_SIZE)),
            baseline=float(data.get("baseline", Config.MAP_BASELINE)),
            bump_count=int(data.get("bump_count", 0)),
            bump_amplitude_range=tuple(float(v) for v in data.get("amplitude_range", Config.MAP_AMPLITUDE_RANGE)),
            bump_sigma_range=tuple(float(v) for v in data.get("sigma_range", Config.MAP_SIGMA_RANGE)),
            origin_east=float(data.get("origin_east", 0.0)),
            origin_north=float(data.get("origin_north", 0.0)),
        )
    except (TypeError, ValueError) as e:
        raise InvalidSpecError(f"{path}: especificación inválida: {e}") from e
    spec.validate()
    return spec


# --------------------------------------------------------------------------------------------------
# Subcomandos
# --------------------------------------------------------------------------------------------------
def cmd_run(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    run_logger = RunLogger(out_dir)
    try:
        cfg = load_config(args.config)
        summary = run_monte_carlo(
            cfg,
            n_trials=args.trials,
            master_seed=args.seed,
            workers=args.workers,
            keep_traces=args.traces,
        )
        _write_outputs([summary], out_dir, run_logger, config_echo=cfg.to_dict())
        logger.info(f"✅ Ejecución finalizada | Carpeta: {out_dir.as_posix()} | Ensayos: {len(summary.trials)}")
    finally:
        run_logger.close()
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    run_logger = RunLogger(out_dir)
    try:
        cfg = load_config(args.config)
        summaries = run_sweep(
            cfg,
            n_trials=args.trials,
            master_seed=args.seed,
            workers=args.workers,
            keep_traces=args.traces,
        )
        _write_outputs(summaries, out_dir, run_logger, config_echo=cfg.to_dict(), per_case_dirs=True)
        logger.info(f"✅ Barrido finalizado | Carpeta: {out_dir.as_posix()} | Casos: {len(summaries)}")
    finally:
        run_logger.close()
    return 0


def cmd_mapgen(args: argparse.Namespace) -> int:
    spec = load_map_spec(Path(args.spec))
    magnetic_map = generate_synthetic(spec)
    if args.smooth:
        magnetic_map = degrade_resolution(magnetic_map, args.smooth)
    if args.upward:
        magnetic_map = upward_continue(magnetic_map, args.upward)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_grid(magnetic_map, out_path)
    logger.info(f"💾 Mapa {magnetic_map.n_rows}x{magnetic_map.n_cols} guardado en {out_path.as_posix()}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    in_dir = Path(args.in_dir)
    out_dir = Path(args.out) if args.out else in_dir
    summaries = load_trials(in_dir)
    # sólo agregados: trials.csv no se reescribe
    for summary in summaries:
        export_cdf_to_csv(summary, out_dir=out_dir)
        export_boxplot_to_csv(summary, out_dir=out_dir)
    export_summary_to_json(summaries, out_dir=out_dir)
    write_report(summaries, out_dir)
    logger.info(f"✅ Análisis regenerado en {out_dir.as_posix()} ({len(summaries)} casos)")
    return 0


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    p = argparse.ArgumentParser(description="Localización cooperativa de UAV: experimentos Monte Carlo")
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("run", "sweep"):
        sp = sub.add_parser(name, help="Lote Monte Carlo" if name == "run" else "Barrido de casos")
        sp.add_argument("--config", required=True, help="YAML del experimento")
        sp.add_argument("--trials", type=int, default=None, help="Número de ensayos (por defecto el del YAML)")
        sp.add_argument("--seed", type=int, default=None, help="Semilla maestra (u64)")
        sp.add_argument("--workers", type=int, default=None, help="Procesos en paralelo (1 = secuencial)")
        sp.add_argument("--traces", action="store_true", help="Guardar trazas por paso de cada ensayo")
        sp.add_argument("--out", required=True, help="Directorio de salida")

    mp = sub.add_parser("mapgen", help="Generar un mapa sintético")
    mp.add_argument("--spec", required=True, help="YAML con la especificación del mapa")
    mp.add_argument("--out", required=True, help="Fichero de rejilla de salida")
    mp.add_argument("--smooth", type=float, default=None, help="Suavizado gaussiano (m)")
    mp.add_argument("--upward", type=float, default=None, help="Continuación ascendente (m)")

    ap = sub.add_parser("analyze", help="Recalcular agregados desde trials.csv")
    ap.add_argument("--in", dest="in_dir", required=True, help="Directorio con trials.csv")
    ap.add_argument("--out", default=None, help="Directorio de salida (por defecto el de entrada)")
    return p.parse_args(argv)


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "mapgen": cmd_mapgen,
    "analyze": cmd_analyze,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=Config.LOG_LEVEL,
        format="%(asctime)s | %(levelname)s | %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except Exception as e:
        logger.error(f"❌ Error en '{args.command}': {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
