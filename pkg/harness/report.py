# harness/report.py
"""
Reporte Markdown de una ejecución (REPORT.md) con:
- Error de distancia entre UAV (pares medidos / no medidos)
- Error de posición del UAV reportado frente a dead reckoning
- Banderas de calidad por caso
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, List

from harness.monte_carlo import MonteCarloSummary
from utils.helpers import fmt_optional

logger = logging.getLogger(__name__)


def _stat(s: MonteCarloSummary, col: str, key: str = "mean") -> str:
    return fmt_optional(s.stats.get(col, {}).get(key), digits=3)


def tbl_distance(summaries: List[MonteCarloSummary]) -> str:
    lines = [
        "| Caso | N | Pares medidos (m) | σ | Pares no medidos (m) | σ |",
        "|---|---:|---:|---:|---:|---:|",
    ]
    for s in summaries:
        lines.append(
            f"| {s.case} | {s.group_size} | {_stat(s, 'measured_pair_error')} | {_stat(s, 'measured_pair_error', 'std')} "
            f"| {_stat(s, 'unmeasured_pair_error')} | {_stat(s, 'unmeasured_pair_error', 'std')} |"
        )
    return "\n".join(lines) + "\n"


def tbl_position(summaries: List[MonteCarloSummary]) -> str:
    lines = [
        "| Caso | N | Ensayos | Error medio (m) | σ | DR medio (m) | DR final (m) | Mediana | Q1 | Q3 |",
        "|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|",
    ]
    for s in summaries:
        pf = s.boxplot[s.boxplot["series"] == "pf"].iloc[0] if len(s.boxplot) else {}
        lines.append(
            f"| {s.case} | {s.group_size} | {len(s.trials)} | {_stat(s, 'avg_position_error')} "
            f"| {_stat(s, 'avg_position_error', 'std')} | {_stat(s, 'dr_avg_error')} | {_stat(s, 'dr_final_error')} "
            f"| {fmt_optional(pf.get('median'))} | {fmt_optional(pf.get('q1'))} | {fmt_optional(pf.get('q3'))} |"
        )
    return "\n".join(lines) + "\n"


def tbl_flags(summaries: List[MonteCarloSummary]) -> str:
    if not any(any(v for v in s.flags.values()) for s in summaries):
        return "_Sin banderas de calidad en esta ejecución._\n"
    lines = [
        "| Caso | Reinicios de pesos | Actualizaciones fuera de mapa | Salidas del mapa | Paquetes incompletos |",
        "|---|---:|---:|---:|---:|",
    ]
    for s in summaries:
        f = s.flags
        lines.append(
            f"| {s.case} | {f.get('weight_resets', 0)} | {f.get('off_map_updates', 0)} "
            f"| {f.get('left_map', 0)} | {f.get('incomplete_packets', 0)} |"
        )
    return "\n".join(lines) + "\n"


def write_report(summaries: Iterable[MonteCarloSummary], out_dir: Path, title: str = "Localización cooperativa") -> Path:
    """Crea <out_dir>/REPORT.md con las tablas de la ejecución."""
    summaries = list(summaries)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    md_path = out_dir / "REPORT.md"

    content = []
    content.append(f"# {title}\n")
    content.append("## Error de distancia entre UAV (EKF de ranging)\n")
    content.append(tbl_distance(summaries))
    content.append("\n## Error de posición del UAV 1\n")
    content.append(tbl_position(summaries))
    content.append("\n## Banderas de calidad\n")
    content.append(tbl_flags(summaries))
    content.append(
        "\n> Archivos: `trials.csv`, `cdf_<caso>.csv`, `boxplot_<caso>.csv`, `summary.json`. "
        "N/A = el grupo no tiene pares en esa categoría.\n"
    )

    md = "\n".join(content).strip() + "\n"
    md_path.write_text(md, encoding="utf-8")
    logger.info(f"📝 Reporte escrito en {md_path.as_posix()}")
    return md_path
