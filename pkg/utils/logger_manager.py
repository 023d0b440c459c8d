"""
Gestor de logs por ejecución
Escribe en el directorio de salida de la ejecución:
  run.log              - log completo (handler en el logger raíz)
  quality_flags.log    - un bloque por ensayo con banderas de calidad
  trials_summary.log   - una línea por ensayo
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

from utils.helpers import fmt_optional


class RunLogger:
    """Gestiona los logs de una ejecución del harness"""

    def __init__(self, out_dir: Union[str, Path], level: Optional[int] = None):
        """
        Args:
            out_dir: directorio de salida de la ejecución (se crea si no existe)
            level: nivel del handler de archivo (por defecto, el del logger raíz)
        """
        self.log_dir = Path(out_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.file_handler = None
        self._setup_run_logging(level)

    def _setup_run_logging(self, level: Optional[int]):
        log_file = self.log_dir / "run.log"
        self.file_handler = logging.FileHandler(log_file, encoding='utf-8', mode='a')
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        self.file_handler.setFormatter(formatter)
        if level is not None:
            self.file_handler.setLevel(level)

        logging.getLogger().addHandler(self.file_handler)

        logging.info("="*70)
        logging.info(f"📁 LOGS DE EJECUCIÓN: {self.log_dir}")
        logging.info("="*70)

    def log_quality_flags(self, result) -> bool:
        """
        Guarda un bloque por ensayo con banderas de calidad activas.

        Args:
            result: TrialResult

        Returns:
            True si el ensayo tenía banderas y se escribió el bloque
        """
        flags = result.flags
        if not flags.has_issues:
            return False

        flags_log = self.log_dir / "quality_flags.log"
        try:
            with open(flags_log, 'a', encoding='utf-8') as f:
                timestamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
                f.write(f"\n{'='*70}\n")
                f.write(f"[{timestamp}] CASO {result.case} - ENSAYO {result.trial}\n")
                f.write(f"{'='*70}\n")
                f.write(f"Semilla:             {result.seed}\n")
                f.write(f"Pasos completados:   {result.steps_completed}\n")
                f.write(f"Reinicios de pesos:  {flags.weight_resets}\n")
                f.write(f"Fuera de mapa (PF):  {flags.off_map_updates}\n")
                f.write(f"Salió del mapa:      {'sí' if flags.left_map else 'no'}\n")
                f.write(f"Paquete incompleto:  {'sí' if flags.incomplete_packets else 'no'}\n")
                if flags.dropped_exchanges:
                    f.write(f"Intercambios perdidos: {flags.dropped_exchanges}\n")
                f.write(f"{'='*70}\n")
        except OSError as e:
            logging.error(f"Error guardando banderas de calidad: {e}")
            return False
        return True

    def log_trial_summary(self, result):
        """Una línea por ensayo en trials_summary.log."""
        summary_log = self.log_dir / "trials_summary.log"
        try:
            with open(summary_log, 'a', encoding='utf-8') as f:
                emoji = "⚠️" if result.flags.has_issues else "✅"
                f.write(
                    f"{emoji} {result.case} #{result.trial} | "
                    f"error {fmt_optional(result.avg_position_error, 2)} m | "
                    f"DR {fmt_optional(result.dr_avg_error, 2)} m | "
                    f"medidos {fmt_optional(result.measured_pair_error, 2)} m | "
                    f"no medidos {fmt_optional(result.unmeasured_pair_error, 2)} m\n"
                )
        except OSError as e:
            logging.error(f"Error guardando resumen de ensayo: {e}")

    def log_summary(self, summary):
        """Vuelca el detalle de cada ensayo de un MonteCarloSummary."""
        for result in summary.results:
            self.log_trial_summary(result)
            self.log_quality_flags(result)

    def get_log_directory(self) -> Path:
        return self.log_dir

    def close(self):
        """Cierra el handler de archivo y lo retira del logger raíz"""
        if self.file_handler:
            logging.info(f"📁 Logs guardados en: {self.log_dir}")
            logging.getLogger().removeHandler(self.file_handler)
            self.file_handler.close()
            self.file_handler = None
