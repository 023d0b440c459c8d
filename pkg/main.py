#!/usr/bin/env python3
"""
coopnav - Localización cooperativa de grupos de UAV
Punto de entrada principal (delegado en harness.run_experiments)

    python main.py run --config configs/baseline.yaml --trials 20 --seed 2024 --out reports/baseline
"""

import sys
import logging

from config import Config
from harness.run_experiments import main as run_experiments
from utils.helpers import setup_console_encoding

# Configurar encoding UTF-8 para Windows
setup_console_encoding()

# Configurar logging
logging.basicConfig(
    level=Config.LOG_LEVEL,
    format='%(asctime)s - %(levelname)s - %(message)s',
    handlers=[logging.StreamHandler(stream=sys.stdout)]
)
logger = logging.getLogger(__name__)


def main():
    """Función principal"""
    logger.info("="*60)
    logger.info("COOPNAV - EXPERIMENTOS DE LOCALIZACIÓN COOPERATIVA")
    logger.info("="*60)

    try:
        code = run_experiments(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Interrupción recibida. Deteniendo...")
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    main()
