# config.py
"""
Configuración centralizada del simulador de localización cooperativa (coopnav).

Los valores por defecto reproducen el escenario base (ruido de sensores y perfil
de velocidad de referencia) a escala de escritorio. Los ficheros YAML de
experimento sólo sobrescriben lo que necesitan; todo lo demás sale de aquí.
"""

import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Configuración del simulador"""

    # ============================================
    # GENERAL / EJECUCIÓN
    # ============================================
    LOG_LEVEL = os.getenv("COOPNAV_LOGLEVEL", "INFO")
    OUTPUT_DIR = os.getenv("COOPNAV_OUTPUT_DIR", "reports")
    WORKERS = int(os.getenv("COOPNAV_WORKERS", "1"))   # 1 = secuencial, sin pool

    MASTER_SEED = 2024
    N_TRIALS = 20

    # ============================================
    # ESCENARIO
    # ============================================
    GROUP_SIZE = 8
    DURATION_S = 600.0            # 10 minutos de vuelo (escala escritorio)
    TS = 0.2                      # periodo de filtro = periodo de ranging/magnetómetro (5 Hz)
    ODOMETRY_SUBSTEPS = 2         # odometría a 10 Hz -> 2 muestras por paso de filtro
    INIT_POSITION_SIGMA = 1.0     # m, perturbación de la pose inicial real
    WARMUP_S = 60.0               # el error medio se promedia a partir de aquí

    # ============================================
    # RUIDO DE SENSORES (escenario base)
    # ============================================
    SIGMA_R = 1.0                 # m, ranging
    SIGMA_M = 10.0                # nT, magnetómetro
    SIGMA_V = 0.3                 # m/s, velocidad
    SIGMA_G_DEG_S = 0.005         # deg/s, giróscopo (se convierte a rad/s al cargar)
    BIAS_FRACTION = 0.1           # bias de encendido ~ N(0, 0.1·sigma)

    # ============================================
    # TRAYECTORIAS DE REFERENCIA
    # ============================================
    VEL_AMPLITUDE = 10.0          # m/s
    VEL_BASELINE = 50.0           # m/s
    VEL_ANGULAR_FREQUENCY = 0.05  # rad/s (periodo ~126 s)
    TRACK_SPACING = 1000.0        # m entre trayectorias paralelas
    RANDOM_PHASE = True           # fase = rand·2π por UAV

    # ============================================
    # CONTROLADOR
    # ============================================
    K_CROSS = 0.002               # rad/s por metro de error lateral
    K_HEADING = 0.6               # rad/s por radián de error de rumbo
    OMEGA_LIMIT = 0.2             # rad/s, saturación de yaw rate

    # ============================================
    # EKF DE RANGING COOPERATIVO
    # ============================================
    Q_INFLATION = 2.0             # Q por UAV = 2 · diag(σv²Ts², σv²Ts², (σg·Ts)²)
    EKF_INIT_POSITION_STD = 1.0   # m
    EKF_INIT_HEADING_STD_DEG = 1.0

    # ============================================
    # FILTRO DE PARTÍCULAS MAGNÉTICO
    # ============================================
    PARTICLE_COUNT = 2000
    PF_POSITION_STD = 0.3         # m por paso
    PF_HEADING_STD = 0.0005       # rad por paso
    PF_GAMMA_STD = 0.0005         # rad por paso (random walk de γ)
    PF_INIT_POSITION_STD = 1.0    # m
    PF_INIT_HEADING_STD_DEG = 1.0
    PF_INIT_GAMMA_STD_DEG = 1.0
    RESAMPLE_THRESHOLD = 0.5      # fracción de M para el ESS
    MAGNETIC_SIGMA = None         # None -> usa SIGMA_M del sensor
    MAGNETIC_SIGMA_FLOOR = 1.0    # nT, si el sensor no tiene ruido
    PF_ALL_UAVS = False           # True: un filtro de partículas por UAV

    # ============================================
    # MAPA MAGNÉTICO SINTÉTICO
    # ============================================
    MAP_SEED = 7
    MAP_CELL_SIZE = 100.0         # m
    MAP_BASELINE = 0.0            # nT
    MAP_BUMPS_PER_KM2 = 0.6
    MAP_BUMP_COUNT = None         # si se fija, ignora la densidad
    MAP_AMPLITUDE_RANGE = (-300.0, 300.0)    # nT
    MAP_SIGMA_RANGE = (250.0, 1500.0)        # m
    MAP_MARGIN = 10_000.0         # m alrededor del corredor de vuelo
    MAP_RESOLUTION = "high"       # 'high' | 'low'
    LOWRES_METHOD = "gaussian"    # 'gaussian' | 'upward'
    SMOOTHING_SIGMA = 1000.0      # m, suavizado gaussiano de la variante de baja resolución
    UPWARD_HEIGHT = 2745.0        # m, continuación ascendente (3050 m - 305 m)

    # ============================================
    # COMUNICACIÓN
    # ============================================
    PACKET_LOSS = 0.0             # probabilidad de perder un intercambio por pareja
