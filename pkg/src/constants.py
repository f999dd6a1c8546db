import os
from fractions import Fraction
from typing import Dict, Any, List

import yaml

# File paths
PROJECT_FOLDER = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_PATH = os.path.join(PROJECT_FOLDER, 'config.yaml')

# Load settings
def load_settings(config_path: str = CONFIG_PATH) -> Dict[str, Any]:
    with open(config_path, 'r') as config_file:
        return yaml.safe_load(config_file)

SETTINGS: Dict[str, Any] = load_settings()

# Function to evaluate ratio expressions such as "5 / 6"
def evaluate_ratio(expression: Any) -> float:
    if isinstance(expression, (int, float)):
        return float(expression)
    try:
        return float(Fraction(str(expression).replace(' ', '')))
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Cannot evaluate ratio expression {expression!r}: {e}") from e

VERSION = SETTINGS['version']

# Logging settings
LOGS_FOLDER = os.path.join(PROJECT_FOLDER, SETTINGS['logging']['folder'])
LOG_LEVEL = SETTINGS['logging']['level']

# Cavity regimes (rates in units of kappa)
GAMMA_OVER_KAPPA = float(SETTINGS['cavity']['gamma_over_kappa'])
REGIMES: Dict[str, Dict[str, float]] = {
    name: {key: float(value) for key, value in regime.items()}
    for name, regime in SETTINGS['cavity']['regimes'].items()
}

# Measured switch coefficients
SW1_T12 = float(SETTINGS['switches']['sw1']['t12'])
SW1_R22 = float(SETTINGS['switches']['sw1']['r22'])
SW2_T12 = float(SETTINGS['switches']['sw2']['t12'])
SW2_R11 = float(SETTINGS['switches']['sw2']['r11'])

# Cloner fidelities
F_CLONER_EXPERIMENTAL = evaluate_ratio(SETTINGS['cloner']['experimental'])
F_UC = evaluate_ratio(SETTINGS['cloner']['universal_optimal'])

ERROR_LEVEL = float(SETTINGS['error_level'])

# Canonical grids
CANONICAL_GRIDS: Dict[str, Dict[str, Any]] = SETTINGS['grids']

# Ensembles
HAAR_SAMPLES = int(SETTINGS['ensembles']['haar_samples'])
CALIBRATION_CANDIDATES: List[str] = SETTINGS['ensembles']['calibration_candidates']

# Output and execution
CSV_SIGNIFICANT_DIGITS = int(SETTINGS['csv']['significant_digits'])
DEFAULT_WORKERS = int(SETTINGS['sweep']['workers'])

# Anchor table
ANCHORS: List[Dict[str, Any]] = SETTINGS['anchors']

# Numerical tolerances
PRUNE_THRESHOLD = 1e-15
NORM_TOLERANCE = 1e-9
