import os
from dotenv import load_dotenv

load_dotenv()

TOOL_VERSION = '1.0.0'

# Parâmetro de deformação padrão: q = 0.5·e^{iπ/8}
DEFAULT_Q_MODULUS = float(os.getenv('BE2_Q_MODULUS', '0.5'))
DEFAULT_Q_ARG_PI = os.getenv('BE2_Q_ARG_PI', '1/8')

DEFAULT_EPS_BAND = float(os.getenv('BE2_EPS_BAND', '1e-10'))
DEFAULT_SAMPLES = int(os.getenv('BE2_SAMPLES', '4096'))
DEFAULT_M_CAP = int(os.getenv('BE2_M_CAP', '512'))

DEFAULT_PRUNE = float(os.getenv('BE2_PRUNE', '1e-300'))
DEFAULT_BANDED_PRUNE = float(os.getenv('BE2_BANDED_PRUNE', '1e-16'))

DEFAULT_SEED = int(os.getenv('BE2_SEED', '20240601'))
DEFAULT_WORKERS = int(os.getenv('BE2_WORKERS', '4'))

DEFAULT_PROBE_LIMIT = int(os.getenv('BE2_PROBE_LIMIT', '2000'))
DEFAULT_PROBE_SAMPLE = int(os.getenv('BE2_PROBE_SAMPLE', '500'))
DEFAULT_BANDED_PROBES = int(os.getenv('BE2_BANDED_PROBES', '24'))
DEFAULT_BOSON_PROBES = int(os.getenv('BE2_BOSON_PROBES', '100'))

REPORT_DIR = os.getenv('REPORT_DIR', 'reports')

SLACK_WEBHOOK_URL = os.getenv('SLACK_WEBHOOK_URL')

LOG_FILE = os.getenv('BE2_LOG_FILE', 'logs/braided_e2.log')
LOG_LEVEL = os.getenv('BE2_LOG_LEVEL', 'INFO')
