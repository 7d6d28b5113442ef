"""Uygulama yapılandırması."""
import os
from pathlib import Path
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / ".env")


def _env_bool(name: str, default: bool = False) -> bool:
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


# BitString tek makine kelimesi
MAX_WIDTH = 64
# PermTable ve kesin (oracle) sayımlar için tam numaralandırma sınırı
ENUM_MAX_LINES = int(os.environ.get("REVCHECK_ENUM_MAX_LINES", "20"))
# Destek analizi 2^k pencere deseni üzerinden yapılır
SUPPORT_MAX_LINES = 16

# Varsayılan GatePolicy: kontrol sayısı {0..min(MAX_CONTROLS, n-1)}, sadece pozitif
DEFAULT_MAX_CONTROLS = int(os.environ.get("REVCHECK_MAX_CONTROLS", "4"))
DEFAULT_NEGATIVE_CONTROLS = _env_bool("REVCHECK_NEGATIVE_CONTROLS", False)
# Varsayılan kapı sayısı g = GATE_FACTOR * n^2 (n=20 -> 4000)
GATE_FACTOR = int(os.environ.get("REVCHECK_GATE_FACTOR", "10"))

# Rastgele hata: dizi uzunluğu = ERROR_LENGTH_FACTOR * k
ERROR_LENGTH_FACTOR = int(os.environ.get("REVCHECK_ERROR_LENGTH_FACTOR", "3"))
ERROR_MAX_ATTEMPTS = int(os.environ.get("REVCHECK_ERROR_MAX_ATTEMPTS", "1000"))

# Varsayılan max_trials = min(2^n, MAX_TRIALS_CAP)
MAX_TRIALS_CAP = int(os.environ.get("REVCHECK_MAX_TRIALS_CAP", str(2**20)))

DEFAULT_REPETITIONS = int(os.environ.get("REVCHECK_REPETITIONS", "10000"))
CAMPAIGN_WORKERS = int(os.environ.get("REVCHECK_WORKERS", "1"))
# Kampanyada birlikte (numpy şeritleriyle) koşan tekrar sayısı; 1 = tek tek
CAMPAIGN_BATCH = int(os.environ.get("REVCHECK_BATCH", "512"))

LOG_LEVEL = os.environ.get("REVCHECK_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

HOST = os.environ.get("REVCHECK_HOST", "0.0.0.0")
PORT = int(os.environ.get("REVCHECK_PORT", "8000"))


def default_gate_count(n: int) -> int:
    return GATE_FACTOR * n * n


def default_max_trials(n: int) -> int:
    return min(2**n, MAX_TRIALS_CAP)
