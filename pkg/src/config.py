"""Configuration management for the laboratory."""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file (if it exists)
load_dotenv()

# Base directory
BASE_DIR = Path(__file__).resolve().parent.parent

# Hard cap: one adjacency row must fit a machine word
HARD_MAX_N = 32


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == "true"


class Settings:
    """Laboratory settings with runtime-modifiable guardrails."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._reload_from_env()
        return cls._instance

    def _reload_from_env(self):
        """Reload settings from environment variables."""
        self._runtime_max_n = None  # None means use env var
        self._runtime_threads = None

    @property
    def max_n(self) -> int:
        """Guardrail for enumeration and packing orders (SQLAB_MAX_N)."""
        if self._runtime_max_n is not None:
            return self._runtime_max_n
        value = int(os.getenv("SQLAB_MAX_N", "16"))
        return min(value, HARD_MAX_N)

    @max_n.setter
    def max_n(self, value: int):
        if value < 1 or value > HARD_MAX_N:
            raise ValueError(f"max_n must be between 1 and {HARD_MAX_N}")
        self._runtime_max_n = value

    @property
    def verify_max_n(self) -> int:
        """Upper end of the exhaustive theorem ranges."""
        return int(os.getenv("SQLAB_VERIFY_MAX_N", "11"))

    @property
    def reduction_max_n(self) -> int:
        """Upper end for the dense-complement reduction check."""
        return int(os.getenv("SQLAB_REDUCTION_MAX_N", "9"))

    @property
    def all_graphs_max_n(self) -> int:
        """Largest order accepted by all_graphs."""
        return int(os.getenv("SQLAB_ALL_GRAPHS_MAX_N", "8"))

    @property
    def threads(self) -> int:
        """Worker pool size (default = available parallelism)."""
        if self._runtime_threads is not None:
            return self._runtime_threads
        return int(os.getenv("SQLAB_THREADS", str(os.cpu_count() or 1)))

    @threads.setter
    def threads(self, value: int):
        if value < 1:
            raise ValueError("threads must be at least 1")
        self._runtime_threads = value

    @property
    def shards(self) -> int:
        return int(os.getenv("SQLAB_SHARDS", "1"))

    @property
    def mu_tol(self) -> float:
        """Power iteration tolerance."""
        return float(os.getenv("SQLAB_MU_TOL", "1e-10"))

    @property
    def power_iterations(self) -> int:
        """Power iteration cutoff."""
        return int(os.getenv("SQLAB_POWER_ITERATIONS", "10000"))

    @property
    def closure_sample_edges(self) -> int:
        """Edge bound of the sparse sample used by the insertion-closure check."""
        return int(os.getenv("SQLAB_CLOSURE_SAMPLE_EDGES", "3"))

    @property
    def log_level(self) -> str:
        return os.getenv("SQLAB_LOG_LEVEL", "WARNING").upper()

    @property
    def progress(self) -> bool:
        """Whether to draw tqdm progress bars."""
        return _env_bool("SQLAB_PROGRESS", "true")


settings = Settings()
