"""Application settings from environment."""
import os
from functools import lru_cache


@lru_cache
def get_settings() -> "Settings":
    return Settings()


def _env_float(name: str, default: float, low: float, high: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return max(low, min(high, float(raw)))
    except ValueError:
        return default


class Settings:
    """Central config. Load .env in cli.py before using. Settings are @property so they read env at access time."""

    @property
    def log_level(self) -> str:
        return (os.getenv("LOG_LEVEL", "INFO") or "INFO").strip().upper()

    # Relative tolerance on eigenvalue gaps inside one block (scaled by max(1, |K|_max))
    @property
    def degeneracy_tolerance(self) -> float:
        return _env_float("DEGENERACY_TOL", 1e-9, 1e-16, 1e-2)

    # Recursion denominators |Λ - λ| below this * (1 + |Λ|) abort the construction
    @property
    def resonance_tolerance(self) -> float:
        return _env_float("RESONANCE_TOL", 1e-9, 1e-16, 1e-2)

    @property
    def residual_tolerance(self) -> float:
        return _env_float("RESIDUAL_TOL", 1e-8, 1e-300, 1.0)

    # Trace distance allowed between spectral and dense propagation
    @property
    def evolution_tolerance(self) -> float:
        return _env_float("EVOLUTION_TOL", 1e-7, 1e-300, 1.0)

    # Dense oracle: largest Hilbert-space dimension (the superoperator is dim^2 x dim^2)
    @property
    def oracle_max_dimension(self) -> int:
        raw = os.getenv("ORACLE_MAX_DIM", "64").strip()
        try:
            return max(1, min(64, int(raw)))
        except ValueError:
            return 64

    # Spectrum: weights below this fraction of max|T| are dropped from the double sum
    @property
    def spectrum_prune_ratio(self) -> float:
        return _env_float("SPECTRUM_PRUNE", 1e-14, 0.0, 1e-3)

    # Evolve: warn when the population of the cutoff block exceeds this
    @property
    def leakage_warning(self) -> float:
        return _env_float("LEAKAGE_WARN", 1e-3, 0.0, 1.0)

    @property
    def verify_seed(self) -> int:
        raw = os.getenv("VERIFY_SEED", "20240611").strip()
        try:
            return int(raw)
        except ValueError:
            return 20240611
