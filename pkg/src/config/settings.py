"""
Pipeline settings and numerical defaults.
Every tolerance and default used by the services reads from here; SEED, LOG_LEVEL etc. override via env or .env.
"""
from pydantic_settings import BaseSettings
from functools import lru_cache
from typing import Literal


class Settings(BaseSettings):
    """Pipeline settings loaded from environment variables."""

    # Run
    environment: Literal["development", "ci", "production"] = "development"
    log_level: str = "INFO"
    log_json: bool = False

    # Reproducibility (SEED=... overrides)
    seed: int = 20240607

    # Linear algebra tolerances
    rank_tol: float = 1e-10
    hermitian_tol: float = 1e-10
    pole_tol: float = 1e-10

    # Riccati solver
    riccati_max_iter: int = 200
    riccati_residual_tol: float = 1e-10
    riccati_refine_steps: int = 5

    # Continuous synthesis
    grid_samples: int = 400
    decay_horizon: float = 10.0  # x_max = decay_horizon / min Im spectrum(alpha)
    exp_cap: float = 300.0  # x_cap = exp_cap / (2 max Im spectrum(alpha))

    # Discrete synthesis
    discrete_min_K: int = 50
    synthesis_defect_tol: float = 1e-6  # max ||C_k raw - C_k|| before projection onto involutions

    # Agreement checks
    probe_count: int = 20

    # Weyl defect verification
    verify_length_factor: float = 8.0  # L = verify_length_factor / Im z
    verify_steps: int = 4096
    verify_tail_ratio: float = 0.05

    # Stability harness
    sweep_workers: int = 1
    skip_fraction_limit: float = 0.2

    # Files
    corpus_dir: str = "./data/corpus"
    output_dir: str = "./output"

    class Config:
        env_file = ".env"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    """Settings are read once per process."""
    return Settings()


# Convenience accessor
settings = get_settings()
