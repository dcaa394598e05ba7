from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore", env_file_encoding="utf-8")

    TRACE_TOL: float = 1e-9
    PARABOLIC_TOL: float = 1e-8
    DET_TOL: float = 1e-12
    MATCH_TOL: float = 1e-7
    DOMAIN_TOL: float = 1e-9
    IDEAL_TOL: float = 1e-9
    AREA_TOL: float = 1e-3

    AREA_GRID: int = 800
    AREA_REFINE: int = 16
    AREA_BOUNDARY_FRACTION: float = 0.0

    BALL_RADIUS: float = 4.0
    MAX_WORD_LENGTH: int = 40
    DIRICHLET_ROUNDS: int = 12
    STABILIZATION_FACTOR: float = 1.25

    TILE_LEVEL_DOUBLINGS: int = 4

    CUSP_DELTA: float = 0.2
    SNAPSHOT_RADIUS: float = 2.5
    SNAPSHOT_MARGIN: float = 0.1
    CLUSTER_FREQUENCY: float = 0.5
    SOFT_COUNT_CAP: float = 4.0

    N_SAMPLES: int = 10_000
    SAMPLE_BLOCK: int = 500
    MASTER_SEED: int = 20240521
    WORKERS: int = 1
    REJECTION_MIN_RATE: float = 1e-4
    REJECTION_MAX_PROPOSALS: int = 1_000_000

    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "outputs"


settings = Settings()
