import math
from typing import Literal, Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    PROJECT_NAME: str = "dHYM Toolkit"

    PROJECT_DESCRIPTION: str = (
        "Angle algebra, branch tracking, positivity checks and a torus solver "
        "for the supercritical deformed Hermitian-Yang-Mills equation."
    )
    PROJECT_VERSION: str = "0.1.0"
    API_V1_STR: str = "/api/v1"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_DIR: Optional[str] = None

    # Parallelism (scipy.fft workers)
    DHYM_THREADS: Optional[int] = None

    # Pointwise linear algebra
    SYMMETRY_TOL: float = 1e-10
    POSITIVITY_TOL: float = 1e-12
    ANGLE_TOL: float = 1e-10

    # Cohomology
    ROOT_RESIDUAL_TOL: float = 1e-8
    BRANCH_STEP_LIMIT: float = math.pi / 4
    BRANCH_MAX_REFINEMENTS: int = 40
    DEFAULT_BRANCH_SAMPLES: int = 256
    MONOTONE_SAMPLES: int = 2001
    ROOT_ON_PATH_POLICY: Literal["warning", "obstruction"] = "warning"

    # Torus solver
    SOLVER_TOL: float = 1e-10
    SOLVER_MAX_ITER: int = 30
    SOLVER_MAX_HALVINGS: int = 20
    CG_RTOL: float = 1e-12
    CG_MAX_ITER: int = 500
    GRID_1D: int = 256
    GRID_2D: int = 32
    MAX_GRID_POINTS: int = 2**22

    @field_validator("DHYM_THREADS", mode="before")
    def parse_threads(cls, v):
        if v in ("", None):
            return None
        v = int(v)
        if v < 1:
            raise ValueError("DHYM_THREADS must be a positive integer")
        return v

    class Config:
        env_file = ".env"
        extra = "ignore"


settings = Settings()
