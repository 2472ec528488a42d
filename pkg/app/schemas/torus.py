from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import settings
from app.schemas.hermitian import as_complex_matrix
from app.utils import linalg


class PsiMode(BaseModel):
    """One term amplitude * cos(wave . x) of the chi deformation potential."""

    wave: List[int]
    amplitude: float

    class Config:
        frozen = True


class TorusModel(BaseModel):
    """
    Flat torus C^n / (2 pi Z)^(2n) with background form A and deformed metric
    chi = I + psi_amplitude * (complex Hessian of psi).

    Real axes are ordered (x1, y1, ..., xn, yn).
    """

    n: int = Field(..., ge=1, le=2)
    grid: int
    A: np.ndarray
    psi_modes: List[PsiMode] = Field(default_factory=list)
    psi_amplitude: float = Field(default=0.0, ge=0.0, le=1.0)

    @field_validator("A", mode="before")
    def coerce_matrix(cls, v):
        return as_complex_matrix(v)

    @field_validator("grid")
    def check_grid(cls, v):
        if v < 4 or v & (v - 1):
            raise ValueError(f"grid must be a power of two >= 4, got {v}")
        return v

    @model_validator(mode="after")
    def check_model(self):
        if self.A.shape != (self.n, self.n):
            raise ValueError(f"A must be {self.n}x{self.n}, got {self.A.shape}")
        defect = float(linalg.hermitian_defect(self.A))
        if defect > settings.SYMMETRY_TOL:
            raise ValueError(f"A is not Hermitian (defect {defect:.3e})")
        points = self.grid ** (2 * self.n)
        if points > settings.MAX_GRID_POINTS:
            raise ValueError(
                f"grid {self.grid} gives {points} points on a {2 * self.n}-torus, "
                f"above MAX_GRID_POINTS={settings.MAX_GRID_POINTS}"
            )
        for mode in self.psi_modes:
            if len(mode.wave) != 2 * self.n:
                raise ValueError(
                    f"psi wave vector {mode.wave} must have {2 * self.n} entries"
                )
            if any(abs(m) >= self.grid // 2 for m in mode.wave):
                raise ValueError(
                    f"psi wave vector {mode.wave} is not resolved on a {self.grid} grid"
                )
        return self

    @property
    def shape(self) -> tuple:
        return (self.grid,) * (2 * self.n)

    @property
    def theta_auto(self) -> float:
        """sum arccot(eig A), the constant solved by phi = 0 when psi vanishes."""
        lam = np.linalg.eigvalsh(self.A)
        return float(linalg.lagrangian_angle(lam))

    def with_amplitude(self, s: float) -> "TorusModel":
        return self.model_copy(update={"psi_amplitude": s})

    def with_grid(self, grid: int) -> "TorusModel":
        return TorusModel(
            n=self.n,
            grid=grid,
            A=self.A,
            psi_modes=self.psi_modes,
            psi_amplitude=self.psi_amplitude,
        )

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class PotentialField(BaseModel):
    """Mean-zero real potential phi sampled on the torus grid."""

    values: np.ndarray

    @field_validator("values", mode="before")
    def coerce_values(cls, v):
        return np.asarray(v, dtype=float)

    @model_validator(mode="after")
    def check_gauge(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("potential values must be finite")
        mean = float(np.mean(self.values))
        sup = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        if abs(mean) > 1e-14 * sup:
            raise ValueError(f"potential mean {mean:.3e} is not zero")
        return self

    @classmethod
    def from_values(cls, values: Any) -> "PotentialField":
        """Gauge-fix arbitrary samples by removing their mean."""
        values = np.asarray(values, dtype=float)
        return cls(values=values - np.mean(values))

    @classmethod
    def zeros(cls, shape: tuple) -> "PotentialField":
        return cls(values=np.zeros(shape))

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class PencilField(BaseModel):
    """Pointwise pencils (chi(x), omega_phi(x)), arrays of shape grid + (n, n)."""

    chi: np.ndarray
    omega: np.ndarray

    @property
    def n(self) -> int:
        return self.chi.shape[-1]

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class SolverConfig(BaseModel):
    tol: float = Field(default_factory=lambda: settings.SOLVER_TOL, gt=0.0)
    max_iter: int = Field(default_factory=lambda: settings.SOLVER_MAX_ITER, ge=0)
    max_halvings: int = Field(
        default_factory=lambda: settings.SOLVER_MAX_HALVINGS, ge=0
    )
    cg_rtol: float = Field(default_factory=lambda: settings.CG_RTOL, gt=0.0)
    cg_max_iter: int = Field(default_factory=lambda: settings.CG_MAX_ITER, ge=1)
    allow_lifted: bool = False

    @property
    def strict(self) -> bool:
        return not self.allow_lifted


class ResidualRow(BaseModel):
    iter: int
    residual: float
    alpha: float


class SolverReport(BaseModel):
    converged: bool
    iterations: int
    residual_sup: float
    angle_min: float
    angle_max: float
    theta_hat: float
    class_arg: Optional[float] = None
    psi_amplitude: float = 0.0
    history: List[ResidualRow] = Field(default_factory=list)
    wall_time_ms: int = 0
    memory_mb: Optional[float] = None
    memory_increase_mb: Optional[float] = None


class ContinuationResult(BaseModel):
    reports: List[SolverReport]
    potential: PotentialField

    @property
    def final(self) -> SolverReport:
        return self.reports[-1]

    class Config:
        arbitrary_types_allowed = True
