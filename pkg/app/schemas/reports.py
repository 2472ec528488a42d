from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.core.exceptions import DegenerateAngle
from app.schemas.cohomology import ImMonotoneReport
from app.schemas.positivity import FamilyPositivityReport, MembershipVerdict
from app.schemas.torus import SolverReport


class AngleReport(BaseModel):
    n: int
    arg: float
    gamma_real: float
    gamma_imag: float
    supercritical: bool


class GammaTrackReport(BaseModel):
    n: int
    roots: List[float] = Field(default_factory=list)
    obstruction: bool = False
    theta_end: Optional[float] = None
    min_modulus: Optional[float] = None
    samples: int = 0
    refinements: int = 0
    scaling_threshold: Optional[float] = None
    chern_inequality: Optional[bool] = None
    im_monotone: Optional[ImMonotoneReport] = None
    warnings: List[str] = Field(default_factory=list)


class CjyReport(BaseModel):
    verdict: MembershipVerdict
    t_max: float
    monotone: Dict[str, bool] = Field(default_factory=dict)
    family: Optional[FamilyPositivityReport] = None

    @property
    def degenerate(self) -> bool:
        return any(r.startswith(DegenerateAngle.__name__) for r in self.verdict.reasons)


class TorusSolveReport(BaseModel):
    n: int
    grid: int
    steps: int
    theta_hat: float
    theta_source: str
    allow_lifted: bool = False
    reports: List[SolverReport]
    converged: bool
    achieved_constant: float
    angle_width: float
    potential_sup: float
    class_arg: Optional[float] = None


class CounterexampleReport(BaseModel):
    n: int
    rows: List[MembershipVerdict]
    counterexample_found: bool
