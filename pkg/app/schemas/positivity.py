import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, computed_field, model_validator

from app.schemas.cohomology import IntersectionProfile


class SubvarietyData(BaseModel):
    """Restricted numbers J[q] = int_V omega^q chi^(p-q) of one subvariety V."""

    name: str
    p: int = Field(..., ge=1)
    J: List[float]

    @model_validator(mode="after")
    def check_numbers(self):
        if len(self.J) != self.p + 1:
            raise ValueError(
                f"subvariety {self.name!r}: expected {self.p + 1} numbers, got {len(self.J)}"
            )
        if any(not math.isfinite(x) for x in self.J):
            raise ValueError(f"subvariety {self.name!r}: numbers must be finite")
        if not self.J[0] > 0:
            raise ValueError(f"subvariety {self.name!r}: J[0] = int_V chi^p must be positive")
        return self

    @classmethod
    def whole_space(cls, profile: IntersectionProfile) -> "SubvarietyData":
        return cls(name="X", p=profile.n, J=list(profile.I))

    class Config:
        frozen = True


class Tristate(str, Enum):
    YES = "yes"
    NO = "no"
    UNDECIDABLE = "undecidable"


class MembershipVerdict(BaseModel):
    in_p: bool
    margins: Dict[str, float] = Field(default_factory=dict)
    min_margin: Optional[float] = None
    in_k: Tristate = Tristate.UNDECIDABLE
    in_k_reason: str = ""
    in_k1: Tristate = Tristate.UNDECIDABLE
    in_k1_reason: str = ""
    arg: float
    constant_angle: Optional[float] = None
    reasons: List[str] = Field(default_factory=list)
    n: Optional[int] = None
    A: Optional[float] = None

    @model_validator(mode="after")
    def check_easy_direction(self):
        if self.in_k == Tristate.YES and not self.in_p:
            raise ValueError("a class with a solution must satisfy the positivity conditions")
        return self

    @computed_field
    @property
    def counterexample(self) -> bool:
        return self.in_p and self.in_k == Tristate.NO


class FamilyCurve(BaseModel):
    """Sampled h_V(t) = int_V Vol^p(omega + t chi, theta) for one subvariety."""

    name: str
    p: int
    minimum: float
    required_strict: bool
    passes: bool


class FamilyPositivityReport(BaseModel):
    theta: Optional[float] = None
    t_max: float
    curves: List[FamilyCurve] = Field(default_factory=list)
    passes: bool
    reason: str = ""
