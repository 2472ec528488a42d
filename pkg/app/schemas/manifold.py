import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from app.core.config import settings
from app.core.exceptions import ManifoldFileError, WrongDimension
from app.schemas.cohomology import IntersectionProfile
from app.schemas.positivity import SubvarietyData
from app.schemas.torus import PsiMode, TorusModel


class SubvarietyEntry(BaseModel):
    name: str
    p: int = Field(..., ge=1)
    restricted: List[float]


class MatrixEntry(BaseModel):
    real: List[List[float]]
    imag: Optional[List[List[float]]] = None

    def as_dict(self) -> Dict[str, Any]:
        data = {"real": self.real}
        if self.imag is not None:
            data["imag"] = self.imag
        return data


class TorusEntry(BaseModel):
    grid: Optional[int] = None
    A: MatrixEntry
    psi_modes: List[PsiMode] = Field(default_factory=list)
    psi_amplitude: float = 0.0


class ManifoldFile(BaseModel):
    """Self-describing input shared by every command."""

    n: int = Field(..., ge=1)
    intersection: List[float]
    subvarieties: List[SubvarietyEntry] = Field(default_factory=list)
    torus: Optional[TorusEntry] = None

    @model_validator(mode="after")
    def check_lengths(self):
        if len(self.intersection) != self.n + 1:
            raise ValueError(
                f"intersection must hold n+1 = {self.n + 1} numbers, got {len(self.intersection)}"
            )
        if not self.intersection[0] > 0:
            raise ValueError("intersection[0] = int chi^n must be positive")
        for sub in self.subvarieties:
            if not sub.p < self.n:
                raise ValueError(f"subvariety {sub.name!r}: need 0 < p < n, got p={sub.p}")
            if len(sub.restricted) != sub.p + 1:
                raise ValueError(
                    f"subvariety {sub.name!r}: expected {sub.p + 1} restricted numbers"
                )
        return self

    def profile(self) -> IntersectionProfile:
        return IntersectionProfile(n=self.n, I=self.intersection)

    def subvariety_data(self) -> List[SubvarietyData]:
        return [
            SubvarietyData(name=s.name, p=s.p, J=s.restricted) for s in self.subvarieties
        ]

    def torus_model(self, grid: Optional[int] = None) -> TorusModel:
        if self.torus is None:
            raise ManifoldFileError("manifold file has no torus section")
        if self.n not in (1, 2):
            raise WrongDimension(f"the torus solver needs n = 1 or 2, got n = {self.n}")
        default_grid = settings.GRID_1D if self.n == 1 else settings.GRID_2D
        return TorusModel(
            n=self.n,
            grid=grid or self.torus.grid or default_grid,
            A=self.torus.A.as_dict(),
            psi_modes=self.torus.psi_modes,
            psi_amplitude=self.torus.psi_amplitude,
        )


def load_manifold(source: Union[str, Path]) -> ManifoldFile:
    """Read and validate a manifold file; every failure becomes ManifoldFileError."""
    path = Path(source)
    try:
        raw = json.loads(path.read_text())
    except OSError as e:
        raise ManifoldFileError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ManifoldFileError(f"{path} is not valid JSON: {e}")
    try:
        return ManifoldFile.model_validate(raw)
    except ValidationError as e:
        raise ManifoldFileError(f"{path} does not match the manifold schema: {e}")
