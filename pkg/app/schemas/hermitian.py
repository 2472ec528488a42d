import math
from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, field_validator, model_validator

from app.utils import linalg


def as_complex_matrix(v: Any) -> np.ndarray:
    """Accept ndarrays, nested lists or {"real": ..., "imag": ...} records."""
    if isinstance(v, dict):
        real = np.asarray(v.get("real", 0.0), dtype=float)
        imag = np.asarray(v.get("imag", np.zeros_like(real)), dtype=float)
        v = real + 1j * imag
    m = np.array(v, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


class HermitianPencil(BaseModel):
    """A pair (chi, omega) of Hermitian matrices at one point, chi positive definite."""

    chi: np.ndarray
    omega: np.ndarray

    @field_validator("chi", "omega", mode="before")
    def coerce_matrix(cls, v):
        return as_complex_matrix(v)

    @model_validator(mode="after")
    def check_invariants(self):
        if self.chi.shape != self.omega.shape:
            raise ValueError(
                f"chi {self.chi.shape} and omega {self.omega.shape} differ in size"
            )
        linalg.check_pencil(self.chi, self.omega)
        return self

    @property
    def n(self) -> int:
        return self.chi.shape[0]

    @classmethod
    def flat(cls, omega: Any) -> "HermitianPencil":
        omega = as_complex_matrix(omega)
        return cls(chi=np.eye(omega.shape[0], dtype=complex), omega=omega)

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class Spectrum(BaseModel):
    """Relative eigenvalues, sorted descending."""

    values: List[float]

    @field_validator("values")
    def check_sorted(cls, v):
        if any(not math.isfinite(x) for x in v):
            raise ValueError("spectrum entries must be finite")
        if any(v[j] < v[j + 1] for j in range(len(v) - 1)):
            raise ValueError("spectrum must be sorted descending")
        return v

    @classmethod
    def from_unsorted(cls, values) -> "Spectrum":
        # stable sort keeps the input order of ties
        ordered = sorted((float(x) for x in values), reverse=True)
        return cls(values=ordered)

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    class Config:
        frozen = True


class AngleValue(BaseModel):
    """A value of the Lagrangian angle operator, in (0, n*pi) radians."""

    theta: float
    n: int
    supercritical: bool = False

    @model_validator(mode="before")
    def derive_supercritical(cls, data):
        if isinstance(data, dict) and "theta" in data:
            data = dict(data)
            data["supercritical"] = 0.0 < float(data["theta"]) < math.pi
        return data

    @model_validator(mode="after")
    def check_range(self):
        # huge |lambda| rounds a term of the sum onto 0 or pi
        if not 0.0 <= self.theta <= self.n * math.pi:
            raise ValueError(f"theta={self.theta!r} outside [0, {self.n}*pi]")
        return self

    @classmethod
    def of(cls, theta: float, n: Optional[int] = None) -> "AngleValue":
        """Wrap a bare constant; without n the smallest admissible dimension is used."""
        return cls(theta=theta, n=n or max(1, math.floor(theta / math.pi) + 1))

    class Config:
        frozen = True


class RestrictedAngleBound(BaseModel):
    """The chain 0 < sum_mu <= tail_sum < full_sum used for proper restrictions."""

    restricted_sum: float
    tail_sum: float
    full_sum: float
    chain_holds: bool
