import math
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class IntersectionProfile(BaseModel):
    """I[k] = int_X omega^k chi^(n-k), k = 0..n."""

    n: int = Field(..., ge=1)
    I: List[float]

    @model_validator(mode="after")
    def check_profile(self):
        if len(self.I) != self.n + 1:
            raise ValueError(f"expected {self.n + 1} intersection numbers, got {len(self.I)}")
        if any(not math.isfinite(x) for x in self.I):
            raise ValueError("intersection numbers must be finite")
        if not self.I[0] > 0:
            raise ValueError("I[0] = int chi^n must be positive")
        return self

    class Config:
        frozen = True


class GammaPolynomial(BaseModel):
    """gamma(t) = sum_k c_k t^k, split into real and imaginary coefficient lists."""

    n: int
    real: List[float]
    imag: List[float]

    def coefficients(self) -> np.ndarray:
        return np.asarray(self.real) + 1j * np.asarray(self.imag)


class AngleBranch(BaseModel):
    """Sampled continuous lift of arg gamma(t) on [0, 1]."""

    n: int
    t_samples: List[float]
    theta_values: List[float]
    gamma_real: List[float]
    gamma_imag: List[float]
    min_modulus: float = Field(..., ge=0.0)
    theta_end: float
    refinements: int = 0


class MonotoneDirection(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    CONSTANT = "constant"


class ImMonotoneReport(BaseModel):
    im_at_0: float
    im_at_1: float
    monotone: bool
    direction: MonotoneDirection
    sign_definite: bool
