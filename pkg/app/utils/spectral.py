"""
Fourier-spectral calculus on the 2 pi-periodic grid of a flat complex torus.

Real axes are ordered (x1, y1, ..., xn, yn); complex coordinate j uses axes
2j and 2j + 1. Transforms go through scipy.fft with real-to-complex storage
on the last axis.
"""

from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import fft

from app.core.config import settings
from app.core.exceptions import SizeMismatch


class TorusGrid:
    def __init__(self, n: int, points: int, workers: Optional[int] = None):
        self.n = n
        self.points = points
        self.dim = 2 * n
        self.shape = (points,) * self.dim
        self.workers = workers if workers is not None else settings.DHYM_THREADS

        axes_k = []
        for axis in range(self.dim):
            if axis == self.dim - 1:
                k = fft.rfftfreq(points, d=1.0 / points)
            else:
                k = fft.fftfreq(points, d=1.0 / points)
            axes_k.append(k)
        self.wavenumbers = np.meshgrid(*axes_k, indexing="ij", sparse=True)

        nyquist = points // 2
        self._resolved = [np.abs(k) != nyquist for k in self.wavenumbers]
        self._symbols: Dict[Tuple[int, int], np.ndarray] = {}

    @property
    def coordinates(self) -> list:
        x = 2.0 * np.pi * np.arange(self.points) / self.points
        return np.meshgrid(*([x] * self.dim), indexing="ij", sparse=True)

    def forward(self, f: np.ndarray) -> np.ndarray:
        if np.shape(f) != self.shape:
            raise SizeMismatch(f"expected a grid field of shape {self.shape}, got {np.shape(f)}")
        return fft.rfftn(f, workers=self.workers)

    def inverse(self, f_hat: np.ndarray) -> np.ndarray:
        return fft.irfftn(f_hat, s=self.shape, workers=self.workers)

    def second_symbol(self, a: int, b: int) -> np.ndarray:
        """Symbol of d^2 / dx_a dx_b; mixed terms drop the unpaired Nyquist mode."""
        key = (min(a, b), max(a, b))
        if key not in self._symbols:
            ka, kb = self.wavenumbers[a], self.wavenumbers[b]
            symbol = -ka * kb
            if a != b:
                symbol = symbol * self._resolved[a] * self._resolved[b]
            self._symbols[key] = symbol
        return self._symbols[key]

    def second_derivatives(self, f: np.ndarray) -> Dict[Tuple[int, int], np.ndarray]:
        f_hat = self.forward(f)
        return {
            (a, b): self.inverse(self.second_symbol(a, b) * f_hat)
            for a in range(self.dim)
            for b in range(a, self.dim)
        }

    def complex_hessian(self, f: np.ndarray) -> np.ndarray:
        """
        H[..., j, k] = d_j d_kbar f
                     = 1/4 (f_{xj xk} + f_{yj yk}) + i/4 (f_{xj yk} - f_{yj xk}).
        """
        d = self.second_derivatives(f)

        def D(a, b):
            return d[(min(a, b), max(a, b))]

        H = np.empty(self.shape + (self.n, self.n), dtype=complex)
        for j in range(self.n):
            xj, yj = 2 * j, 2 * j + 1
            for k in range(self.n):
                xk, yk = 2 * k, 2 * k + 1
                H[..., j, k] = 0.25 * (D(xj, xk) + D(yj, yk)) + 0.25j * (
                    D(xj, yk) - D(yj, xk)
                )
        return H

    def squared_norm(self) -> np.ndarray:
        return sum(k * k for k in self.wavenumbers)

    def mean_free(self, f: np.ndarray) -> np.ndarray:
        return f - np.mean(f)

    def inverse_laplacian(self, f: np.ndarray, scale: float = 1.0) -> np.ndarray:
        """Solve scale * |k|^2 / 4 u_hat = f_hat on mean-zero functions."""
        f_hat = self.forward(f)
        symbol = 0.25 * scale * self.squared_norm()
        with np.errstate(divide="ignore", invalid="ignore"):
            u_hat = np.where(symbol > 0, f_hat / symbol, 0.0)
        return self.inverse(u_hat)

    def cosine_series(self, waves: Sequence[Sequence[int]], amplitudes: Sequence[float]) -> np.ndarray:
        """sum_m amplitude_m cos(m . x) sampled on the grid."""
        x = self.coordinates
        out = np.zeros(self.shape)
        for wave, amp in zip(waves, amplitudes):
            phase = sum(m * xa for m, xa in zip(wave, x))
            out = out + amp * np.cos(phase)
        return out

    def band_limited_noise(
        self, rng: np.random.Generator, kmax: int = 2
    ) -> np.ndarray:
        """Random mean-zero trigonometric polynomial with |k_a| <= kmax, sup-normalised."""
        low = np.ones(self.shape[:-1] + (self.points // 2 + 1,), dtype=bool)
        for k in self.wavenumbers:
            low = low & (np.abs(k) <= kmax)
        coeffs = rng.standard_normal(low.shape) + 1j * rng.standard_normal(low.shape)
        v = self.inverse(np.where(low, coeffs, 0.0))
        v = self.mean_free(v)
        sup = float(np.max(np.abs(v)))
        return v / sup if sup > 0 else v
