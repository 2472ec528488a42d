"""
Complex volume polynomials and their real zeros.

Coefficient arrays are ascending in t, as in numpy.polynomial.
"""

from math import comb
from typing import List, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P


def gamma_coefficients(n: int, numbers: Sequence[float]) -> np.ndarray:
    """Coefficients of sum_k binom(n,k) t^k i^(n-k) numbers[k]."""
    return np.array(
        [comb(n, k) * (1j ** (n - k)) * numbers[k] for k in range(n + 1)],
        dtype=complex,
    )


def shifted_gamma_coefficients(p: int, numbers: Sequence[float]) -> np.ndarray:
    """
    Coefficients in t of sum_q binom(p,q) i^(p-q) J_t[q], where
    J_t[q] = int_V (omega + t chi)^q chi^(p-q) = sum_r binom(q,r) t^(q-r) J[r].
    """
    total = np.zeros(p + 1, dtype=complex)
    for q in range(p + 1):
        shifted = np.zeros(q + 1)
        for r in range(q + 1):
            shifted[q - r] += comb(q, r) * numbers[r]
        total[: q + 1] += comb(p, q) * (1j ** (p - q)) * shifted
    return total


def coefficient_scale(coeffs: np.ndarray) -> float:
    return float(np.max(np.abs(coeffs))) if len(coeffs) else 0.0


def evaluate(coeffs: np.ndarray, t) -> np.ndarray:
    return P.polyval(np.asarray(t, dtype=float), coeffs)


def modulus_squared(coeffs: np.ndarray) -> Polynomial:
    """|gamma(t)|^2 for real t, a real polynomial of degree <= 2n."""
    re = Polynomial(coeffs.real)
    im = Polynomial(coeffs.imag)
    return (re * re + im * im).trim()


def _polish(t: float, f: Polynomial, df: Polynomial, iterations: int = 60) -> float:
    # Newton on the derivative of |gamma|^2: a double root there is a simple one here
    for _ in range(iterations):
        slope = df(t)
        if slope == 0.0:
            break
        step = f(t) / slope
        t = t - step
        if abs(step) <= 1e-16 * max(1.0, abs(t)):
            break
    return float(t)


def real_zeros(
    coeffs: np.ndarray,
    lo: float,
    hi: float,
    residual_tol: float,
    imag_tol: float = 1e-3,
) -> List[float]:
    """
    Real t in [lo, hi] where the complex polynomial vanishes.

    Candidates are the eigenvalues of the companion matrix of |gamma|^2; they
    are polished on d/dt |gamma|^2 and kept only if |gamma(t)| < residual_tol * scale.
    """
    scale = coefficient_scale(coeffs)
    mod2 = modulus_squared(coeffs)
    if mod2.degree() < 1:
        return []

    d1 = mod2.deriv()
    d2 = d1.deriv()
    margin = 1e-6 * max(1.0, abs(hi - lo))

    zeros: List[float] = []
    for z in mod2.roots():
        if abs(z.imag) > imag_tol * (1.0 + abs(z.real)):
            continue
        t = float(z.real)
        if not lo - margin <= t <= hi + margin:
            continue
        if d2.degree() >= 0 and d1.degree() >= 1:
            t = _polish(t, d1, d2)
        t = min(max(t, lo), hi)
        if abs(evaluate(coeffs, t)) < residual_tol * scale:
            zeros.append(t)

    zeros.sort()
    merged: List[float] = []
    for t in zeros:
        if merged and abs(t - merged[-1]) < 1e-7:
            continue
        merged.append(t)
    return merged


def wrap_angle(d: np.ndarray) -> np.ndarray:
    """Map angle differences to [-pi, pi)."""
    return (d + np.pi) % (2.0 * np.pi) - np.pi


def elementary_symmetric(values: Sequence[float]) -> np.ndarray:
    """e_0..e_n of the given values."""
    # np.poly gives prod(x - v) = sum (-1)^k e_k x^(n-k)
    c = np.real_if_close(np.poly(np.asarray(values)))
    signs = np.array([(-1) ** k for k in range(len(c))])
    return np.asarray(c * signs, dtype=float)
