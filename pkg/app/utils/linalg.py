"""
Batched pointwise linear algebra for Hermitian pencils.

Every function accepts arrays of shape (..., n, n) or (..., n) so the same
kernels serve single pencils and whole torus grids.
"""

import math
from typing import Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import (NotHermitian, NotPositiveDefinite,
                                 UndefinedCotangent)


def conj_transpose(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_defect(m: np.ndarray) -> np.ndarray:
    """max |m - m*| over the last two axes."""
    return np.max(np.abs(m - conj_transpose(m)), axis=(-2, -1))


def check_pencil(
    chi: np.ndarray,
    omega: np.ndarray,
    symmetry_tol: Optional[float] = None,
    positivity_tol: Optional[float] = None,
) -> None:
    """Raise unless both matrices are Hermitian and chi is positive definite."""
    symmetry_tol = settings.SYMMETRY_TOL if symmetry_tol is None else symmetry_tol
    for name, m in (("chi", chi), ("omega", omega)):
        defect = float(np.max(hermitian_defect(m)))
        if defect > symmetry_tol:
            raise NotHermitian(f"{name} is not Hermitian (defect {defect:.3e})")
    cholesky_factor(chi, positivity_tol)


def cholesky_factor(
    chi: np.ndarray, positivity_tol: Optional[float] = None
) -> np.ndarray:
    """Lower Cholesky factor L with chi = L L*, rejecting near-degenerate metrics."""
    positivity_tol = (
        settings.POSITIVITY_TOL if positivity_tol is None else positivity_tol
    )
    try:
        L = np.linalg.cholesky(chi)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(f"chi is not positive definite: {e}")

    pivots = np.abs(np.diagonal(L, axis1=-2, axis2=-1)) ** 2
    scale = np.max(np.abs(chi), axis=(-2, -1))
    if np.any(np.min(pivots, axis=-1) <= positivity_tol * scale):
        raise NotPositiveDefinite(
            f"smallest Cholesky pivot below {positivity_tol:g} * |chi|"
        )
    return L


def reduce_pencil(chi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """A = L^-1 omega L^-*, the matrix of chi^-1 . omega in a chi-unitary frame."""
    L = cholesky_factor(chi)
    X = np.linalg.solve(L, omega)
    A = conj_transpose(np.linalg.solve(L, conj_transpose(X)))
    return 0.5 * (A + conj_transpose(A))


def relative_eigenvalues(chi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Generalised eigenvalues of (omega, chi), sorted descending on the last axis."""
    A = reduce_pencil(chi, omega)
    return np.linalg.eigvalsh(A)[..., ::-1]


def arccot(x):
    # pi/2 - arctan keeps every term in (0, pi)
    return 0.5 * np.pi - np.arctan(x)


def lagrangian_angle(values: np.ndarray) -> np.ndarray:
    return np.sum(arccot(np.asarray(values, dtype=float)), axis=-1)


def argdet_angle(values: np.ndarray) -> np.ndarray:
    """Accumulated argument of prod(lambda_j + i), one principal argument per factor."""
    values = np.asarray(values, dtype=float)
    theta = np.zeros(values.shape[:-1])
    for j in range(values.shape[-1]):
        theta = theta + np.angle(values[..., j] + 1j)
    return theta


def shifted_product(values: np.ndarray, shift=0.0) -> np.ndarray:
    """prod_j (lambda_j + shift + i)."""
    values = np.asarray(values, dtype=float)
    return np.prod(values + shift + 1j, axis=-1)


def checked_cot(theta, tol: Optional[float] = None):
    """cot(theta) for a scalar or an array of angles, all inside (tol, pi - tol)."""
    tol = settings.ANGLE_TOL if tol is None else tol
    t = np.asarray(theta, dtype=float)
    inside = (t > tol) & (t < math.pi - tol)
    if not np.all(inside):
        bad = float(t[~inside].flat[0]) if t.ndim else float(t)
        raise UndefinedCotangent(f"cot is undefined or unbounded at theta={bad!r}")
    if t.ndim == 0:
        return math.cos(float(t)) / math.sin(float(t))
    return np.cos(t) / np.sin(t)


def volume_density(mu: np.ndarray, theta: float) -> np.ndarray:
    """(Re P - cot(theta) Im P) / |P| with P = prod(mu_i + i)."""
    cot = checked_cot(theta)
    P = shifted_product(mu)
    return (P.real - cot * P.imag) / np.abs(P)


def volume_density_cot_form(mu: np.ndarray, theta: float) -> np.ndarray:
    """(cot(s) - cot(theta)) sin(s) with s = sum arccot(mu_i)."""
    cot = checked_cot(theta)
    s = lagrangian_angle(mu)
    return np.cos(s) - cot * np.sin(s)


def eta_metric(chi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """eta = chi + omega chi^-1 omega."""
    eta = chi + omega @ np.linalg.solve(chi, omega)
    return 0.5 * (eta + conj_transpose(eta))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(
    rng: np.random.Generator, n: int, scale: float = 1.0
) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (z + conj_transpose(z))


def random_metric(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """A random positive definite chi together with an invertible S for congruences."""
    S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    S = S + n * np.eye(n)
    chi = conj_transpose(S) @ S
    return 0.5 * (chi + conj_transpose(chi)), S
