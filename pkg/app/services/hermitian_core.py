import logging
import math
from typing import Iterable

import numpy as np

from app.core.config import settings
from app.core.exceptions import BadIndexSet, NotSupercritical, SizeMismatch
from app.schemas.hermitian import (AngleValue, HermitianPencil,
                                   RestrictedAngleBound, Spectrum)
from app.utils import linalg

logger = logging.getLogger(__name__)


class HermitianCoreService:
    """Pointwise angle algebra on Hermitian pencils."""

    def relative_spectrum(self, pencil: HermitianPencil) -> Spectrum:
        values = linalg.relative_eigenvalues(pencil.chi, pencil.omega)
        return Spectrum(values=[float(x) for x in values])

    def relative_spectra_batch(
        self, chi: np.ndarray, omega: np.ndarray, checked: bool = True
    ) -> np.ndarray:
        """Relative spectra of stacked pencils, shape (..., n), descending on the last axis."""
        if checked:
            linalg.check_pencil(chi, omega)
        return linalg.relative_eigenvalues(chi, omega)

    def lagrangian_angle(self, spec: Spectrum) -> AngleValue:
        theta = float(linalg.lagrangian_angle(spec.as_array()))
        return AngleValue(theta=theta, n=spec.n)

    def angle_via_argdet(self, spec: Spectrum) -> AngleValue:
        theta = float(linalg.argdet_angle(spec.as_array()))
        return AngleValue(theta=theta, n=spec.n)

    def principal_restriction(
        self, pencil: HermitianPencil, index_set: Iterable[int]
    ) -> HermitianPencil:
        """
        Restrict to the coordinates in index_set (1-based) after reducing chi to I.

        Args:
            pencil: Full n-dimensional pencil
            index_set: p distinct indices from {1..n}

        Returns:
            The p-dimensional pencil (I_p, B) with B a principal submatrix of A
        """
        indices = list(index_set)
        n = pencil.n
        if not indices:
            raise BadIndexSet("index set must not be empty")
        if len(set(indices)) != len(indices):
            raise BadIndexSet(f"index set {indices} has repeated entries")
        if any(not isinstance(i, (int, np.integer)) or not 1 <= i <= n for i in indices):
            raise BadIndexSet(f"index set {indices} is not a subset of 1..{n}")

        A = linalg.reduce_pencil(pencil.chi, pencil.omega)
        idx = np.array(sorted(indices)) - 1
        B = A[np.ix_(idx, idx)]
        return HermitianPencil(chi=np.eye(len(idx), dtype=complex), omega=B)

    def interlace_check(self, full: Spectrum, restricted: Spectrum) -> bool:
        n, p = full.n, restricted.n
        if p > n:
            raise SizeMismatch(f"restricted size {p} exceeds full size {n}")
        lam = full.as_array()
        mu = restricted.as_array()
        tol = 1e-12 * (1.0 + float(np.max(np.abs(lam)))) if n else 0.0
        upper = np.all(lam[:p] + tol >= mu)
        lower = np.all(mu >= lam[n - p:] - tol)
        return bool(upper and lower)

    def volume_density(self, restricted: Spectrum, theta: AngleValue) -> float:
        density = float(linalg.volume_density(restricted.as_array(), theta.theta))
        cross = float(linalg.volume_density_cot_form(restricted.as_array(), theta.theta))
        if not math.isclose(density, cross, rel_tol=1e-8, abs_tol=1e-10):
            logger.warning(
                f"Volume density forms disagree: product={density!r} cot={cross!r}"
            )
        return density

    def density_monotone_scan(
        self, full: Spectrum, theta: AngleValue, t_max: float, samples: int
    ) -> bool:
        """
        Check that g(t) = Re P(t) - cot(theta) Im P(t), P(t) = prod(lambda_j + t + i),
        is non-decreasing on [0, t_max].
        """
        if not theta.supercritical:
            raise NotSupercritical(f"theta={theta.theta!r} is not in (0, pi)")
        if samples < 2:
            raise ValueError("samples must be at least 2")
        cot = linalg.checked_cot(theta.theta)
        t = np.linspace(0.0, t_max, samples)
        P = linalg.shifted_product(full.as_array()[None, :], t[:, None])
        g = P.real - cot * P.imag
        scale = max(1.0, float(np.max(np.abs(g))))
        return bool(np.all(np.diff(g) >= -1e-10 * scale))

    def restricted_angle_bound(
        self, full: Spectrum, restricted: Spectrum
    ) -> RestrictedAngleBound:
        n, p = full.n, restricted.n
        if p > n:
            raise SizeMismatch(f"restricted size {p} exceeds full size {n}")
        lam = full.as_array()
        restricted_sum = float(linalg.lagrangian_angle(restricted.as_array()))
        tail_sum = float(linalg.lagrangian_angle(lam[n - p:]))
        full_sum = float(linalg.lagrangian_angle(lam))
        tol = settings.ANGLE_TOL
        holds = 0.0 < restricted_sum <= tail_sum + tol and (
            tail_sum < full_sum or p == n
        )
        return RestrictedAngleBound(
            restricted_sum=restricted_sum,
            tail_sum=tail_sum,
            full_sum=full_sum,
            chain_holds=bool(holds),
        )
