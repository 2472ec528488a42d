import logging
import math
from typing import List, Optional

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import RootOnPath, WrongDimension, ZeroVolume
from app.schemas.cohomology import (AngleBranch, GammaPolynomial,
                                    ImMonotoneReport, IntersectionProfile,
                                    MonotoneDirection)
from app.utils import polynomial

logger = logging.getLogger(__name__)

BRANCH_COLUMNS = ["t", "re", "im", "abs", "theta"]


class CohomologyService:
    """Class-level quantities built from an intersection profile."""

    def gamma_polynomial(self, profile: IntersectionProfile) -> GammaPolynomial:
        c = polynomial.gamma_coefficients(profile.n, profile.I)
        return GammaPolynomial(
            n=profile.n,
            real=[float(x) for x in c.real],
            imag=[float(x) for x in c.imag],
        )

    def gamma_at(self, profile: IntersectionProfile, t: float) -> complex:
        c = polynomial.gamma_coefficients(profile.n, profile.I)
        return complex(polynomial.evaluate(c, t))

    def principal_arg(self, profile: IntersectionProfile) -> float:
        """Principal argument of gamma(1) = int (omega + i chi)^n, in (-pi, pi]."""
        c = polynomial.gamma_coefficients(profile.n, profile.I)
        value = complex(polynomial.evaluate(c, 1.0))
        scale = polynomial.coefficient_scale(c)
        if abs(value) <= 1e-12 * scale:
            raise ZeroVolume(f"|gamma(1)| = {abs(value):.3e} vanishes")
        arg = math.atan2(value.imag, value.real)
        if arg <= -math.pi:
            arg += 2.0 * math.pi
        return arg

    def find_roots_on_interval(self, profile: IntersectionProfile) -> List[float]:
        c = polynomial.gamma_coefficients(profile.n, profile.I)
        return polynomial.real_zeros(c, 0.0, 1.0, settings.ROOT_RESIDUAL_TOL)

    def scaling_threshold(self, profile: IntersectionProfile) -> Optional[float]:
        """
        Smallest positive real zero t* of gamma.

        gamma(s[omega], t) = gamma([omega], s t), so every class s[omega] with
        s >= t* has gamma vanishing somewhere on [0, 1].
        """
        c = polynomial.gamma_coefficients(profile.n, profile.I)
        # all real zeros lie within the Cauchy bound of |gamma|^2
        mod2 = polynomial.modulus_squared(c)
        lead = abs(mod2.coef[-1])
        bound = 1.0 + float(np.max(np.abs(mod2.coef[:-1]))) / lead if lead else 1.0
        zeros = polynomial.real_zeros(c, 0.0, bound, settings.ROOT_RESIDUAL_TOL)
        positive = [t for t in zeros if t > 0.0]
        return positive[0] if positive else None

    def lift_branch(
        self, profile: IntersectionProfile, samples: Optional[int] = None
    ) -> AngleBranch:
        """
        Continuous lift Theta(t) of arg gamma(t) on [0, 1] with Theta(0) = n*pi/2.

        The grid is bisected wherever a raw argument step exceeds the step
        limit, so no branch jump can hide between samples.
        """
        samples = samples or settings.DEFAULT_BRANCH_SAMPLES
        if samples < 2:
            raise ValueError("samples must be at least 2")

        roots = self.find_roots_on_interval(profile)
        if roots:
            raise RootOnPath(roots[0])

        c = polynomial.gamma_coefficients(profile.n, profile.I)
        scale = polynomial.coefficient_scale(c)
        t = np.linspace(0.0, 1.0, samples)
        g = polynomial.evaluate(c, t)

        refinements = 0
        for _ in range(settings.BRANCH_MAX_REFINEMENTS):
            steps = polynomial.wrap_angle(np.diff(np.angle(g)))
            wide = np.abs(steps) > settings.BRANCH_STEP_LIMIT
            if not np.any(wide):
                break
            mids = 0.5 * (t[:-1][wide] + t[1:][wide])
            t = np.sort(np.concatenate([t, mids]))
            g = polynomial.evaluate(c, t)
            refinements += 1
        else:
            logger.warning("Branch refinement limit reached; lift may be unreliable")

        modulus = np.abs(g)
        k = int(np.argmin(modulus))
        if modulus[k] < settings.ROOT_RESIDUAL_TOL * scale:
            raise RootOnPath(float(t[k]))

        steps = polynomial.wrap_angle(np.diff(np.angle(g)))
        theta = profile.n * math.pi / 2.0 + np.concatenate([[0.0], np.cumsum(steps)])

        return AngleBranch(
            n=profile.n,
            t_samples=t.tolist(),
            theta_values=theta.tolist(),
            gamma_real=g.real.tolist(),
            gamma_imag=g.imag.tolist(),
            min_modulus=float(modulus[k]),
            theta_end=float(theta[-1]),
            refinements=refinements,
        )

    def branch_rows(self, branch: AngleBranch) -> pd.DataFrame:
        re = np.asarray(branch.gamma_real)
        im = np.asarray(branch.gamma_imag)
        return pd.DataFrame(
            {
                "t": branch.t_samples,
                "re": re,
                "im": im,
                "abs": np.hypot(re, im),
                "theta": branch.theta_values,
            },
            columns=BRANCH_COLUMNS,
        )

    def chern_inequality_3d(self, profile: IntersectionProfile) -> bool:
        """int omega^3 . int chi^3 < 9 int omega^2 chi . int omega chi^2."""
        self._require_threefold(profile)
        I = profile.I
        return bool(I[3] * I[0] < 9.0 * I[2] * I[1])

    def im_monotone_check_3d(self, profile: IntersectionProfile) -> ImMonotoneReport:
        # Im gamma(t) = 3 t^2 I[2] - I[0]
        self._require_threefold(profile)
        I = profile.I
        im_at_0 = -I[0]
        im_at_1 = 3.0 * I[2] - I[0]
        if I[2] > 0:
            direction = MonotoneDirection.INCREASING
        elif I[2] < 0:
            direction = MonotoneDirection.DECREASING
        else:
            direction = MonotoneDirection.CONSTANT
        tol = 1e-12 * max(abs(I[0]), abs(I[2]))
        return ImMonotoneReport(
            im_at_0=im_at_0,
            im_at_1=im_at_1,
            monotone=True,
            direction=direction,
            sign_definite=bool(im_at_1 <= tol),
        )

    def profile_from_constant_form(
        self, A: np.ndarray, volume: float = 1.0
    ) -> IntersectionProfile:
        """
        Profile of a constant Hermitian form A on a flat torus.

        int (t A + i I)^n = volume * prod(t lambda_j + i), hence
        I[k] = volume * e_k(lambda) / binom(n, k).
        """
        A = np.asarray(A, dtype=complex)
        n = A.shape[0]
        lam = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
        e = polynomial.elementary_symmetric(lam)
        numbers = [volume * float(e[k]) / math.comb(n, k) for k in range(n + 1)]
        return IntersectionProfile(n=n, I=numbers)

    def negate_profile(self, profile: IntersectionProfile) -> IntersectionProfile:
        return IntersectionProfile(
            n=profile.n, I=[(-1) ** k * x for k, x in enumerate(profile.I)]
        )

    def _require_threefold(self, profile: IntersectionProfile) -> None:
        if profile.n != 3:
            raise WrongDimension(f"this check needs n = 3, got n = {profile.n}")
