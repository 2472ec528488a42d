import logging
import math
from typing import List, Optional

import numpy as np
from numpy.polynomial import Polynomial

from app.core.config import settings
from app.core.exceptions import (DegenerateAngle, SizeMismatch,
                                 UndefinedCotangent)
from app.schemas.cohomology import IntersectionProfile
from app.schemas.positivity import (FamilyCurve, FamilyPositivityReport,
                                    MembershipVerdict, SubvarietyData,
                                    Tristate)
from app.services.cohomology import CohomologyService
from app.utils import linalg, polynomial

logger = logging.getLogger(__name__)

COMPLETENESS_NOTE = "subvariety list assumed complete"
MAXIMUM_PRINCIPLE_NOTE = (
    "by the maximum principle a constant angle Q(omega_phi) = c is only "
    "attainable for c = n arccot(A)"
)


class PositivityService:
    """Numerical positivity conditions and the homogeneous torus classification."""

    def __init__(self, cohomology: Optional[CohomologyService] = None):
        self.cohomology = cohomology or CohomologyService()

    def vol_integral(self, sub: SubvarietyData, theta: float) -> float:
        """int_V Re(omega + i chi)^p - cot(theta) Im(omega + i chi)^p."""
        cot = linalg.checked_cot(theta)
        S = complex(np.sum(polynomial.gamma_coefficients(sub.p, sub.J)))
        return S.real - cot * S.imag

    def p_membership(
        self, profile: IntersectionProfile, subs: List[SubvarietyData]
    ) -> MembershipVerdict:
        arg = self.cohomology.principal_arg(profile)
        reasons = [COMPLETENESS_NOTE]
        for sub in subs:
            if sub.p >= profile.n:
                raise SizeMismatch(
                    f"subvariety {sub.name!r} has p={sub.p}, need 0 < p < {profile.n}"
                )

        undecided = dict(
            in_k=Tristate.UNDECIDABLE,
            in_k_reason="no decision procedure outside the homogeneous torus family; "
            "use the torus solver for constructive evidence",
            in_k1=Tristate.UNDECIDABLE,
            in_k1_reason="classified only on the homogeneous torus family",
        )

        tol = settings.ANGLE_TOL
        if abs(arg) <= tol or abs(arg - math.pi) <= tol:
            reasons.append(f"{DegenerateAngle.__name__}: Arg = {arg!r} is an endpoint of (0, pi)")
            return MembershipVerdict(in_p=False, arg=arg, reasons=reasons, **undecided)
        if not 0.0 < arg < math.pi:
            reasons.append(f"Arg = {arg!r} is outside (0, pi)")
            return MembershipVerdict(in_p=False, arg=arg, reasons=reasons, **undecided)

        margins = {sub.name: self.vol_integral(sub, arg) for sub in subs}
        min_margin = min(margins.values()) if margins else None
        in_p = all(m > 0 for m in margins.values())
        for name, m in margins.items():
            if m <= 0:
                reasons.append(f"int_{name} Vol = {m!r} is not positive")

        return MembershipVerdict(
            in_p=in_p,
            margins=margins,
            min_margin=min_margin,
            arg=arg,
            reasons=reasons,
            **undecided,
        )

    def family_curve(self, sub: SubvarietyData, theta: float) -> Polynomial:
        """h_V(t) = int_V Vol^p(omega + t chi, theta) as a real polynomial in t."""
        cot = linalg.checked_cot(theta)
        c = polynomial.shifted_gamma_coefficients(sub.p, sub.J)
        return Polynomial(c.real - cot * c.imag)

    def family_monotone_check(
        self, sub: SubvarietyData, theta: float, t_max: float
    ) -> bool:
        h = self.family_curve(sub, theta)
        slope = h.deriv()
        t = np.linspace(0.0, t_max, settings.MONOTONE_SAMPLES)
        values = slope(t)
        scale = max(1.0, float(np.max(np.abs(h.coef))))
        return bool(np.all(values >= -1e-10 * scale))

    def test_family_positivity(
        self,
        profile: IntersectionProfile,
        subs: List[SubvarietyData],
        t_max: float,
    ) -> FamilyPositivityReport:
        """
        Sample int_V Vol^p(alpha + t chi, Arg(alpha)) on [0, t_max]: strictly positive
        for every proper V and non-negative for V = X.
        """
        theta = self.cohomology.principal_arg(profile)
        try:
            linalg.checked_cot(theta)
        except UndefinedCotangent:
            return FamilyPositivityReport(
                theta=theta,
                t_max=t_max,
                passes=False,
                reason=f"Arg = {theta!r} is not inside (0, pi)",
            )

        t = np.linspace(0.0, t_max, settings.MONOTONE_SAMPLES)
        curves = []
        for sub in list(subs) + [SubvarietyData.whole_space(profile)]:
            h = self.family_curve(sub, theta)
            values = h(t)
            minimum = float(np.min(values))
            strict = sub.p < profile.n
            tol = 1e-10 * max(1.0, float(np.max(np.abs(h.coef))))
            passes = minimum > 0 if strict else minimum >= -tol
            curves.append(
                FamilyCurve(
                    name=sub.name,
                    p=sub.p,
                    minimum=minimum,
                    required_strict=strict,
                    passes=bool(passes),
                )
            )
        return FamilyPositivityReport(
            theta=theta,
            t_max=t_max,
            curves=curves,
            passes=all(c.passes for c in curves),
        )

    def torus_family_classify(self, n: int, A: float) -> MembershipVerdict:
        """
        Classify omega = A chi on a torus without proper analytic subvarieties.

        The constant solution phi = 0 realises Q = n arccot(A); uniqueness of
        the attainable constant decides K, and P needs only Arg in (0, pi).
        """
        if n < 1:
            raise ValueError("n must be positive")
        if not math.isfinite(A):
            raise ValueError(f"A must be finite, got {A!r}")
        constant = n * float(linalg.arccot(A))
        # gamma(1) = (A + i)^n; dividing by s^n keeps every A^k finite
        s = max(1.0, abs(A))
        scaled = [(A / s) ** k * (1.0 / s) ** (n - k) for k in range(n + 1)]
        if scaled[0] > 0.0:
            arg = self.cohomology.principal_arg(IntersectionProfile(n=n, I=scaled))
        else:
            logger.debug(f"chi^n underflows for A={A!r}, n={n}; using Arg = n arccot(A) mod 2pi")
            arg = math.atan2(math.sin(constant), math.cos(constant))
            if arg <= -math.pi:
                arg += 2.0 * math.pi

        tol = settings.ANGLE_TOL
        reasons = ["a generic torus has no proper analytic subvarieties"]

        if tol < constant < math.pi - tol:
            in_k = Tristate.YES
            in_k_reason = (
                f"phi = 0 solves Q = n arccot(A) = {constant!r} in (0, pi); "
                + MAXIMUM_PRINCIPLE_NOTE
            )
        else:
            in_k = Tristate.NO
            in_k_reason = (
                f"n arccot(A) = {constant!r} is not in (0, pi); " + MAXIMUM_PRINCIPLE_NOTE
            )

        if tol < arg < math.pi - tol:
            in_p = True
        else:
            in_p = False
            reasons.append(f"Arg = {arg!r} (n arccot(A) mod 2pi) is not in (0, pi)")

        if in_p:
            in_k1 = Tristate.YES
            in_k1_reason = (
                "phi = 0 solves Q = n arccot(A), which equals Arg modulo 2pi"
            )
        else:
            in_k1 = Tristate.NO
            in_k1_reason = "Arg is not in (0, pi)"

        verdict = MembershipVerdict(
            in_p=in_p,
            in_k=in_k,
            in_k_reason=in_k_reason,
            in_k1=in_k1,
            in_k1_reason=in_k1_reason,
            arg=arg,
            constant_angle=constant,
            reasons=reasons,
            n=n,
            A=A,
        )
        if verdict.counterexample:
            logger.info(f"Torus class {A}*chi (n={n}) is in P but not in K")
        return verdict
