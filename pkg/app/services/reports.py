import logging
import math
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from app.core.config import settings
from app.core.exceptions import RootOnPath
from app.schemas.cohomology import AngleBranch
from app.schemas.manifold import ManifoldFile
from app.schemas.reports import (AngleReport, CjyReport,
                                 CounterexampleReport, GammaTrackReport,
                                 TorusSolveReport)
from app.schemas.torus import ContinuationResult, SolverConfig
from app.services.cohomology import CohomologyService
from app.services.positivity import PositivityService
from app.services.torus_solver import TorusSolverService

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["iter", "residual", "alpha"]


class ReportService:
    """Builds the command reports shared by the CLI and the HTTP routes."""

    def __init__(
        self,
        cohomology: Optional[CohomologyService] = None,
        positivity: Optional[PositivityService] = None,
        solver: Optional[TorusSolverService] = None,
    ):
        self.cohomology = cohomology or CohomologyService()
        self.positivity = positivity or PositivityService(self.cohomology)
        self.solver = solver or TorusSolverService(self.cohomology)

    def angle(self, manifold: ManifoldFile) -> AngleReport:
        profile = manifold.profile()
        arg = self.cohomology.principal_arg(profile)
        value = self.cohomology.gamma_at(profile, 1.0)
        tol = settings.ANGLE_TOL
        return AngleReport(
            n=profile.n,
            arg=arg,
            gamma_real=value.real,
            gamma_imag=value.imag,
            supercritical=bool(tol < arg < math.pi - tol),
        )

    def gamma_track(
        self, manifold: ManifoldFile, samples: Optional[int] = None
    ) -> Tuple[GammaTrackReport, Optional[AngleBranch]]:
        profile = manifold.profile()
        report = GammaTrackReport(
            n=profile.n,
            scaling_threshold=self.cohomology.scaling_threshold(profile),
        )
        if profile.n == 3:
            report.chern_inequality = self.cohomology.chern_inequality_3d(profile)
            report.im_monotone = self.cohomology.im_monotone_check_3d(profile)

        roots = self.cohomology.find_roots_on_interval(profile)
        branch = None
        if not roots:
            try:
                branch = self.cohomology.lift_branch(profile, samples)
            except RootOnPath as e:
                roots = [e.t]

        if roots:
            report.roots = roots
            report.obstruction = (
                profile.n == 3 or settings.ROOT_ON_PATH_POLICY == "obstruction"
            )
            message = f"gamma vanishes on [0, 1] at t = {roots}"
            if report.obstruction:
                logger.warning(f"Obstruction: {message}")
            else:
                report.warnings.append(message)
            return report, None

        report.theta_end = branch.theta_end
        report.min_modulus = branch.min_modulus
        report.samples = len(branch.t_samples)
        report.refinements = branch.refinements
        return report, branch

    def branch_frame(self, branch: AngleBranch) -> pd.DataFrame:
        return self.cohomology.branch_rows(branch)

    def cjy_check(self, manifold: ManifoldFile, t_max: float) -> CjyReport:
        profile = manifold.profile()
        subs = manifold.subvariety_data()
        verdict = self.positivity.p_membership(profile, subs)

        report = CjyReport(verdict=verdict, t_max=t_max)
        tol = settings.ANGLE_TOL
        if tol < verdict.arg < math.pi - tol:
            report.monotone = {
                sub.name: self.positivity.family_monotone_check(sub, verdict.arg, t_max)
                for sub in subs
            }
            report.family = self.positivity.test_family_positivity(profile, subs, t_max)
        return report

    def solve_torus(
        self,
        manifold: ManifoldFile,
        theta: Optional[float] = None,
        grid: Optional[int] = None,
        steps: int = 1,
        allow_lifted: bool = False,
    ) -> Tuple[TorusSolveReport, ContinuationResult]:
        model = manifold.torus_model(grid)
        theta_hat = model.theta_auto if theta is None else theta
        config = SolverConfig(allow_lifted=allow_lifted)
        logger.info(
            f"Solving torus model n={model.n}, grid={model.grid}, theta_hat={theta_hat!r}"
        )
        result = self.solver.continuation(model, theta_hat, steps, config)
        final = result.final
        return (
            TorusSolveReport(
                n=model.n,
                grid=model.grid,
                steps=steps,
                theta_hat=theta_hat,
                theta_source="auto" if theta is None else "given",
                allow_lifted=allow_lifted,
                reports=result.reports,
                converged=all(r.converged for r in result.reports),
                achieved_constant=0.5 * (final.angle_min + final.angle_max),
                angle_width=final.angle_max - final.angle_min,
                potential_sup=result.potential.sup,
                class_arg=final.class_arg,
            ),
            result,
        )

    def history_frame(self, result: ContinuationResult) -> pd.DataFrame:
        rows = [row.model_dump() for r in result.reports for row in r.history]
        return pd.DataFrame(rows, columns=HISTORY_COLUMNS)

    def counterexample(self, n: int, A_values: List[float]) -> CounterexampleReport:
        rows = [self.positivity.torus_family_classify(n, float(A)) for A in A_values]
        return CounterexampleReport(
            n=n,
            rows=rows,
            counterexample_found=any(r.counterexample for r in rows),
        )

    def sweep_values(self, start: float, stop: float, count: int) -> List[float]:
        if count < 1:
            raise ValueError("sweep count must be positive")
        return [float(a) for a in np.linspace(start, stop, count)]
