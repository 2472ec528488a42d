import logging
import math
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from app.core.config import settings
from app.core.exceptions import (AngleRangeViolation, ContinuationStalled,
                                 MetricDegenerate, NotConverged,
                                 NotSupercritical, SizeMismatch)
from app.schemas.hermitian import HermitianPencil
from app.schemas.torus import (ContinuationResult, PencilField,
                               PotentialField, ResidualRow, SolverConfig,
                               SolverReport, TorusModel)
from app.services.cohomology import CohomologyService
from app.services.hermitian_core import HermitianCoreService
from app.utils import linalg
from app.utils.spectral import TorusGrid
from app.utils.stats_manager import measure_resources

logger = logging.getLogger(__name__)

FieldLike = Union[PotentialField, np.ndarray]


def _values(phi: FieldLike) -> np.ndarray:
    if isinstance(phi, PotentialField):
        return phi.values
    return np.asarray(phi, dtype=float)


def _trace_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """tr(a b) over the last two axes."""
    return np.einsum("...jk,...kj->...", a, b)


class TorusSolverService:
    """
    Spectral damped-Newton solver for Q(omega_phi) = theta_hat on flat tori.

    Grids are cached per (n, points) so repeated solves on one model reuse
    their Fourier symbols.
    """

    def __init__(
        self,
        cohomology: Optional[CohomologyService] = None,
        hermitian: Optional[HermitianCoreService] = None,
    ):
        self.cohomology = cohomology or CohomologyService()
        self.hermitian = hermitian or HermitianCoreService()
        self._grids: Dict[Tuple[int, int], TorusGrid] = {}

    def grid_for(self, model: TorusModel) -> TorusGrid:
        key = (model.n, model.grid)
        if key not in self._grids:
            self._grids[key] = TorusGrid(model.n, model.grid)
        return self._grids[key]

    # Fields

    def chi_field(self, model: TorusModel) -> np.ndarray:
        """chi(x) = I + s * Hess(psi), checked positive definite at every grid point."""
        grid = self.grid_for(model)
        n = model.n
        chi = np.broadcast_to(np.eye(n, dtype=complex), grid.shape + (n, n)).copy()
        if model.psi_amplitude == 0.0 or not model.psi_modes:
            return chi

        psi = grid.cosine_series(
            [m.wave for m in model.psi_modes],
            [m.amplitude for m in model.psi_modes],
        )
        chi = chi + model.psi_amplitude * grid.complex_hessian(psi)

        lowest = np.linalg.eigvalsh(chi)[..., 0]
        k = int(np.argmin(lowest))
        if lowest.flat[k] <= settings.POSITIVITY_TOL:
            point = tuple(int(i) for i in np.unravel_index(k, grid.shape))
            raise MetricDegenerate(
                f"deformed chi loses positivity at grid point {point} "
                f"(smallest eigenvalue {lowest.flat[k]:.3e})",
                point=point,
            )
        return chi

    def omega_field(self, model: TorusModel, phi: FieldLike) -> PencilField:
        chi = self.chi_field(model)
        return PencilField(chi=chi, omega=self._omega(model, phi))

    def q_field(self, model: TorusModel, phi: FieldLike) -> np.ndarray:
        return self._q(self.chi_field(model), self._omega(model, phi))

    def eta_metric(self, pencil: HermitianPencil) -> np.ndarray:
        return linalg.eta_metric(pencil.chi, pencil.omega)

    def eta_field(self, pencils: PencilField) -> np.ndarray:
        return linalg.eta_metric(pencils.chi, pencils.omega)

    def linearized_apply(
        self, model: TorusModel, phi: FieldLike, v: FieldLike
    ) -> np.ndarray:
        """DQ(v) = -eta^{j kbar} v_{j kbar} with eta = chi + omega chi^-1 omega."""
        pencils = self.omega_field(model, phi)
        return self._linearized(pencils.chi, pencils.omega, _values(v), model)

    def sine_form_apply(
        self, model: TorusModel, phi: FieldLike, theta_hat: float, v: FieldLike
    ) -> np.ndarray:
        """Derivative of Im(e^{-i theta_hat} det(omega_phi + i chi)) along v."""
        pencils = self.omega_field(model, phi)
        C, _ = self._sine_coefficients(pencils.chi, pencils.omega, theta_hat)
        H = self.grid_for(model).complex_hessian(_values(v))
        return np.imag(_trace_product(C, H))

    # Newton

    def newton_solve(
        self,
        model: TorusModel,
        theta_hat: float,
        phi0: Optional[PotentialField] = None,
        config: Optional[SolverConfig] = None,
    ) -> Tuple[SolverReport, PotentialField]:
        config = config or SolverConfig()
        self._check_target(model, theta_hat, config)

        grid = self.grid_for(model)
        phi = np.zeros(grid.shape) if phi0 is None else phi0.values.copy()
        if phi.shape != grid.shape:
            raise SizeMismatch(f"phi0 has shape {phi.shape}, grid is {grid.shape}")

        chi = self.chi_field(model)
        history = []
        failure = None
        iterations = 0

        with measure_resources() as stats:
            q = self._q(chi, self._omega(model, phi))
            residual = float(np.max(np.abs(q - theta_hat)))
            history.append(ResidualRow(iter=0, residual=residual, alpha=0.0))

            while residual >= config.tol:
                if iterations >= config.max_iter:
                    failure = NotConverged(
                        f"no convergence after {iterations} iterations "
                        f"(residual {residual:.3e})"
                    )
                    break

                v = self._newton_direction(model, chi, phi, q, theta_hat, config)

                alpha = 1.0
                accepted = None
                range_only = True
                for _ in range(config.max_halvings + 1):
                    trial = grid.mean_free(phi + alpha * v)
                    q_trial = self._q(chi, self._omega(model, trial))
                    if config.strict and not self._in_supercritical_range(q_trial):
                        alpha *= 0.5
                        continue
                    range_only = False
                    r_trial = float(np.max(np.abs(q_trial - theta_hat)))
                    if r_trial < residual:
                        accepted = (trial, q_trial, r_trial)
                        break
                    alpha *= 0.5

                if accepted is None:
                    if range_only:
                        failure = AngleRangeViolation(
                            "every damped iterate leaves (0, pi) pointwise"
                        )
                    else:
                        failure = NotConverged(
                            f"line search stalled at residual {residual:.3e}"
                        )
                    break

                phi, q, residual = accepted
                iterations += 1
                history.append(
                    ResidualRow(iter=iterations, residual=residual, alpha=alpha)
                )
                logger.info(
                    f"Newton iteration {iterations}: residual={residual:.3e}, alpha={alpha:g}"
                )

        report = SolverReport(
            converged=failure is None,
            iterations=iterations,
            residual_sup=residual,
            angle_min=float(np.min(q)),
            angle_max=float(np.max(q)),
            theta_hat=theta_hat,
            class_arg=self.class_arg(model),
            psi_amplitude=model.psi_amplitude,
            history=history,
            wall_time_ms=stats.wall_time_ms,
            memory_mb=stats.memory_mb,
            memory_increase_mb=stats.memory_increase_mb,
        )
        if failure is not None:
            logger.warning(f"Torus solve failed: {failure.detail}")
            failure.report = report
            raise failure

        logger.info(
            f"Torus solve converged in {iterations} iterations, "
            f"{stats.wall_time_ms} ms, memory +{stats.memory_increase_mb} MB"
        )
        return report, PotentialField.from_values(phi)

    def continuation(
        self,
        model: TorusModel,
        theta_hat: float,
        steps: int,
        config: Optional[SolverConfig] = None,
    ) -> ContinuationResult:
        """Ramp psi_amplitude from 0 to the model's value, warm-starting each solve."""
        if steps < 1:
            raise ValueError("steps must be at least 1")
        config = config or SolverConfig()
        self._check_target(model, theta_hat, config)

        reports = []
        phi = PotentialField.zeros(model.shape)
        for k in range(1, steps + 1):
            s = model.psi_amplitude * k / steps
            stage = model.with_amplitude(s)
            try:
                report, phi = self.newton_solve(stage, theta_hat, phi, config)
            except (NotConverged, AngleRangeViolation) as e:
                if e.report is not None:
                    reports.append(e.report)
                raise ContinuationStalled(s, reports) from e
            reports.append(report)
            logger.info(
                f"Continuation step {k}/{steps}: s={s:g}, iterations={report.iterations}, "
                f"residual={report.residual_sup:.3e}"
            )
        return ContinuationResult(reports=reports, potential=phi)

    def linearization_fd_check(
        self,
        model: TorusModel,
        phi: FieldLike,
        trials: int,
        seed: int = 0,
        eps: float = 1e-5,
    ) -> float:
        """Worst relative error of DQ against central differences along random directions."""
        rng = np.random.default_rng(seed)
        grid = self.grid_for(model)
        worst = 0.0
        for _ in range(trials):
            v = grid.band_limited_noise(rng)
            worst = max(worst, self.fd_error(model, phi, v, eps))
        return worst

    def fd_error(
        self, model: TorusModel, phi: FieldLike, v: FieldLike, eps: float = 1e-5
    ) -> float:
        chi = self.chi_field(model)
        phi = _values(phi)
        # constants are a gauge direction
        v = self.grid_for(model).mean_free(_values(v))
        q_plus = self._q(chi, self._omega(model, phi + eps * v))
        q_minus = self._q(chi, self._omega(model, phi - eps * v))
        fd = (q_plus - q_minus) / (2.0 * eps)
        lin = self._linearized(chi, self._omega(model, phi), v, model)
        scale = max(float(np.max(np.abs(lin))), float(np.max(np.abs(fd))))
        if scale < 1e-12:
            return 0.0
        return float(np.max(np.abs(fd - lin))) / scale

    def class_arg(self, model: TorusModel) -> float:
        profile = self.cohomology.profile_from_constant_form(model.A)
        return self.cohomology.principal_arg(profile)

    # Internals

    def _omega(self, model: TorusModel, phi: FieldLike) -> np.ndarray:
        return model.A + self.grid_for(model).complex_hessian(_values(phi))

    def _q(self, chi: np.ndarray, omega: np.ndarray) -> np.ndarray:
        # chi is checked once per model and omega_phi is Hermitian by construction
        spectra = self.hermitian.relative_spectra_batch(chi, omega, checked=False)
        return linalg.lagrangian_angle(spectra)

    def _linearized(
        self, chi: np.ndarray, omega: np.ndarray, v: np.ndarray, model: TorusModel
    ) -> np.ndarray:
        eta = linalg.eta_metric(chi, omega)
        H = self.grid_for(model).complex_hessian(v)
        return -np.real(np.trace(np.linalg.solve(eta, H), axis1=-2, axis2=-1))

    def _sine_coefficients(
        self, chi: np.ndarray, omega: np.ndarray, theta_hat: float
    ) -> Tuple[np.ndarray, np.ndarray]:
        # C = e^{-i theta_hat} det(W) W^-1 with W = omega + i chi
        W = omega + 1j * chi
        det = np.linalg.det(W)
        C = (np.exp(-1j * theta_hat) * det)[..., None, None] * np.linalg.inv(W)
        return C, np.abs(det)

    def _newton_direction(
        self,
        model: TorusModel,
        chi: np.ndarray,
        phi: np.ndarray,
        q: np.ndarray,
        theta_hat: float,
        config: SolverConfig,
    ) -> np.ndarray:
        """
        Solve M v = rho (theta_hat - Q) for mean-zero v, where M is the symmetric
        sine-form operator and rho = |det(omega + i chi)|.
        """
        grid = self.grid_for(model)
        C, rho = self._sine_coefficients(chi, self._omega(model, phi), theta_hat)
        rhs = grid.mean_free(rho * (theta_hat - q))

        kappa = -float(np.mean(np.imag(np.trace(C, axis1=-2, axis2=-1)))) / model.n
        if kappa <= 0.0:
            logger.warning(f"Non-positive preconditioner scale {kappa:.3e}; using |kappa|")
            kappa = abs(kappa) or 1.0

        shape = grid.shape
        size = rhs.size

        def matvec(x):
            x = grid.mean_free(np.reshape(x, shape))
            y = np.imag(_trace_product(C, grid.complex_hessian(x)))
            return grid.mean_free(y).ravel()

        def precondition(r):
            r = grid.mean_free(np.reshape(r, shape))
            return grid.inverse_laplacian(r, kappa).ravel()

        operator = LinearOperator((size, size), matvec=matvec, dtype=float)
        preconditioner = LinearOperator((size, size), matvec=precondition, dtype=float)
        v, info = cg(
            operator,
            rhs.ravel(),
            rtol=config.cg_rtol,
            atol=0.0,
            maxiter=config.cg_max_iter,
            M=preconditioner,
        )
        if info > 0:
            logger.warning(f"CG stopped after {info} iterations without reaching rtol")
        return grid.mean_free(np.reshape(v, shape))

    def _in_supercritical_range(self, q: np.ndarray) -> bool:
        return bool(np.min(q) > 0.0 and np.max(q) < math.pi)

    def _check_target(
        self, model: TorusModel, theta_hat: float, config: SolverConfig
    ) -> None:
        tol = settings.ANGLE_TOL
        if config.strict:
            if not tol < theta_hat < math.pi - tol:
                raise NotSupercritical(
                    f"theta_hat={theta_hat!r} is not in (0, pi); "
                    "set allow_lifted for lifted constants"
                )
        elif not tol < theta_hat < model.n * math.pi - tol:
            raise NotSupercritical(
                f"theta_hat={theta_hat!r} is not in (0, {model.n}*pi)"
            )
