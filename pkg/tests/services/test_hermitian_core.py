import math

import numpy as np
import pytest

from app.core.exceptions import (BadIndexSet, NotHermitian,
                                 NotPositiveDefinite, NotSupercritical,
                                 SizeMismatch, UndefinedCotangent)
from app.schemas.hermitian import AngleValue, HermitianPencil, Spectrum
from app.utils import linalg


def supercritical_spectra(rng, count, n):
    """Spectra with sum arccot(lambda) in (0, pi): lambda_j = cot(theta_j), sum theta_j < pi."""
    theta = math.pi * rng.dirichlet(np.full(n + 1, 2.0), size=count)[:, :n]
    return 1.0 / np.tan(theta)


def batched_unitaries(rng, count, n):
    z = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


class TestRelativeSpectrum:
    def test_identity(self, hermitian):
        spec = hermitian.relative_spectrum(HermitianPencil.flat(np.eye(3)))
        assert spec.values == pytest.approx([1.0, 1.0, 1.0])

    def test_diagonal(self, hermitian):
        spec = hermitian.relative_spectrum(HermitianPencil.flat(np.diag([3.0, 1.0])))
        assert spec.values == pytest.approx([3.0, 1.0])

    def test_weighted_metric(self, hermitian):
        pencil = HermitianPencil(chi=np.diag([2.0, 1.0]), omega=np.diag([2.0, 3.0]))
        assert hermitian.relative_spectrum(pencil).values == pytest.approx([3.0, 1.0])

    def test_congruence_invariance(self, hermitian, rng):
        for n in range(1, 7):
            chi, _ = linalg.random_metric(rng, n)
            omega = linalg.random_hermitian(rng, n)
            before = hermitian.relative_spectrum(HermitianPencil(chi=chi, omega=omega))
            T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 3 * n * np.eye(n)
            Ts = linalg.conj_transpose(T)
            after = hermitian.relative_spectrum(
                HermitianPencil(chi=Ts @ chi @ T, omega=Ts @ omega @ T)
            )
            scale = 1.0 + max(abs(x) for x in before.values)
            assert np.allclose(before.values, after.values, atol=1e-10 * scale)

    def test_batch_matches_single(self, hermitian, rng):
        chis = np.stack([linalg.random_metric(rng, 3)[0] for _ in range(5)])
        omegas = np.stack([linalg.random_hermitian(rng, 3) for _ in range(5)])
        batch = hermitian.relative_spectra_batch(chis, omegas)
        for k in range(5):
            single = hermitian.relative_spectrum(HermitianPencil(chi=chis[k], omega=omegas[k]))
            assert np.allclose(batch[k], single.values)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            HermitianPencil(chi=np.eye(2), omega=[[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_indefinite_metric(self):
        with pytest.raises(NotPositiveDefinite):
            HermitianPencil(chi=np.diag([1.0, -1.0]), omega=np.eye(2))

    def test_rejects_near_degenerate_metric(self):
        with pytest.raises(NotPositiveDefinite):
            HermitianPencil(chi=np.diag([1.0, 1e-14]), omega=np.eye(2))

    def test_accepts_real_imag_record(self):
        pencil = HermitianPencil(
            chi={"real": [[1.0, 0.0], [0.0, 1.0]]},
            omega={"real": [[1.0, 0.0], [0.0, 1.0]], "imag": [[0.0, 0.5], [-0.5, 0.0]]},
        )
        assert pencil.n == 2


class TestAngles:
    @pytest.mark.parametrize(
        "values, expected",
        [
            ([0.0, 0.0, 0.0], 1.5 * math.pi),
            ([-1.0, -1.0, -1.0], 9 * math.pi / 4),
            ([1 / math.sqrt(3)] * 3, math.pi),
        ],
    )
    def test_lagrangian_angle(self, hermitian, values, expected):
        angle = hermitian.lagrangian_angle(Spectrum.from_unsorted(values))
        assert angle.theta == pytest.approx(expected, abs=1e-12)
        assert angle.supercritical == (expected < math.pi)

    def test_argdet_examples(self, hermitian):
        assert hermitian.angle_via_argdet(Spectrum(values=[0.0, 0.0])).theta == pytest.approx(math.pi)
        assert hermitian.angle_via_argdet(Spectrum(values=[1.0, 1.0, 1.0])).theta == pytest.approx(
            0.75 * math.pi
        )

    def test_oracles_agree_on_random_spectra(self, rng):
        for n in range(1, 7):
            values = np.sort(rng.uniform(-50, 50, size=(10_000 // 6 + 1, n)), axis=-1)[:, ::-1]
            diff = linalg.lagrangian_angle(values) - linalg.argdet_angle(values)
            assert np.max(np.abs(diff)) < 1e-10

    def test_service_oracles_agree(self, hermitian, rng):
        for _ in range(200):
            n = int(rng.integers(1, 7))
            spec = Spectrum.from_unsorted(rng.uniform(-50, 50, size=n))
            a = hermitian.lagrangian_angle(spec).theta
            b = hermitian.angle_via_argdet(spec).theta
            assert abs(a - b) < 1e-10

    def test_angle_decreases_in_each_eigenvalue(self, rng):
        values = rng.uniform(-5, 5, size=(100, 4))
        base = linalg.lagrangian_angle(values)
        for j in range(4):
            bumped = values.copy()
            bumped[:, j] += 0.1
            assert np.all(linalg.lagrangian_angle(bumped) < base)

    def test_spectrum_must_be_sorted(self):
        with pytest.raises(ValueError):
            Spectrum(values=[1.0, 2.0])

    def test_angle_value_range(self):
        with pytest.raises(ValueError):
            AngleValue(theta=4.0, n=1)
        assert AngleValue.of(2.0).supercritical
        assert not AngleValue.of(4.0).supercritical

    @pytest.mark.parametrize("values", [[1e17], [-1e17], [1e16, 1e16, 1e16], [-1e16, -1e16, -1e16]])
    def test_huge_eigenvalues_round_onto_the_range_ends(self, hermitian, values):
        spec = Spectrum.from_unsorted(values)
        for angle in (hermitian.lagrangian_angle(spec), hermitian.angle_via_argdet(spec)):
            assert 0.0 <= angle.theta <= spec.n * math.pi
            assert angle.theta == pytest.approx(0.0 if values[0] > 0 else spec.n * math.pi, abs=1e-12)
            assert angle.supercritical == (0.0 < angle.theta < math.pi)


class TestRestriction:
    def test_single_index(self, hermitian):
        pencil = HermitianPencil.flat(np.diag([3.0, 1.0]))
        restricted = hermitian.principal_restriction(pencil, [1])
        assert restricted.n == 1
        assert restricted.omega[0, 0].real == pytest.approx(3.0)

    def test_full_index_set_is_identity(self, hermitian, rng):
        A = linalg.random_hermitian(rng, 3)
        restricted = hermitian.principal_restriction(HermitianPencil.flat(A), [1, 2, 3])
        assert np.allclose(restricted.omega, A)

    @pytest.mark.parametrize("index_set", [[], [1, 1], [0], [4]])
    def test_bad_index_sets(self, hermitian, index_set):
        with pytest.raises(BadIndexSet):
            hermitian.principal_restriction(HermitianPencil.flat(np.eye(3)), index_set)

    def test_interlace_examples(self, hermitian):
        full = Spectrum(values=[3.0, 1.0])
        assert hermitian.interlace_check(full, Spectrum(values=[3.0]))
        assert not hermitian.interlace_check(full, Spectrum(values=[4.0]))
        with pytest.raises(SizeMismatch):
            hermitian.interlace_check(Spectrum(values=[1.0]), full)

    def test_interlacing_suite(self, hermitian, rng):
        violations = 0
        for _ in range(1000):
            n = int(rng.integers(1, 9))
            chi, _ = linalg.random_metric(rng, n)
            pencil = HermitianPencil(chi=chi, omega=linalg.random_hermitian(rng, n, 10.0))
            p = int(rng.integers(1, n + 1))
            index_set = [int(i) + 1 for i in rng.choice(n, size=p, replace=False)]
            restricted = hermitian.principal_restriction(pencil, index_set)
            full = hermitian.relative_spectrum(pencil)
            if not hermitian.interlace_check(full, hermitian.relative_spectrum(restricted)):
                violations += 1
        assert violations == 0


class TestVolumeDensity:
    def test_quarter_angle(self, hermitian):
        density = hermitian.volume_density(Spectrum(values=[1.0]), AngleValue.of(math.pi / 2))
        assert density == pytest.approx(math.sqrt(2) / 2, abs=1e-12)

    def test_vanishes_on_matching_angle(self, hermitian):
        spec = Spectrum(values=[2.0, 0.5])
        theta = hermitian.lagrangian_angle(spec)
        assert hermitian.volume_density(spec, theta) == pytest.approx(0.0, abs=1e-12)

    def test_forms_agree(self, rng):
        mu = rng.uniform(-3, 3, size=(1000, 3))
        for theta in (0.3, 1.2, 2.9):
            assert np.allclose(
                linalg.volume_density(mu, theta),
                linalg.volume_density_cot_form(mu, theta),
                atol=1e-9,
            )

    def test_endpoint_angle_rejected(self):
        with pytest.raises(UndefinedCotangent):
            linalg.volume_density(np.array([1.0]), math.pi)

    def test_positive_on_proper_restrictions(self, rng):
        violations = 0
        total = 0
        for n in range(2, 7):
            count = 100_000 // 5
            lam = supercritical_spectra(rng, count, n)
            theta = linalg.lagrangian_angle(lam)
            U = batched_unitaries(rng, count, n)
            A = (U * lam[:, None, :]) @ linalg.conj_transpose(U)
            p = int(rng.integers(1, n))
            mu = np.linalg.eigvalsh(A[:, :p, :p])
            density = linalg.volume_density(mu, theta)
            violations += int(np.sum(density <= 0))
            total += count
        assert total == 100_000
        assert violations == 0

    def test_positive_through_the_service(self, hermitian, rng):
        for n in range(2, 6):
            lam = supercritical_spectra(rng, 40, n)
            U = batched_unitaries(rng, 40, n)
            for lam_i, U_i in zip(lam, U):
                A = (U_i * lam_i) @ U_i.conj().T
                pencil = HermitianPencil.flat(0.5 * (A + A.conj().T))
                theta = hermitian.lagrangian_angle(hermitian.relative_spectrum(pencil))
                for p in range(1, n):
                    restricted = hermitian.principal_restriction(pencil, range(1, p + 1))
                    mu = hermitian.relative_spectrum(restricted)
                    assert hermitian.volume_density(mu, theta) > 0

    def test_batch_matches_scalar(self, rng):
        mu = rng.uniform(-3, 3, size=(50, 2))
        theta = rng.uniform(0.2, 2.9, size=50)
        batch = linalg.volume_density(mu, theta)
        assert np.allclose(batch, [linalg.volume_density(m, t) for m, t in zip(mu, theta)])
        with pytest.raises(UndefinedCotangent):
            linalg.volume_density(mu, np.append(theta[:-1], math.pi))

    def test_restricted_angle_bound(self, hermitian):
        full = Spectrum(values=[3.0, 2.0, 1.0])
        bound = hermitian.restricted_angle_bound(full, Spectrum(values=[2.5, 1.5]))
        assert bound.chain_holds
        assert bound.restricted_sum <= bound.tail_sum < bound.full_sum


class TestDensityMonotone:
    def test_scalar(self, hermitian):
        spec = Spectrum(values=[-0.7])
        theta = hermitian.lagrangian_angle(spec)
        assert hermitian.density_monotone_scan(spec, theta, 10.0, 101)

    def test_pair_with_positive_sum(self, hermitian):
        spec = Spectrum(values=[2.0, -0.5])
        theta = hermitian.lagrangian_angle(spec)
        assert hermitian.density_monotone_scan(spec, theta, 10.0, 101)

    def test_rejects_non_supercritical(self, hermitian):
        spec = Spectrum(values=[0.0, 0.0])
        with pytest.raises(NotSupercritical):
            hermitian.density_monotone_scan(spec, hermitian.lagrangian_angle(spec), 1.0, 11)

    def test_random_supercritical_spectra(self, hermitian, rng):
        failures = 0
        for k in range(10_000):
            n = 1 + k % 5
            values = supercritical_spectra(rng, 1, n)[0]
            spec = Spectrum.from_unsorted(values)
            theta = hermitian.lagrangian_angle(spec)
            if not hermitian.density_monotone_scan(spec, theta, 10.0, 64):
                failures += 1
        assert failures == 0
