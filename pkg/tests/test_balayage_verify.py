import math

import numpy as np
import pytest
from hypothesis import given, settings

from src.errors import InvalidInputError
from src.schema.construct import SweepSpec
from src.schema.kernel import GridRect, GridSpec
from src.schema.measure import AtomicMeasure, SignedMeasure
from src.schema.polynomial import Polynomial
from src.schema.report import Verdict
from src.schema.subharmonic import TestFunction
from src.services.balayage_construct import poisson_sweep
from src.services.balayage_verify import (
    check_kernel_identity,
    check_lnmon_balayage,
    check_mon_balayage,
    check_subharmonic_transfer,
    default_sample_points,
    double_kernel_sum,
    moments,
    no_mass_at_singular_points,
)
from tests.strategies import atomic_measures


@pytest.fixture
def roots_of_unity() -> AtomicMeasure:
    return AtomicMeasure.from_arrays(np.exp(2j * np.pi * np.arange(4) / 4), [0.25] * 4)


class TestMoments:
    def test_dirac(self):
        a = 0.3 - 0.4j
        np.testing.assert_allclose(moments(AtomicMeasure.dirac(a), 3).array, [1, a, a ** 2, a ** 3], rtol=1e-14)

    def test_roots_of_unity(self, roots_of_unity):
        np.testing.assert_allclose(moments(roots_of_unity, 4).array, [1, 0, 0, 0, 1], atol=1e-14)

    def test_empty(self):
        assert not np.any(moments(AtomicMeasure.empty(), 2).array)


class TestMonBalayage:
    def test_measure_is_its_own_balayage(self):
        delta = AtomicMeasure.from_arrays([0.1, 2j], [1.0, 3.0])
        report = check_mon_balayage(delta, delta, 5)
        assert report.verdict == Verdict.YES
        assert report.max_residual == 0.0

    def test_circle_sweep(self, half_sweep):
        delta, omega = half_sweep
        assert check_mon_balayage(delta, omega, 8).verdict == Verdict.YES

    def test_moved_atom_fails_first_moment(self):
        report = check_mon_balayage(AtomicMeasure.dirac(0j), AtomicMeasure.dirac(1.0), 1)
        assert report.verdict == Verdict.NO
        assert report.residuals[0] == 0.0
        assert report.residuals[1] == pytest.approx(1.0)

    def test_zero_mass_rejected(self):
        with pytest.raises(InvalidInputError):
            check_mon_balayage(AtomicMeasure.empty(), AtomicMeasure.dirac(0j), 1)

    def test_infinite_order_needs_truncation(self, half_sweep):
        delta, omega = half_sweep
        with pytest.raises(InvalidInputError):
            check_mon_balayage(delta, omega, math.inf)
        report = check_mon_balayage(delta, omega, math.inf, truncation=3)
        assert len(report.residuals) == 4
        assert report.truncation == 3

    @given(atomic_measures(), atomic_measures(min_atoms=1, max_atoms=1))
    @settings(max_examples=50, deadline=None)
    def test_below_order_one_only_mass_matters(self, delta, shift):
        omega = delta.translated(shift.locations[0])
        report = check_mon_balayage(delta, omega, 0.5)
        assert report.verdict == Verdict.YES
        assert "only total masses" in report.notes[0]

    def test_sweeps_compose(self):
        delta = AtomicMeasure.dirac(0.5)
        first = poisson_sweep(delta, SweepSpec(radius=1.0, arcs=256))
        second = poisson_sweep(first, SweepSpec(radius=2.0, arcs=256))
        assert check_mon_balayage(delta, second, 8, tol=2e-9).verdict == Verdict.YES

    def test_mixtures_of_balayages(self):
        delta = AtomicMeasure.dirac(0.2j)
        inner = poisson_sweep(delta, SweepSpec(radius=1.0, arcs=256))
        outer = poisson_sweep(delta, SweepSpec(radius=1.5, arcs=256))
        mixture = inner.scaled(0.5) + outer.scaled(0.5)
        assert check_mon_balayage(delta, mixture, 6).verdict == Verdict.YES

    def test_residuals_scale_with_dilation(self):
        delta = AtomicMeasure.from_arrays([0.2 + 0.1j, -0.3], [1.0, 1.0])
        omega = AtomicMeasure.dirac(0.5, 2.0)
        s = 1.7 - 0.4j
        base = check_mon_balayage(delta, omega, 4).residuals
        scaled = check_mon_balayage(delta.dilated(s), omega.dilated(s), 4).residuals
        for k, (r, rs) in enumerate(zip(base, scaled)):
            assert rs == pytest.approx(abs(s) ** k * r, rel=1e-9, abs=1e-15)


class TestLnmonBalayage:
    def test_circle_measure_dominates_the_center(self):
        delta = AtomicMeasure.dirac(0j)
        omega = poisson_sweep(delta, SweepSpec(radius=1.0, arcs=512))
        report = check_lnmon_balayage(delta, omega, 4, GridSpec.for_sweep(), tol=1e-6)
        assert report.verdict == Verdict.YES
        assert report.near_field_skipped > 0
        assert report.worst_witness.margin >= -1e-6

    def test_identical_measures(self):
        delta = AtomicMeasure.dirac(2.0)
        report = check_lnmon_balayage(delta, delta, 0)
        assert report.verdict == Verdict.YES
        assert report.preconditions.delta_tail == pytest.approx(math.log(2.0))

    def test_swapped_roles_fail_inside(self):
        center = AtomicMeasure.dirac(0j)
        circle = poisson_sweep(center, SweepSpec(radius=1.0, arcs=512))
        report = check_lnmon_balayage(circle, center, 0, tol=1e-6)
        assert report.verdict == Verdict.NO
        witness = report.worst_witness
        assert witness.margin < 0
        assert abs(complex(witness.re, witness.im)) < 1
        assert report.omega_singular_points >= 1

    def test_explicit_grid(self, half_sweep):
        delta, omega = half_sweep
        spec = GridSpec(resolution=16, far_rays=0, far_radii=0)
        report = check_lnmon_balayage(delta, omega, 2, spec, tol=1e-6)
        assert report.points_checked <= 16 * 16 + len(delta.atoms) + len(omega.atoms)

    @pytest.mark.parametrize("a", [0.001, 0.3, 5.0])
    def test_sparse_omega_violation_is_found(self, a):
        delta = AtomicMeasure.dirac(0j)
        omega = AtomicMeasure.from_arrays(a * np.exp(2j * np.pi * np.arange(3) / 3), [1 / 3] * 3)
        assert check_mon_balayage(delta, omega, 2).verdict == Verdict.YES
        # pt_ω − pt_δ = ⅓ ln|1 − (a/z)³|, which is ⅓ ln(7/8) at z = 2a
        report = check_lnmon_balayage(delta, omega, 2)
        assert report.verdict == Verdict.NO
        assert report.worst_witness.margin < -0.01
        assert report.points_checked > 16 * 16

    def test_sparse_omega_without_far_field(self):
        delta = AtomicMeasure.dirac(0j)
        omega = AtomicMeasure.from_arrays(0.3 * np.exp(2j * np.pi * np.arange(3) / 3), [1 / 3] * 3)
        report = check_lnmon_balayage(delta, omega, 2, GridSpec(far_rays=0, far_radii=0))
        assert report.verdict == Verdict.NO
        assert report.points_checked > 0

    def test_exclusion_is_per_atom(self):
        omega = AtomicMeasure.from_arrays([0j, 0.01, 10.0], [1.0, 1.0, 1.0])
        # the lone atom at 10 excludes a disk of radius 4.995, the pair at 0 one of 0.005
        around_lone = GridSpec(rect=GridRect(x_min=8.0, x_max=12.0, y_min=-2.0, y_max=2.0), resolution=16, far_rays=0)
        report = check_lnmon_balayage(omega, omega, 0, around_lone)
        assert report.near_field_skipped == 16 * 16
        assert report.verdict == Verdict.INCONCLUSIVE

        around_pair = GridSpec(rect=GridRect(x_min=-1.0, x_max=1.0, y_min=-1.0, y_max=1.0), resolution=16, far_rays=0)
        report = check_lnmon_balayage(omega, omega, 0, around_pair)
        assert report.near_field_skipped == 0
        assert report.points_checked == 16 * 16
        assert report.verdict == Verdict.YES

    def test_nothing_checked_is_inconclusive(self):
        pair = AtomicMeasure.from_arrays([-1.0, 1.0], [0.5, 0.5])
        spec = GridSpec(rect=GridRect(x_min=0.5, x_max=1.5, y_min=-0.5, y_max=0.5), resolution=8, far_rays=0)
        report = check_lnmon_balayage(pair, pair, 1, spec)
        assert report.points_checked == 0
        assert report.verdict == Verdict.INCONCLUSIVE
        assert "no grid point was checked" in report.notes

    def test_swallowed_lattice_is_inconclusive(self):
        pair = AtomicMeasure.from_arrays([-1.0, 1.0], [0.5, 0.5])
        spec = GridSpec(rect=GridRect(x_min=0.5, x_max=1.5, y_min=-0.5, y_max=0.5), resolution=8)
        report = check_lnmon_balayage(pair, pair, 1, spec)
        assert report.points_checked > 0
        assert report.verdict == Verdict.INCONCLUSIVE
        assert any("of the lattice" in note for note in report.notes)

    def test_zero_factor_disables_the_exclusion(self, half_sweep):
        delta, omega = half_sweep
        report = check_lnmon_balayage(delta, omega, 2, GridSpec(near_field_factor=0.0), tol=1e-6)
        assert report.near_field_skipped == 0


class TestKernelIdentity:
    def test_default_sample_points(self):
        samples = default_sample_points()
        assert samples.size == 64
        assert np.count_nonzero(np.abs(samples) < 1) == 32

    @pytest.mark.parametrize("p", [0, 1, 3, 8])
    def test_holds_for_sweeps(self, sweep_pairs, p):
        for delta, omega in sweep_pairs:
            report = check_kernel_identity(delta, omega, p)
            assert report.holds
            assert report.samples_checked == 64

    def test_identical_measures_cancel_exactly(self):
        delta = AtomicMeasure.dirac(0.3)
        report = check_kernel_identity(delta, delta, 2)
        assert report.max_deviation == 0.0

    def test_sample_on_an_atom_is_skipped(self):
        delta = AtomicMeasure.dirac(0.3)
        report = check_kernel_identity(delta, delta, 1, w_list=[0.3, 2.0])
        assert report.samples_checked == 1
        assert len(report.skipped) == 1

    def test_non_balayage_is_noted(self):
        report = check_kernel_identity(AtomicMeasure.dirac(0j), AtomicMeasure.dirac(0.5), 1)
        assert report.notes


class TestDoubleKernelSum:
    @pytest.mark.parametrize("seed", range(5))
    def test_orders_agree(self, seed):
        rng = np.random.default_rng(seed)
        mu = AtomicMeasure.from_arrays(rng.normal(size=4) * 2 + 1j * rng.normal(size=4), rng.uniform(0.1, 1, 4))
        delta = AtomicMeasure.from_arrays(rng.normal(size=6) + 1j * rng.normal(size=6), rng.uniform(0.1, 1, 6))
        omega = AtomicMeasure.from_arrays(rng.normal(size=5) + 1j * rng.normal(size=5), rng.uniform(0.1, 1, 5))
        report = double_kernel_sum(mu, SignedMeasure.from_difference(omega, delta), seed % 4)
        assert report.agrees
        assert report.relative_gap <= 1e-12

    def test_empty(self):
        report = double_kernel_sum(AtomicMeasure.empty(), SignedMeasure.positive(AtomicMeasure.dirac(1.0)), 1)
        assert report.rows_first == 0.0 and report.agrees


class TestSubharmonicTransfer:
    def test_harmonic_polynomial_is_balanced(self, sweep_pairs):
        delta, omega = sweep_pairs[0]
        u = TestFunction(polynomial=Polynomial([0, 1 + 2j, 0.5]))
        report = check_subharmonic_transfer(delta, omega, 8, u)
        assert report.verdict == Verdict.YES
        assert report.margin == pytest.approx(0.0, abs=1e-9)
        assert report.fubini is None

    @pytest.mark.parametrize("genus", [None, 2])
    def test_potential_of_a_distant_atom(self, sweep_pairs, genus):
        delta, omega = sweep_pairs[1]
        u = TestFunction(mu=AtomicMeasure.dirac(3.0 + 1j), genus=genus)
        report = check_subharmonic_transfer(delta, omega, 3, u)
        assert report.verdict == Verdict.YES
        assert report.fubini.agrees

    def test_potential_of_an_inner_atom(self, sweep_pairs):
        delta, omega = sweep_pairs[0]
        u = TestFunction(mu=AtomicMeasure.dirac(-0.4j))
        report = check_subharmonic_transfer(delta, omega, 0, u)
        assert report.verdict == Verdict.YES
        assert float(report.margin) > 0

    def test_polynomial_degree_above_order(self, half_sweep):
        delta, omega = half_sweep
        with pytest.raises(InvalidInputError):
            check_subharmonic_transfer(delta, omega, 2, TestFunction(polynomial=Polynomial.monomial(3)))

    def test_singular_on_delta_side(self, half_sweep):
        delta, omega = half_sweep
        report = check_subharmonic_transfer(delta, omega, 2, TestFunction(mu=AtomicMeasure.dirac(0.5)))
        assert report.delta_singular
        assert report.verdict == Verdict.YES

    def test_singular_on_omega_side_is_inconclusive(self, roots_of_unity):
        report = check_subharmonic_transfer(
            AtomicMeasure.dirac(0j), roots_of_unity, 3, TestFunction(mu=AtomicMeasure.dirac(1.0))
        )
        assert report.omega_singular and not report.delta_singular
        assert report.verdict == Verdict.INCONCLUSIVE
        assert not report.holds

    def test_lnmon_precondition_is_recorded(self, roots_of_unity):
        u = TestFunction(mu=AtomicMeasure.dirac(3.0 + 2j))
        report = check_subharmonic_transfer(AtomicMeasure.dirac(0j), roots_of_unity, 3, u)
        assert report.lnmon_precondition == Verdict.NO
        assert any("not an lnmon_3-balayage" in note for note in report.notes)

    def test_lnmon_precondition_met_for_sweeps(self, sweep_pairs):
        delta, omega = sweep_pairs[0]
        u = TestFunction(mu=AtomicMeasure.dirac(3.0 + 1j))
        report = check_subharmonic_transfer(delta, omega, 3, u, grid=GridSpec.for_sweep())
        assert report.lnmon_precondition == Verdict.YES
        assert not any("lnmon" in note for note in report.notes)


class TestSingularPoints:
    def test_atom_on_a_singular_point(self, roots_of_unity):
        report = no_mass_at_singular_points(roots_of_unity, [1.0])
        assert report.atoms_hit == 1
        assert report.mass_on_points == 0.25
        assert not report.clean

    def test_clean(self, roots_of_unity):
        assert no_mass_at_singular_points(roots_of_unity, [2.0, 0.5j]).clean
