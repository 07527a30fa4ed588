import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import InvalidInputError
from src.schema.base import Point
from src.schema.construct import MomentProblem, PotentialSpec, Regularization, SolveStatus, SweepRule, SweepSpec
from src.schema.kernel import GridSpec
from src.schema.measure import AtomicMeasure
from src.schema.polynomial import Polynomial
from src.schema.report import Verdict
from src.services.balayage_construct import (
    discretize_potential_pair,
    moment_system,
    poisson_sweep,
    solve_moment_balayage,
)
from src.services.balayage_verify import check_lnmon_balayage, check_mon_balayage, moments
from src.services.poly_classes import circle_points


class TestPoissonSweep:
    def test_center_sweeps_to_uniform_masses(self):
        omega = poisson_sweep(AtomicMeasure.dirac(0j), SweepSpec(radius=1.0, arcs=64))
        np.testing.assert_allclose(omega.masses, np.full(64, 1 / 64), atol=1e-15)

    @pytest.mark.parametrize("rule", [SweepRule.NODAL, SweepRule.ARC])
    def test_mass_is_conserved(self, rule):
        delta = AtomicMeasure.dirac(0.6 - 0.2j, 2.5)
        omega = poisson_sweep(delta, SweepSpec(radius=1.0, arcs=128, rule=rule))
        assert omega.total_mass == pytest.approx(2.5, rel=1e-12)

    def test_first_moment_is_the_source_location(self, sweep_pairs):
        for delta, omega in sweep_pairs:
            assert moments(omega, 1).array[1] == pytest.approx(delta.locations[0], abs=1e-12)

    def test_arc_rule_converges_quadratically(self):
        delta = AtomicMeasure.dirac(0.5)

        def error(arcs: int) -> float:
            omega = poisson_sweep(delta, SweepSpec(radius=1.0, arcs=arcs, rule=SweepRule.ARC))
            return check_mon_balayage(delta, omega, 4, tol=1.0).max_residual

        assert error(256) / error(512) >= 3

    def test_off_center_circle(self):
        spec = SweepSpec(center=Point(re=1.0, im=1.0), radius=2.0, arcs=256)
        delta = AtomicMeasure.dirac(1.5 + 0.5j)
        omega = poisson_sweep(delta, spec)
        assert np.allclose(np.abs(omega.locations - (1 + 1j)), 2.0)
        assert check_mon_balayage(delta, omega, 6).verdict == Verdict.YES

    @pytest.mark.parametrize("z", [1.0, 1.5j, -3.0])
    def test_atoms_on_or_outside_the_circle_rejected(self, z):
        with pytest.raises(InvalidInputError):
            poisson_sweep(AtomicMeasure.dirac(z), SweepSpec(radius=1.0, arcs=32))

    def test_linear_in_the_source(self):
        spec = SweepSpec(radius=1.0, arcs=128)
        first = AtomicMeasure.dirac(0.3)
        second = AtomicMeasure.dirac(-0.2 + 0.4j, 2.0)
        combined = poisson_sweep(first + second, spec)
        assert np.array_equal(combined.masses, poisson_sweep(first, spec).masses + poisson_sweep(second, spec).masses)

    def test_rotation_by_one_node_shifts_the_masses(self):
        spec = SweepSpec(radius=1.0, arcs=64)
        a = 0.4 + 0.3j
        omega = poisson_sweep(AtomicMeasure.dirac(a), spec)
        rotated = poisson_sweep(AtomicMeasure.dirac(a * np.exp(2j * np.pi / 64)), spec)
        np.testing.assert_allclose(rotated.masses, np.roll(omega.masses, 1), rtol=1e-12)

    @pytest.mark.parametrize("arcs", [64, 128])
    def test_sweep_is_lnmon_balayage_up_to_an_eighth_of_the_nodes(self, arcs):
        delta = AtomicMeasure.dirac(0.3 - 0.2j)
        omega = poisson_sweep(delta, SweepSpec(radius=1.0, arcs=arcs))
        for p in [*range(arcs // 8 + 1), arcs / 8 - 0.5]:
            report = check_lnmon_balayage(delta, omega, p, GridSpec.for_sweep(), tol=1e-6)
            assert report.verdict == Verdict.YES, (p, report.worst_witness, report.notes)
            assert report.worst_witness.margin >= -1e-6


class TestMomentSynthesis:
    def test_constraint_rows(self):
        A = moment_system(np.array([1j]), 2)
        np.testing.assert_allclose(A[:, 0], [1, 0, -1, 1, 0], atol=1e-15)

    def test_source_support_as_candidates(self, caplog):
        delta = AtomicMeasure.from_arrays([0.3, -0.2j], [1.0, 2.0])
        candidates = tuple(Point.of(z) for z in delta.locations)
        result = solve_moment_balayage(MomentProblem(source=delta, candidates=candidates, degree_bound=1))
        assert result.status == SolveStatus.FEASIBLE
        np.testing.assert_allclose(result.measure.masses, [1.0, 2.0], atol=1e-12)
        assert result.constraints == 3
        assert "candidates" in caplog.text

    def test_circle_candidates_reproduce_moments(self):
        delta = AtomicMeasure.dirac(0.5)
        candidates = tuple(Point.of(z) for z in circle_points(0j, 1.0, 64))
        result = solve_moment_balayage(MomentProblem(source=delta, candidates=candidates, degree_bound=3), tol=1e-9)
        assert result.status == SolveStatus.FEASIBLE
        assert all(m >= 0 for m in result.measure.masses)
        assert check_mon_balayage(delta, result.measure, 3, tol=1e-7).verdict == Verdict.YES

    def test_regularized_solve_is_feasible(self):
        delta = AtomicMeasure.dirac(-0.25j)
        candidates = tuple(Point.of(z) for z in circle_points(0j, 1.0, 32))
        problem = MomentProblem(
            source=delta,
            candidates=candidates,
            degree_bound=2,
            regularization=Regularization.MIN_TOTAL_VARIATION,
        )
        result = solve_moment_balayage(problem, tol=1e-6)
        assert result.status == SolveStatus.FEASIBLE

    def test_infeasible(self):
        problem = MomentProblem(source=AtomicMeasure.dirac(0j), candidates=(Point(re=2.0, im=0.0),), degree_bound=1)
        result = solve_moment_balayage(problem)
        assert result.status == SolveStatus.INFEASIBLE
        assert result.measure is None
        assert result.residual == pytest.approx(math.sqrt(0.8), rel=1e-12)

    def test_order_below_one_matches_mass_only(self):
        problem = MomentProblem(source=AtomicMeasure.dirac(0j, 3.0), candidates=(Point(re=5.0, im=5.0),), degree_bound=0.5)
        result = solve_moment_balayage(problem)
        assert result.constraints == 1
        assert result.measure.total_mass == pytest.approx(3.0)

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValidationError):
            MomentProblem(source=AtomicMeasure.dirac(0j), candidates=(), degree_bound=1)


class TestPotentialPair:
    def test_returns_riesz_measures(self):
        v = PotentialSpec(measure=AtomicMeasure.dirac(1.0), harmonic_part=Polynomial([1, 2]))
        d = PotentialSpec(measure=AtomicMeasure.dirac(0.5), harmonic_part=Polynomial([1, 2]))
        omega, delta = discretize_potential_pair(v, d)
        assert omega == AtomicMeasure.dirac(1.0)
        assert delta == AtomicMeasure.dirac(0.5)

    def test_different_harmonic_parts_logged(self, caplog):
        v = PotentialSpec(measure=AtomicMeasure.dirac(1.0), harmonic_part=Polynomial([0, 1]))
        d = PotentialSpec(measure=AtomicMeasure.dirac(0.5))
        discretize_potential_pair(v, d)
        assert "harmonic parts" in caplog.text
