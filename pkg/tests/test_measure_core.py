import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from src.errors import DivergentIntegralError, InvalidInputError
from src.schema.measure import Atom, AtomicMeasure, SignedMeasure, TailWeight, tail_weight_for_order
from src.services.measure_core import canonicalize, counting_integral, disk_mass, radial_profile, weighted_tail
from tests.strategies import atomic_measures


class TestDiskMass:
    def test_closed_disk_counts_the_boundary(self):
        m = AtomicMeasure.dirac(1.0, 2.0)
        assert disk_mass(m, 0j, 1.0) == 2.0
        assert disk_mass(m, 0j, 0.999) == 0.0

    def test_empty_measure(self):
        assert disk_mass(AtomicMeasure.empty(), 0j, 5.0) == 0.0

    def test_negative_radius_rejected(self):
        with pytest.raises(InvalidInputError):
            disk_mass(AtomicMeasure.dirac(0j), 0j, -1.0)

    @given(atomic_measures(), st.floats(0, 10), st.floats(0, 10))
    def test_monotone_in_radius(self, m, r1, r2):
        lo, hi = sorted((r1, r2))
        assert disk_mass(m, 0j, lo) <= disk_mass(m, 0j, hi)

    def test_radial_profile_steps(self):
        m = AtomicMeasure.dirac(0.5) + AtomicMeasure.dirac(2.0, 3.0)
        profile = radial_profile(m, [0.25, 0.5, 1.0, 2.0, 4.0])
        assert profile.values == (0.0, 1.0, 1.0, 4.0, 4.0)
        assert profile.at(3.0) == 4.0
        assert profile.at(0.1) == 0.0


class TestCountingIntegral:
    def test_single_atom_inside(self):
        assert counting_integral(AtomicMeasure.dirac(1.0), 0j, 1.0, math.e) == pytest.approx(1.0, abs=1e-15)

    def test_atom_beyond_upper_limit(self):
        assert counting_integral(AtomicMeasure.dirac(2.0), 0j, 0.5, 1.0) == 0.0

    def test_atom_at_center_with_zero_lower_limit_diverges(self):
        with pytest.raises(DivergentIntegralError):
            counting_integral(AtomicMeasure.dirac(0j), 0j, 0.0, 1.0)

    def test_inverted_limits_rejected(self):
        with pytest.raises(InvalidInputError):
            counting_integral(AtomicMeasure.dirac(0j), 0j, 2.0, 1.0)

    @given(
        atomic_measures(),
        st.floats(0.1, 1.0),
        st.floats(0.01, 5.0),
        st.floats(0.01, 5.0),
    )
    def test_additive_in_the_interval(self, m, r, d1, d2):
        R1, R2 = r + d1, r + d1 + d2
        split = counting_integral(m, 0j, r, R1) + counting_integral(m, 0j, R1, R2)
        assert split == pytest.approx(counting_integral(m, 0j, r, R2), rel=1e-12, abs=1e-12)


class TestWeightedTail:
    def test_logarithmic_weight_at_order_zero(self):
        value = weighted_tail(AtomicMeasure.dirac(2.0), 1.0, math.inf, TailWeight())
        assert value == pytest.approx(math.log(2.0), rel=1e-15)

    def test_measure_inside_unit_disk_has_no_tail(self):
        m = AtomicMeasure.dirac(0.5) + AtomicMeasure.dirac(-0.9j)
        assert weighted_tail(m, 1.0, math.inf, TailWeight(power=3)) == 0.0

    @pytest.mark.parametrize(
        "weight, expected",
        [
            (TailWeight(power=1), math.e - 1),
            (TailWeight(power=1, log=True), 1.0),
            (TailWeight(power=0, log=True), 0.5),
        ],
    )
    def test_closed_forms_against_hand_integrals(self, weight, expected):
        value = weighted_tail(AtomicMeasure.dirac(math.e), 1.0, math.inf, weight)
        assert value == pytest.approx(expected, rel=1e-12)

    def test_fractional_order_weight(self):
        weight = tail_weight_for_order(1.5)
        assert weight.power == 1.5 and not weight.log
        assert weighted_tail(AtomicMeasure.dirac(4.0), 1.0, math.inf, weight) == pytest.approx(14 / 3, rel=1e-12)

    def test_finite_upper_limit_truncates(self):
        value = weighted_tail(AtomicMeasure.dirac(4.0), 1.0, 2.0, TailWeight())
        assert value == pytest.approx(math.log(2.0), rel=1e-15)

    def test_lower_limit_below_one_rejected(self):
        with pytest.raises(InvalidInputError):
            weighted_tail(AtomicMeasure.dirac(2.0), 0.5, math.inf, TailWeight())

    def test_integer_order_gets_log_factor(self):
        assert tail_weight_for_order(2).log
        assert tail_weight_for_order(0).log
        assert not tail_weight_for_order(0.3).log


class TestCanonicalize:
    def test_partial_cancellation(self):
        nu = SignedMeasure(plus=AtomicMeasure.dirac(1.0, 2.0), minus=AtomicMeasure.dirac(1.0, 0.5))
        out = canonicalize(nu)
        assert out.plus == AtomicMeasure.dirac(1.0, 1.5)
        assert out.minus.is_empty

    def test_full_cancellation(self):
        nu = SignedMeasure(plus=AtomicMeasure.dirac(0.3j), minus=AtomicMeasure.dirac(0.3j))
        out = canonicalize(nu)
        assert out.plus.is_empty and out.minus.is_empty

    def test_duplicates_merge(self):
        m = AtomicMeasure.dirac(2.0) + AtomicMeasure.dirac(2.0, 3.0)
        assert canonicalize(SignedMeasure.positive(m)).plus == AtomicMeasure.dirac(2.0, 4.0)

    @given(atomic_measures(), atomic_measures())
    @settings(max_examples=50)
    def test_idempotent_and_net_preserving(self, a, b):
        nu = SignedMeasure(plus=a + b, minus=b)
        once = canonicalize(nu)
        assert canonicalize(once) == once
        assert once.net_mass == pytest.approx(nu.net_mass, rel=1e-12, abs=1e-12)
        assert once.plus.total_mass <= nu.plus.total_mass + 1e-12


class TestAtomicMeasure:
    def test_zero_mass_atoms_dropped(self):
        m = AtomicMeasure(atoms=(Atom(re=0, im=0, mass=0.0), Atom(re=1, im=0, mass=1.0)))
        assert len(m.atoms) == 1

    def test_negative_mass_rejected(self):
        with pytest.raises(ValidationError):
            Atom(re=0, im=0, mass=-1.0)

    def test_non_finite_location_rejected(self):
        with pytest.raises(ValidationError):
            Atom(re=math.inf, im=0, mass=1.0)

    def test_json_round_trip_is_exact(self):
        rng = np.random.default_rng(3)
        m = AtomicMeasure.from_arrays(rng.normal(size=5) + 1j * rng.normal(size=5), rng.uniform(0.1, 1, 5))
        assert AtomicMeasure.model_validate_json(m.model_dump_json()) == m
