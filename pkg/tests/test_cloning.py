import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gentleleak.cloning import (
    cloning_lower_bound,
    lower_bound_sweep,
    min_feasible_p2,
    region_disagreement_report,
    region_quadratic_form,
    region_sqrt_form,
)
from gentleleak.states import CqEnsemble, bb84_ensemble, pure_state

unit = st.floats(0.0, 1.0, allow_nan=False)


@pytest.fixture
def bb84():
    return bb84_ensemble()


class TestQuadraticForm:
    def test_full_depolarization_corner(self):
        # hand substitution at d=2: 3+3-6-6-6+3 = -9
        ok, q = region_quadratic_form(1.0, 1.0, 2)
        assert ok and q == pytest.approx(-9.0)

    @given(unit)
    @settings(max_examples=60, deadline=None)
    def test_symmetric_line_reduces_to_quarter(self, p):
        # q(p, p) = -12 p + 3 for d=2, so feasibility means p >= 1/4
        ok, q = region_quadratic_form(p, p, 2)
        assert q == pytest.approx(-12.0 * p + 3.0, abs=1e-9)
        assert ok == (p >= 0.25 - 1e-13)

    def test_boundary_root_at_p1_fifth(self):
        # root of p2^2 - 2.4 p2 + 0.64 = 0
        root = (2.4 - np.sqrt(3.2)) / 2.0
        _, q = region_quadratic_form(0.2, root, 2)
        assert abs(q) <= 1e-9
        assert root == pytest.approx(0.305573, abs=1e-6)

    def test_rejects_out_of_square(self):
        with pytest.raises(ValueError):
            region_quadratic_form(1.2, 0.5, 2)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_convexity_of_qubit_region(self, seed):
        # midpoints of feasible pairs stay feasible for d=2
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0.0, 1.0, size=(250, 2, 2))
        for (a, b) in pts:
            if region_quadratic_form(*a, 2)[0] and region_quadratic_form(*b, 2)[0]:
                mid = (a + b) / 2.0
                ok, q = region_quadratic_form(*mid, 2)
                assert ok or q <= 1e-9


class TestSqrtForm:
    def test_corner_is_defined_and_feasible(self):
        defined, ok, diff = region_sqrt_form(1.0, 1.0, 2)
        assert defined and ok and diff == pytest.approx(-3.0)

    def test_fully_asymmetric_point_saturates(self):
        # (1, 0): lhs = 1*(2*1 + 2) - 1 = 3 = d^2 - 1
        defined, ok, diff = region_sqrt_form(1.0, 0.0, 2)
        assert defined and ok and diff == pytest.approx(0.0, abs=1e-12)

    @given(st.floats(0.0, 0.999))
    @settings(max_examples=40, deadline=None)
    def test_symmetric_line_is_undefined(self, p):
        defined, _, _ = region_sqrt_form(p, p, 2)
        assert not defined

    def test_disagreement_report_runs(self):
        rep = region_disagreement_report(2, 60)
        assert rep["sqrt_defined"] > 0
        tallied = rep["agree_feasible"] + rep["sqrt_only_feasible"] + rep["quad_only_feasible"]
        assert tallied <= rep["sqrt_defined"] <= rep["points"]


class TestMinFeasibleP2:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_matches_dense_scan(self, d):
        grid = np.linspace(0.0, 1.0, 4001)
        for p1 in np.linspace(0.0, 1.0, 41):
            got = min_feasible_p2(float(p1), d)
            feas = [p2 for p2 in grid if region_quadratic_form(float(p1), float(p2), d)[0]]
            if got is None:
                assert not feas
            else:
                assert feas
                assert got == pytest.approx(feas[0], abs=3e-4)

    def test_qubit_closed_form(self):
        # for d=2 the minimal feasible p2 is (1 - sqrt(p1))^2
        for p1 in np.linspace(0.0, 1.0, 101):
            got = min_feasible_p2(float(p1), 2)
            assert got == pytest.approx((1.0 - np.sqrt(p1)) ** 2, abs=1e-10)


class TestLowerBound:
    def test_bb84_anchor(self, bb84):
        r = cloning_lower_bound(bb84, 0.1, 1.0)
        assert r.feasible
        assert r.p1_cap == pytest.approx(0.2, abs=1e-12)
        assert r.p1_star == pytest.approx(0.2, abs=1e-9)
        assert r.p2_star == pytest.approx((2.4 - np.sqrt(3.2)) / 2.0, abs=1e-9)
        assert r.lower_bits == pytest.approx(0.76082, abs=5e-4)
        assert r.slack <= 1e-9

    def test_saturation_above_half(self, bb84):
        r = cloning_lower_bound(bb84, 0.5, 1.0)
        assert r.p2_star == 0.0
        assert r.lower_bits == 1.0

    def test_alpha_zero(self, bb84):
        r = cloning_lower_bound(bb84, 0.0, 1.0)
        assert r.p2_star == pytest.approx(1.0, abs=1e-12)
        assert r.lower_bits == pytest.approx(0.0, abs=1e-12)

    def test_never_exceeds_reference(self, bb84):
        for alpha in np.linspace(0.0, 1.0, 21):
            r = cloning_lower_bound(bb84, float(alpha), 1.0)
            assert r.lower_bits <= 1.0 + 1e-12

    def test_monotone_sweep(self, bb84):
        rows = lower_bound_sweep(bb84, np.linspace(0.0, 1.0, 101), 1.0)
        bits = [r.lower_bits for r in rows]
        assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(bits, bits[1:]))

    def test_identical_states_flat_zero(self):
        e = CqEnsemble(np.array([0.5, 0.5]), (pure_state([1, 0]), pure_state([1, 0])))
        for r in lower_bound_sweep(e, [0.0, 0.3, 0.7, 1.0], 0.0):
            assert r.lower_bits == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed_state_vacuous_cap(self):
        from gentleleak.states import DensityOperator

        e = CqEnsemble(
            np.array([0.5, 0.5]),
            (DensityOperator(np.eye(2) / 2), pure_state([1, 0])),
        )
        r = cloning_lower_bound(e, 0.6, 0.5)
        assert r.p1_cap == 1.0  # the mixed state contributes no constraint

    def test_higher_dimension_runs(self):
        from gentleleak.linalg import random_density
        from gentleleak.states import DensityOperator

        rng = np.random.default_rng(1)
        e = CqEnsemble(
            np.array([0.5, 0.5]),
            (DensityOperator(random_density(3, rng)), DensityOperator(random_density(3, rng))),
        )
        r = cloning_lower_bound(e, 0.3, 1.0)
        assert r.lower_bits >= 0.0
        if r.feasible:
            assert region_quadratic_form(r.p1_star, r.p2_star, 3)[1] <= 1e-9
