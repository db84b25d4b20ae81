import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gentleleak.leakage import (
    GentleLeakageInterval,
    LeakageEstimate,
    OptimizerConfig,
    depolarized_leakage,
    gentle_leakage_interval,
    leakage_upper_bound,
    maximal_quantum_leakage,
    qubit_grid_oracle,
    sibson_infinity,
)
from gentleleak.linalg import haar_unitary, random_density, trace_distance
from gentleleak.measurements import GentlenessSpec, born_probabilities
from gentleleak.states import (
    CqEnsemble,
    DensityOperator,
    apply_unitary,
    bb84_ensemble,
    depolarize,
    pure_state,
    unitary_disturbance,
)

FAST = OptimizerConfig(starts=4, evals_per_start=400)


@pytest.fixture
def bb84():
    return bb84_ensemble()


def random_qubit_ensemble(rng):
    n = int(rng.integers(2, 5))
    probs = rng.uniform(0.2, 1.0, n)
    probs /= probs.sum()
    states = tuple(
        DensityOperator(random_density(2, rng, rank=int(rng.integers(1, 3)))) for _ in range(n)
    )
    return CqEnsemble(probs, states)


class TestSibson:
    def test_independent_channel_is_zero(self):
        p = np.full((3, 4), 1.0 / 3.0)
        assert sibson_infinity(p) == 0.0

    def test_identity_channel(self):
        assert sibson_infinity(np.eye(4)) == pytest.approx(2.0)

    def test_bb84_x_basis_gives_one_bit(self, bb84):
        from gentleleak.measurements import projective_povm

        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        p = born_probabilities(bb84, projective_povm(h).povm)
        assert sibson_infinity(p) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            sibson_infinity(np.array([[0.5, 0.5], [0.1, 0.1]]))
        with pytest.raises(ValueError):
            sibson_infinity(np.array([1.0, 0.0]))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_bounded_by_outcome_count(self, seed):
        rng = np.random.default_rng(seed)
        ny, nx = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        p = rng.uniform(0.0, 1.0, (ny, nx)) + 1e-6
        p /= p.sum(axis=0, keepdims=True)
        val = sibson_infinity(p)
        assert 0.0 <= val <= np.log2(ny) + 1e-12


class TestUpperBound:
    def test_bb84(self, bb84):
        assert leakage_upper_bound(bb84) == pytest.approx(2.0)

    def test_single_item(self):
        e = CqEnsemble(np.array([1.0]), (pure_state([1, 0]),))
        assert leakage_upper_bound(e) == 0.0

    def test_three_symbols_dim_four(self):
        rng = np.random.default_rng(0)
        states = tuple(DensityOperator(random_density(4, rng)) for _ in range(3))
        e = CqEnsemble(np.full(3, 1 / 3), states)
        assert leakage_upper_bound(e) == pytest.approx(np.log2(3.0))


class TestDepolarizedLeakage:
    def test_endpoints(self):
        assert depolarized_leakage(1.0, 1.0) == 0.0
        assert depolarized_leakage(1.0, 0.0) == 1.0

    def test_half(self):
        assert depolarized_leakage(1.0, 0.5) == pytest.approx(np.log2(1.5))

    @given(st.floats(0.001, 2.0), st.floats(0.0, 1.0, exclude_max=True), st.floats(0.0, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_strictly_decreasing_when_positive(self, bits, p_lo, p_hi):
        lo, hi = sorted((p_lo, p_hi))
        if hi > lo:
            assert depolarized_leakage(bits, hi) < depolarized_leakage(bits, lo) + 1e-15


class TestMaximalLeakage:
    def test_identical_states_exact_zero(self):
        e = CqEnsemble(np.array([0.5, 0.5]), (pure_state([1, 0]), pure_state([1, 0])))
        est = maximal_quantum_leakage(e, FAST)
        assert est.bits == 0.0
        assert est.kind == "exact-commuting"

    def test_commuting_closed_form(self):
        e = CqEnsemble(
            np.array([0.5, 0.5]),
            (DensityOperator(np.diag([1.0, 0.0])), DensityOperator(np.diag([0.25, 0.75]))),
        )
        est = maximal_quantum_leakage(e, FAST)
        assert est.kind == "exact-commuting"
        assert est.bits == pytest.approx(np.log2(1.75), abs=1e-12)
        # independent check: the exhaustive qubit scan reaches the same value
        assert qubit_grid_oracle(e, 361).bits == pytest.approx(est.bits, abs=1e-9)

    def test_bb84_one_bit(self, bb84):
        est = maximal_quantum_leakage(bb84, FAST)
        assert est.kind == "optimizer-lower"
        assert est.bits == pytest.approx(1.0, abs=1e-3)

    def test_achieving_povm_reproduces_value(self, bb84):
        est = maximal_quantum_leakage(bb84, FAST)
        assert est.achieving_povm is not None
        recomputed = sibson_infinity(born_probabilities(bb84, est.achieving_povm))
        assert recomputed == pytest.approx(est.bits, abs=1e-9)

    def test_zero_implies_identical_states(self):
        # positivity converse: a ~zero estimate forces ~identical states
        rng = np.random.default_rng(77)
        for _ in range(10):
            e = random_qubit_ensemble(rng)
            est = maximal_quantum_leakage(e, FAST)
            max_dist = max(
                trace_distance(e.states[i].mat, e.states[j].mat)
                for i in range(len(e))
                for j in range(i + 1, len(e))
            )
            assert max_dist <= 2.0**est.bits - 1.0 + 1e-8

    def test_respects_structural_cap(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            e = random_qubit_ensemble(rng)
            est = maximal_quantum_leakage(e, FAST)
            assert est.bits <= leakage_upper_bound(e) + 1e-9

    def test_estimate_validation(self):
        with pytest.raises(ValueError):
            LeakageEstimate(bits=-0.5, kind="grid-oracle")
        with pytest.raises(ValueError):
            LeakageEstimate(bits=0.5, kind="mystery")


class TestGridOracle:
    def test_bb84_hits_one_bit(self, bb84):
        est = qubit_grid_oracle(bb84, 721)
        assert est.bits >= 1.0 - 1e-6
        assert est.kind == "grid-oracle"

    def test_identical_states(self):
        e = CqEnsemble(np.array([0.5, 0.5]), (pure_state([1, 0]), pure_state([1, 0])))
        assert qubit_grid_oracle(e, 91).bits == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_pair_perfectly_distinguishable(self):
        e = CqEnsemble(np.array([0.5, 0.5]), (pure_state([1, 0]), pure_state([0, 1])))
        assert qubit_grid_oracle(e, 91).bits == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_qubit(self):
        rng = np.random.default_rng(0)
        states = tuple(DensityOperator(random_density(3, rng)) for _ in range(2))
        e = CqEnsemble(np.array([0.5, 0.5]), states)
        with pytest.raises(ValueError):
            qubit_grid_oracle(e)

    def test_rotation_stability(self, bb84):
        base = qubit_grid_oracle(bb84, 361).bits
        rng = np.random.default_rng(11)
        for _ in range(5):
            rotated = apply_unitary(bb84, haar_unitary(2, rng))
            assert qubit_grid_oracle(rotated, 361).bits == pytest.approx(base, abs=1e-6)


class TestOptimizerVsOracle:
    def test_fifty_random_ensembles(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            e = random_qubit_ensemble(rng)
            opt = maximal_quantum_leakage(e, OptimizerConfig(starts=4, evals_per_start=300))
            orc = qubit_grid_oracle(e, 181)
            assert opt.bits >= orc.bits - 1e-3


class TestDepolarizingConsistency:
    @pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_oracle_matches_closed_form(self, p, bb84):
        base = qubit_grid_oracle(bb84, 361).bits
        noisy = qubit_grid_oracle(depolarize(bb84, p), 361).bits if p < 1.0 else None
        expected = depolarized_leakage(base, p)
        if p == 1.0:
            e = depolarize(bb84, 1.0)
            est = maximal_quantum_leakage(e, FAST)
            assert est.bits == 0.0
        else:
            assert noisy == pytest.approx(expected, abs=1e-6)


class TestUnitaryInvariance:
    def test_oracle_and_optimizer(self, bb84):
        rng = np.random.default_rng(31)
        base_oracle = qubit_grid_oracle(bb84, 361).bits
        base_opt = maximal_quantum_leakage(bb84, FAST).bits
        for _ in range(5):
            rotated = apply_unitary(bb84, haar_unitary(2, rng))
            assert qubit_grid_oracle(rotated, 361).bits == pytest.approx(base_oracle, abs=1e-6)
            assert maximal_quantum_leakage(rotated, FAST).bits == pytest.approx(
                base_opt, abs=2e-3
            )


class TestGentleInterval:
    def test_saturates_at_alpha_one(self, bb84):
        iv = gentle_leakage_interval(bb84, GentlenessSpec(1.0, 0.3), FAST)
        assert iv.lower_bits == iv.upper_bits

    def test_saturates_at_delta_one(self, bb84):
        iv = gentle_leakage_interval(bb84, GentlenessSpec(0.2, 1.0), FAST)
        assert iv.lower_bits == iv.upper_bits

    def test_bb84_alpha_point_one(self, bb84):
        iv = gentle_leakage_interval(bb84, GentlenessSpec(0.1, 0.2), FAST)
        assert iv.lower_bits >= 0.7608 - 5e-4
        assert iv.upper_bits <= 1.0 + 1e-9
        assert iv.lower_witness == "cloning-bound"

    def test_identical_states_interval_is_zero(self):
        e = CqEnsemble(np.array([0.5, 0.5]), (pure_state([1, 0]), pure_state([1, 0])))
        iv = gentle_leakage_interval(e, GentlenessSpec(0.3, 0.1), FAST)
        assert iv.lower_bits == pytest.approx(0.0, abs=1e-12)
        assert iv.upper_bits == pytest.approx(0.0, abs=1e-12)

    def test_lower_non_decreasing_in_alpha(self, bb84):
        prev = -1.0
        for alpha in (0.0, 0.05, 0.1, 0.3, 0.6, 1.0):
            iv = gentle_leakage_interval(bb84, GentlenessSpec(alpha, 0.05), FAST)
            assert iv.lower_bits >= prev - 1e-9
            prev = iv.lower_bits

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            GentleLeakageInterval(
                lower_bits=0.9, upper_bits=0.5, lower_witness="cloning-bound",
                spec=GentlenessSpec(0.1, 0.1),
            )


class TestWeakDpiAtBoundLevel:
    def test_rotations_never_beat_shifted_alpha(self, bb84):
        from gentleleak.cloning import cloning_lower_bound

        rng = np.random.default_rng(13)
        alpha = 0.15
        for _ in range(5):
            u = haar_unitary(2, rng)
            rotated = apply_unitary(bb84, u)
            beta = unitary_disturbance(bb84, u)
            q_rot = qubit_grid_oracle(rotated, 361).bits
            q_base = qubit_grid_oracle(bb84, 361).bits
            lhs = cloning_lower_bound(rotated, alpha, q_rot).lower_bits
            rhs = cloning_lower_bound(bb84, min(alpha + beta, 1.0), q_base).lower_bits
            assert lhs <= rhs + 1e-9
