import numpy as np
import pytest

from advloss import (
    Abstain,
    AlphaOutOfRange,
    General,
    OrdinalAbsolute,
    OrdinalSquared,
    UnsupportedBase,
    Weighted,
    ZeroOne,
    adversary_optimum,
    al_abstain,
    al_general,
    al_ordinal_abs,
    al_ordinal_sq,
    al_weighted,
    al_zero_one,
    build_loss_matrix,
    solve_adversary_game,
    surrogate_loss,
)

from oracles import (
    abstain_oracle,
    ordinal_abs_oracle,
    ordinal_sq_oracle,
    zero_one_oracle,
    zero_one_oracle_fast,
)

ALL_SPECS = [
    ZeroOne(),
    OrdinalAbsolute(),
    OrdinalSquared(),
    Abstain(0.25),
    Abstain(0.5),
    Weighted(ZeroOne(), 2.0),
    Weighted(OrdinalAbsolute(), 0.5),
    Weighted(OrdinalSquared(), 1.5),
]


class TestZeroOne:
    def test_flat_potentials_three_classes(self):
        # full-support candidate (0 + 0 + 0 + 2)/3 beats sizes 1 and 2
        assert al_zero_one([0.0, 0.0, 0.0], 1) == pytest.approx(2.0 / 3.0)

    @pytest.mark.parametrize("t", [1.0, 1.5, 4.0])
    def test_margin_at_least_one_gives_zero(self, t):
        assert al_zero_one([t, 0.0], 1) == pytest.approx(0.0)

    def test_matches_subset_enumeration(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            k = int(rng.integers(2, 13))
            f = rng.normal(scale=2.0, size=k)
            y = int(rng.integers(1, k + 1))
            assert al_zero_one(f, y) == pytest.approx(
                zero_one_oracle(f, y), abs=1e-12)

    def test_matches_enumeration_up_to_fifteen_classes(self):
        rng = np.random.default_rng(11)
        for k in range(2, 16):
            for _ in range(5):
                f = rng.normal(scale=3.0, size=k)
                y = int(rng.integers(1, k + 1))
                assert al_zero_one(f, y) == pytest.approx(
                    zero_one_oracle_fast(f, y), abs=1e-12)

    def test_tied_potentials_still_match_oracle(self):
        f = np.array([1.0, 1.0, 0.0, 0.0])
        for y in range(1, 5):
            assert al_zero_one(f, y) == pytest.approx(zero_one_oracle(f, y))


class TestOrdinalAbsolute:
    def test_flat_potentials_three_classes(self):
        # i = 1, j = 3: (0 + 0 + 3 - 1)/2
        assert al_ordinal_abs([0.0, 0.0, 0.0], 1) == pytest.approx(1.0)

    def test_single_class_is_zero(self):
        assert al_ordinal_abs([3.7], 1) == pytest.approx(0.0)

    def test_matches_pair_enumeration(self):
        rng = np.random.default_rng(13)
        for _ in range(300):
            k = int(rng.integers(2, 13))
            f = rng.normal(scale=2.0, size=k)
            y = int(rng.integers(1, k + 1))
            assert al_ordinal_abs(f, y) == pytest.approx(
                ordinal_abs_oracle(f, y), abs=1e-12)


class TestOrdinalSquared:
    def test_flat_potentials_three_classes(self):
        # triple (1, 2, 3): (3*1 + 1*1)/4 beats the single-support branch
        assert al_ordinal_sq([0.0, 0.0, 0.0], 1) == pytest.approx(1.0)

    def test_dominant_potential_hits_single_branch(self):
        assert al_ordinal_sq([10.0, 0.0, 0.0], 1) == pytest.approx(0.0)

    def test_matches_triple_enumeration(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            k = int(rng.integers(1, 9))
            f = rng.normal(scale=2.0, size=k)
            y = int(rng.integers(1, k + 1))
            assert al_ordinal_sq(f, y) == pytest.approx(
                ordinal_sq_oracle(f, y), abs=1e-12)

    def test_binary_case_collapses_to_zero_one(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            f = rng.normal(size=2)
            y = int(rng.integers(1, 3))
            assert al_ordinal_sq(f, y) == pytest.approx(al_zero_one(f, y))
            assert al_ordinal_abs(f, y) == pytest.approx(al_zero_one(f, y))


class TestAbstain:
    def test_flat_binary_half_penalty(self):
        assert al_abstain([0.0, 0.0], 1, 0.5) == pytest.approx(0.5)

    def test_single_branch_dominates(self):
        # max{(2/3)*2 + 0 + 1/3, 2} - 2 = 0
        assert al_abstain([2.0, 0.0, 0.0], 1, 1.0 / 3.0) == pytest.approx(0.0)

    @pytest.mark.parametrize("alpha", [-0.01, 0.51, 2.0])
    def test_alpha_out_of_range(self, alpha):
        with pytest.raises(AlphaOutOfRange):
            al_abstain([0.0, 1.0], 1, alpha)

    def test_matches_hyperplane_enumeration(self):
        rng = np.random.default_rng(23)
        for alpha in (0.0, 0.25, 0.5):
            for _ in range(200):
                k = int(rng.integers(2, 11))
                f = rng.normal(scale=2.0, size=k)
                y = int(rng.integers(1, k + 1))
                assert al_abstain(f, y, alpha) == pytest.approx(
                    abstain_oracle(f, y, alpha), abs=1e-12)


class TestWeighted:
    def test_doubled_zero_one_offsets(self):
        assert al_weighted([0.0, 0.0, 0.0], 1, ZeroOne(), 2.0) == pytest.approx(4.0 / 3.0)

    def test_tripled_absolute(self):
        assert al_weighted([0.0, 0.0, 0.0], 1, OrdinalAbsolute(), 3.0) == pytest.approx(3.0)

    def test_unit_weight_is_identity(self):
        rng = np.random.default_rng(29)
        for _ in range(60):
            k = int(rng.integers(2, 9))
            f = rng.normal(size=k)
            y = int(rng.integers(1, k + 1))
            assert al_weighted(f, y, ZeroOne(), 1.0) == pytest.approx(al_zero_one(f, y))
            assert al_weighted(f, y, OrdinalAbsolute(), 1.0) == pytest.approx(
                al_ordinal_abs(f, y))
            assert al_weighted(f, y, OrdinalSquared(), 1.0) == pytest.approx(
                al_ordinal_sq(f, y))

    def test_matches_weighted_enumeration(self):
        rng = np.random.default_rng(31)
        for _ in range(150):
            k = int(rng.integers(2, 9))
            f = rng.normal(scale=2.0, size=k)
            y = int(rng.integers(1, k + 1))
            w = float(rng.uniform(0.2, 4.0))
            assert al_weighted(f, y, ZeroOne(), w) == pytest.approx(
                zero_one_oracle(f, y, w), abs=1e-12)
            assert al_weighted(f, y, OrdinalAbsolute(), w) == pytest.approx(
                ordinal_abs_oracle(f, y, w), abs=1e-12)
            assert al_weighted(f, y, OrdinalSquared(), w) == pytest.approx(
                ordinal_sq_oracle(f, y, w), abs=1e-12)

    def test_rejects_unsupported_base(self):
        with pytest.raises(UnsupportedBase):
            al_weighted([0.0, 0.0], 1, Abstain(0.25), 2.0)


class TestGeneral:
    def test_zero_matrix_reduces_to_potential_gap(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            k = int(rng.integers(2, 7))
            f = rng.normal(size=k)
            y = int(rng.integers(1, k + 1))
            assert al_general(f, y, np.zeros((k, k))) == pytest.approx(
                f.max() - f[y - 1], abs=1e-9)

    def test_recovers_zero_one_closed_form(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            k = int(rng.integers(2, 7))
            f = rng.normal(size=k)
            y = int(rng.integers(1, k + 1))
            L = build_loss_matrix(ZeroOne(), k)
            assert al_general(f, y, L) == pytest.approx(al_zero_one(f, y), abs=1e-9)

    def test_recovers_absolute_closed_form(self):
        rng = np.random.default_rng(43)
        for _ in range(50):
            k = int(rng.integers(2, 7))
            f = rng.normal(size=k)
            y = int(rng.integers(1, k + 1))
            L = build_loss_matrix(OrdinalAbsolute(), k)
            assert al_general(f, y, L) == pytest.approx(al_ordinal_abs(f, y), abs=1e-9)


class TestSharedInvariants:
    @pytest.mark.parametrize("spec", ALL_SPECS)
    def test_closed_form_equals_lp(self, spec):
        rng = np.random.default_rng(47)
        for _ in range(40):
            k = int(rng.integers(2, 9))
            f = rng.normal(scale=2.0, size=k)
            y = int(rng.integers(1, k + 1))
            L = build_loss_matrix(spec, k)
            lp = solve_adversary_game(L, f).value - f[y - 1]
            assert surrogate_loss(spec, f, y) == pytest.approx(lp, abs=1e-9)

    @pytest.mark.parametrize("spec", ALL_SPECS)
    def test_non_negative_with_zero_diagonal(self, spec):
        rng = np.random.default_rng(53)
        for _ in range(60):
            k = int(rng.integers(2, 9))
            f = rng.normal(scale=3.0, size=k)
            y = int(rng.integers(1, k + 1))
            assert surrogate_loss(spec, f, y) >= -1e-12

    @pytest.mark.parametrize("spec", ALL_SPECS)
    def test_pure_strategy_lower_bound(self, spec):
        rng = np.random.default_rng(59)
        for _ in range(40):
            k = int(rng.integers(2, 7))
            f = rng.normal(scale=2.0, size=k)
            y = int(rng.integers(1, k + 1))
            L = build_loss_matrix(spec, k)
            value = surrogate_loss(spec, f, y)
            for other in range(k):
                bound = L[:, other].min() + f[other] - f[y - 1]
                assert value >= bound - 1e-9

    @pytest.mark.parametrize("spec", ALL_SPECS)
    def test_translation_invariance(self, spec):
        rng = np.random.default_rng(61)
        for _ in range(40):
            k = int(rng.integers(2, 9))
            f = rng.normal(size=k)
            y = int(rng.integers(1, k + 1))
            c = float(rng.normal(scale=5.0))
            assert surrogate_loss(spec, f + c, y) == pytest.approx(
                surrogate_loss(spec, f, y), abs=1e-10)

    @pytest.mark.parametrize("spec", ALL_SPECS)
    def test_convexity_in_potentials(self, spec):
        rng = np.random.default_rng(67)
        for _ in range(40):
            k = int(rng.integers(2, 8))
            f1 = rng.normal(scale=2.0, size=k)
            f2 = rng.normal(scale=2.0, size=k)
            t = float(rng.uniform())
            y = int(rng.integers(1, k + 1))
            mix = surrogate_loss(spec, t * f1 + (1 - t) * f2, y)
            hull = t * surrogate_loss(spec, f1, y) + (1 - t) * surrogate_loss(spec, f2, y)
            assert mix <= hull + 1e-12

    def test_witness_distribution_is_a_distribution(self):
        rng = np.random.default_rng(71)
        for spec in ALL_SPECS:
            for _ in range(30):
                k = int(rng.integers(2, 9))
                f = rng.normal(size=k)
                _, q = adversary_optimum(spec, f)
                assert np.all(q >= 0)
                assert q.sum() == pytest.approx(1.0, abs=1e-12)


class TestWeightedScaling:
    """The game with matrix w*L at potentials f is w times the game
    with L at potentials f/w, so supports, slacks, and values all carry
    over through that dilation."""

    @pytest.mark.parametrize("base", [ZeroOne(), OrdinalAbsolute(), OrdinalSquared()])
    def test_weighted_witness_optimal_after_dilation(self, base):
        rng = np.random.default_rng(73)
        for _ in range(40):
            k = int(rng.integers(2, 8))
            f = rng.normal(scale=2.0, size=k)
            w = float(rng.uniform(0.3, 4.0))
            best_w, q_w = adversary_optimum(Weighted(base, w), f)
            L = build_loss_matrix(base, k)
            scaled_down = solve_adversary_game(L, f / w)
            objective = (L @ q_w).min() + (f / w) @ q_w
            assert objective == pytest.approx(scaled_down.value, abs=1e-9)
            assert best_w == pytest.approx(w * scaled_down.value, abs=1e-8)

    @pytest.mark.parametrize("base", [ZeroOne(), OrdinalAbsolute(), OrdinalSquared()])
    def test_lp_slack_and_witness_scale_with_weight(self, base):
        rng = np.random.default_rng(79)
        for _ in range(25):
            k = int(rng.integers(2, 7))
            f = rng.normal(scale=2.0, size=k)
            w = float(rng.uniform(0.3, 4.0))
            L = build_loss_matrix(base, k)
            plain = solve_adversary_game(L, f / w)
            scaled = solve_adversary_game(w * L, f)
            assert scaled.v == pytest.approx(w * plain.v, abs=1e-8)
            np.testing.assert_allclose(scaled.q, plain.q, atol=1e-8)


class TestValidation:
    def test_rejects_out_of_range_label(self):
        with pytest.raises(ValueError):
            al_zero_one([0.0, 1.0], 3)

    def test_rejects_non_finite_potentials(self):
        with pytest.raises(ValueError):
            al_zero_one([np.inf, 0.0], 1)

    def test_general_spec_dispatch(self):
        f = np.array([0.5, -0.2, 0.1])
        spec = General(build_loss_matrix(ZeroOne(), 3))
        assert surrogate_loss(spec, f, 2) == pytest.approx(
            al_zero_one(f, 2), abs=1e-9)
