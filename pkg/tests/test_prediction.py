import numpy as np
import pytest

from advloss import (
    ABSTAIN,
    Abstain,
    AlphaOutOfRange,
    General,
    LinearModel,
    MulticlassFeatures,
    SchemeUnavailable,
    ZeroOne,
    build_loss_matrix,
    predict_abstain,
    predict_argmax,
    predict_probabilistic,
    solve_predictor_game,
)


def model_with_potentials(f, spec):
    """Identity-input model whose potentials at x = e_1 are exactly f."""
    f = np.asarray(f, dtype=float)
    k = f.shape[0]
    fmap = MulticlassFeatures(1, k)
    return LinearModel(theta=f.copy(), feature_map=fmap, loss_spec=spec, lam=0.0)


X1 = np.array([1.0])


class TestArgmax:
    def test_plain_argmax(self):
        model = model_with_potentials([0.2, 0.9, 0.1], ZeroOne())
        assert predict_argmax(model, X1).label == 2

    def test_tie_goes_to_lowest_index(self):
        model = model_with_potentials([1.0, 1.0, 0.0], ZeroOne())
        assert predict_argmax(model, X1).label == 1

    def test_abstain_spec_rejected(self):
        model = model_with_potentials([0.0, 1.0], Abstain(0.5))
        with pytest.raises(SchemeUnavailable):
            predict_argmax(model, X1)

    def test_rectangular_general_rejected(self):
        L = np.vstack([build_loss_matrix(ZeroOne(), 2), [0.3, 0.3]])
        model = model_with_potentials([0.0, 1.0], General(L))
        with pytest.raises(SchemeUnavailable):
            predict_argmax(model, X1)


class TestProbabilistic:
    def test_confident_instance_is_pure(self):
        model = model_with_potentials([10.0, 0.0, 0.0], ZeroOne())
        pred = predict_probabilistic(model, X1)
        assert pred.label == 1
        np.testing.assert_allclose(pred.distribution, [1.0, 0.0, 0.0], atol=1e-9)

    def test_symmetric_binary_game_splits_and_breaks_ties_low(self):
        model = model_with_potentials([0.0, 0.0], ZeroOne())
        pred = predict_probabilistic(model, X1)
        np.testing.assert_allclose(pred.distribution, [0.5, 0.5], atol=1e-9)
        assert pred.label == 1

    def test_label_is_argmax_of_distribution(self):
        rng = np.random.default_rng(181)
        for _ in range(25):
            k = int(rng.integers(2, 6))
            model = model_with_potentials(rng.normal(size=k), ZeroOne())
            pred = predict_probabilistic(model, X1)
            assert pred.label == int(np.argmax(pred.distribution)) + 1

    def test_abstain_spec_maps_extra_option(self):
        # alpha < 1/2 keeps the game's optimum unique
        model = model_with_potentials([0.1, 0.0], Abstain(1.0 / 3.0))
        pred = predict_probabilistic(model, X1)
        assert pred.distribution.shape == (3,)
        np.testing.assert_allclose(pred.distribution, [0.1, 0.0, 0.9], atol=1e-9)
        assert pred.label is ABSTAIN

    def test_agrees_with_closed_form_rule_on_random_potentials(self):
        rng = np.random.default_rng(191)
        for _ in range(200):
            k = int(rng.integers(2, 6))
            alpha = float(rng.uniform(0.0, 0.5))
            f = rng.normal(size=k)
            model = model_with_potentials(f, Abstain(alpha))
            closed = predict_abstain(model, X1)
            L = build_loss_matrix(Abstain(alpha), k)
            lp_value = solve_predictor_game(L, f).value
            worst = (L.T @ closed.distribution + f).max()
            assert worst == pytest.approx(lp_value, abs=1e-9)

    def test_label_agrees_with_closed_form_away_from_degeneracy(self):
        # at alpha = 1/2 two facets collide and the optimum is a face,
        # so label agreement is only guaranteed for alpha < 1/2
        rng = np.random.default_rng(192)
        for _ in range(60):
            k = int(rng.integers(2, 5))
            alpha = float(rng.uniform(0.05, 0.45))
            f = rng.normal(size=k)
            model = model_with_potentials(f, Abstain(alpha))
            lp = predict_probabilistic(model, X1)
            closed = predict_abstain(model, X1)
            assert lp.label == closed.label
            np.testing.assert_allclose(lp.distribution, closed.distribution,
                                       atol=1e-8)


class TestAbstainRule:
    def test_gap_above_half_predicts(self):
        model = model_with_potentials([0.6, 0.0, 0.0], Abstain(0.5))
        pred = predict_abstain(model, X1)
        assert pred.label == 1
        np.testing.assert_allclose(pred.distribution, [0.6, 0, 0, 0.4], atol=1e-12)

    def test_gap_below_half_abstains_with_split_mass(self):
        model = model_with_potentials([0.3, 0.0, 0.0], Abstain(0.5))
        pred = predict_abstain(model, X1)
        assert pred.label is ABSTAIN
        np.testing.assert_allclose(pred.distribution, [0.3, 0, 0, 0.7], atol=1e-12)

    def test_gap_above_one_is_pure(self):
        model = model_with_potentials([1.4, 0.0], Abstain(0.25))
        pred = predict_abstain(model, X1)
        assert pred.label == 1
        np.testing.assert_allclose(pred.distribution, [1.0, 0.0, 0.0], atol=1e-12)

    def test_boundary_gap_exactly_half_predicts(self):
        model = model_with_potentials([0.5, 0.0], Abstain(0.5))
        assert predict_abstain(model, X1).label == 1

    def test_label_matches_distribution_argmax(self):
        rng = np.random.default_rng(193)
        for _ in range(100):
            k = int(rng.integers(2, 6))
            model = model_with_potentials(rng.normal(size=k), Abstain(0.5))
            pred = predict_abstain(model, X1)
            best = int(np.argmax(pred.distribution))
            if pred.label is ABSTAIN:
                assert best == k
            else:
                assert pred.label == best + 1

    def test_alpha_range_enforced(self):
        model = model_with_potentials([0.0, 1.0], ZeroOne())
        with pytest.raises(AlphaOutOfRange):
            predict_abstain(model, X1, alpha=0.75)

    def test_spec_alpha_used_by_default(self):
        model = model_with_potentials([2.0, 0.0], Abstain(0.125))
        assert predict_abstain(model, X1).label == 1

    def test_missing_alpha_rejected(self):
        model = model_with_potentials([2.0, 0.0], ZeroOne())
        with pytest.raises(SchemeUnavailable):
            predict_abstain(model, X1)


class TestSchemeAgreement:
    def test_argmax_equals_probabilistic_when_confident(self):
        rng = np.random.default_rng(197)
        produced = 0
        while produced < 30:
            k = int(rng.integers(2, 6))
            f = rng.normal(size=k)
            top = int(np.argmax(f))
            f[top] += 1.5  # separation beyond the mixing region
            model = model_with_potentials(f, ZeroOne())
            a = predict_argmax(model, X1)
            b = predict_probabilistic(model, X1)
            assert a.label == b.label
            produced += 1
