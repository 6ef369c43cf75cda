import numpy as np
import pytest

from advloss import (
    Abstain,
    OrdinalAbsolute,
    OrdinalSquared,
    ZeroOne,
    bayes_set,
    build_loss_matrix,
    check_consistency,
    minimize_expected_al,
    nearest_optimal_adversary,
)
from advloss.losses import adversary_optimum, surrogate_loss


class TestBayesSet:
    def test_zero_one_mode(self):
        L = build_loss_matrix(ZeroOne(), 3)
        assert bayes_set(L, [0.5, 0.3, 0.2]) == [1]

    def test_absolute_prefers_median(self):
        L = build_loss_matrix(OrdinalAbsolute(), 3)
        # expected losses per row: [1.0, 0.6, 1.0]
        assert bayes_set(L, [0.3, 0.4, 0.3]) == [2]

    def test_uniform_zero_one_is_full_tie(self):
        L = build_loss_matrix(ZeroOne(), 4)
        assert bayes_set(L, [0.25] * 4) == [1, 2, 3, 4]

    def test_abstain_row_wins_under_high_uncertainty(self):
        L = build_loss_matrix(Abstain(0.5), 4)
        assert bayes_set(L, [0.25] * 4) == [5]


class TestMinimizeExpectedSurrogate:
    def test_binary_zero_one_recovers_mode_and_reflects_loss(self):
        d = np.array([0.6, 0.4])
        f = minimize_expected_al(ZeroOne(), d)
        assert int(np.argmax(f)) == 0
        L = build_loss_matrix(ZeroOne(), 2)
        mirrored = f + L[0]
        assert mirrored.max() - mirrored.min() <= 1e-4

    @pytest.mark.parametrize("spec", [ZeroOne(), OrdinalAbsolute(),
                                      OrdinalSquared(), Abstain(0.4)])
    def test_concentrated_distribution_selects_that_class(self, spec):
        d = np.array([0.98, 0.01, 0.01])
        f = minimize_expected_al(spec, d)
        assert int(np.argmax(f)) == 0

    def test_objective_reaches_bayes_risk(self):
        rng = np.random.default_rng(199)
        for spec in (ZeroOne(), OrdinalAbsolute(), Abstain(0.25)):
            for _ in range(5):
                k = int(rng.integers(2, 5))
                d = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
                f = minimize_expected_al(spec, d)
                L = build_loss_matrix(spec, k)
                g = sum(d[y] * surrogate_loss(spec, f, y + 1) for y in range(k))
                assert g == pytest.approx((L @ d).min(), abs=1e-7)

    def test_abstain_strategy_achieves_bayes_risk(self):
        from advloss import solve_predictor_game

        spec = Abstain(0.5)
        d = np.array([0.4, 0.35, 0.25])
        f = minimize_expected_al(spec, d)
        L = build_loss_matrix(spec, 3)
        p = solve_predictor_game(L, f).p
        assert p @ (L @ d) == pytest.approx((L @ d).min(), abs=1e-3)

    def test_rejects_bad_distributions(self):
        with pytest.raises(ValueError):
            minimize_expected_al(ZeroOne(), [0.5, 0.5, 0.0])
        with pytest.raises(ValueError):
            minimize_expected_al(ZeroOne(), [0.7, 0.7])


class TestStationarityCertificate:
    def test_optimal_face_contains_point_near_d(self):
        rng = np.random.default_rng(211)
        for spec in (ZeroOne(), OrdinalAbsolute()):
            for _ in range(5):
                k = int(rng.integers(2, 5))
                d = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
                f = minimize_expected_al(spec, d)
                L = build_loss_matrix(spec, k)
                q = nearest_optimal_adversary(L, f, d, opt_slack=1e-7)
                assert np.max(np.abs(q - d)) <= 5e-3


class TestCheckConsistency:
    @pytest.mark.parametrize("spec", [ZeroOne(), OrdinalAbsolute(),
                                      OrdinalSquared(), Abstain(0.5)])
    def test_no_violations_small_battery(self, spec):
        for k in (2, 3):
            report = check_consistency(spec, k, trials=8, seed=5)
            assert report.violations == 0, report.to_text()

    def test_report_text_shape(self):
        report = check_consistency(ZeroOne(), 3, trials=3, seed=1)
        text = report.to_text()
        lines = text.splitlines()
        assert len(lines) == 4
        assert "violation" in lines[0]
        for line in lines[1:]:
            assert "d=" in line and "bayes=" in line

    def test_containment_with_ties_allows_subset(self):
        # ties in the Bayes set: the argmax may be any subset of it
        d = np.array([0.45, 0.45, 0.10])
        f = minimize_expected_al(ZeroOne(), d)
        L = build_loss_matrix(ZeroOne(), 3)
        bayes = set(bayes_set(L, d, tol=1e-9))
        argmax_set = {int(i) + 1 for i in np.flatnonzero(f >= f.max() - 1e-3)}
        assert argmax_set <= bayes


class TestSubgradientStructure:
    def test_expected_subgradient_is_witness_minus_d(self):
        # the driver the optimizer relies on: grad g(f) = q*(f) - d
        rng = np.random.default_rng(223)
        for spec in (ZeroOne(), OrdinalAbsolute(), Abstain(0.25)):
            k = 4
            d = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
            f = rng.normal(size=k)
            objective, q = adversary_optimum(spec, f)
            g = sum(d[y] * surrogate_loss(spec, f, y + 1) for y in range(k))
            assert g == pytest.approx(objective - d @ f, abs=1e-12)
