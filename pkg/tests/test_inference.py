"""Tests for the statistics, permutation machinery, and the seven tests."""

import dataclasses

import numpy as np
import pytest

from metricmanova.errors import DegenerateDataError
from metricmanova.estimators import MomentSet, moment_set
from metricmanova.inference import (
    TEST_NAMES,
    _pillai_trace,
    anova_stats_covariance,
    anova_stats_variance,
    permutation_pvalue,
    pillai_adapted,
    pillai_distance,
    r_statistic,
    run_test,
    run_tests,
)
from metricmanova.samples import GroupedMultiSample
from metricmanova.spaces import distance_matrix_space, euclidean_space

from oracles import (
    oracle_fa_stats,
    oracle_pillai_adapted,
    oracle_pillai_distance,
    oracle_profiles_euclidean,
    oracle_profiles_from_matrices,
    oracle_r_statistics,
)

# fixed 4-observation toy: two distance-matrix spaces, two groups of two.
# medoid means keep the moment variances strictly positive.
TOY4_DIST_A = np.array(
    [
        [0.0, 3.0, 5.0, 6.0],
        [3.0, 0.0, 4.0, 5.0],
        [5.0, 4.0, 0.0, 2.0],
        [6.0, 5.0, 2.0, 0.0],
    ]
)
TOY4_DIST_B = np.array(
    [
        [0.0, 1.0, 2.0, 2.0],
        [1.0, 0.0, 2.0, 2.0],
        [2.0, 2.0, 0.0, 1.5],
        [2.0, 2.0, 1.5, 0.0],
    ]
)
TOY4_LABELS = [1, 1, 2, 2]

# fixed 8-observation toy: 1-D and 2-D Euclidean-L2 spaces, two groups of
# four.  The values keep every within-group distance correlation strictly
# inside (-1, 1) so the correlation matrices stay positive definite.
TOY8_X = np.array([0.0, 1.5, 3.0, 7.0, 10.0, 12.0, 15.0, 11.0])
TOY8_Y = np.array(
    [
        [0.0, 0.0],
        [1.0, 2.5],
        [2.0, 0.5],
        [3.0, 4.0],
        [8.0, 7.0],
        [9.0, 9.5],
        [6.0, 8.0],
        [10.0, 10.0],
    ]
)
TOY8_LABELS = [1, 1, 1, 1, 2, 2, 2, 2]


def toy4_ms() -> GroupedMultiSample:
    return GroupedMultiSample(
        [distance_matrix_space("A", TOY4_DIST_A), distance_matrix_space("B", TOY4_DIST_B)],
        TOY4_LABELS,
    )


def toy8_ms() -> GroupedMultiSample:
    return GroupedMultiSample(
        [euclidean_space("x", TOY8_X[:, None]), euclidean_space("y", TOY8_Y)],
        TOY8_LABELS,
    )


def random_two_group_ms(rng, n1=14, n2=18) -> GroupedMultiSample:
    x = rng.normal(size=(n1 + n2, 1))
    y = rng.normal(size=(n1 + n2, 3))
    labels = np.array([1] * n1 + [2] * n2)
    return GroupedMultiSample(
        [euclidean_space("x", x), euclidean_space("y", y)], labels
    )


class TestAnovaStatistics:
    def test_toy4_matches_oracle(self):
        ms = toy4_ms()
        per_group, pooled = oracle_profiles_from_matrices(
            [TOY4_DIST_A, TOY4_DIST_B], TOY4_LABELS
        )
        F_o, U_o, T_o = oracle_fa_stats(per_group, pooled, TOY4_LABELS)
        for s in range(2):
            F, U, T = anova_stats_variance(ms, s)
            assert F == pytest.approx(F_o[(s, s)], rel=1e-12)
            assert U == pytest.approx(U_o[(s, s)], rel=1e-12)
            assert T == pytest.approx(T_o[(s, s)], rel=1e-12)
        F, U, T = anova_stats_covariance(ms, 0, 1)
        assert F == pytest.approx(F_o[(0, 1)], rel=1e-12)
        assert U == pytest.approx(U_o[(0, 1)], rel=1e-12)
        assert T == pytest.approx(T_o[(0, 1)], rel=1e-12)

    def test_toy8_matches_oracle(self):
        ms = toy8_ms()
        per_group, pooled = oracle_profiles_euclidean([TOY8_X, TOY8_Y], TOY8_LABELS)
        F_o, U_o, T_o = oracle_fa_stats(per_group, pooled, TOY8_LABELS)
        for s in range(2):
            F, U, T = anova_stats_variance(ms, s)
            assert F == pytest.approx(F_o[(s, s)], rel=1e-12)
            assert U == pytest.approx(U_o[(s, s)], rel=1e-12)
            assert T == pytest.approx(T_o[(s, s)], rel=1e-12)
        F, U, T = anova_stats_covariance(ms, 0, 1)
        assert F == pytest.approx(F_o[(0, 1)], rel=1e-12)
        assert U == pytest.approx(U_o[(0, 1)], rel=1e-12)
        assert T == pytest.approx(T_o[(0, 1)], rel=1e-12)

    def test_two_point_exact_mean_groups_are_degenerate(self):
        # groups {0,2} and {0,6} on the line have variances 1 and 9, but each
        # two-point group is equidistant from its mean, so the moment
        # variance vanishes and U/T are undefined
        from metricmanova.samples import frechet_mean, frechet_variance

        ms = GroupedMultiSample(
            [euclidean_space("e", np.array([[0.0], [2.0], [0.0], [6.0]]))],
            [1, 1, 2, 2],
        )
        space = ms.spaces[0]
        v1 = frechet_variance(space, frechet_mean(space, [0, 1]), [0, 1])
        v2 = frechet_variance(space, frechet_mean(space, [2, 3]), [2, 3])
        assert v1 == pytest.approx(1.0)
        assert v2 == pytest.approx(9.0)
        with pytest.raises(DegenerateDataError):
            anova_stats_variance(ms, 0)

    def test_identical_groups_are_zero(self):
        rng = np.random.default_rng(61)
        x = rng.normal(size=(9, 2))
        ms = GroupedMultiSample(
            [euclidean_space("e", np.vstack([x, x]))], [1] * 9 + [2] * 9
        )
        F, U, T = anova_stats_variance(ms, 0)
        assert F == pytest.approx(0.0, abs=1e-12)
        assert U == pytest.approx(0.0, abs=1e-20)
        assert T == pytest.approx(0.0, abs=1e-12)

    def test_scaling_property(self):
        rng = np.random.default_rng(62)
        pts = rng.normal(size=(20, 1))
        labels = [1] * 10 + [2] * 10
        c = 2.5
        ms1 = GroupedMultiSample([euclidean_space("e", pts)], labels)
        ms2 = GroupedMultiSample([euclidean_space("e", c * pts)], labels)
        F1, U1, T1 = anova_stats_variance(ms1, 0)
        F2, U2, T2 = anova_stats_variance(ms2, 0)
        assert F2 == pytest.approx(c * c * F1, rel=1e-12)
        assert T2 == pytest.approx(T1, rel=1e-10)  # T is scale-free

    def test_u_single_pair_reduction(self):
        rng = np.random.default_rng(63)
        ms = random_two_group_ms(rng, n1=10, n2=10)
        m = moment_set(ms)
        _, U, _ = anova_stats_variance(ms, 0)
        v = m.group_variances[:, 0]
        mv = m.moment_var[:, 0, 0]
        expected = m.gammas[0] * m.gammas[1] * (v[0] - v[1]) ** 2 / (mv[0] * mv[1])
        assert U == pytest.approx(expected, rel=1e-12)

    def test_same_space_pair_rejected(self):
        with pytest.raises(ValueError):
            anova_stats_covariance(toy8_ms(), 1, 1)

    def test_degenerate_space_forces_error(self):
        # one space with all-identical objects has zero distances everywhere,
        # so every covariance product vanishes and the T denominator with it
        rng = np.random.default_rng(59)
        live = rng.normal(size=(12, 1))
        frozen = np.zeros((12, 1))
        ms = GroupedMultiSample(
            [euclidean_space("live", live), euclidean_space("frozen", frozen)],
            [1] * 6 + [2] * 6,
        )
        with pytest.raises(DegenerateDataError):
            anova_stats_covariance(ms, 0, 1)

    def test_invariant_under_observation_reordering(self):
        rng = np.random.default_rng(60)
        x = rng.normal(size=(20, 1))
        y = rng.normal(size=(20, 2))
        labels = np.array([1] * 10 + [2] * 10)
        perm = rng.permutation(20)
        ms1 = GroupedMultiSample(
            [euclidean_space("x", x), euclidean_space("y", y)], labels
        )
        ms2 = GroupedMultiSample(
            [euclidean_space("x", x[perm]), euclidean_space("y", y[perm])],
            labels[perm],
        )
        for s in range(2):
            for a, b in zip(anova_stats_variance(ms1, s), anova_stats_variance(ms2, s)):
                assert a == pytest.approx(b, rel=1e-12, abs=1e-15)
        for a, b in zip(
            anova_stats_covariance(ms1, 0, 1), anova_stats_covariance(ms2, 0, 1)
        ):
            assert a == pytest.approx(b, rel=1e-12, abs=1e-15)


class TestRStatistic:
    def test_identical_groups_zero(self):
        rng = np.random.default_rng(64)
        x = rng.normal(size=(9, 2))
        ms = GroupedMultiSample(
            [euclidean_space("e", np.vstack([x, x]))], [1] * 9 + [2] * 9
        )
        m = moment_set(ms)
        for kind in ("Euc", "AIRM", "LERM"):
            for target in ("mean", "cov", "cor"):
                assert r_statistic(kind, target, m) == pytest.approx(0.0, abs=1e-9)

    def _synthetic_moments(self, group_cov, pooled, gammas) -> MomentSet:
        group_cov = np.asarray(group_cov, float)
        J, S, _ = group_cov.shape
        gammas = np.asarray(gammas, float)
        weighted = np.einsum("j,jst->st", gammas, group_cov)
        return MomentSet(
            group_ids=np.arange(J),
            counts=(gammas * 100).astype(int),
            gammas=gammas,
            group_means=tuple(tuple() for _ in range(J)),
            pooled_means=tuple(),
            group_cov=group_cov,
            group_cor=np.broadcast_to(np.eye(S), (J, S, S)).copy(),
            moment_var=np.ones((J, S, S)),
            pooled_cov=np.asarray(pooled, float),
            weighted_cov=weighted,
        )

    def test_airm_cov_closed_form(self):
        m = self._synthetic_moments(
            [np.diag([np.e, 1.0]), np.eye(2)], np.eye(2), [0.5, 0.5]
        )
        assert r_statistic("AIRM", "cov", m) == pytest.approx(0.25)

    def test_euc_mean_closed_form(self):
        weighted = np.array([[2.0, 0.3], [0.3, 1.0]])
        pooled = weighted + np.diag([1.0, 0.0])
        m = self._synthetic_moments([weighted, weighted], pooled, [0.5, 0.5])
        assert r_statistic("Euc", "mean", m) == pytest.approx(1.0)

    def test_toy8_matches_oracle_all_kinds(self):
        ms = toy8_ms()
        m = moment_set(ms)
        per_group, pooled = oracle_profiles_euclidean([TOY8_X, TOY8_Y], TOY8_LABELS)
        for kind in ("Euc", "AIRM", "LERM"):
            r_mean, r_cov, r_cor = oracle_r_statistics(per_group, pooled, TOY8_LABELS, kind)
            assert r_statistic(kind, "mean", m) == pytest.approx(r_mean, rel=1e-9)
            assert r_statistic(kind, "cov", m) == pytest.approx(r_cov, rel=1e-9)
            assert r_statistic(kind, "cor", m) == pytest.approx(r_cor, rel=1e-9)

    def test_label_relabeling_invariance(self):
        rng = np.random.default_rng(65)
        ms = random_two_group_ms(rng)
        swapped = ms.with_labels(np.where(np.asarray(ms.labels) == 1, 5, 0))
        m1, m2 = moment_set(ms), moment_set(swapped)
        for kind in ("Euc", "AIRM", "LERM"):
            for target in ("mean", "cov", "cor"):
                assert r_statistic(kind, target, m1) == pytest.approx(
                    r_statistic(kind, target, m2), rel=1e-12
                )


class TestPillai:
    def test_adapted_equal_matrices(self):
        rng = np.random.default_rng(66)
        x = rng.normal(size=(9, 2))
        ms = GroupedMultiSample(
            [euclidean_space("e", np.vstack([x, x]))], [1] * 9 + [2] * 9
        )
        assert pillai_adapted(moment_set(ms)) == pytest.approx(0.0, abs=1e-12)

    def test_adapted_scalar_multiple(self):
        rng = np.random.default_rng(67)
        ms = random_two_group_ms(rng)
        m = moment_set(ms)
        doubled = dataclasses.replace(m, pooled_cov=2.0 * m.weighted_cov)
        S = m.pooled_cov.shape[0]
        assert pillai_adapted(doubled) == pytest.approx(S / 2.0)

    def test_adapted_hand_inverse_2x2(self):
        pooled = np.array([[2.0, 0.5], [0.5, 1.0]])
        weighted = np.array([[1.5, 0.2], [0.2, 0.8]])
        det = pooled[0, 0] * pooled[1, 1] - pooled[0, 1] * pooled[1, 0]
        inv = np.array([[pooled[1, 1], -pooled[0, 1]], [-pooled[1, 0], pooled[0, 0]]]) / det
        expected = 2.0 - np.trace(weighted @ inv)
        rng = np.random.default_rng(68)
        m = moment_set(random_two_group_ms(rng))
        synthetic = dataclasses.replace(m, pooled_cov=pooled, weighted_cov=weighted)
        assert pillai_adapted(synthetic) == pytest.approx(expected, rel=1e-12)

    def test_adapted_toy8_matches_oracle(self):
        ms = toy8_ms()
        per_group, pooled = oracle_profiles_euclidean([TOY8_X, TOY8_Y], TOY8_LABELS)
        assert pillai_adapted(moment_set(ms)) == pytest.approx(
            oracle_pillai_adapted(per_group, pooled, TOY8_LABELS), rel=1e-12
        )

    def test_distance_toy8_matches_oracle(self):
        ms = toy8_ms()
        per_group, _ = oracle_profiles_euclidean([TOY8_X, TOY8_Y], TOY8_LABELS)
        V_o, _, _, _, p_o = oracle_pillai_distance(per_group, TOY8_LABELS)
        V, p = pillai_distance(ms)
        assert V == pytest.approx(V_o, rel=1e-12)
        assert p == pytest.approx(p_o, rel=1e-9)

    def test_distance_identical_groups(self):
        rng = np.random.default_rng(69)
        x = rng.normal(size=(9, 2))
        ms = GroupedMultiSample(
            [euclidean_space("e", np.vstack([x, x]))], [1] * 9 + [2] * 9
        )
        V, p = pillai_distance(ms)
        assert V == pytest.approx(0.0, abs=1e-12)
        assert p == pytest.approx(1.0, abs=1e-12)

    def test_distance_disjoint_supports(self):
        x = np.array([0.0, 0.1, 0.2, 0.3, 100.0, 100.1, 100.2, 100.3])
        spread = np.array([1.0, 2.0, 3.0, 4.0, 10.0, 20.0, 30.0, 40.0])
        ms = GroupedMultiSample(
            [euclidean_space("a", spread[:, None])], TOY8_LABELS
        )
        V, _ = pillai_distance(ms)
        assert V > 0.5  # far from 0, approaching its bound s = 1

    def test_distance_sample_size_precondition(self):
        ms = toy4_ms()
        with pytest.raises(ValueError):
            pillai_distance(ms)  # n - J - S = 0

    def test_affine_column_invariance(self):
        rng = np.random.default_rng(70)
        prof = rng.uniform(0.5, 2.0, size=(16, 2))
        labels = np.array([0] * 8 + [1] * 8)

        def trace_of(profile):
            counts = np.array([8.0, 8.0])
            col_mean = np.stack([profile[labels == j].mean(axis=0) for j in range(2)])
            centered = np.stack(
                [np.cov(profile[labels == j].T, bias=True) for j in range(2)]
            )
            return _pillai_trace(counts, col_mean, centered, 16)

        v1 = trace_of(prof)
        transformed = prof.copy()
        transformed[:, 1] = -3.0 * transformed[:, 1] + 7.0
        v2 = trace_of(transformed)
        assert v1 == pytest.approx(v2, rel=1e-10)


class TestThreeGroups:
    """The pair sums and Bonferroni layers are J-generic; check them at J=3."""

    X3 = np.array([0.0, 1.5, 3.0, 7.0, 4.0, 9.0, 2.0, 5.0, 11.0, 6.0, 13.0, 8.0])
    Y3 = np.array(
        [
            [0.0, 1.0], [2.0, 0.5], [1.0, 3.0], [4.0, 2.0],
            [5.0, 7.0], [8.0, 6.0], [6.0, 9.0], [9.0, 8.5],
            [3.0, 12.0], [12.0, 11.0], [10.0, 14.0], [13.0, 10.0],
        ]
    )
    LBL3 = [1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3]

    def _ms(self):
        return GroupedMultiSample(
            [euclidean_space("x", self.X3[:, None]), euclidean_space("y", self.Y3)],
            self.LBL3,
        )

    def test_fa_stats_match_oracle(self):
        ms = self._ms()
        per_group, pooled = oracle_profiles_euclidean([self.X3, self.Y3], self.LBL3)
        F_o, U_o, T_o = oracle_fa_stats(per_group, pooled, self.LBL3)
        for s in range(2):
            F, U, T = anova_stats_variance(ms, s)
            assert F == pytest.approx(F_o[(s, s)], rel=1e-12)
            assert U == pytest.approx(U_o[(s, s)], rel=1e-12)
            assert T == pytest.approx(T_o[(s, s)], rel=1e-12)
        F, U, T = anova_stats_covariance(ms, 0, 1)
        assert U == pytest.approx(U_o[(0, 1)], rel=1e-12)
        assert T == pytest.approx(T_o[(0, 1)], rel=1e-12)

    def test_r_statistics_match_oracle(self):
        ms = self._ms()
        m = moment_set(ms)
        per_group, pooled = oracle_profiles_euclidean([self.X3, self.Y3], self.LBL3)
        for kind in ("Euc", "AIRM", "LERM"):
            r_mean, r_cov, r_cor = oracle_r_statistics(per_group, pooled, self.LBL3, kind)
            assert r_statistic(kind, "mean", m) == pytest.approx(r_mean, rel=1e-9)
            assert r_statistic(kind, "cov", m) == pytest.approx(r_cov, rel=1e-9)
            assert r_statistic(kind, "cor", m) == pytest.approx(r_cor, rel=1e-9)

    def test_pillai_distance_matches_oracle(self):
        ms = self._ms()
        per_group, _ = oracle_profiles_euclidean([self.X3, self.Y3], self.LBL3)
        V_o, _, _, _, p_o = oracle_pillai_distance(per_group, self.LBL3)
        V, p = pillai_distance(ms)
        assert V == pytest.approx(V_o, rel=1e-12)
        assert p == pytest.approx(p_o, rel=1e-9)

    def test_run_test_chi2_df_is_two(self):
        from metricmanova.distributions import chi2_upper_quantile

        report = run_test("T_FA", self._ms(), alpha=0.05, B=1, seed=1)
        assert report.components[0].threshold == pytest.approx(
            chi2_upper_quantile(2, 2 * 0.05 / 6)
        )


class TestRidgeRepair:
    def test_rank_deficient_groups(self):
        # two-point groups in distance-matrix spaces yield rank-one group
        # covariance matrices and exactly singular correlation matrices
        ms = toy4_ms()
        from metricmanova.errors import SingularMatrixError

        with pytest.raises(SingularMatrixError):
            run_test("R_LERM", ms, B=5, seed=2)
        report = run_test("R_LERM", ms, B=5, seed=2, ridge=True)
        assert len(report.components) == 3
        assert all(np.isfinite(c.statistic) for c in report.components)
        report_euc = run_test("R_Euc", ms, B=5, seed=2)  # Euc needs no repair
        assert len(report_euc.components) == 3
        # a pencil of two differently-oriented ridged rank-one matrices has a
        # generalized condition number beyond double precision: AIRM still
        # reports the singularity rather than returning noise
        with pytest.raises(SingularMatrixError):
            run_test("R_AIRM", ms, B=5, seed=2, ridge=True)


class TestPermutationPvalue:
    def test_constant_statistic(self):
        rng = np.random.default_rng(71)
        ms = random_two_group_ms(rng, n1=6, n2=6)
        p = permutation_pvalue(lambda m: 1.0, ms, B=25, seed=3)
        assert p == 1.0

    def test_observed_strictly_greatest(self):
        rng = np.random.default_rng(72)
        ms = random_two_group_ms(rng, n1=10, n2=10)
        original = np.asarray(ms.labels).copy()

        def indicator(m):
            return float(np.array_equal(np.asarray(m.labels), original))

        B = 40
        p = permutation_pvalue(indicator, ms, B=B, seed=5)
        assert p == pytest.approx(1.0 / (B + 1))

    def test_determinism(self):
        rng = np.random.default_rng(73)
        ms = random_two_group_ms(rng)
        stat = lambda m: r_statistic("Euc", "cov", moment_set(m))
        p1 = permutation_pvalue(stat, ms, B=19, seed=11)
        p2 = permutation_pvalue(stat, ms, B=19, seed=11)
        assert p1 == p2

    def test_b_validation(self):
        rng = np.random.default_rng(74)
        ms = random_two_group_ms(rng)
        with pytest.raises(ValueError):
            permutation_pvalue(lambda m: 1.0, ms, B=0, seed=1)


class TestRunTest:
    def test_unknown_name(self):
        rng = np.random.default_rng(75)
        with pytest.raises(ValueError):
            run_test("R_Wasserstein", random_two_group_ms(rng), seed=1)

    def test_report_structure_and_levels(self):
        rng = np.random.default_rng(76)
        ms = random_two_group_ms(rng)
        alpha = 0.05
        for name in TEST_NAMES:
            report = run_test(name, ms, alpha=alpha, B=19, seed=2)
            assert report.test_name == name
            assert report.global_reject == any(c.reject for c in report.components)
            for c in report.components:
                if c.p_value is not None:
                    assert 0.0 < c.p_value <= 1.0
            if name.startswith("R_"):
                assert len(report.components) == 3
                assert all(c.level == pytest.approx(alpha / 3) for c in report.components)
            elif name.startswith("T_FA"):
                assert len(report.components) == 3  # S=2: T_1, T_2, T_1_2
                assert all(
                    c.level == pytest.approx(2 * alpha / 6) for c in report.components
                )
            else:
                assert len(report.components) == 1
                assert report.components[0].level == pytest.approx(alpha)

    def test_identical_duplicated_groups_never_reject(self):
        rng = np.random.default_rng(77)
        x = rng.normal(size=(10, 2))
        ms = GroupedMultiSample(
            [euclidean_space("e", np.vstack([x, x]))], [1] * 10 + [2] * 10
        )
        for name in TEST_NAMES:
            report = run_test(name, ms, alpha=0.05, B=19, seed=4)
            assert not report.global_reject, name

    def test_deterministic_reports(self):
        rng = np.random.default_rng(78)
        ms = random_two_group_ms(rng)
        r1 = run_test("R_LERM", ms, B=19, seed=9)
        r2 = run_test("R_LERM", ms, B=19, seed=9)
        assert r1 == r2

    def test_run_tests_matches_run_test(self):
        rng = np.random.default_rng(79)
        ms = random_two_group_ms(rng)
        combined = run_tests(["R_Euc", "Pillai", "T_FA"], ms, B=19, seed=6)
        for report in combined:
            alone = run_test(report.test_name, ms, B=19, seed=6)
            assert alone == report

    def test_engine_path_matches_generic_permutation(self):
        rng = np.random.default_rng(80)
        ms = random_two_group_ms(rng, n1=8, n2=8)
        B, seed = 19, 13
        report = run_test("R_AIRM", ms, B=B, seed=seed)
        by_target = {c.name: c for c in report.components}

        def stat_cov(m):
            return r_statistic("AIRM", "cov", moment_set(m))

        p_generic = permutation_pvalue(stat_cov, ms, B=B, seed=seed)
        assert by_target["R_cov_AIRM"].p_value == pytest.approx(p_generic, abs=1e-12)

    def test_medoid_spaces_match_generic_permutation(self):
        # distance-matrix spaces exercise the per-labeling medoid path
        rng = np.random.default_rng(82)
        pts1 = rng.normal(size=(12, 2))
        pts2 = rng.normal(size=(12, 3))
        d1 = np.linalg.norm(pts1[:, None] - pts1[None, :], axis=2)
        d2 = np.linalg.norm(pts2[:, None] - pts2[None, :], axis=2)
        ms = GroupedMultiSample(
            [distance_matrix_space("a", d1), distance_matrix_space("b", d2)],
            [1] * 6 + [2] * 6,
        )
        report = run_test("Pillai", ms, B=19, seed=3)
        p_generic = permutation_pvalue(
            lambda m: pillai_adapted(moment_set(m)), ms, B=19, seed=3
        )
        assert report.components[0].p_value == pytest.approx(p_generic, abs=1e-12)

    def test_t_fa_threshold_is_chi2_quantile(self):
        from metricmanova.distributions import chi2_upper_quantile

        rng = np.random.default_rng(81)
        ms = random_two_group_ms(rng)
        report = run_test("T_FA", ms, alpha=0.05, B=1, seed=1)
        expected = chi2_upper_quantile(1, 2 * 0.05 / 6)
        for c in report.components:
            assert c.threshold == pytest.approx(expected)
        assert report.permutations_used == 0
