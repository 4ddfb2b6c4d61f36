import math
import warnings

import json
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cgopt.errors import ConfigurationError
from cgopt.stats import RunSet, build_table, summarize, wilcoxon_ranksum

from oracles import ranksum_exact_pvalue


class TestSummarize:
    def test_hand_values(self):
        s = summarize([1.0, 2.0, 3.0])
        assert (s.best, s.mean, s.std) == (1.0, 2.0, 1.0)

    def test_single_value_warns(self):
        with pytest.warns(RuntimeWarning):
            s = summarize([7.0])
        assert (s.best, s.mean, s.std) == (7.0, 7.0, 0.0)

    def test_all_equal(self):
        assert summarize([4.0] * 5).std == 0.0

    def test_runset_skips_failures(self):
        rs = RunSet("cgo", "p", [1.0, math.inf, 3.0], [0, 1, 2])
        s = summarize(rs)
        assert (s.best, s.mean) == (1.0, 2.0) and rs.failures == 1

    def test_runset_all_failed(self):
        rs = RunSet("cgo", "p", [math.inf] * 3, [0, 1, 2])
        assert summarize(rs).best == math.inf

    def test_runset_validation(self):
        with pytest.raises(ConfigurationError):
            RunSet("a", "p", [], [])
        with pytest.raises(ConfigurationError):
            RunSet("a", "p", [1.0, 2.0], [0, 0])


class TestRankSum:
    def test_identical_samples(self):
        assert wilcoxon_ranksum([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0

    def test_all_values_equal(self):
        assert wilcoxon_ranksum([5.0] * 4, [5.0] * 6) == 1.0

    def test_separated_fives(self):
        a, b = [1, 2, 3, 4, 5], [10, 11, 12, 13, 14]
        exact = ranksum_exact_pvalue(np.array(a, float), np.array(b, float))
        assert exact == pytest.approx(2 / 252)
        assert abs(wilcoxon_ranksum(a, b) - exact) <= 0.01

    def test_minimum_size(self):
        with pytest.raises(ConfigurationError):
            wilcoxon_ranksum([1, 2], [3, 4, 5])

    def test_large_sample_agreement(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=30), rng.normal(0.5, 1, size=30)
        from scipy.stats import mannwhitneyu

        ref = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True).pvalue
        assert wilcoxon_ranksum(a, b) == pytest.approx(ref, rel=1e-10)

    def test_ties_agree_with_reference(self):
        a = [1, 2, 2, 3, 3, 3, 4]
        b = [2, 3, 4, 4, 5, 5]
        from scipy.stats import mannwhitneyu

        ref = mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True).pvalue
        assert wilcoxon_ranksum(a, b) == pytest.approx(ref, rel=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=12),
        st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=12),
        st.floats(-1e3, 1e3),
    )
    def test_symmetry_and_shift(self, a, b, c):
        p = wilcoxon_ranksum(a, b)
        assert 0.0 < p <= 1.0
        assert p == wilcoxon_ranksum(b, a)
        a2, b2 = np.array(a) + c, np.array(b) + c
        # the shift must keep the ordering of values intact
        if np.array_equal(np.argsort(np.r_[a, b], kind="stable"), np.argsort(np.r_[a2, b2], kind="stable")) and len(
            np.unique(np.r_[a, b])
        ) == len(np.unique(np.r_[a2, b2])):
            assert wilcoxon_ranksum(a2, b2) == p

    def test_monotone_separation(self):
        # shift b further in the direction its rank sum already leans
        rng = np.random.default_rng(7)
        for _ in range(40):
            n, m = rng.integers(3, 9, size=2)
            a, b = rng.normal(size=n), rng.normal(size=m)
            lean = 1.0 if np.mean(b) >= np.mean(a) else -1.0
            approx, exact = [], []
            for delta in np.linspace(0, 6, 13):
                approx.append(wilcoxon_ranksum(a, b + lean * delta))
                exact.append(ranksum_exact_pvalue(a, b + lean * delta))
            if np.sign(np.mean(b) - np.mean(a)) == np.sign(
                np.mean(np.r_[a, b].argsort().argsort()[n:]) - (n + m - 1) / 2
            ):
                assert all(y <= x + 1e-12 for x, y in zip(approx, approx[1:]))
                assert all(y <= x + 1e-12 for x, y in zip(exact, exact[1:]))


class TestTable:
    def table(self):
        rs = [
            RunSet("cgo", "p1", [1.0, 2.0, 3.0], [0, 1, 2]),
            RunSet("pso", "p1", [4.0, 5.0, math.inf], [0, 1, 2]),
        ]
        return build_table(rs, report_failures=True)

    def test_csv_layout(self):
        lines = self.table().to_csv().splitlines()
        assert lines[0] == "problem,metric,cgo,pso"
        assert lines[1] == "p1,best,1.0,4.0"
        assert lines[4] == "p1,failed_runs,0,1"

    def test_json_nulls_and_header(self):
        doc = json.loads(self.table().to_json())
        assert doc["std_denominator"] == "n-1"
        assert doc["pvalues"][0]["algorithm_a"] == "cgo"
        assert all(r["values"]["cgo"] is not None for r in doc["rows"])

    def test_best_not_above_mean(self):
        t = self.table()
        for s in t.summaries.values():
            assert s.best <= s.mean and s.std >= 0

    def test_pvalues_csv(self):
        lines = self.table().pvalues_csv().splitlines()
        assert lines[0] == "problem,algorithm_a,algorithm_b,p_value" and len(lines) == 2


def test_exact_oracle_cross_check():
    from scipy.stats import mannwhitneyu

    rng = np.random.default_rng(11)
    for _ in range(20):
        n, m = rng.integers(3, 7, size=2)
        a, b = rng.normal(size=n), rng.normal(size=m)
        ref = mannwhitneyu(a, b, alternative="two-sided", method="exact").pvalue
        assert ranksum_exact_pvalue(a, b) == pytest.approx(ref, abs=1e-12)
