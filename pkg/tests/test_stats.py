import math

import numpy as np
import pytest
from scipy.special import ndtri

from ekmonoid.core import ALL_ONES, ALTERNATING, LINEAR, LOG_DIVISOR, indicator
from ekmonoid.errors import EmptySampleError, TheoremPairingError, UnsupportedSubsetError
from ekmonoid.instances import gaussian_instance, integers_instance
from ekmonoid.sieve import SubsetSpec, scan_elements
from ekmonoid.stats import (
    GAUSSIAN_MOMENTS,
    ScoreSet,
    check_pairing,
    default_k_norm,
    empirical_cdf_table,
    ks_vs_gaussian,
    mean_omega_check,
    moment_report,
    standardized_scores,
)

INT = integers_instance()


def make_scoreset(values, x=100):
    arr = np.asarray(values, dtype=np.float64)
    return ScoreSet("integers", SubsetSpec(), "omega", 1.0, 1, x,
                    arr, arr.copy(), 0, len(arr))


class TestPairingGuard:
    def test_defaults(self):
        assert default_k_norm(SubsetSpec()) == 1
        assert default_k_norm(SubsetSpec.parse("hfree:3")) == 1
        assert default_k_norm(SubsetSpec.parse("hfull:4")) == 4

    def test_omega_k_only_over_matching_h_full(self):
        check_pairing(SubsetSpec.parse("hfull:2"), indicator(2), 2)
        with pytest.raises(TheoremPairingError):
            check_pairing(SubsetSpec.parse("hfull:3"), indicator(2), 2)
        with pytest.raises(TheoremPairingError):
            check_pairing(SubsetSpec.parse("hfree:3"), indicator(2), 1, derived=True)

    def test_omega1_over_h_free_allowed(self):
        check_pairing(SubsetSpec.parse("hfree:2"), indicator(1), 1)

    def test_explicit_zero_normalizer_is_value_error(self):
        with pytest.raises(ValueError) as err:
            check_pairing(SubsetSpec(), indicator(2), 1)
        assert not isinstance(err.value, TheoremPairingError)

    def test_presets_over_h_full(self):
        spec = SubsetSpec.parse("hfull:2")
        for w in (ALL_ONES, LINEAR, LOG_DIVISOR, ALTERNATING):
            check_pairing(spec, w, 2)


class TestStandardizedScores:
    def test_boundary_norm_unit_denominator(self):
        # an element of norm 16 > e^e: log log 16 = 1.0199... close to 1;
        # verify the exact formula instead at a crafted norm
        sc = standardized_scores(INT, 20, SubsetSpec(), ALL_ONES)
        n = 16
        lln = math.log(math.log(n))
        idx = list(np.nonzero(np.arange(3, 21))[0])
        # omega(16) = 1
        expected = (1 - lln) / math.sqrt(lln)
        pos = n - 3  # scores ordered by n = 3..20
        assert sc.scores[pos] == pytest.approx(expected)

    def test_fast_path_matches_per_element_recomputation(self):
        x = 10**4
        sc = standardized_scores(INT, x, SubsetSpec(), ALL_ONES)
        direct = []
        for f in scan_elements(INT, x):
            n = f.norm()
            if n < 3:
                continue
            lln = math.log(math.log(n))
            direct.append((f.omega() - lln) / math.sqrt(lln))
        assert sorted(direct) == pytest.approx(sorted(sc.scores.tolist()), abs=1e-12)

    def test_excluded_small(self):
        sc = standardized_scores(INT, 10**4, SubsetSpec(), ALL_ONES)
        assert sc.excluded_small == 2  # the identity and n = 2
        assert sc.n_samples + sc.excluded_small == sc.subset_count == 10**4
        hfull = standardized_scores(INT, 10**4, SubsetSpec.parse("hfull:2"), ALL_ONES)
        assert hfull.excluded_small == 1  # identity only

    def test_generic_path_matches_fast_path(self):
        x = 3000
        spec = SubsetSpec.parse("hfull:2")
        fast = standardized_scores(INT, x, spec, LINEAR)
        slow_vals = []
        for f in scan_elements(INT, x, spec):
            n = f.norm()
            if n < 3:
                continue
            lln = math.log(math.log(n))
            slow_vals.append((f.big_omega() / 2 - lln) / math.sqrt(lln))
        assert sorted(slow_vals) == pytest.approx(sorted(fast.scores.tolist()), abs=1e-12)

    def test_gaussian_instance_scores(self):
        g = gaussian_instance()
        sc = standardized_scores(g, 10**4, SubsetSpec(), ALL_ONES)
        assert sc.n_samples > 7000
        assert np.isfinite(sc.scores).all()


class TestKS:
    def test_gaussian_quantiles(self):
        n = 1000
        q = ndtri((np.arange(1, n + 1) - 0.5) / n)
        assert ks_vs_gaussian(q) <= 1 / (2 * n) + 1e-6

    def test_point_mass_at_zero(self):
        assert ks_vs_gaussian(np.zeros(100)) == pytest.approx(0.5)

    def test_empty_sample(self):
        with pytest.raises(EmptySampleError):
            ks_vs_gaussian(np.empty(0))

    def test_trend_small_ladder(self):
        k4 = ks_vs_gaussian(standardized_scores(INT, 10**4, SubsetSpec(), ALL_ONES))
        k6 = ks_vs_gaussian(standardized_scores(INT, 10**6, SubsetSpec(), ALL_ONES))
        assert k6 < k4


class TestMoments:
    def test_gaussian_moment_table(self):
        assert [GAUSSIAN_MOMENTS[r] for r in (1, 2, 3, 4)] == [0.0, 1.0, 0.0, 3.0]
        assert GAUSSIAN_MOMENTS[6] == 15.0 and GAUSSIAN_MOMENTS[8] == 105.0

    def test_synthetic_normal_sample(self):
        rng = np.random.default_rng(42)
        sc = make_scoreset(rng.standard_normal(10**6))
        rep = moment_report(sc, 4)
        for r, emp, mu, diff in rep.moment_table:
            assert diff < 0.02

    def test_constant_scores(self):
        c = 1.5
        rep = moment_report(make_scoreset([c] * 10), 4)
        for r, emp, mu, diff in rep.moment_table:
            assert emp == pytest.approx(c**r)

    def test_r_max_validation(self):
        sc = make_scoreset([0.0, 1.0])
        with pytest.raises(ValueError):
            moment_report(sc, 9)
        with pytest.raises(EmptySampleError):
            moment_report(make_scoreset([1.0]), 4)

    def test_density_weight(self):
        sc = standardized_scores(INT, 1000, SubsetSpec(), ALL_ONES)
        rep = moment_report(sc, 2)
        assert rep.density_weight == pytest.approx(1 / 1000)


class TestMeanOmega:
    def test_small_x_reports_without_asserting(self):
        emp, pred, gap = mean_omega_check(INT, 10, SubsetSpec.parse("hfree:2"))
        assert emp == sum(f.omega() for f in scan_elements(INT, 10, SubsetSpec.parse("hfree:2")))
        assert math.isfinite(pred)
        assert gap >= 0

    def test_empirical_sum_matches_enumeration(self):
        x = 10**4
        spec = SubsetSpec.parse("hfull:2")
        emp, _, _ = mean_omega_check(INT, x, spec)
        assert emp == sum(f.omega() for f in scan_elements(INT, x, spec))

    def test_rejects_all_subset(self):
        with pytest.raises(UnsupportedSubsetError):
            mean_omega_check(INT, 100, SubsetSpec())


class TestCdfTable:
    def test_columns_and_monotonicity(self):
        sc = standardized_scores(INT, 10**4, SubsetSpec(), ALL_ONES)
        rows = empirical_cdf_table(sc, points=128)
        emp = [r[1] for r in rows]
        phi = [r[2] for r in rows]
        assert emp == sorted(emp)
        assert phi == sorted(phi)
        assert rows[-1][1] == 1.0
        assert 0.0 <= rows[0][1] <= 0.05
