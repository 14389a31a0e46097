import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ekmonoid.core import PrimeRef
from ekmonoid.errors import UnsupportedSubsetError
from ekmonoid.instances import integers_instance
from ekmonoid.probmodel import (
    BernoulliSystem,
    build_bernoulli_system,
    condition_a_audit,
    condition_check,
    default_y,
    exact_bernoulli_distribution,
    model_vs_truncated,
    truncation_residual,
)
from ekmonoid.sieve import SubsetSpec, scan_elements

INT = integers_instance()
P2 = PrimeRef(2, "2")
P3 = PrimeRef(3, "3")


class TestDefaultY:
    def test_double_log_two_point(self):
        x = int(math.exp(math.exp(2)))  # log log x = 2, so y = floor(sqrt(x))
        assert default_y(x, 1.0) == int(x**0.5)

    def test_documented_value_at_1e6(self):
        assert default_y(10**6, 1.0) == 192
        assert default_y(10**7, 1.0) == 329

    def test_x_too_small(self):
        with pytest.raises(ValueError):
            default_y(15, 1.0)

    @given(x=st.integers(16, 10**9), beta=st.floats(0.2, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_y_below_x_beta(self, x, beta):
        y = default_y(x, beta)
        assert y >= 2
        assert y <= x ** (beta / math.log(math.log(x))) or y == 2


class TestBernoulliDistribution:
    def test_single_coin(self):
        sys = BernoulliSystem(((P2, 0.5),), y=2, x=100, beta=1.0)
        assert exact_bernoulli_distribution(sys).tolist() == [0.5, 0.5]

    def test_two_fair_coins(self):
        sys = BernoulliSystem(((P2, 0.5), (P3, 0.5)), y=3, x=100, beta=1.0)
        assert exact_bernoulli_distribution(sys).tolist() == pytest.approx(
            [0.25, 0.5, 0.25])

    def test_lambda_range_enforced(self):
        with pytest.raises(ValueError):
            BernoulliSystem(((P2, 1.5),), y=2, x=100, beta=1.0)

    def test_y_bound_enforced(self):
        with pytest.raises(ValueError):
            BernoulliSystem(((P2, 0.5),), y=100, x=100, beta=1.0)

    def test_random_systems_moment_identities(self):
        rng = np.random.default_rng(7)
        primes = INT.primes_up_to(200)
        for _ in range(50):
            lams = rng.uniform(0, 1, size=len(primes))
            sys = BernoulliSystem(tuple(zip(primes, lams)), y=200, x=10**6, beta=1.0)
            pmf = exact_bernoulli_distribution(sys)
            k = np.arange(len(pmf))
            assert abs(pmf.sum() - 1.0) < 1e-12
            assert abs(float(pmf @ k) - sys.mean) < 1e-10
            var = float(pmf @ k**2) - float(pmf @ k) ** 2
            assert abs(var - sys.variance) < 1e-10

    def test_build_system_covers_primes_up_to_y(self):
        sys = build_bernoulli_system(INT, 10**4, SubsetSpec(), y=30)
        assert [p.norm for p, _ in sys.entries] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        assert sys.entries[0][1] == pytest.approx(0.5)


class TestModelVsTruncated:
    def test_first_two_model_moments_exact(self):
        rows = model_vs_truncated(INT, 10**4, SubsetSpec(), r_max=2)
        assert rows[0][2] == pytest.approx(0.0, abs=1e-12)
        assert rows[1][2] == pytest.approx(1.0, abs=1e-12)

    def test_moment_gaps_shrink_and_stay_moderate(self):
        small = model_vs_truncated(INT, 10**5, SubsetSpec(), r_max=4)
        large = model_vs_truncated(INT, 10**6, SubsetSpec(), r_max=4)
        for r, emp, model, diff in large:
            assert diff < 0.3
        assert large[3][3] < small[3][3]  # fourth-moment gap shrinks

    def test_generic_path_agrees_with_fast_path(self):
        spec = SubsetSpec.parse("hfull:2")
        rows = model_vs_truncated(INT, 10**4, spec, y=10, r_max=2)
        # recompute empirically from enumeration
        sys = build_bernoulli_system(INT, 10**4, spec, y=10)
        vals = []
        for f in scan_elements(INT, 10**4, spec):
            vals.append(sum(1 for p, _ in f.terms if p.norm <= 10))
        z = (np.array(vals) - sys.mean) / math.sqrt(sys.variance)
        assert rows[1][1] == pytest.approx(float(np.mean(z**2)), abs=1e-12)

    def test_r_max_validation(self):
        with pytest.raises(ValueError):
            model_vs_truncated(INT, 10**4, SubsetSpec(), r_max=5)


class TestConditions:
    def test_reports_structure(self):
        reps = condition_check(INT, 10**4, SubsetSpec.parse("hfree:2"), beta=1.0)
        assert [r.name for r in reps] == ["b", "c", "d", "e"]
        for r in reps:
            assert r.value_at_x >= 0
            assert r.normalizer_at_x > r.normalizer_at_sqrt_x

    def test_condition_e_bounded_by_prime_square_sum(self):
        reps = condition_check(INT, 10**6, SubsetSpec(), beta=1.0)
        e = next(r for r in reps if r.name == "e")
        assert e.value_at_x < 0.46  # below the full prime square reciprocal sum

    def test_b_empty_range_when_y_equals_cap(self):
        # y just below x^beta leaves (y, x^beta] with at most one prime
        reps = condition_check(INT, 10**4, SubsetSpec(), beta=0.5, y=99)
        b = next(r for r in reps if r.name == "b")
        assert b.value_at_x == 0.0

    def test_include_f_pair_errors(self):
        reps = condition_check(INT, 10**4, SubsetSpec(), beta=1.0, include_f=True)
        f = next(r for r in reps if r.name == "f")
        assert f.value_at_x >= 0

    def test_unsupported_subset(self):
        spec = SubsetSpec(kind="hfree", h=2, avoided=frozenset([P2]))
        with pytest.raises(UnsupportedSubsetError):
            condition_check(INT, 10**4, spec, beta=1.0)


class TestConditionA:
    def test_beta_one_is_zero(self):
        assert condition_a_audit(INT, 10**4, SubsetSpec(), beta=1.0) == 0

    def test_beta_half_at_most_two(self):
        assert condition_a_audit(INT, 10**6, SubsetSpec(), beta=0.5, sample=10**5) <= 2

    def test_generic_path(self):
        spec = SubsetSpec.parse("hfull:2")
        assert condition_a_audit(INT, 10**6, spec, beta=0.5, sample=1000) <= 2


class TestTruncation:
    def test_omega_y_monotone_in_y(self):
        f = next(f for f in scan_elements(INT, 1000, SubsetSpec())
                 if f.norm() == 210)  # 2 * 3 * 5 * 7
        counts = [sum(1 for p, _ in f.terms if p.norm <= y) for y in (2, 5, 7, 210)]
        assert counts == [1, 3, 4, 4]

    def test_residual_shrinks_in_y(self):
        x = 10**5
        vals = [truncation_residual(INT, x, SubsetSpec(), y=y)
                for y in (10, 100, 1000)]
        assert vals == sorted(vals, reverse=True)
        assert truncation_residual(INT, x, SubsetSpec(), y=x) == 0.0
