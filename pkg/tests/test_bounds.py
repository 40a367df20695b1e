"""Right-hand sides, bootstrap exponents, and order-lowering rewrites."""

import math

import numpy as np
import pytest

from kerneldecay import bounds
from kerneldecay.errors import ClassInsufficientError
from kerneldecay.families import (
    ConditionClass,
    ExplicitFamily,
    PoleTerm,
    parse_family_spec,
)


def single(c, t):
    return ExplicitFamily([PoleTerm(complex(c), complex(t), 0)])


def random_family(rng, count, spread=50.0):
    moduli = 0.5 + spread * rng.random(count)
    angles = 2.0 * math.pi * rng.random(count)
    weights = rng.normal(size=count) + 1j * rng.normal(size=count)
    terms = [PoleTerm(complex(w), complex(m * np.exp(1j * a)), k)
             for k, (w, m, a) in enumerate(zip(weights, moduli, angles))]
    return ExplicitFamily(terms)


class TestMoments:
    def test_partial_moment_counts_strict_interior(self):
        fam = single(3.0, 10.0)
        assert bounds.partial_moment(fam, 20.0, 0) == 3.0
        assert bounds.partial_moment(fam, 20.0, 1) == pytest.approx(0.3)
        # the boundary pole belongs to neither the partial nor the tail sum
        assert bounds.partial_moment(fam, 10.0, 0) == 0.0
        assert bounds.tail_moment(fam, 10.0, 1) == 0.0

    def test_partial_moment_rejects_zero_pole_with_k(self):
        fam = single(1.0, 0.0)
        assert bounds.partial_moment(fam, 2.0, 0) == 1.0
        with pytest.raises(ValueError, match="pole at 0"):
            bounds.partial_moment(fam, 2.0, 1)

    def test_middle_terms_closed_band(self):
        fam = parse_family_spec("c")
        mid = bounds.middle_terms(fam, 10.0)
        assert sorted(int(t.pole.real) for t in mid) == [8, 9, 10, 11, 12, 13, 14]

    def test_accepts_bare_term_lists(self):
        terms = [PoleTerm(1.0 + 0j, 10.0 + 0j, 0)]
        assert bounds.keldysh_rhs(terms, 20.0) == pytest.approx(2.1)


class TestKeldyshRhs:
    def test_pole_inside(self):
        # 2 (1 + 1/20 + 0)
        assert bounds.keldysh_rhs(single(1.0, 10.0), 20.0) == pytest.approx(2.1)

    def test_pole_outside(self):
        # 2 (1 + 0 + 1/10)
        assert bounds.keldysh_rhs(single(1.0, 10.0), 5.0) == pytest.approx(2.2)

    def test_class_requirement(self):
        fam = parse_family_spec("g")  # harmonic-type weights, order 1 diverges
        with pytest.raises(ClassInsufficientError, match="class insufficient"):
            bounds.keldysh_rhs(fam, 100.0)

    def test_nonincreasing_beyond_poles(self):
        rng = np.random.default_rng(20240917)
        fam = random_family(rng, 12, spread=30.0)
        radii = np.geomspace(40.0, 4000.0, 25)
        vals = [bounds.keldysh_rhs(fam, float(r)) for r in radii]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


class TestOstrovskiyRhs:
    def test_single_term(self):
        got = bounds.ostrovskiy_rhs(single(1.0, 10.0), 20.0, 0.5)
        want = 8.0 * math.pi / math.cos(math.pi / 4.0) * math.sqrt(1.0 / 20.0)
        assert got == pytest.approx(want, rel=1e-12)

    def test_empty_family(self):
        assert bounds.ostrovskiy_rhs(ExplicitFamily([]), 5.0, 0.3) == 0.0

    def test_p_range(self):
        fam = single(1.0, 10.0)
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError, match="exponent p"):
                bounds.ostrovskiy_rhs(fam, 20.0, bad)

    def test_nonincreasing_beyond_poles(self):
        rng = np.random.default_rng(77001)
        fam = random_family(rng, 9, spread=20.0)
        radii = np.geomspace(30.0, 3000.0, 20)
        vals = [bounds.ostrovskiy_rhs(fam, float(r), 0.3) for r in radii]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


class TestOrderTwoLemmas:
    def test_tail_lemma_value(self):
        # tail moment past 5 sqrt(2) is 10^{-2}; constant is 8 pi / cos(pi/8)
        got = bounds.tail_lemma_rhs(single(1.0, 10.0), 5.0, 0.25)
        want = 8.0 * math.pi / math.cos(math.pi / 8.0) * 0.01 ** 0.25
        assert got == pytest.approx(want, rel=1e-12)

    def test_tail_lemma_empty_tail(self):
        assert bounds.tail_lemma_rhs(single(1.0, 10.0), 10.0, 0.25) == 0.0

    def test_start_lemma_value(self):
        got = bounds.start_lemma_rhs(single(1.0, 10.0), 20.0, 0.25)
        want = 8.0 * math.pi / math.cos(math.pi / 8.0) * (1.0 / 400.0) ** 0.25
        assert got == pytest.approx(want, rel=1e-12)

    def test_start_lemma_no_class_requirement(self):
        # order-1 moments diverge for this family, the start bound only
        # needs the plain weight sum inside r / sqrt(2)
        fam = parse_family_spec("g")
        assert bounds.start_lemma_rhs(fam, 100.0, 0.25) > 0.0

    def test_tail_lemma_class_requirement(self):
        terms = [PoleTerm(complex(n), complex(n * n), n - 1)
                 for n in range(1, 40)]
        fam = ExplicitFamily(terms)
        assert bounds.tail_lemma_rhs(fam, 5.0, 0.25) > 0.0


class TestSmallExponentBounds:
    def test_single_term_value(self):
        assert bounds.single_term_bound(1.0, 0.25) == pytest.approx(4 * math.pi)

    def test_single_term_p_range(self):
        for bad in (0.0, 0.5, 0.7):
            with pytest.raises(ValueError, match="p out of range"):
                bounds.single_term_bound(1.0, bad)

    def test_single_term_against_quadrature(self):
        # worst case puts the pole on the circle itself
        from kerneldecay import quadrature

        r, p = 3.0, 0.3
        alpha = math.pi / 3.0
        t = r * np.exp(1j * alpha)
        res = quadrature.circle_abs_power(
            lambda z: 1.0 / (z - t), r, 2.0 * p, 1e-3,
            [alpha], singular_angles=[alpha])
        bound = bounds.single_term_bound(r, p)
        assert res.value <= bound
        # and it is not wildly slack: centred pole gives the 1 - 2p ratio
        centred = quadrature.circle_abs_power(
            lambda z: 1.0 / z, r, 2.0 * p, 1e-9, [])
        assert centred.value == pytest.approx(
            2.0 * math.pi * r ** (-2 * p), rel=1e-8)

    def test_middle_trivial_value(self):
        fam = single(4.0, 10.0)
        # band at r = 10 holds the single pole; sum of |c|^p = sqrt(2)
        got = bounds.middle_trivial_rhs(fam, 10.0, 0.25)
        want = 4.0 * math.pi * 10.0 ** -0.5 * math.sqrt(2.0)
        assert got == pytest.approx(want, rel=1e-12)

    def test_middle_trivial_empty_band(self):
        assert bounds.middle_trivial_rhs(single(1.0, 10.0), 100.0, 0.25) == 0.0


class TestBoundReport:
    def test_report_carries_inputs(self):
        rep = bounds.bound_report("keldysh", single(1.0, 10.0), 20.0)
        assert rep.rhs == pytest.approx(2.1)
        assert rep.inputs["partial_moment_0"] == 1.0
        assert rep.inputs["tail_moment_1"] == 0.0
        assert math.isnan(rep.p)

    def test_report_matches_direct_functions(self):
        fam = parse_family_spec("c")
        rep = bounds.bound_report("ostrovskiy", fam, 50.0, p=0.3)
        assert rep.rhs == pytest.approx(
            bounds.ostrovskiy_rhs(fam, 50.0, 0.3), rel=1e-15)

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown bound name"):
            bounds.bound_report("nope", single(1.0, 10.0), 20.0)


class TestBootstrap:
    def test_first_iterates(self):
        assert bounds.bootstrap_exponent(1.0, 0.3, 0) == pytest.approx(2.0)
        assert bounds.bootstrap_exponent(1.0, 0.3, 1) == pytest.approx(0.85)

    def test_iterates_follow_the_recursion(self):
        seq = bounds.bootstrap_iterates(1.5, 0.2, 8)
        assert seq[0] == pytest.approx(2.5)
        for a, b in zip(seq, seq[1:]):
            assert b == pytest.approx((a - 0.2) / 2.0, rel=1e-14)

    def test_strictly_decreasing_with_limit(self):
        seq = bounds.bootstrap_iterates(1.0, 0.3, 60)
        # strict until the 2^{-n} term drops below the ulp of the limit
        assert all(b < a for a, b in zip(seq[:45], seq[1:45]))
        assert all(b <= a for a, b in zip(seq, seq[1:]))
        assert seq[-1] == pytest.approx(-0.3, abs=1e-12)

    def test_matches_closed_form(self):
        for n in range(0, 12):
            direct = bounds.bootstrap_exponent(2.0, 0.4, n)
            assert direct == pytest.approx(
                -0.4 + (2.0 + 1.0 + 0.4) / 2.0 ** n, rel=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError, match="rho"):
            bounds.bootstrap_exponent(-1.0, 0.3, 2)
        with pytest.raises(ValueError, match="p out of range"):
            bounds.bootstrap_exponent(1.0, 0.6, 2)
        with pytest.raises(ValueError, match="nonnegative integer"):
            bounds.bootstrap_exponent(1.0, 0.3, -1)


class TestTheoremPrediction:
    def test_values(self):
        assert bounds.theorem_prediction(
            ConditionClass.SECOND_ORDER_NATURAL, 0.3, 0.05) == pytest.approx(0.05)
        assert bounds.theorem_prediction(
            ConditionClass.FIRST_ORDER_NATURAL, 0.3, 0.05) == pytest.approx(-0.25)
        assert bounds.theorem_prediction(
            ConditionClass.ABSOLUTELY_SUMMABLE, 0.3, 0.05) == pytest.approx(-0.55)

    def test_ordering_for_small_eps(self):
        for p in (0.1, 0.25, 0.4):
            eps = p / 3.0
            a = bounds.theorem_prediction(ConditionClass.ABSOLUTELY_SUMMABLE, p, eps)
            f = bounds.theorem_prediction(ConditionClass.FIRST_ORDER_NATURAL, p, eps)
            s = bounds.theorem_prediction(ConditionClass.SECOND_ORDER_NATURAL, p, eps)
            assert a < f < s

    def test_validation(self):
        with pytest.raises(ValueError, match="p out of range"):
            bounds.theorem_prediction(ConditionClass.FIRST_ORDER_NATURAL, 0.6, 0.05)
        with pytest.raises(ValueError, match="eps"):
            bounds.theorem_prediction(ConditionClass.FIRST_ORDER_NATURAL, 0.3, 0.0)


class TestDecompositions:
    def test_single_term_by_hand(self):
        # c = 1, t = 2, z = 1: direct value 1/(1-2)^2 = 1
        d1 = bounds.decompose_first_order([(1.0, 2.0)])
        d2 = bounds.decompose_absolute([(1.0, 2.0)])
        assert d1(1.0) == pytest.approx(1.0)
        assert d2(1.0) == pytest.approx(1.0)
        assert d1.constant == pytest.approx(0.25)
        assert d2.constant == pytest.approx(1.0)

    def test_styles(self):
        assert bounds.decompose_first_order([(1.0, 2.0)]).style == "first_order"
        assert bounds.decompose_absolute([(1.0, 2.0)]).style == "absolute"

    def test_random_terms_reproduce_direct_sum(self):
        rng = np.random.default_rng(55914)
        terms = []
        for k in range(50):
            t = complex(rng.normal() * 10.0, rng.normal() * 10.0)
            if abs(t) < 0.5:
                t += 2.0
            terms.append(PoleTerm(complex(rng.normal(), rng.normal()), t, k))
        d1 = bounds.decompose_first_order(terms)
        d2 = bounds.decompose_absolute(terms)
        for _ in range(20):
            z = complex(rng.normal() * 20.0, rng.normal() * 20.0)
            if min(abs(z - t.pole) for t in terms) < 1e-2 or abs(z) < 1e-2:
                continue
            direct = sum(t.weight / (z - t.pole) ** 2 for t in terms)
            scale = sum(abs(t.weight / (z - t.pole) ** 2) for t in terms)
            assert abs(d1(z) - direct) <= 1e-12 * max(scale, abs(direct))
            assert abs(d2(z) - direct) <= 1e-9 * max(scale, abs(direct))

    def test_vectorized_call(self):
        d1 = bounds.decompose_first_order([(1.0, 2.0)])
        z = np.array([1.0 + 0j, 3.0 + 1j])
        got = d1(z)
        want = 1.0 / (z - 2.0) ** 2
        assert np.allclose(got, want, rtol=1e-12)

    def test_zero_pole_rejected_only_where_it_divides(self):
        with pytest.raises(ValueError, match="pole nonzero"):
            bounds.decompose_first_order([(1.0, 0.0)])
        # the absolute rewrite multiplies by t instead, so t = 0 is fine
        d2 = bounds.decompose_absolute([(1.0, 0.0)])
        assert d2(2.0) == pytest.approx(0.25)

    def test_absolute_style_rejects_origin(self):
        d2 = bounds.decompose_absolute([(1.0, 2.0)])
        with pytest.raises(ValueError, match="undefined at z = 0"):
            d2(0.0)

    def test_empty_terms(self):
        d1 = bounds.decompose_first_order([])
        assert d1(3.0 + 1j) == 0.0
