"""Tests for the closed-form reference catalog.

Brute-force partial-fraction summation (vectorized, with explicit tail
remainder bounds) is the oracle throughout: the closed forms must agree
with direct summation of the defining series to within the summation's own
truncation allowance.
"""

import cmath
import math

import numpy as np
import pytest

from kerneldecay.errors import SpecialDomainError
from kerneldecay.special import (
    EULER_GAMMA,
    ReferenceFunction,
    cospi,
    cotpi,
    digamma,
    eval_reference,
    lerch_phi_half,
    reference_function,
    sinpi,
    trigamma,
)

PI = math.pi


def ref(fam, order):
    return reference_function(fam, order)


# ---------------------------------------------------------------------------
# brute-force series oracles
# ---------------------------------------------------------------------------


def brute_a(z, order, N=400_000):
    n = np.arange(1, N + 1, dtype=np.float64)
    sign = (-1.0) ** n
    if order == 1:
        # paired: (-1)^n (1/(z-n) + 1/(z+n)) plus the n=0 term
        total = np.sum(sign * (1.0 / (z - n) + 1.0 / (z + n))) + 1.0 / z
        tail = 2.0 * abs(z) / (N - abs(z)) ** 2 * 2.0
    else:
        total = np.sum(sign * (1.0 / (z - n) ** 2 + 1.0 / (z + n) ** 2))
        total += 1.0 / z ** 2
        tail = 4.0 / (N - abs(z))
        # alternating order-2 pairs decay like n^-2; crude but safe:
        tail = 4.0 / (N - abs(z))
    return complex(total), float(tail)


def brute_b(z, order, N=400_000):
    n = np.arange(1, N + 1, dtype=np.float64)
    c = (-1.0) ** n / n
    if order == 1:
        total = np.sum(c * (1.0 / (z - n) - 1.0 / (z + n)))
        tail = 2.0 * abs(z) ** 0 * 2.0 / N  # pairs give c*2n/(z^2-n^2) ~ 2/n^2
    else:
        total = np.sum(c * (1.0 / (z - n) ** 2 - 1.0 / (z + n) ** 2))
        tail = 8.0 * abs(z) / N ** 2 + 4.0 / N ** 2
    return complex(total), float(tail)


def brute_one_sided(z, order, weights_of, N=2_000_000):
    n = np.arange(1, N + 1, dtype=np.float64)
    c = weights_of(n)
    if order == 1:
        total = np.sum(c / (z - n))
        dens = np.abs(c)[-1]
    else:
        total = np.sum(c / (z - n) ** 2)
    # remainder: sum_{n>N} |c_n| / |z-n|^order with |z-n| >= n/2
    tail_weights = weights_of(np.arange(N + 1, N + 1_000_000, dtype=np.float64))
    tail = float(np.sum(tail_weights
                        / (np.arange(N + 1, N + 1_000_000) / 2.0) ** order))
    tail += 2.0 ** order * np.abs(tail_weights[-1])  # beyond the window
    return complex(total), tail


def brute_e(z, order, N=4000):
    n = np.arange(1, N + 1, dtype=np.float64)
    poles = n * n
    if order == 1:
        total = np.sum(1.0 / (z - poles))
        tail = 2.0 / N  # sum n^-2 tail of 1/(z-n^2)
    else:
        total = np.sum(1.0 / (z - poles) ** 2)
        tail = 4.0 / (3.0 * N ** 3)
    return complex(total), float(tail)


def brute_f(z, order, N=200):
    total = sum(2.0 ** -k / (z - k) ** order for k in range(1, N + 1))
    return total, 2.0 ** (-N)


# ---------------------------------------------------------------------------
# trig helpers
# ---------------------------------------------------------------------------


class TestTrigHelpers:
    def test_sinpi_at_integers(self):
        for n in range(-5, 6):
            assert sinpi(complex(n)) == 0

    def test_sinpi_far_from_origin(self):
        # 10000.25 is exactly representable, so the reduced argument is
        # exactly 0.25 and the result is sin(pi/4) to a few ulp; naive
        # cmath.sin(pi*z) loses about four digits out here.
        got = sinpi(10000.25)
        assert abs(got - math.sqrt(2.0) / 2.0) < 5e-16

    def test_cospi_half_integers(self):
        assert abs(cospi(0.5)) < 1e-16
        assert abs(cospi(2.5)) < 1e-16

    def test_signs(self):
        assert sinpi(0.5) == 1.0
        assert sinpi(1.5) == -1.0
        assert cospi(1.0) == -1.0

    def test_complex_argument(self):
        z = 0.3 + 0.7j
        assert abs(sinpi(z) - cmath.sin(PI * z)) < 1e-13 * abs(sinpi(z))

    def test_cotpi_imaginary_axis(self):
        # cot(pi*iy) = -i*coth(pi*y)
        y = 0.8
        want = -1j / math.tanh(PI * y)
        assert abs(cotpi(1j * y) - want) < 1e-14


# ---------------------------------------------------------------------------
# digamma / trigamma
# ---------------------------------------------------------------------------


class TestDigamma:
    def test_known_values(self):
        assert abs(digamma(1.0) + EULER_GAMMA) < 1e-13
        assert abs(digamma(2.0) - (1.0 - EULER_GAMMA)) < 1e-13
        assert abs(digamma(0.5) + EULER_GAMMA + 2.0 * math.log(2.0)) < 1e-13

    def test_recurrence_on_grid(self):
        points = [0.3 + 0.2j, -1.7 + 0.4j, 5.5 - 2.0j, 0.01 + 0.01j,
                  -6.3 - 1.1j, 12.0 + 9.0j]
        for z in points:
            lhs = digamma(z + 1.0)
            rhs = digamma(z) + 1.0 / z
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_reflection_consistency(self):
        z = 0.3 + 0.1j
        lhs = digamma(1.0 - z) - digamma(z)
        assert abs(lhs - PI * cotpi(z)) < 1e-12


class TestTrigamma:
    def test_known_values(self):
        assert abs(trigamma(1.0) - PI * PI / 6.0) < 1e-13
        assert abs(trigamma(0.5) - PI * PI / 2.0) < 1e-13
        assert abs(trigamma(2.0) - (PI * PI / 6.0 - 1.0)) < 1e-13

    def test_recurrence_on_grid(self):
        points = [0.4 + 0.3j, -2.2 + 1.0j, 7.5 - 0.5j, -0.9 - 0.2j]
        for z in points:
            lhs = trigamma(z)
            rhs = trigamma(z + 1.0) + 1.0 / (z * z)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_matches_digamma_derivative(self):
        z = 1.7 + 0.9j
        h = 1e-5
        fd = (digamma(z + h) - digamma(z - h)) / (2.0 * h)
        assert abs(trigamma(z) - fd) < 1e-8


# ---------------------------------------------------------------------------
# Lerch
# ---------------------------------------------------------------------------


class TestLerch:
    def test_shift_recurrence(self):
        for a in [0.7, 2.3 + 1.1j, -0.4 + 0.9j, 10.0 - 3.0j]:
            lhs = lerch_phi_half(1, a)
            rhs = 1.0 / a + 0.5 * lerch_phi_half(1, a + 1.0)
            assert abs(lhs - rhs) < 1e-13 * max(1.0, abs(lhs))

    def test_direct_value(self):
        # Phi(1/2, 1, 1) = sum 2^-k/(k+1) = 2 ln 2
        assert abs(lerch_phi_half(1, 1.0) - 2.0 * math.log(2.0)) < 1e-14

    def test_order_two(self):
        got = lerch_phi_half(2, 1.0)
        brute = sum(2.0 ** -k / (k + 1.0) ** 2 for k in range(300))
        assert abs(got - brute) < 1e-14


# ---------------------------------------------------------------------------
# the reference catalog against brute force
# ---------------------------------------------------------------------------

SAMPLES = [0.5 + 0.0j, 0.31 - 0.42j, -1.3 + 0.7j, 3.4 + 2.1j, -7.6 - 0.3j]


class TestReferenceValues:
    def test_a1_half_is_pi(self):
        got = eval_reference(ref("a", 1), 0.5)
        assert abs(got - PI) < 1e-12

    def test_a2_half_is_zero(self):
        assert abs(eval_reference(ref("a", 2), 0.5)) < 1e-12

    def test_a2_quarter(self):
        got = eval_reference(ref("a", 2), 0.25)
        assert abs(got - PI * PI * math.sqrt(2.0)) < 1e-11

    def test_a_against_brute(self):
        for z in SAMPLES:
            for order in (1, 2):
                got = eval_reference(ref("a", order), z)
                brute, tail = brute_a(z, order)
                assert abs(got - brute) <= tail + 1e-9

    def test_b_against_brute(self):
        for z in SAMPLES:
            for order in (1, 2):
                got = eval_reference(ref("b", order), z)
                brute, tail = brute_b(z, order)
                assert abs(got - brute) <= tail + 1e-9

    def test_c_against_brute(self):
        for z in SAMPLES:
            for order in (1, 2):
                got = eval_reference(ref("c", order), z)
                brute, tail = brute_one_sided(z, order, lambda n: 1.0 / n,
                                              N=1_000_000)
                assert abs(got - brute) <= tail + 1e-9

    def test_c1_at_minus_half(self):
        got = eval_reference(ref("c", 1), -0.5)
        want = (EULER_GAMMA + digamma(1.5)) * (-2.0)
        assert abs(got - want) < 1e-12

    def test_d_against_brute(self):
        for z in SAMPLES:
            for order in (1, 2):
                got = eval_reference(ref("d", order), z)
                brute, tail = brute_one_sided(z, order, lambda n: n ** -2.0,
                                              N=1_000_000)
                assert abs(got - brute) <= tail + 1e-9

    def test_e_against_brute(self):
        for z in SAMPLES:
            for order in (1, 2):
                got = eval_reference(ref("e", order), z)
                brute, tail = brute_e(z, order, N=40_000)
                assert abs(got - brute) <= tail + 1e-9

    def test_e1_at_minus_one(self):
        got = eval_reference(ref("e", 1), -1.0)
        want = (1.0 - PI / math.tanh(PI)) / 2.0
        assert abs(got - want) < 1e-12

    def test_f_against_brute(self):
        for z in SAMPLES + [-1.0 + 0.0j]:
            for order in (1, 2):
                got = eval_reference(ref("f", order), z)
                brute, tail = brute_f(z, order)
                assert abs(got - brute) <= tail + 1e-12

    def test_f1_at_minus_one_closed_form(self):
        got = eval_reference(ref("f", 1), -1.0)
        assert abs(got - (1.0 - 2.0 * math.log(2.0))) < 1e-13


class TestErratumResolution:
    """The published form of identity (d) reads pi^2/6 + (gamma+psi(1-z))/z^2;
    partial fractions give pi^2/(6z) + ... .  Brute force (10^7 terms plus
    tail estimate) settles it in favor of the divided form."""

    def test_brute_force_settles_first_term(self):
        z = 0.6 + 0.3j
        total = 0.0 + 0.0j
        chunk = 1_000_000
        for start in range(0, 10_000_000, chunk):
            n = np.arange(start + 1, start + chunk + 1, dtype=np.float64)
            total += complex(np.sum(n ** -2.0 / (z - n)))
        # remainder: sum_{n>1e7} n^-2/|z-n| <= (1/(1e7-1)) * sum n^-2
        tail = 2e-7 * 1.1e-7 + 1e-13  # generous: n^-3 tail from 1e7
        divided = PI * PI / (6.0 * z) + \
            (EULER_GAMMA + digamma(1.0 - z)) / (z * z)
        undivided = PI * PI / 6.0 + \
            (EULER_GAMMA + digamma(1.0 - z)) / (z * z)
        assert abs(divided - total) <= tail + 1e-9
        assert abs(undivided - total) > 0.5

    def test_consistency_at_zero(self):
        # K1 of family d at z=0 is -zeta(3); only the divided form extends
        # continuously to that value
        from kerneldecay.zetasums import zeta
        got = eval_reference(ref("d", 1), 1e-9j)
        assert abs(got - (-zeta(3.0))) < 1e-8


class TestSeriesFallbackContinuity:
    """Closed form and Taylor fallback must agree where they hand off."""

    @pytest.mark.parametrize("fam,radius", [
        ("b", 0.25), ("c", 0.25), ("d", 0.25), ("e", 0.05),
    ])
    def test_no_jump_at_handoff(self, fam, radius):
        # Three equally spaced radii straddling the branch switch: the
        # second difference of a smooth function is O(h^2) ~ 1e-6 here,
        # so any genuine branch jump above 1e-5*scale would show up.
        for order in (1, 2):
            for angle in [0.3, 1.7, 3.9]:
                direction = cmath.exp(1j * angle)
                vals = [eval_reference(ref(fam, order),
                                       m * radius * direction)
                        for m in (0.998, 1.0, 1.002)]
                scale = max(abs(vals[1]), 1.0)
                second_diff = vals[0] - 2.0 * vals[1] + vals[2]
                assert abs(second_diff) < 1e-5 * scale

    @pytest.mark.parametrize("fam", ["b", "c", "d", "e"])
    def test_series_branch_matches_brute_force(self, fam):
        radius = 0.05 if fam == "e" else 0.25
        z = 0.9 * radius * cmath.exp(0.77j)
        for order in (1, 2):
            series_val = eval_reference(ref(fam, order), z)
            if fam == "b":
                brute, tail = brute_b(z, order)
            elif fam == "e":
                brute, tail = brute_e(z, order, N=40_000)
            elif fam == "c":
                brute, tail = brute_one_sided(z, order, lambda n: 1.0 / n,
                                              N=1_000_000)
            else:
                brute, tail = brute_one_sided(z, order, lambda n: n ** -2.0,
                                              N=1_000_000)
            assert abs(series_val - brute) <= tail + 1e-10


class TestDerivativeConsistency:
    def test_order2_is_negated_derivative(self):
        h = 1e-5
        for fam in "abcdef":
            z = 0.43 - 0.56j
            fd = (eval_reference(ref(fam, 1), z - h)
                  - eval_reference(ref(fam, 1), z + h)) / (2.0 * h)
            got = eval_reference(ref(fam, 2), z)
            assert abs(got - fd) <= 1e-7 * max(1.0, abs(got))


class TestResidues:
    def test_pi_over_sin_residues(self):
        # (1/2pi) sum f(n + 0.3 e^{i theta}) 0.3 e^{i theta} over a uniform
        # grid converges exponentially to the residue (-1)^n
        M = 512
        thetas = 2.0 * PI * np.arange(M) / M
        for n in [0, 1, 2]:
            acc = 0.0 + 0.0j
            for th in thetas:
                w = 0.3 * cmath.exp(1j * th)
                acc += eval_reference(ref("a", 1), n + w) * w
            acc /= M
            assert abs(acc - (-1.0) ** n) < 1e-12


class TestDomainGuards:
    def test_pole_proximity_rejected(self):
        with pytest.raises(SpecialDomainError):
            eval_reference(ref("a", 1), 3.0 + 1e-9j)
        with pytest.raises(SpecialDomainError):
            eval_reference(ref("e", 1), 9.0 + 1e-8j)
        with pytest.raises(SpecialDomainError):
            eval_reference(ref("c", 2), 1.0000001)

    def test_b_zero_is_not_a_pole(self):
        got = eval_reference(ref("b", 1), 0.0)
        assert abs(got - PI * PI / 6.0) < 1e-13

    def test_invalid_family(self):
        with pytest.raises(SpecialDomainError):
            reference_function("z", 1)
        with pytest.raises(SpecialDomainError):
            reference_function("a", 3)

    def test_reference_function_roundtrip(self):
        r = reference_function("c", 2)
        assert isinstance(r, ReferenceFunction)
        assert (r.family_id, r.order) == ("c", 2)
