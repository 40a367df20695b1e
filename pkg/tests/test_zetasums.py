"""Tests for the certified Euler-Maclaurin tail sums.

Oracle values come from direct high-count summation done independently of
the expansion code, frozen here as constants.
"""

import math

import pytest

from kerneldecay.zetasums import (
    alternating_tail,
    hurwitz_tail,
    power_tail_upper,
    zeta,
)

PI = math.pi

# Frozen oracle constants.
ZETA2 = PI * PI / 6.0
ZETA3 = 1.2020569031595942854  # direct summation with integral tail
ZETA4 = PI ** 4 / 90.0
ETA1_FROM_3 = math.log(2.0) - 0.5  # sum_{n>=3} (-1)^n / n = ln 2 - 1 + 1/2


def brute_hurwitz(s, x, terms=2_000_000):
    total = 0.0
    comp = 0.0
    for m in range(terms):
        y = (x + m) ** (-s) - comp
        t = total + y
        comp = (t - total) - y
        total = t
    # integral-comparison bound on what was dropped
    top = x + terms
    dropped = top ** (-s) + top ** (1.0 - s) / (s - 1.0)
    return total, dropped


class TestHurwitzTail:
    def test_zeta2(self):
        value, err = hurwitz_tail(2.0, 1.0)
        assert err < 1e-12
        assert abs(value - ZETA2) < 1e-12

    def test_zeta4(self):
        value, err = hurwitz_tail(4.0, 1.0)
        assert abs(value - ZETA4) < 1e-12

    def test_zeta3_frozen(self):
        value, _ = hurwitz_tail(3.0, 1.0)
        assert abs(value - ZETA3) < 1e-12

    def test_against_brute_force_shifted(self):
        value, err = hurwitz_tail(2.0, 17.0)
        brute, dropped = brute_hurwitz(2.0, 17.0)
        assert abs(value - brute) <= err + dropped + 1e-13

    def test_against_brute_force_fractional_s(self):
        value, err = hurwitz_tail(2.5, 3.25)
        brute, dropped = brute_hurwitz(2.5, 3.25, terms=400_000)
        assert abs(value - brute) <= err + dropped + 1e-13

    def test_error_bound_is_tight(self):
        _, err = hurwitz_tail(2.0, 1.0)
        assert err < 1e-13

    def test_large_s(self):
        # sum_{m>=0} (2+m)^-40 is dominated by 2^-40
        value, err = hurwitz_tail(40.0, 2.0)
        direct = sum((2.0 + m) ** (-40.0) for m in range(50))
        assert abs(value - direct) < 1e-25
        assert err < 1e-25

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            hurwitz_tail(1.0, 1.0)
        with pytest.raises(ValueError):
            hurwitz_tail(2.0, 0.0)


class TestAlternatingTail:
    def test_eta_tail_from_3(self):
        # sum_{n>=3} (-1)^n n^-1 diverges per-term need s>1; use s=1 is not
        # allowed, so test s=2: sum_{n>=1} (-1)^n n^-2 = -pi^2/12.
        value, err = alternating_tail(2.0, 1)
        assert abs(value - (-PI * PI / 12.0)) <= err + 1e-13

    def test_matches_brute_force_midstart(self):
        for s, n_from in [(2.0, 5), (3.0, 2), (4.5, 7), (2.0, 6)]:
            brute = 0.0
            for n in range(n_from, 400_000):
                brute += (-1.0) ** n * n ** (-s)
            value, err = alternating_tail(s, n_from)
            # brute truncation error is below the last term in magnitude
            assert abs(value - brute) <= err + 400_000.0 ** (-s) + 1e-12

    def test_parity_flip(self):
        # adjacent starting points differ by exactly the boundary term
        v5, _ = alternating_tail(3.0, 5)
        v6, _ = alternating_tail(3.0, 6)
        assert abs((v5 - v6) - (-1.0) ** 5 * 5.0 ** (-3.0)) < 1e-14


class TestZeta:
    def test_known_values(self):
        assert abs(zeta(2.0) - ZETA2) < 1e-12
        assert abs(zeta(3.0) - ZETA3) < 1e-12
        assert abs(zeta(4.0) - ZETA4) < 1e-12

    def test_monotone_to_one(self):
        assert zeta(10.0) < zeta(3.0) < zeta(2.0) < zeta(1.5)
        assert zeta(30.0) == pytest.approx(1.0, abs=1e-9)


class TestPowerTailUpper:
    def test_is_upper_bound(self):
        for s, m in [(2.0, 1.0), (2.0, 10.0), (3.5, 4.0), (1.5, 100.0)]:
            exact, _ = hurwitz_tail(s, m)
            assert power_tail_upper(s, m) >= exact

    def test_not_wildly_loose(self):
        exact, _ = hurwitz_tail(2.0, 100.0)
        assert power_tail_upper(2.0, 100.0) < 1.2 * exact

    def test_rejects_divergent(self):
        with pytest.raises(ValueError):
            power_tail_upper(1.0, 5.0)
