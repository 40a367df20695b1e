"""Certified tail sums of power series over integer and half-integer lattices.

Everything here returns a (value, error) pair where error is a guaranteed
absolute bound, not an estimate.  The workhorse is the Euler-Maclaurin
expansion of the Hurwitz tail

    T(s, x) = sum_{m>=0} (x+m)^(-s)
            = x^(1-s)/(s-1) + x^(-s)/2
              + sum_{j=1..J} B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^(-s-2j+1)
              + R_J,

valid for real s > 1 and x > 0.  For f(u) = (x+u)^(-s) every derivative has
constant sign, so the classical remainder property applies: R_J is bounded in
magnitude by the first omitted correction term.  The argument is shifted
upward until x is large enough that the correction terms decrease, which
keeps the certified remainder near machine precision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

# Bernoulli numbers B_2 .. B_30 as exact rationals.
BERNOULLI_FRACTIONS = {
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
    14: Fraction(7, 6),
    16: Fraction(-3617, 510),
    18: Fraction(43867, 798),
    20: Fraction(-174611, 330),
    22: Fraction(854513, 138),
    24: Fraction(-236364091, 2730),
    26: Fraction(8553103, 6),
    28: Fraction(-23749461029, 870),
    30: Fraction(8615841276005, 14322),
}

BERNOULLI = {k: float(v) for k, v in BERNOULLI_FRACTIONS.items()}

# B_{2j} / (2j)! for the Euler-Maclaurin correction terms.
_B_OVER_FACT = {
    k: float(v / math.factorial(k)) for k, v in BERNOULLI_FRACTIONS.items()
}

_EM_TERMS = 13          # correction terms use B_2 .. B_26
_EM_REMAINDER = 28      # remainder bounded by the B_28 term


def hurwitz_tail(s: float, x: float) -> tuple[float, float]:
    """Return (value, certified absolute error) for T(s,x) = sum_{m>=0} (x+m)^-s.

    Requires real s > 1 and x > 0.
    """
    if not s > 1.0:
        raise ValueError(f"hurwitz_tail requires s > 1, got s={s}")
    if not x > 0.0:
        raise ValueError(f"hurwitz_tail requires x > 0, got x={x}")
    # Shift until the correction terms decrease fast: need roughly
    # (s + 2J) <= 2*pi*A.  A >= max(24, (s+30)/6) is comfortably inside.
    target = max(24.0, (s + 30.0) / 6.0)
    head = 0.0
    while x < target:
        head += x ** (-s)
        x += 1.0
    a = x
    inv_a2 = 1.0 / (a * a)
    value = a ** (1.0 - s) / (s - 1.0) + 0.5 * a ** (-s)
    # a^(-s-2j+1) built iteratively from a^(1-s).
    power = a ** (1.0 - s) * inv_a2          # a^(-s-1), the j=1 power
    poch = s                                  # s(s+1)...(s+2j-2), j=1 term
    for j in range(1, _EM_TERMS + 1):
        value += _B_OVER_FACT[2 * j] * poch * power
        poch *= (s + 2.0 * j - 1.0) * (s + 2.0 * j)
        power *= inv_a2
    # First omitted term bounds the remainder in magnitude.
    err = abs(_B_OVER_FACT[_EM_REMAINDER] * poch * power)
    # Tiny slack for float rounding of the evaluated expansion itself.
    err += 1e-15 * (abs(value) + head)
    return head + value, err


def alternating_tail(s: float, n_from: int) -> tuple[float, float]:
    """Return (value, certified error) for sum_{n >= n_from} (-1)^n n^-s.

    Requires real s > 1 and n_from >= 1.  Split by parity: even n = 2m and
    odd n = 2m+1 each give a Hurwitz tail with argument scaled by 2.
    """
    if n_from < 1:
        raise ValueError("alternating_tail requires n_from >= 1")
    m_even = (n_from + 1) // 2          # smallest m with 2m >= n_from
    m_odd = n_from // 2                 # smallest m with 2m+1 >= n_from
    even_val, even_err = hurwitz_tail(s, float(m_even))
    odd_val, odd_err = hurwitz_tail(s, m_odd + 0.5)
    scale = 2.0 ** (-s)
    return scale * (even_val - odd_val), scale * (even_err + odd_err)


@lru_cache(maxsize=None)
def zeta(s: float) -> float:
    """zeta(s) for real s > 1 (used for reference series near z = 0)."""
    value, _err = hurwitz_tail(float(s), 1.0)
    return value


def power_tail_upper(s: float, m: float) -> float:
    """Certified upper bound on sum_{n >= m} n^-s by integral comparison:

        sum_{n>=m} n^-s <= m^-s + integral_m^inf x^-s dx
                         = m^-s + m^(1-s)/(s-1),

    valid for real s > 1 and m >= 1.
    """
    if not s > 1.0:
        raise ValueError(f"power_tail_upper requires s > 1, got s={s}")
    if m < 1.0:
        raise ValueError("power_tail_upper requires m >= 1")
    return m ** (-s) + m ** (1.0 - s) / (s - 1.0)
