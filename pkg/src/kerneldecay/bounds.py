"""Closed-form right-hand sides, decay predictions, and the exponent bootstrap.

Moment conventions.  For a threshold r > 0,

    partial_moment(r, k) = sum over |t| < r   of |c| / |t|^k      (strict <)
    tail_moment(r, k)    = sum over |t| > r   of |c| / |t|^k      (strict >)

so a pole exactly on the threshold circle belongs to neither side; the
middle band of the splitting lemmas is the closed complement
r/sqrt(2) <= |t| <= r sqrt(2).  Partial moments are exact finite sums;
tail moments come from the family's certified upper bound, so every rhs
below is itself a certified upper bound for its inequality.

The bounds (0 < p < 1 throughout, p < 1/2 where 2p-th powers of the
order-2 kernel must integrate):

    keldysh_rhs        2 (1 + partial_moment(r, 0)/r + tail_moment(r, 1))
    ostrovskiy_rhs     (8 pi / cos(pi p/2)) (tail_moment(r, 1)^p
                                             + (partial_moment(r, 0)/r)^p)
    tail_lemma_rhs     (8 pi / cos(pi p/2)) tail_moment(r sqrt 2, 2)^p
    start_lemma_rhs    (8 pi / cos(pi p/2)) (partial_moment(r/sqrt 2, 0)/r^2)^p
    single_term_bound  (2 pi / (1 - 2p)) r^{-2p}
    middle_trivial_rhs (2 pi / (1 - 2p)) r^{-2p} sum_middle |c|^p

Every operation accepts either a SequenceFamily or an explicit term
list (PoleTerm objects or (weight, pole) pairs); lists are wrapped in an
ExplicitFamily on the spot, which is what makes the bounds usable on
the indicator-masked sequences appearing inside the main proof.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import ClassInsufficientError
from .families import (
    ConditionClass,
    ExplicitFamily,
    PoleTerm,
    SequenceFamily,
)


@dataclasses.dataclass(frozen=True)
class BoundReport:
    """A named right-hand side with the moment sums that produced it."""

    name: str
    r: float
    p: float
    rhs: float
    inputs: dict

    def __post_init__(self):
        if not self.rhs >= 0.0:
            raise ValueError("bound right-hand sides are nonnegative")


def as_family(source) -> SequenceFamily:
    """Coerce a term list to an ExplicitFamily; pass families through."""
    if isinstance(source, SequenceFamily):
        return source
    return ExplicitFamily(list(source), kind="masked")


def partial_moment(source, r: float, k: float) -> float:
    """Exact sum of |c| / |t|^k over the poles with |t| < r (strict)."""
    family = as_family(source)
    if not r > 0.0:
        raise ValueError("threshold r must be positive")
    _, weights, abs_poles = family.arrays_up_to(r, strict=True)
    if len(weights) == 0:
        return 0.0
    if k == 0:
        return float(np.abs(weights).sum())
    if np.any(abs_poles == 0.0):
        raise ValueError("partial moment with k > 0 undefined for a pole at 0")
    return float((np.abs(weights) / abs_poles ** k).sum())


def tail_moment(source, r: float, k: float) -> float:
    """Certified upper bound on the sum of |c| / |t|^k over |t| > r."""
    family = as_family(source)
    if not r > 0.0:
        raise ValueError("threshold r must be positive")
    return float(family.abs_tail_moment(r, k))


def middle_terms(source, r: float) -> list[PoleTerm]:
    """The terms in the closed band r/sqrt(2) <= |t| <= r sqrt(2)."""
    family = as_family(source)
    if not r > 0.0:
        raise ValueError("threshold r must be positive")
    lo = r / math.sqrt(2.0)
    return [term for term in family.terms_up_to(r * math.sqrt(2.0))
            if abs(term.pole) >= lo]


def _require_class(family: SequenceFamily, k: int, bound_name: str):
    if not family.abs_moment_converges(k):
        raise ClassInsufficientError(
            f"class insufficient for {bound_name}: needs the order-{k}"
            f" moment sum |c|/|t|^{k} to converge")


def _smirnov_constant(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError("exponent p must lie in (0, 1)")
    return 8.0 * math.pi / math.cos(math.pi * p / 2.0)


def _small_p_constant(p: float) -> float:
    if not 0.0 < p < 0.5:
        raise ValueError("p out of range: need 0 < p < 1/2")
    return 2.0 * math.pi / (1.0 - 2.0 * p)


def keldysh_rhs(source, r: float) -> float:
    """2 (1 + partial_moment(r, 0)/r + tail_moment(r, 1)): upper bound on
    the ln+ circle integral of the order-1 kernel sum."""
    family = as_family(source)
    _require_class(family, 1, "keldysh_rhs")
    if not r > 0.0:
        raise ValueError("radius must be positive")
    return 2.0 * (1.0 + partial_moment(family, r, 0) / r
                  + tail_moment(family, r, 1))


def ostrovskiy_rhs(source, r: float, p: float) -> float:
    """(8 pi / cos(pi p/2)) (tail_moment(r,1)^p + (partial_moment(r,0)/r)^p):
    upper bound on the p-th power circle integral of the order-1 sum."""
    family = as_family(source)
    constant = _smirnov_constant(p)
    _require_class(family, 1, "ostrovskiy_rhs")
    if not r > 0.0:
        raise ValueError("radius must be positive")
    return constant * (tail_moment(family, r, 1) ** p
                       + (partial_moment(family, r, 0) / r) ** p)


def tail_lemma_rhs(source, r: float, p: float) -> float:
    """(8 pi / cos(pi p/2)) tail_moment(r sqrt 2, 2)^p: bound on the p-th
    power circle integral of the order-2 partial sum over |t| > r sqrt 2."""
    family = as_family(source)
    constant = _smirnov_constant(p)
    _require_class(family, 2, "tail_lemma_rhs")
    if not r > 0.0:
        raise ValueError("radius must be positive")
    return constant * tail_moment(family, r * math.sqrt(2.0), 2) ** p


def start_lemma_rhs(source, r: float, p: float) -> float:
    """(8 pi / cos(pi p/2)) (partial_moment(r/sqrt 2, 0)/r^2)^p: bound on
    the p-th power circle integral of the order-2 partial sum over
    |t| < r / sqrt 2, via reflection."""
    family = as_family(source)
    constant = _smirnov_constant(p)
    if not r > 0.0:
        raise ValueError("radius must be positive")
    head = partial_moment(family, r / math.sqrt(2.0), 0)
    return constant * (head / (r * r)) ** p


def single_term_bound(r: float, p: float) -> float:
    """(2 pi / (1 - 2p)) r^{-2p}, a bound uniform in the pole location t for
    integral_0^{2pi} d phi / |r e^{i phi} - t|^{2p}, 0 < p < 1/2."""
    constant = _small_p_constant(p)
    if not r > 0.0:
        raise ValueError("radius must be positive")
    return constant * r ** (-2.0 * p)


def middle_trivial_rhs(source, r: float, p: float) -> float:
    """single_term_bound(r, p) times sum of |c|^p over the closed middle
    band r/sqrt 2 <= |t| <= r sqrt 2 (termwise p-th power subadditivity)."""
    family = as_family(source)
    constant = _small_p_constant(p)
    if not r > 0.0:
        raise ValueError("radius must be positive")
    total = math.fsum(abs(term.weight) ** p
                      for term in middle_terms(family, r))
    return constant * r ** (-2.0 * p) * total


_BOUND_BUILDERS = {
    "keldysh": lambda fam, r, p: (keldysh_rhs(fam, r), {
        "partial_moment_0": partial_moment(fam, r, 0),
        "tail_moment_1": tail_moment(fam, r, 1)}),
    "ostrovskiy": lambda fam, r, p: (ostrovskiy_rhs(fam, r, p), {
        "partial_moment_0": partial_moment(fam, r, 0),
        "tail_moment_1": tail_moment(fam, r, 1)}),
    "tail": lambda fam, r, p: (tail_lemma_rhs(fam, r, p), {
        "tail_moment_2": tail_moment(fam, r * math.sqrt(2.0), 2)}),
    "start": lambda fam, r, p: (start_lemma_rhs(fam, r, p), {
        "partial_moment_0": partial_moment(fam, r / math.sqrt(2.0), 0)}),
    "middle_trivial": lambda fam, r, p: (middle_trivial_rhs(fam, r, p), {
        "middle_power_sum": math.fsum(
            abs(t.weight) ** p for t in middle_terms(fam, r))}),
    "single_term": lambda fam, r, p: (single_term_bound(r, p), {}),
}


def bound_report(name: str, source, r: float, p: float = math.nan) \
        -> BoundReport:
    """Compute one named bound and package the moment sums behind it."""
    if name not in _BOUND_BUILDERS:
        raise ValueError(f"unknown bound name {name!r}")
    family = as_family(source)
    rhs, inputs = _BOUND_BUILDERS[name](family, r, p)
    return BoundReport(name, float(r), float(p), rhs, inputs)


def bootstrap_exponent(rho: float, p: float, n: int) -> float:
    """The exponent -p + (rho + 1 + p) / 2^n after n bootstrap steps.

    Step n = 0 is the trivial middle estimate o(r^{rho + 1}); each
    application of the averaging bound maps the exponent alpha to
    (alpha - p) / 2, and the closed form is the n-th iterate.  The limit
    as n grows is -p, the fixed point.
    """
    rho, p, n = _validate_bootstrap(rho, p, n)
    return -p + (rho + 1.0 + p) / 2.0 ** n


def bootstrap_iterates(rho: float, p: float, n: int) -> list[float]:
    """[alpha_0, ..., alpha_n] with alpha_0 = rho + 1 and
    alpha_{k+1} = (alpha_k - p) / 2, computed by literal iteration."""
    rho, p, n = _validate_bootstrap(rho, p, n)
    iterates = [rho + 1.0]
    for _ in range(n):
        iterates.append((iterates[-1] - p) / 2.0)
    return iterates


def _validate_bootstrap(rho, p, n):
    rho = float(rho)
    p = float(p)
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    if not 0.0 < p < 0.5:
        raise ValueError("p out of range: need 0 < p < 1/2")
    if n != int(n) or n < 0:
        raise ValueError("n must be a nonnegative integer")
    return rho, p, int(n)


def theorem_prediction(condition_class: ConditionClass, p: float,
                       eps: float) -> float:
    """Predicted decay exponent s with I_p(r) = o(r^s) for each class."""
    if not 0.0 < p < 0.5:
        raise ValueError("p out of range: need 0 < p < 1/2")
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if condition_class is ConditionClass.SECOND_ORDER_NATURAL:
        return eps
    if condition_class is ConditionClass.FIRST_ORDER_NATURAL:
        return -(p - eps)
    if condition_class is ConditionClass.ABSOLUTELY_SUMMABLE:
        return -(2.0 * p - eps)
    raise ValueError(f"unknown condition class {condition_class!r}")


@dataclasses.dataclass(frozen=True)
class Decomposition:
    """Three-piece rewriting of an order-2 partial sum.

    style "first_order":
        sum c/(z-t)^2 = constant - z sum w1/(z-t) + z sum w2/(z-t)^2
        with constant = sum c/t^2, w1 = c/t^2, w2 = c/t.
    style "absolute":
        sum c/(z-t)^2 = (constant + 2 sum w1/(z-t) + sum w2/(z-t)^2) / z^2
        with constant = sum c, w1 = c t, w2 = c t^2.

    Calling the object evaluates the right-hand side, which must agree
    with the direct order-2 sum wherever both are defined.
    """

    style: str
    constant: complex
    order1_terms: tuple
    order2_terms: tuple

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=complex)
        zz = z_arr[..., np.newaxis]
        if self.order1_terms:
            p1 = np.array([t.pole for t in self.order1_terms])
            w1 = np.array([t.weight for t in self.order1_terms])
            s1 = (w1 / (zz - p1)).sum(axis=-1)
            p2 = np.array([t.pole for t in self.order2_terms])
            w2 = np.array([t.weight for t in self.order2_terms])
            s2 = (w2 / np.square(zz - p2)).sum(axis=-1)
        else:
            s1 = np.zeros(z_arr.shape, dtype=complex)
            s2 = np.zeros(z_arr.shape, dtype=complex)
        if self.style == "first_order":
            out = self.constant - z_arr * s1 + z_arr * s2
        else:
            if np.any(z_arr == 0):
                raise ValueError(
                    "absolute-style decomposition undefined at z = 0")
            out = (self.constant + 2.0 * s1 + s2) / np.square(z_arr)
        if z_arr.ndim == 0:
            return complex(out)
        return out


def _coerce_terms(terms):
    out = []
    for position, term in enumerate(terms):
        if isinstance(term, PoleTerm):
            out.append(term)
        else:
            c, t = term
            out.append(PoleTerm(complex(c), complex(t), position))
    return out


def decompose_first_order(terms) -> Decomposition:
    """Rewrite sum c/(z-t)^2 pulling one power of z out of each term:

        sum c/(z-t)^2 = sum c/t^2 - z sum (c/t^2)/(z-t) + z sum (c/t)/(z-t)^2.

    Requires every pole nonzero.  The weight lists carry one extra decay
    order each, which is what trades the order-2 natural condition for
    the order-1 one inside the main proof.
    """
    listed = _coerce_terms(terms)
    if any(term.pole == 0 for term in listed):
        raise ValueError("decomposition requires every pole nonzero")
    constant = complex(
        math.fsum((term.weight / term.pole ** 2).real for term in listed),
        math.fsum((term.weight / term.pole ** 2).imag for term in listed))
    order1 = tuple(PoleTerm(term.weight / term.pole ** 2, term.pole,
                            term.index) for term in listed)
    order2 = tuple(PoleTerm(term.weight / term.pole, term.pole, term.index)
                   for term in listed)
    return Decomposition("first_order", constant, order1, order2)


def decompose_absolute(terms) -> Decomposition:
    """Rewrite sum c/(z-t)^2 pulling 1/z^2 out of each term:

        sum c/(z-t)^2 = (1/z^2) sum c + (2/z^2) sum c t/(z-t)
                        + (1/z^2) sum c t^2/(z-t)^2,

    valid for z != 0; here the weight lists gain powers of t, trading the
    order-1 natural condition for plain absolute summability.
    """
    listed = _coerce_terms(terms)
    constant = complex(
        math.fsum(term.weight.real for term in listed),
        math.fsum(term.weight.imag for term in listed))
    order1 = tuple(PoleTerm(term.weight * term.pole, term.pole, term.index)
                   for term in listed)
    order2 = tuple(PoleTerm(term.weight * term.pole ** 2, term.pole,
                            term.index) for term in listed)
    return Decomposition("absolute", constant, order1, order2)
