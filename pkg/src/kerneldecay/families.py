"""Weighted pole sequences and their summability structure.

A sequence family is the data {(c_n, t_n)} of complex weights and poles with
|t_n| -> infinity.  Families declare which absolute moment series

    sum_n |c_n| / |t_n|^k

converge; k = 0, 1, 2 give the nested condition classes AbsolutelySummable,
FirstOrderNatural and SecondOrderNatural.  Everything downstream (kernel
evaluation, circle integrals, decay bounds) consumes a family through the
small interface here: enumeration up to a radius in a fixed canonical order,
certified upper bounds on tail moments, and optional certified tail power
sums

    S_j(R) = sum_{|t_n| > R} c_n / t_n^j

which accelerate truncation far beyond what direct summation could certify.
"""

from __future__ import annotations

import cmath
import enum
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import FamilySpecError, MomentDivergesError
from .zetasums import alternating_tail, hurwitz_tail, power_tail_upper

SQRT2 = math.sqrt(2.0)

_RANDOM_BLOCK = 1 << 16


@dataclass(frozen=True)
class PoleTerm:
    """One weighted Cauchy pole: weight c, pole location t.

    The index records the generating integer of the family (signed for
    two-sided families) and only participates in ordering.
    """

    weight: complex
    pole: complex
    index: int = 0


class ConditionClass(enum.Enum):
    """Summability hypotheses, nested: ABSOLUTELY_SUMMABLE implies
    FIRST_ORDER_NATURAL implies SECOND_ORDER_NATURAL (for poles bounded
    away from 0)."""

    SECOND_ORDER_NATURAL = 2
    FIRST_ORDER_NATURAL = 1
    ABSOLUTELY_SUMMABLE = 0

    @property
    def moment_order(self) -> int:
        return self.value


@dataclass(frozen=True)
class AnnulusPartition:
    """Terms split at radii r/sqrt(2) and r*sqrt(2).

    start holds |t| < r/sqrt(2) strictly; middle holds
    r/sqrt(2) <= |t| <= r*sqrt(2) (boundary ties go to middle); the tail
    |t| > r*sqrt(2) stays symbolic and is handled through tail moments.
    """

    radius: float
    start: tuple[PoleTerm, ...]
    middle: tuple[PoleTerm, ...]
    tail_threshold: float


def _canonical_sort(abs_t, angles, indices):
    """Order by (|t|, principal angle, index).  Returns the permutation."""
    return np.lexsort((indices, angles, abs_t))


class SequenceFamily:
    """Base class for weighted pole sequences.

    Subclasses implement the generator and the certified tail bounds; this
    class provides prefix-cached enumeration in canonical order.  Instances
    are immutable after construction and safe to share across threads.
    """

    kind: str = "abstract"
    pairing_rule: str = "none"

    def __init__(self):
        self._lock = threading.Lock()
        self._cache_limit = 0.0
        self._poles = np.empty(0, dtype=np.complex128)
        self._weights = np.empty(0, dtype=np.complex128)
        self._abs_poles = np.empty(0, dtype=np.float64)
        self._indices = np.empty(0, dtype=np.int64)

    # -- subclass interface -------------------------------------------------

    @property
    def parameters(self) -> dict:
        return {}

    @property
    def seed(self):
        return None

    def _generate_arrays(self, limit: float):
        """Return (poles, weights, indices) arrays for all |t| <= limit."""
        raise NotImplementedError

    def abs_moment_converges(self, k: float) -> bool:
        """Whether sum |c_n| / |t_n|^k converges."""
        raise NotImplementedError

    def abs_tail_moment(self, R: float, k: float) -> float:
        """Certified upper bound on sum_{|t|>R} |c_n| / |t_n|^k."""
        raise NotImplementedError

    def power_tail_sum(self, R: float, j: int):
        """(value, error) for S_j(R) = sum_{|t|>R} c_n / t_n^j, or None."""
        return None

    def power_sum_envelope(self, R: float, min_j: int):
        """(C, m) with |S_j(R)| <= C * m^{-j} for every j >= min_j, or None.

        m is a lower bound on the modulus of every tail pole, so the
        envelope controls the whole geometric re-expansion of the tail.
        """
        return None

    def real_power_tail(self, R: float, s: float):
        """(value, error) for sum_{|t|>R} c_n / t_n^s with real s, defined
        only for families with positive real poles and real weights."""
        return None

    @property
    def convergence_exponent(self):
        """rho = inf{s > 0 : sum |t_n|^-s < infinity}, or the string
        "unknown" when no analytic value is available."""
        return "unknown"

    # -- shared machinery ----------------------------------------------------

    @property
    def condition_classes(self) -> frozenset:
        classes = set()
        if self.abs_moment_converges(2):
            classes.add(ConditionClass.SECOND_ORDER_NATURAL)
        if self.abs_moment_converges(1):
            classes.add(ConditionClass.FIRST_ORDER_NATURAL)
        if self.abs_moment_converges(0):
            classes.add(ConditionClass.ABSOLUTELY_SUMMABLE)
        return frozenset(classes)

    def _ensure(self, R: float):
        if R <= self._cache_limit:
            return
        with self._lock:
            if R <= self._cache_limit:
                return
            limit = max(R, 2.0 * self._cache_limit, 16.0)
            poles, weights, indices = self._generate_arrays(limit)
            poles = np.asarray(poles, dtype=np.complex128)
            weights = np.asarray(weights, dtype=np.complex128)
            indices = np.asarray(indices, dtype=np.int64)
            abs_poles = np.abs(poles)
            angles = np.angle(poles)
            order = _canonical_sort(abs_poles, angles, indices)
            self._poles = poles[order]
            self._weights = weights[order]
            self._abs_poles = abs_poles[order]
            self._indices = indices[order]
            self._cache_limit = limit

    def arrays_up_to(self, R: float, strict: bool = False):
        """(poles, weights, abs_poles) arrays for |t| <= R (or < R)."""
        if R < 0:
            raise ValueError("radius must be nonnegative")
        self._ensure(R)
        side = "left" if strict else "right"
        cut = int(np.searchsorted(self._abs_poles, R, side=side))
        return self._poles[:cut], self._weights[:cut], self._abs_poles[:cut]

    def terms_up_to(self, R: float) -> list[PoleTerm]:
        """All terms with |t| <= R in canonical order."""
        self._ensure(R)
        cut = int(np.searchsorted(self._abs_poles, R, side="right"))
        return [
            PoleTerm(complex(self._weights[i]), complex(self._poles[i]),
                     int(self._indices[i]))
            for i in range(cut)
        ]

    def count_up_to(self, R: float) -> int:
        self._ensure(R)
        return int(np.searchsorted(self._abs_poles, R, side="right"))

    def __repr__(self):
        params = ", ".join(f"{k}={v}" for k, v in self.parameters.items())
        return f"{self.kind}({params})"


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------


class AlternatingFamily(SequenceFamily):
    """Two-sided alternating family: poles n for every integer n (including
    n = 0), weights (-1)^n.

    Only the second-order moment converges, but the symmetric pairing
    (n with -n) makes first-order evaluation meaningful: the paired tail
    power sums vanish for odd j, so S_1(R) = 0 exactly.
    """

    kind = "alt"
    pairing_rule = "symmetric"

    @property
    def convergence_exponent(self):
        return 1.0

    def _generate_arrays(self, limit: float):
        n_max = int(math.floor(limit))
        ns = np.arange(1, n_max + 1, dtype=np.int64)
        signs = np.where(ns % 2 == 0, 1.0, -1.0)
        indices = np.concatenate(([0], ns, -ns))
        poles = indices.astype(np.complex128)
        weights = np.concatenate(([1.0], signs, signs)).astype(np.complex128)
        return poles, weights, indices

    def abs_moment_converges(self, k):
        return k > 1

    def abs_tail_moment(self, R, k):
        if not self.abs_moment_converges(k):
            raise MomentDivergesError(
                f"sum |c|/|t|^{k} diverges for the alternating family")
        m = math.floor(R) + 1
        return 2.0 * power_tail_upper(k, float(m))

    def power_tail_sum(self, R, j):
        m = math.floor(R) + 1
        if j % 2 == 1:
            return 0.0 + 0.0j, 0.0
        value, err = alternating_tail(float(j), m)
        return complex(2.0 * value), 2.0 * err

    def power_sum_envelope(self, R, min_j):
        # |S_j| <= 2 m^-j: odd j vanish, even j are alternating tails whose
        # magnitude is below their first term.
        m = float(math.floor(R) + 1)
        return 2.0, m


class AlternatingReciprocalFamily(SequenceFamily):
    """Two-sided family with poles n (n != 0) and weights (-1)^n / n.

    Absolutely convergent at first order: sum |c|/|t| = sum 1/n^2.
    """

    kind = "altrecip"

    @property
    def convergence_exponent(self):
        return 1.0

    def _generate_arrays(self, limit: float):
        n_max = int(math.floor(limit))
        ns = np.arange(1, n_max + 1, dtype=np.int64)
        signs = np.where(ns % 2 == 0, 1.0, -1.0)
        c_pos = signs / ns
        indices = np.concatenate((ns, -ns))
        poles = indices.astype(np.complex128)
        weights = np.concatenate((c_pos, -c_pos)).astype(np.complex128)
        return poles, weights, indices

    def abs_moment_converges(self, k):
        return k > 0

    def abs_tail_moment(self, R, k):
        if not self.abs_moment_converges(k):
            raise MomentDivergesError(
                f"sum |c|/|t|^{k} diverges for the altrecip family")
        m = math.floor(R) + 1
        return 2.0 * power_tail_upper(k + 1.0, float(m))

    def power_tail_sum(self, R, j):
        # Paired terms cancel for even j and double for odd j.
        m = math.floor(R) + 1
        if j % 2 == 0:
            return 0.0 + 0.0j, 0.0
        value, err = alternating_tail(float(j + 1), m)
        return complex(2.0 * value), 2.0 * err

    def power_sum_envelope(self, R, min_j):
        m = float(math.floor(R) + 1)
        return 2.0 / m, m


class ReciprocalFamily(SequenceFamily):
    """Poles t_n = n, weights c_n = n^(-a) for n >= 1.

    a = 1 and a = 2 are the classical first-order and absolutely summable
    examples; a = 0 (unit weights) satisfies only the second-order
    condition.
    """

    kind = "reciprocal"

    def __init__(self, a: float):
        super().__init__()
        if a < 0:
            raise FamilySpecError("reciprocal family requires a >= 0")
        self.a = float(a)

    @property
    def parameters(self):
        return {"a": self.a}

    @property
    def convergence_exponent(self):
        return 1.0

    def _generate_arrays(self, limit: float):
        n_max = int(math.floor(limit))
        ns = np.arange(1, n_max + 1, dtype=np.int64)
        poles = ns.astype(np.complex128)
        weights = (ns.astype(np.float64) ** (-self.a)).astype(np.complex128)
        return poles, weights, ns

    def abs_moment_converges(self, k):
        return self.a + k > 1

    def abs_tail_moment(self, R, k):
        if not self.abs_moment_converges(k):
            raise MomentDivergesError(
                f"sum |c|/|t|^{k} diverges for reciprocal(a={self.a})")
        m = math.floor(R) + 1
        return power_tail_upper(self.a + k, float(m))

    def real_power_tail(self, R, s):
        if self.a + s <= 1:
            return None
        m = math.floor(R) + 1
        value, err = hurwitz_tail(self.a + s, float(m))
        return value, err

    def power_tail_sum(self, R, j):
        if self.a + j <= 1:
            return None
        value, err = self.real_power_tail(R, float(j))
        return complex(value), err

    def power_sum_envelope(self, R, min_j):
        if self.a + min_j <= 1:
            return None
        m = float(math.floor(R) + 1)
        # sum_{n>=m} n^(-a-j) <= m^(-a-j) (1 + m/(a+j-1)) for every j >= min_j
        c = m ** (-self.a) * (1.0 + m / (self.a + min_j - 1.0))
        return c, m


class SquaresFamily(SequenceFamily):
    """Poles t_n = n^2, weights c_n = 1.  Second-order natural only;
    convergence exponent 1/2."""

    kind = "squares"

    @property
    def convergence_exponent(self):
        return 0.5

    def _generate_arrays(self, limit: float):
        n_max = int(math.isqrt(int(math.floor(limit))))
        while (n_max + 1) ** 2 <= limit:
            n_max += 1
        while n_max >= 1 and n_max ** 2 > limit:
            n_max -= 1
        ns = np.arange(1, n_max + 1, dtype=np.int64)
        poles = (ns.astype(np.float64) ** 2).astype(np.complex128)
        weights = np.ones(n_max, dtype=np.complex128)
        return poles, weights, ns

    def _first_tail_index(self, R):
        m = int(math.isqrt(int(math.floor(R)))) + 1
        while m > 1 and (m - 1) ** 2 > R:
            m -= 1
        return m

    def abs_moment_converges(self, k):
        return 2.0 * k > 1

    def abs_tail_moment(self, R, k):
        if not self.abs_moment_converges(k):
            raise MomentDivergesError(
                f"sum |c|/|t|^{k} diverges for the squares family")
        m = self._first_tail_index(R)
        return power_tail_upper(2.0 * k, float(m))

    def real_power_tail(self, R, s):
        if 2.0 * s <= 1:
            return None
        m = self._first_tail_index(R)
        return hurwitz_tail(2.0 * s, float(m))

    def power_tail_sum(self, R, j):
        if 2.0 * j <= 1:
            return None
        value, err = self.real_power_tail(R, float(j))
        return complex(value), err

    def power_sum_envelope(self, R, min_j):
        m = float(self._first_tail_index(R))
        # sum_{n>=m} n^(-2j) <= (m^2)^(-j) (1 + m/(2 min_j - 1))
        return 1.0 + m / (2.0 * min_j - 1.0), m * m


class GeometricFamily(SequenceFamily):
    """Poles t_n = n, weights c_n = 2^(-n).  Absolutely summable; the
    weights decay so fast that every moment converges and the convergence
    exponent of the poles is still 1."""

    kind = "geometric"

    @property
    def convergence_exponent(self):
        return 1.0

    def _generate_arrays(self, limit: float):
        n_max = int(math.floor(limit))
        ns = np.arange(1, n_max + 1, dtype=np.int64)
        poles = ns.astype(np.complex128)
        weights = np.exp2(-ns.astype(np.float64)).astype(np.complex128)
        return poles, weights, ns

    def abs_moment_converges(self, k):
        return True

    def abs_tail_moment(self, R, k):
        m = math.floor(R) + 1
        # sum_{n>=m} 2^-n n^-k <= m^-k 2^(1-m)
        return float(m) ** (-k) * 2.0 ** (1 - m)

    def real_power_tail(self, R, s):
        m = math.floor(R) + 1
        total = 0.0
        for n in range(m, m + 130):
            total += 2.0 ** (-n) * float(n) ** (-s)
        err = 2.0 ** (1 - (m + 130)) * float(m + 130) ** (-s)
        return total, err + 1e-16 * abs(total)

    def power_tail_sum(self, R, j):
        value, err = self.real_power_tail(R, float(j))
        return complex(value), err

    def power_sum_envelope(self, R, min_j):
        m = float(math.floor(R) + 1)
        return 2.0 ** (1 - m), m


class RandomFamily(SequenceFamily):
    """Random family: |t_n| = n^(1/rho) with uniform random angles,
    |c_n| = |t_n|^(-a) with uniform random phases.

    Reproducible: draws come from seeded generator streams in fixed blocks
    of 2^16 indices, so enumeration up to any radius is bitwise identical
    across runs and platforms with the same seed.

    No certified tail power sums are available (random angles admit no
    useful cancellation bound), so kernel evaluation falls back to
    absolute tail bounds.
    """

    kind = "random"

    def __init__(self, rho: float, a: float, seed: int):
        super().__init__()
        if rho <= 0:
            raise FamilySpecError("random family requires rho > 0")
        self.rho = float(rho)
        self.a = float(a)
        self._seed = int(seed)

    @property
    def parameters(self):
        return {"rho": self.rho, "a": self.a, "seed": self._seed}

    @property
    def seed(self):
        return self._seed

    @property
    def convergence_exponent(self):
        return self.rho

    def _count_at(self, limit: float) -> int:
        # n^(1/rho) <= limit  <=>  n <= limit^rho; nudge guards the float
        # power so the generated set always matches this count.
        n = int(math.floor(limit ** self.rho))
        while (n + 1) ** (1.0 / self.rho) <= limit:
            n += 1
        while n >= 1 and n ** (1.0 / self.rho) > limit:
            n -= 1
        return n

    def _generate_arrays(self, limit: float):
        n_max = self._count_at(limit)
        blocks = (n_max + _RANDOM_BLOCK - 1) // _RANDOM_BLOCK
        ns = np.arange(1, n_max + 1, dtype=np.int64)
        moduli = ns.astype(np.float64) ** (1.0 / self.rho)
        angles = np.empty(n_max, dtype=np.float64)
        phases = np.empty(n_max, dtype=np.float64)
        for b in range(blocks):
            rng = np.random.default_rng([self._seed, b])
            draw = rng.uniform(0.0, 2.0 * math.pi, size=(2, _RANDOM_BLOCK))
            lo = b * _RANDOM_BLOCK
            hi = min(n_max, lo + _RANDOM_BLOCK)
            angles[lo:hi] = draw[0, : hi - lo]
            phases[lo:hi] = draw[1, : hi - lo]
        poles = moduli * np.exp(1j * angles)
        weights = moduli ** (-self.a) * np.exp(1j * phases)
        return poles, weights, ns

    def abs_moment_converges(self, k):
        return self.a + k > self.rho

    def abs_tail_moment(self, R, k):
        if not self.abs_moment_converges(k):
            raise MomentDivergesError(
                f"sum |c|/|t|^{k} diverges for random(rho={self.rho}, "
                f"a={self.a})")
        # Tail indices n > R^rho; a one-smaller start keeps the bound an
        # upper bound under float rounding of R^rho.
        m = max(1, int(math.floor(R ** self.rho)))
        return power_tail_upper((self.a + k) / self.rho, float(m))


class ExplicitFamily(SequenceFamily):
    """A finite, explicitly listed family.  All moments are finite sums, so
    every condition class holds and all tail quantities are exact."""

    kind = "explicit"

    def __init__(self, terms, kind: str | None = None):
        super().__init__()
        listed = []
        for i, term in enumerate(terms):
            if isinstance(term, PoleTerm):
                listed.append(term)
            else:
                c, t = term
                listed.append(PoleTerm(complex(c), complex(t), i))
        self._terms = tuple(listed)
        if kind is not None:
            self.kind = kind
        self._all_poles = np.array([t.pole for t in self._terms],
                                   dtype=np.complex128)
        self._all_weights = np.array([t.weight for t in self._terms],
                                     dtype=np.complex128)
        self._all_abs = np.abs(self._all_poles)
        self._all_indices = np.array([t.index for t in self._terms],
                                     dtype=np.int64)

    @property
    def parameters(self):
        return {"terms": len(self._terms)}

    @property
    def convergence_exponent(self):
        return 0.0

    def _generate_arrays(self, limit: float):
        return self._all_poles, self._all_weights, self._all_indices

    def _ensure(self, R):
        if self._cache_limit == 0.0:
            with self._lock:
                if self._cache_limit == 0.0:
                    order = _canonical_sort(
                        self._all_abs, np.angle(self._all_poles),
                        self._all_indices)
                    self._poles = self._all_poles[order]
                    self._weights = self._all_weights[order]
                    self._abs_poles = self._all_abs[order]
                    self._indices = self._all_indices[order]
                    self._cache_limit = math.inf

    def abs_moment_converges(self, k):
        return True

    def _tail_mask(self, R):
        self._ensure(R)
        return self._abs_poles > R

    def abs_tail_moment(self, R, k):
        mask = self._tail_mask(R)
        if not mask.any():
            return 0.0
        vals = np.abs(self._weights[mask]) / self._abs_poles[mask] ** k
        return float(np.sum(vals))

    def power_tail_sum(self, R, j):
        mask = self._tail_mask(R)
        if not mask.any():
            return 0.0 + 0.0j, 0.0
        value = complex(np.sum(self._weights[mask] / self._poles[mask] ** j))
        return value, 1e-15 * abs(value) * (1 + int(mask.sum()))

    def power_sum_envelope(self, R, min_j):
        mask = self._tail_mask(R)
        if not mask.any():
            return 0.0, max(R, 1.0)
        m = float(self._abs_poles[mask].min())
        c = float(np.sum(np.abs(self._weights[mask])))
        return c, m


def single(c: complex, t: complex) -> ExplicitFamily:
    """One-term family, handy for oracles and edge cases."""
    return ExplicitFamily([(c, t)], kind="single")


class SqrtTransformFamily(SequenceFamily):
    """Image of a family under the square-root substitution: poles become
    sqrt(t_n) (principal branch), weights become c_n / sqrt(t_n).

    The first-order moment is preserved term by term:
    |c/sqrt(t)| / |sqrt(t)| = |c| / |t|.  The convergence exponent doubles
    (sum |sqrt(t)|^-s converges iff s > 2 rho); the exponent of the source
    family is kept in the parameters for reference.
    """

    kind = "sqrt_transform"

    def __init__(self, base: SequenceFamily):
        super().__init__()
        self.base = base

    @property
    def parameters(self):
        params = {"base": repr(self.base)}
        rho = self.base.convergence_exponent
        if rho != "unknown":
            params["source_exponent"] = rho
        return params

    @property
    def pairing_rule(self):
        return "none"

    @property
    def convergence_exponent(self):
        rho = self.base.convergence_exponent
        if rho == "unknown":
            return "unknown"
        return 2.0 * rho

    def _generate_arrays(self, limit: float):
        poles, weights, indices = self.base.arrays_up_to(limit * limit)
        roots = np.sqrt(poles)
        return roots, weights / roots, indices.copy()

    def abs_moment_converges(self, k):
        # |c/sqrt(t)| / |sqrt(t)|^k = |c| / |t|^((k+1)/2)
        return self.base.abs_moment_converges((k + 1.0) / 2.0)

    def abs_tail_moment(self, R, k):
        if not self.abs_moment_converges(k):
            raise MomentDivergesError(
                f"sum |c|/|t|^{k} diverges for {self!r}")
        return self.base.abs_tail_moment(R * R, (k + 1.0) / 2.0)

    def power_tail_sum(self, R, j):
        # S'_j = sum_{|t| > R^2} c / t^((j+1)/2); needs real powers of the
        # base poles, available only for positive-real-pole bases.
        result = self.base.real_power_tail(R * R, (j + 1.0) / 2.0)
        if result is None:
            return None
        value, err = result
        return complex(value), err

    def power_sum_envelope(self, R, min_j):
        # |S'_j| <= sum_{|t|>R^2} |c| |t|^(-(j+1)/2)
        #        <= (sum |c| |t|^(-(min_j+1)/2)) * R^(min_j - j)
        # since |t|^(1/2) > R on the tail.
        try:
            tail = self.base.abs_tail_moment(R * R, (min_j + 1.0) / 2.0)
        except MomentDivergesError:
            return None
        return tail * R ** min_j, R


class SquaredPoleFamily(SequenceFamily):
    """Image of a family under pole squaring: poles t_n^2, weights c_n t_n.

    This is the family produced by the averaging operator applied to an
    order-2 kernel sum; the convergence exponent halves.
    """

    kind = "squared_poles"

    def __init__(self, base: SequenceFamily):
        super().__init__()
        self.base = base

    @property
    def parameters(self):
        return {"base": repr(self.base)}

    @property
    def convergence_exponent(self):
        rho = self.base.convergence_exponent
        if rho == "unknown":
            return "unknown"
        return 0.5 * rho

    def _generate_arrays(self, limit: float):
        poles, weights, indices = self.base.arrays_up_to(math.sqrt(limit))
        return poles * poles, weights * poles, indices.copy()

    def abs_moment_converges(self, k):
        # |c t| / |t^2|^k = |c| / |t|^(2k-1)
        return self.base.abs_moment_converges(2.0 * k - 1.0)

    def abs_tail_moment(self, R, k):
        if not self.abs_moment_converges(k):
            raise MomentDivergesError(
                f"sum |c|/|t|^{k} diverges for {self!r}")
        return self.base.abs_tail_moment(math.sqrt(R), 2.0 * k - 1.0)

    def power_tail_sum(self, R, j):
        # S'_j = sum c t / t^(2j) = S_{2j-1} of the base beyond sqrt(R).
        return self.base.power_tail_sum(math.sqrt(R), 2 * j - 1)

    def power_sum_envelope(self, R, min_j):
        base_env = self.base.power_sum_envelope(math.sqrt(R), 2 * min_j - 1)
        if base_env is None:
            return None
        c, m = base_env
        # |S'_j| = |S_{2j-1}| <= C m^-(2j-1) = (C m) (m^2)^-j
        return c * m, m * m


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def enumerate_up_to(family: SequenceFamily, R: float) -> list[PoleTerm]:
    """All terms with |t| <= R in canonical order (|t|, angle, index)."""
    if R <= 0:
        raise ValueError("enumerate_up_to requires R > 0")
    return family.terms_up_to(R)


def partial_moment(family: SequenceFamily, R: float, k: int) -> float:
    """sum_{|t| < R} |c| / |t|^k over enumerated terms (strict inequality),
    accumulated in canonical order with compensated summation."""
    if R <= 0:
        raise ValueError("partial_moment requires R > 0")
    _, weights, abs_poles = family.arrays_up_to(R, strict=True)
    if len(abs_poles) == 0:
        return 0.0
    if k > 0 and bool(np.any(abs_poles == 0.0)):
        return math.inf
    if k == 0:
        vals = np.abs(weights)
    else:
        vals = np.abs(weights) / abs_poles ** k
    # fsum is exact, so canonical order gives a deterministic result.
    return math.fsum(vals)


def tail_moment(family: SequenceFamily, R: float, k: int) -> float:
    """Certified upper bound on sum_{|t| > R} |c| / |t|^k."""
    if R <= 0:
        raise ValueError("tail_moment requires R > 0")
    return family.abs_tail_moment(R, k)


def partition(family: SequenceFamily, r: float) -> AnnulusPartition:
    """Split the terms at r/sqrt(2) and r*sqrt(2); ties go to middle."""
    if r <= 0:
        raise ValueError("partition requires r > 0")
    lo = r / SQRT2
    hi = r * SQRT2
    terms = family.terms_up_to(hi)
    start = tuple(t for t in terms if abs(t.pole) < lo)
    middle = tuple(t for t in terms if abs(t.pole) >= lo)
    return AnnulusPartition(radius=r, start=start, middle=middle,
                            tail_threshold=hi)


def convergence_exponent(family: SequenceFamily):
    return family.convergence_exponent


def transform_sqrt(family: SequenceFamily) -> SequenceFamily:
    """Poles sqrt(t_n) (principal branch), weights c_n / sqrt(t_n)."""
    if isinstance(family, ExplicitFamily):
        new_terms = []
        for term in family.terms_up_to(math.inf):
            root = cmath.sqrt(term.pole)
            if root == 0:
                raise FamilySpecError(
                    "transform_sqrt requires nonzero poles")
            new_terms.append(
                PoleTerm(term.weight / root, root, term.index))
        return ExplicitFamily(new_terms, kind="sqrt_transform")
    return SqrtTransformFamily(family)


# ---------------------------------------------------------------------------
# Catalog and the family specification grammar
# ---------------------------------------------------------------------------

#: The built-in catalog, letter-keyed.  reciprocal(a=1), reciprocal(a=2)
#: and reciprocal(a=0) are the classical first-order, absolutely summable
#: and second-order-only weight choices on integer poles.
BUILTIN_CATALOG = (
    ("a", "alt()"),
    ("b", "altrecip()"),
    ("c", "reciprocal(a=1)"),
    ("d", "reciprocal(a=2)"),
    ("e", "squares()"),
    ("f", "geometric()"),
    ("g", "reciprocal(a=0)"),
    ("h", "random(rho=1.5, a=2, seed=42)"),
)

_CATALOG_MAP = dict(BUILTIN_CATALOG)


def _parse_value(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise FamilySpecError(f"cannot parse parameter value {text!r}")


def parse_family_spec(spec: str) -> SequenceFamily:
    """Build a family from its textual form `kind(param=value, ...)`.

    Single letters a..h select the built-in catalog entries.  Examples:
    `alt`, `reciprocal(a=1)`, `random(rho=1.5, a=2, seed=42)`,
    `single(c=1, t=2+1j)`.
    """
    text = spec.strip()
    if text in _CATALOG_MAP:
        text = _CATALOG_MAP[text]
    if "(" in text:
        if not text.endswith(")"):
            raise FamilySpecError(f"malformed family spec {spec!r}")
        kind, _, inner = text.partition("(")
        kind = kind.strip()
        inner = inner[:-1].strip()
    else:
        kind, inner = text, ""
    params = {}
    if inner:
        for piece in inner.split(","):
            if "=" not in piece:
                raise FamilySpecError(
                    f"expected param=value in family spec {spec!r}")
            key, _, value = piece.partition("=")
            params[key.strip()] = _parse_value(value)
    try:
        if kind == "alt":
            return AlternatingFamily()
        if kind == "altrecip":
            return AlternatingReciprocalFamily()
        if kind == "reciprocal":
            return ReciprocalFamily(a=float(params.pop("a")))
        if kind == "squares":
            return SquaresFamily()
        if kind == "geometric":
            return GeometricFamily()
        if kind == "random":
            return RandomFamily(rho=float(params.pop("rho")),
                                a=float(params.pop("a")),
                                seed=int(params.pop("seed")))
        if kind == "single":
            return single(complex(params.pop("c")), complex(params.pop("t")))
    except KeyError as exc:
        raise FamilySpecError(
            f"family {kind!r} is missing parameter {exc.args[0]!r}")
    raise FamilySpecError(f"unknown family kind {kind!r}")
