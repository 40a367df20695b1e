"""Averaging operator J and its kernel-sum identities.

For f defined away from its poles set

    (J f)(z) = (f(sqrt z) - f(-sqrt z)) / (4 sqrt z),      z != 0,

with the branch sqrt(rho e^{i theta}) = sqrt(rho) e^{i theta / 2} for
theta in [0, 2 pi), so arguments land in [0, pi).  The value does not
depend on the branch: replacing sqrt z by -sqrt z flips numerator and
denominator together.

Acting termwise on an order-2 kernel sum the operator squares the poles:

    1/(w - t)^2 - 1/(-w - t)^2 = 4 w t / (w^2 - t^2)^2

gives  J [ sum c_n / (. - t_n)^2 ](z) = sum c_n t_n / (z - t_n^2)^2,
the order-2 sum of the squared-pole family.  J_identity_check verifies
this pointwise with certified evaluations of both sides.

The operator is bounded between p-th power circle means.  For
0 < p < 1, |x + y|^p <= |x|^p + |y|^p termwise and the substitution
theta = 2 phi turn the circle |z| = r into the circle |w| = sqrt(r):

    integral_0^{2pi} |(J f)(r e^{i theta})|^p d theta
        <= (2^{1-2p} / r^{p/2})
           integral_0^{2pi} |f(sqrt(r) e^{i phi})|^p d phi.

J_boundedness_check measures both sides with the shared quadrature
engine and reports the ratio.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels, quadrature
from .families import SequenceFamily, SquaredPoleFamily


def upper_sqrt(z):
    """Square root with argument in [0, pi).

    The branch cut runs along the positive real axis approached from
    below: positive reals keep their positive root, and a point just
    under the cut maps near the negative real axis.
    """
    z_arr = np.asarray(z, dtype=complex)
    theta = np.angle(z_arr)
    theta = np.where(theta < 0.0, theta + 2.0 * np.pi, theta)
    out = np.sqrt(np.abs(z_arr)) * np.exp(0.5j * theta)
    if z_arr.ndim == 0:
        return complex(out)
    return out


def apply_J(f, z):
    """Evaluate (f(sqrt z) - f(-sqrt z)) / (4 sqrt z).

    f must accept complex arrays when z is an array; a scalar z only
    requires scalar calls.  z = 0 is outside the operator's domain.
    """
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr == 0):
        raise ValueError("averaging operator undefined at z = 0")
    w = np.asarray(upper_sqrt(z_arr), dtype=complex)
    top = np.asarray(f(w), dtype=complex) - np.asarray(f(-w), dtype=complex)
    out = top / (4.0 * w)
    if z_arr.ndim == 0:
        return complex(out)
    return out


def J_identity_check(family: SequenceFamily, sample, tol: float) -> bool:
    """True when J applied to the family's order-2 sum agrees with the
    order-2 sum of its squared-pole image at every sample point.

    Both sides are evaluated with certified tail control tight enough
    that a genuine identity cannot fail the comparison: the two kernel
    evaluations feeding the difference quotient get tolerance
    tol |sqrt z| / 2 each (so the quotient inherits at most tol / 4
    after division by 4 |sqrt z|), and the squared-pole side gets
    tol / 4 directly.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    squared = SquaredPoleFamily(family)
    points = np.asarray(sample, dtype=complex).ravel()
    for z in points:
        z = complex(z)
        if z == 0:
            raise ValueError("averaging operator undefined at z = 0")
        w = upper_sqrt(z)
        inner = max(tol * abs(w) / 2.0, 1e-13)
        f_plus = kernels.eval_K2(family, w, inner).value
        f_minus = kernels.eval_K2(family, -w, inner).value
        lhs = (f_plus - f_minus) / (4.0 * w)
        rhs = kernels.eval_K2(squared, z, max(tol / 4.0, 1e-13)).value
        if abs(lhs - rhs) > tol:
            return False
    return True


def J_boundedness_check(f, r: float, p: float, tol: float, *,
                        breakpoint_angles=(), singular_angles=(),
                        eval_error: float = 0.0,
                        sqrt_breakpoint_angles=(), sqrt_singular_angles=(),
                        sqrt_eval_error: float = 0.0,
                        budget: int = quadrature.DEFAULT_BUDGET) -> dict:
    """Measure both sides of the averaging bound for one function.

        lhs = integral over |z| = r       of |(J f)(z)|^p
        rhs = (2^{1-2p} / r^{p/2}) x integral over |w| = sqrt(r) of |f(w)|^p

    and holds = (lhs <= rhs (1 + tol)).  The starred keyword groups pass
    breakpoints, flagged singular angles and evaluation error through to
    the two quadratures: the plain group describes J f on the radius-r
    circle, the sqrt_ group describes f on the radius-sqrt(r) circle.
    """
    r = float(r)
    if not r > 0.0:
        raise ValueError("radius must be positive")
    if not 0.0 < p < 1.0:
        raise ValueError("exponent p must lie in (0, 1)")
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")

    quad_tol = max(min(1e-7, tol / 8.0) if tol > 0.0 else 1e-7, 1e-11)
    left = quadrature.circle_abs_power(
        lambda zz: apply_J(f, zz), r, p, quad_tol,
        breakpoint_angles, singular_angles=singular_angles,
        eval_error=eval_error, budget=budget)
    right = quadrature.circle_abs_power(
        f, math.sqrt(r), p, quad_tol,
        sqrt_breakpoint_angles, singular_angles=sqrt_singular_angles,
        eval_error=sqrt_eval_error, budget=budget)
    scale = 2.0 ** (1.0 - 2.0 * p) / r ** (p / 2.0)
    lhs = left.value
    rhs = scale * right.value
    return {
        "lhs": lhs,
        "rhs": rhs,
        "holds": bool(lhs <= rhs * (1.0 + tol)),
        "ratio": lhs / rhs if rhs > 0.0 else math.nan,
        "lhs_error": left.error_estimate,
        "rhs_error": scale * right.error_estimate,
        "evaluations": left.evaluations + right.evaluations,
    }
