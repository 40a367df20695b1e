"""Radius sweeps, slope fits, inequality verdicts, exceptional-set reports.

A sweep fixes a family, an exponent p and an integration mode, then for
each radius r measures one circle integral with certified truncation and
honest quadrature error, alongside every closed-form right-hand side
that applies to the family:

    full     integral of |K2(r e^{i theta})|^p, all terms
    start    same, terms |t| < r/sqrt(2) only
    middle   same, closed band r/sqrt(2) <= |t| <= r sqrt(2)
    tail     same, terms |t| > r sqrt(2)
    k1full   integral of |K1(r e^{i theta})|^p, all terms
    lnplus   integral of ln+ |K1(r e^{i theta})|

Records are independent and may be computed concurrently; aggregation
(fits, verdicts, running suprema, serialization) happens afterwards in
submission order, so results do not depend on the worker count.

The CSV schema is fixed: one row per record, columns

    r,p,mode,integral_value,integral_error,keldysh_rhs,ostrovskiy_rhs,
    tail_rhs,start_rhs,middle_trivial_rhs,terms_used,evaluations,converged

with full round-trip float formatting and nan for inapplicable bounds.
Timestamps live in the JSON manifest only, never in the CSV, so reruns
of the same manifest are byte-identical.
"""

from __future__ import annotations

import concurrent.futures
import contextlib
import csv
import dataclasses
import json
import math
import os

import numpy as np

from . import bounds, kernels, quadrature
from .errors import (
    ClassInsufficientError,
    InsufficientDataError,
    KernelDecayError,
)
from .families import ExplicitFamily, SequenceFamily, transform_sqrt

MODES = ("full", "start", "middle", "tail", "lnplus", "k1full")
_ORDER1_MODES = ("lnplus", "k1full")

CSV_COLUMNS = (
    "r", "p", "mode", "integral_value", "integral_error",
    "keldysh_rhs", "ostrovskiy_rhs", "tail_rhs", "start_rhs",
    "middle_trivial_rhs", "terms_used", "evaluations", "converged",
)

BOUND_NAMES = ("keldysh_rhs", "ostrovskiy_rhs", "tail_rhs", "start_rhs",
               "middle_trivial_rhs")

# Which bound column caps which measured integral.
MODE_BOUND = {
    "tail": "tail_rhs",
    "start": "start_rhs",
    "middle": "middle_trivial_rhs",
    "k1full": "ostrovskiy_rhs",
    "lnplus": "keldysh_rhs",
}

ARTIFACT_VERSION = "1"


@dataclasses.dataclass(frozen=True)
class SweepRecord:
    """One measured circle integral with its applicable bounds."""

    r: float
    p: float
    mode: str
    integral_value: float
    integral_error: float
    bounds: dict
    terms_used: int
    evaluations: int
    converged: bool


@dataclasses.dataclass(frozen=True)
class ExceptionalSetReport:
    """Superlevel bookkeeping for one radius.

    threshold is the cutoff lambda, bad_measure the angular measure of
    {theta : |K1| > lambda}, good_sup the largest sampled |K1| on the
    complement, and M the running sup of the ln+ integral over the radii
    processed so far.
    """

    r: float
    eps: float
    threshold: float
    bad_measure: float
    good_sup: float
    M: float


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run bit-identically."""

    family_spec: str
    p_values: tuple
    radius_spec: str
    modes: tuple
    tol: float
    lnplus_variant: str
    seed: int
    artifact_version: str
    timestamp: str
    outputs: tuple

    def to_json(self) -> str:
        payload = dataclasses.asdict(self)
        payload["p_values"] = list(self.p_values)
        payload["modes"] = list(self.modes)
        payload["outputs"] = list(self.outputs)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def bounds_map(family: SequenceFamily, r: float, p: float) -> dict:
    """All five named bounds at (r, p); nan where the family's class or
    the exponent range rules one out."""
    first = family.abs_moment_converges(1)
    second = family.abs_moment_converges(2)
    in01 = 0.0 < p < 1.0
    out = {}
    out["keldysh_rhs"] = bounds.keldysh_rhs(family, r) if first else math.nan
    out["ostrovskiy_rhs"] = (bounds.ostrovskiy_rhs(family, r, p)
                             if first and in01 else math.nan)
    out["tail_rhs"] = (bounds.tail_lemma_rhs(family, r, p)
                       if second and in01 else math.nan)
    out["start_rhs"] = bounds.start_lemma_rhs(family, r, p) if in01 \
        else math.nan
    out["middle_trivial_rhs"] = (bounds.middle_trivial_rhs(family, r, p)
                                 if 0.0 < p < 0.5 else math.nan)
    return out


def _compute_record(family, p, r, mode, tol, lnplus_variant, budget):
    order = 1 if mode in _ORDER1_MODES else 2
    region = mode if mode in ("start", "middle", "tail") else "full"
    try:
        ev = kernels.CircleEvaluator(family, r, order, region)
        if mode == "lnplus":
            quad = quadrature.circle_ln_plus(
                ev, r, tol, ev.breakpoint_angles, variant=lnplus_variant,
                singular_angles=ev.singular_angles,
                eval_error=ev.uniform_bound, budget=budget)
        else:
            quad = quadrature.circle_abs_power(
                ev, r, p, tol, ev.breakpoint_angles,
                singular_angles=ev.singular_angles,
                eval_error=ev.uniform_bound, budget=budget)
        value = quad.value
        error = quad.error_estimate
        evaluations = quad.evaluations
        converged = quad.converged
        terms_used = ev.terms_used
    except KernelDecayError:
        value, error = math.nan, math.inf
        evaluations, converged, terms_used = 0, False, 0
    return SweepRecord(
        r=float(r), p=float(p), mode=mode,
        integral_value=value, integral_error=error,
        bounds=bounds_map(family, r, p),
        terms_used=terms_used, evaluations=evaluations,
        converged=converged)


def sweep(family: SequenceFamily, p: float, radii, mode: str, *,
          tol: float = 1e-3, lnplus_variant: str = "max0",
          budget: int = quadrature.DEFAULT_BUDGET,
          threads: int | None = None) -> list[SweepRecord]:
    """Measure the selected integral at every radius, with bounds.

    Radii must be strictly increasing.  Order-2 modes require p < 1/2 so
    the 2p-th power near a circle pole stays integrable; k1full allows
    the full range 0 < p < 1.  A record whose evaluation fails (class
    insufficient, pole hit, tolerance unreachable) comes back with nan
    value and converged=False; the sweep continues.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    p = float(p)
    if mode in _ORDER1_MODES:
        if mode == "k1full" and not 0.0 < p < 1.0:
            raise ValueError("k1full mode needs 0 < p < 1")
    else:
        if not 0.0 < p < 0.5:
            raise ValueError("order-2 modes need 0 < p < 1/2")
    if threads is not None and threads < 1:
        raise ValueError("threads must be positive")
    workers = threads or os.cpu_count() or 1
    if workers == 1 or len(radii) <= 1:
        return [_compute_record(family, p, r, mode, tol, lnplus_variant,
                                budget) for r in radii]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_compute_record, family, p, r, mode, tol,
                               lnplus_variant, budget) for r in radii]
        return [f.result() for f in futures]


def fit_decay_slope(records, r_min: float) -> dict:
    """Least-squares slope of log(integral) against log(r).

    Uses only converged records with r >= r_min and positive integral
    value; fewer than 5 of those raises InsufficientDataError.
    """
    rs, vals = [], []
    for rec in records:
        if rec.r >= r_min and rec.converged and rec.integral_value > 0.0:
            rs.append(rec.r)
            vals.append(rec.integral_value)
    if len(rs) < 5:
        raise InsufficientDataError(
            f"need at least 5 converged records with r >= {r_min!r},"
            f" have {len(rs)}")
    coeffs, residuals, *_ = np.polyfit(
        np.log(rs), np.log(vals), 1, full=True)
    residual = float(math.sqrt(residuals[0])) if len(residuals) else 0.0
    return {"slope": float(coeffs[0]), "intercept": float(coeffs[1]),
            "residual": residual}


def _relative_slack(record: SweepRecord) -> float:
    if record.integral_value > 0.0 and math.isfinite(record.integral_error):
        return record.integral_error / record.integral_value
    return 0.0


def verify_inequalities(family: SequenceFamily, p: float, radii, *,
                        modes=None, tol: float = 1e-3,
                        lnplus_variant: str = "max0",
                        budget: int = quadrature.DEFAULT_BUDGET,
                        threads: int | None = None):
    """Measure every applicable inequality and compare against its rhs.

    Returns (rows, all_hold).  Each row is a dict with keys r, p, mode,
    bound, measured, rhs, slack, holds; holds means
    measured <= rhs * (1 + slack) with slack the record's combined
    quadrature plus truncation relative error.  The full-kernel integral
    is compared against the sum of the three split bounds (termwise
    p-th power subadditivity makes that a valid cap) when all three are
    finite.
    """
    p = float(p)
    if modes is None:
        modes = []
        if 0.0 < p < 0.5:
            modes.extend(["full", "start", "middle", "tail"])
        if family.abs_moment_converges(1):
            if 0.0 < p < 1.0:
                modes.append("k1full")
            modes.append("lnplus")
    rows = []
    for mode in modes:
        records = sweep(family, p, radii, mode, tol=tol,
                        lnplus_variant=lnplus_variant, budget=budget,
                        threads=threads)
        for rec in records:
            if mode == "full":
                pieces = [rec.bounds[name] for name in
                          ("tail_rhs", "start_rhs", "middle_trivial_rhs")]
                rhs = math.fsum(pieces)
                bound_name = "tail+start+middle"
            else:
                bound_name = MODE_BOUND[mode]
                rhs = rec.bounds[bound_name]
            slack = _relative_slack(rec)
            if not math.isfinite(rhs):
                holds = False
            elif not math.isfinite(rec.integral_value):
                holds = False
            else:
                holds = rec.integral_value <= rhs * (1.0 + slack)
            rows.append({
                "r": rec.r, "p": rec.p, "mode": mode, "bound": bound_name,
                "measured": rec.integral_value, "rhs": rhs,
                "slack": slack, "holds": holds,
            })
    all_hold = all(row["holds"] for row in rows)
    return rows, all_hold


def _good_set_sup(ev, r, lam, grid):
    """Largest sampled |K1| over {theta : |K1| <= lam}, refining once
    near the boundary of the superlevel set so the sup bookkeeping uses
    the same resolution as the measure."""
    theta = np.arange(grid) * (2.0 * math.pi / grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.abs(ev(r * np.exp(1j * theta)))
    vals = np.where(np.isfinite(vals), vals, np.inf)
    good = vals <= lam
    best = float(vals[good].max()) if np.any(good) else 0.0
    flips = np.nonzero(good != np.roll(good, -1))[0]
    for i in flips:
        a = theta[i]
        fine = a + (2.0 * math.pi / grid) * (np.arange(1, 8) / 8.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            fine_vals = np.abs(ev(r * np.exp(1j * fine)))
        fine_vals = np.where(np.isfinite(fine_vals), fine_vals, np.inf)
        fine_good = fine_vals <= lam
        if np.any(fine_good):
            best = max(best, float(fine_vals[fine_good].max()))
    return best


def exceptional_set_report(family: SequenceFamily, radii, eps: float, *,
                           mode: str = "keldysh", p: float = 0.25,
                           grid: int = 4096, tol: float = 1e-3,
                           lnplus_variant: str = "max0",
                           budget: int = quadrature.DEFAULT_BUDGET) \
        -> list[ExceptionalSetReport]:
    """Per-radius superlevel reports for the order-1 kernel sum.

    Radii are processed in increasing order; M is the running sup of the
    ln+ integral.  In "keldysh" mode the threshold is lambda = e^{M/eps},
    which keeps bad_measure below eps by Chebyshev applied to ln+.  In
    "ostrovskiy" mode the threshold is instead (I_p(r)/eps)^{1/p}, the
    Markov choice with measure budget eps, and the p-th power integral is
    measured alongside the ln+ one.
    """
    if not 0.0 < eps < 2.0 * math.pi:
        raise ValueError("eps must lie in (0, 2 pi)")
    if mode not in ("keldysh", "ostrovskiy"):
        raise ValueError(f"unknown exceptional-set mode {mode!r}")
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    reports = []
    running_M = 0.0
    for r in radii:
        ev = kernels.CircleEvaluator(family, r, 1, "full")
        ln_quad = quadrature.circle_ln_plus(
            ev, r, tol, ev.breakpoint_angles, variant=lnplus_variant,
            singular_angles=ev.singular_angles,
            eval_error=ev.uniform_bound, budget=budget)
        running_M = max(running_M, ln_quad.value)
        if mode == "keldysh":
            lam = math.exp(running_M / eps)
        else:
            power_quad = quadrature.circle_abs_power(
                ev, r, p, tol, ev.breakpoint_angles,
                singular_angles=ev.singular_angles,
                eval_error=ev.uniform_bound, budget=budget)
            lam = (power_quad.value / eps) ** (1.0 / p)
        bad = quadrature.superlevel_measure(ev, r, lam, grid)
        good = _good_set_sup(ev, r, lam, grid)
        reports.append(ExceptionalSetReport(
            r=r, eps=eps, threshold=lam, bad_measure=bad,
            good_sup=good, M=running_M))
    return reports


def middle_bootstrap_demo(family: SequenceFamily, p: float, r: float, *,
                          tol: float = 1e-4,
                          budget: int = quadrature.DEFAULT_BUDGET) -> dict:
    """One literal step of the averaging bootstrap on the middle band.

        direct    = integral at r of |K2 over the closed middle band|^p
        via_J_rhs = (2^{1-2p} / r^{p/2}) x integral at sqrt(r) of the
                    order-2 sum of the sqrt-transformed band family

    The transformed family has poles sqrt(t) and weights c/sqrt(t), so
    its squared-pole image is the band itself and the averaging bound
    applies verbatim.  holds compares direct against via_J_rhs inflated
    by the combined measured relative errors.
    """
    if not family.abs_moment_converges(1):
        raise ClassInsufficientError(
            "class insufficient for the bootstrap: needs the order-1"
            " moment sum to converge")
    if not 0.0 < p < 0.5:
        raise ValueError("p out of range: need 0 < p < 1/2")
    if not r > 0.0:
        raise ValueError("radius must be positive")
    band = bounds.middle_terms(family, r)
    if not band:
        return {"direct": 0.0, "via_J_rhs": 0.0, "holds": True,
                "ratio": math.nan, "direct_error": 0.0,
                "via_error": 0.0}

    ev_mid = kernels.CircleEvaluator(family, r, 2, "middle")
    direct_quad = quadrature.circle_abs_power(
        ev_mid, r, p, tol, ev_mid.breakpoint_angles,
        singular_angles=ev_mid.singular_angles,
        eval_error=ev_mid.uniform_bound, budget=budget)

    root_family = transform_sqrt(ExplicitFamily(band, kind="middle-band"))
    root_r = math.sqrt(r)
    ev_root = kernels.CircleEvaluator(root_family, root_r, 2, "full")
    root_quad = quadrature.circle_abs_power(
        ev_root, root_r, p, tol, ev_root.breakpoint_angles,
        singular_angles=ev_root.singular_angles,
        eval_error=ev_root.uniform_bound, budget=budget)

    scale = 2.0 ** (1.0 - 2.0 * p) / r ** (p / 2.0)
    direct = direct_quad.value
    via = scale * root_quad.value
    slack = 0.0
    if direct > 0.0:
        slack += direct_quad.error_estimate / direct
    if root_quad.value > 0.0:
        slack += root_quad.error_estimate / root_quad.value
    holds = direct <= via * (1.0 + slack) + 1e-15
    return {"direct": direct, "via_J_rhs": via, "holds": bool(holds),
            "ratio": direct / via if via > 0.0 else math.nan,
            "direct_error": direct_quad.error_estimate,
            "via_error": scale * root_quad.error_estimate}


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@contextlib.contextmanager
def _open_maybe(path_or_file, mode):
    if hasattr(path_or_file, "write") or hasattr(path_or_file, "read"):
        yield path_or_file
    else:
        with open(path_or_file, mode, newline="") as handle:
            yield handle


def write_csv(records, path) -> None:
    """Serialize records with the fixed column schema and round-trip
    float formatting.  Content depends only on the records.  path may
    be a filesystem path or an open text stream."""
    with _open_maybe(path, "w") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            row = [
                _format_value(rec.r),
                _format_value(rec.p),
                rec.mode,
                _format_value(rec.integral_value),
                _format_value(rec.integral_error),
            ]
            row.extend(_format_value(rec.bounds[name])
                       for name in BOUND_NAMES)
            row.extend([
                _format_value(rec.terms_used),
                _format_value(rec.evaluations),
                _format_value(rec.converged),
            ])
            writer.writerow(row)


def read_csv(path) -> list[SweepRecord]:
    """Inverse of write_csv (bounds land back in the named map)."""
    records = []
    with _open_maybe(path, "r") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV columns in {path}")
        for row in reader:
            records.append(SweepRecord(
                r=float(row["r"]), p=float(row["p"]), mode=row["mode"],
                integral_value=float(row["integral_value"]),
                integral_error=float(row["integral_error"]),
                bounds={name: float(row[name]) for name in BOUND_NAMES},
                terms_used=int(row["terms_used"]),
                evaluations=int(row["evaluations"]),
                converged=row["converged"] == "True"))
    return records


def write_manifest(manifest: RunManifest, path) -> None:
    with open(path, "w") as handle:
        handle.write(manifest.to_json())
