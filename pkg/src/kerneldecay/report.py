"""Static SVG reports: log-log sweep plots with bound-curve overlays.

Rendering is deterministic: the Agg backend, a fixed svg.hashsalt (the
ids matplotlib embeds in the SVG are content hashes salted with it) and
a cleared Date metadata field make the output a pure function of the
records, so two identical runs produce identical files.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend first)

from .experiments import BOUND_NAMES  # noqa: E402

_HASHSALT = "kernel-decay"


def render_sweep_plot(records, path, *, title: str | None = None) -> None:
    """Plot measured integrals against r on log-log axes.

    Records with the same (mode, p) form one measured curve; every
    finite positive bound column contributes one dashed overlay per
    exponent.  Nonpositive or non-finite values cannot appear on log
    axes and are skipped.
    """
    plt.rcParams["svg.hashsalt"] = _HASHSALT
    measured: dict = {}
    overlays: dict = {}
    for rec in records:
        if math.isfinite(rec.integral_value) and rec.integral_value > 0.0:
            measured.setdefault((rec.mode, rec.p), {})[rec.r] = \
                rec.integral_value
        for name in BOUND_NAMES:
            value = rec.bounds[name]
            if math.isfinite(value) and value > 0.0:
                overlays.setdefault((name, rec.p), {})[rec.r] = value

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for mode, p in sorted(measured):
        series = measured[(mode, p)]
        rs = sorted(series)
        ax.loglog(rs, [series[r] for r in rs], marker="o", markersize=3.0,
                  linewidth=1.2, label=f"{mode} p={p:g}")
    for name, p in sorted(overlays):
        series = overlays[(name, p)]
        rs = sorted(series)
        ax.loglog(rs, [series[r] for r in rs], linestyle="--",
                  linewidth=0.9, label=f"{name} p={p:g}")
    ax.set_xlabel("r")
    ax.set_ylabel("circle integral")
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    if measured or overlays:
        ax.legend(fontsize=7)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
