"""Command-line front end: evaluation, integration, verification, sweeps.

Configuration comes from flags, optionally seeded by a flat key=value
file passed as --config (flags override the file).  The environment
variable KERNEL_DECAY_OUT, when set, overrides the output directory.
Exit codes: 0 when the command succeeds and every inequality verdict
holds, 1 when some verdict fails, 2 for configuration errors (the
diagnostic on stderr names the offending key).
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys

from . import experiments, kernels, quadrature
from .errors import FamilySpecError, KernelDecayError
from .families import BUILTIN_CATALOG, parse_family_spec


class ConfigError(Exception):
    """Invalid configuration; the message names the offending key."""


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_p_list(text: str, key: str = "p") -> list[float]:
    try:
        values = [float(piece) for piece in str(text).split(",") if piece]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated floats,"
                          f" got {text!r}")
    if not values:
        raise ConfigError(f"{key}: empty list")
    return values


def _parse_radius_spec(text: str, family,
                       include_pole_radii: bool) -> list[float]:
    """Grammar min:max:points-per-decade, geometric grid nudged off
    pole moduli unless --include-pole-radii."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(
            f"r: expected min:max:points-per-decade, got {text!r}")
    try:
        r_min, r_max, per_decade = float(parts[0]), float(parts[1]), \
            int(parts[2])
    except ValueError:
        raise ConfigError(f"r: malformed radius spec {text!r}")
    if not 0.0 < r_min < r_max:
        raise ConfigError("r: need 0 < min < max")
    if per_decade < 1:
        raise ConfigError("r: points-per-decade must be positive")
    return list(quadrature.pick_radii(
        family, r_min, r_max, per_decade,
        include_pole_radii=include_pole_radii))


def _parse_modes(text: str) -> list[str]:
    modes = [piece.strip() for piece in str(text).split(",") if piece.strip()]
    if not modes:
        raise ConfigError("mode: empty list")
    for mode in modes:
        if mode not in experiments.MODES:
            raise ConfigError(
                f"mode: unknown mode {mode!r}; choose from"
                f" {', '.join(experiments.MODES)}")
    return modes


_CONFIG_CASTS = {
    "family": str,
    "z": str,
    "order": int,
    "r": str,
    "p": str,
    "mode": str,
    "tol": float,
    "out": str,
    "threads": int,
    "seed": int,
    "include-pole-radii": lambda v: v.lower() in ("1", "true", "yes"),
    "lnplus-variant": str,
}


def _load_config_file(path: str) -> dict:
    data = {}
    try:
        handle = open(path)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path!r}: {exc}")
    with handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(
                    f"config: line {lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_CASTS:
                raise ConfigError(f"config: unknown key {key!r}")
            try:
                data[key] = _CONFIG_CASTS[key](value.strip())
            except (ValueError, AttributeError):
                raise ConfigError(
                    f"config: bad value for {key!r}: {value.strip()!r}")
    return data


def _merge_config(args: argparse.Namespace) -> None:
    """Fill flag values that were not given from the --config file."""
    if not getattr(args, "config", None):
        return
    file_values = _load_config_file(args.config)
    for key, value in file_values.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise ConfigError(
                f"config: key {key!r} does not apply to this command")
        if getattr(args, dest) is None or getattr(args, dest) is False:
            setattr(args, dest, value)


def _require(args, name: str):
    value = getattr(args, name.replace("-", "_"), None)
    if value is None:
        raise ConfigError(f"{name}: required but not given")
    return value


def _family(args):
    spec = _require(args, "family")
    try:
        return parse_family_spec(spec), spec
    except FamilySpecError as exc:
        raise ConfigError(f"family: {exc}")


def _output_dir(args) -> str:
    env = os.environ.get("KERNEL_DECAY_OUT")
    out = env if env else (getattr(args, "out", None) or "kernel-decay-out")
    os.makedirs(out, exist_ok=True)
    return out


def _manifest(args, spec, p_values, modes, outputs) -> experiments.RunManifest:
    return experiments.RunManifest(
        family_spec=spec,
        p_values=tuple(p_values),
        radius_spec=str(args.r),
        modes=tuple(modes),
        tol=args.tol,
        lnplus_variant=args.lnplus_variant,
        seed=args.seed if args.seed is not None else 0,
        artifact_version=experiments.ARTIFACT_VERSION,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        outputs=tuple(outputs))


def _cmd_eval(args) -> int:
    family, _ = _family(args)
    if args.order is None:
        args.order = 1
    if args.order not in (1, 2):
        raise ConfigError("order: must be 1 or 2")
    if args.tol is None:
        args.tol = 1e-10
    try:
        z = complex(str(_require(args, "z")).replace(" ", ""))
    except ValueError:
        raise ConfigError(f"z: cannot parse {args.z!r} as a complex number")
    evaluate = kernels.eval_K1 if args.order == 1 else kernels.eval_K2
    result = evaluate(family, z, args.tol)
    print(f"K{args.order}({_fmt(z.real)}{z.imag:+}j) ="
          f" {_fmt(result.value.real)}{result.value.imag:+}j")
    print(f"truncation_bound = {_fmt(result.truncation_bound)}")
    print(f"terms_used = {result.terms_used}")
    return 0


def _cmd_integrate(args) -> int:
    family, _ = _family(args)
    if args.tol is None:
        args.tol = 1e-6
    mode = args.mode or "full"
    if mode not in experiments.MODES:
        raise ConfigError(f"mode: unknown mode {mode!r}")
    try:
        r = float(_require(args, "r"))
    except ValueError:
        raise ConfigError(f"r: expected a single radius, got {args.r!r}")
    p_values = _parse_p_list(_require(args, "p"))
    if len(p_values) != 1:
        raise ConfigError("p: integrate takes exactly one exponent")
    records = experiments.sweep(
        family, p_values[0], [r], mode, tol=args.tol,
        lnplus_variant=args.lnplus_variant, threads=1)
    rec = records[0]
    print(f"integral_value = {_fmt(rec.integral_value)}")
    print(f"integral_error = {_fmt(rec.integral_error)}")
    print(f"converged = {rec.converged}")
    print(f"terms_used = {rec.terms_used}")
    print(f"evaluations = {rec.evaluations}")
    for name in experiments.BOUND_NAMES:
        print(f"{name} = {_fmt(rec.bounds[name])}")
    return 0


def _sweep_records(args, family):
    p_values = _parse_p_list(_require(args, "p"))
    radii = _parse_radius_spec(_require(args, "r"), family,
                               bool(args.include_pole_radii))
    modes = _parse_modes(args.mode or "full")
    records = []
    for mode in modes:
        for p in p_values:
            records.extend(experiments.sweep(
                family, p, radii, mode, tol=args.tol,
                lnplus_variant=args.lnplus_variant, threads=args.threads))
    return records, p_values, modes


def _cmd_sweep(args, render_svg: bool = False) -> int:
    family, spec = _family(args)
    if args.tol is None:
        args.tol = 1e-3
    records, p_values, modes = _sweep_records(args, family)
    out = _output_dir(args)
    csv_path = os.path.join(out, "sweep.csv")
    experiments.write_csv(records, csv_path)
    outputs = ["sweep.csv", "manifest.json"]
    if render_svg:
        from . import report
        svg_path = os.path.join(out, "report.svg")
        report.render_sweep_plot(records, svg_path, title=spec)
        outputs.insert(1, "report.svg")
    manifest_path = os.path.join(out, "manifest.json")
    experiments.write_manifest(
        _manifest(args, spec, p_values, modes, outputs), manifest_path)
    for name in outputs:
        print(os.path.join(out, name))
    return 0


def _cmd_verify(args) -> int:
    family, spec = _family(args)
    if args.tol is None:
        args.tol = 1e-3
    p_values = _parse_p_list(_require(args, "p"))
    radii = _parse_radius_spec(_require(args, "r"), family,
                               bool(args.include_pole_radii))
    all_rows = []
    all_hold = True
    for p in p_values:
        rows, ok = experiments.verify_inequalities(
            family, p, radii, tol=args.tol,
            lnplus_variant=args.lnplus_variant, threads=args.threads)
        all_rows.extend(rows)
        all_hold = all_hold and ok
    for row in all_rows:
        verdict = "OK" if row["holds"] else "FAIL"
        print(f"p={_fmt(row['p'])} r={_fmt(row['r'])} mode={row['mode']}"
              f" bound={row['bound']} measured={_fmt(row['measured'])}"
              f" rhs={_fmt(row['rhs'])} {verdict}")
    out = _output_dir(args)
    verdict_path = os.path.join(out, "verdicts.csv")
    with open(verdict_path, "w", newline="") as handle:
        handle.write("r,p,mode,bound,measured,rhs,slack,holds\n")
        for row in all_rows:
            handle.write(",".join([
                _fmt(row["r"]), _fmt(row["p"]), row["mode"], row["bound"],
                _fmt(row["measured"]), _fmt(row["rhs"]),
                _fmt(row["slack"]), str(row["holds"])]) + "\n")
    manifest_path = os.path.join(out, "manifest.json")
    experiments.write_manifest(
        _manifest(args, spec, p_values, ("verify",),
                  ["verdicts.csv", "manifest.json"]), manifest_path)
    print(f"verdict: {'all hold' if all_hold else 'FAILURES'}")
    return 0 if all_hold else 1


def _cmd_list_families(_args) -> int:
    for letter, spec in BUILTIN_CATALOG:
        family = parse_family_spec(letter)
        classes = sorted(family.condition_classes,
                         key=lambda c: c.moment_order)
        class_text = ",".join(c.name for c in classes)
        rho = family.convergence_exponent
        rho_text = rho if isinstance(rho, str) else _fmt(float(rho))
        print(f"{letter}  {spec:<30} classes={class_text} rho={rho_text}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kernel-decay",
        description="Certified circle integrals and decay bounds for"
                    " sums of Cauchy kernels.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, with_sweep_flags=True):
        sp.add_argument("--family", help="family spec, e.g."
                        " 'reciprocal(a=1)' or a catalog letter a..h")
        sp.add_argument("--config", help="flat key=value file;"
                        " flags override it")
        sp.add_argument("--tol", type=float, default=None,
                        help="quadrature tolerance")
        sp.add_argument("--lnplus-variant", default=None,
                        choices=("max0", "max1"))
        if with_sweep_flags:
            sp.add_argument("--p", help="comma-separated exponents")
            sp.add_argument("--r", help="radius spec min:max:points-per"
                            "-decade")
            sp.add_argument("--threads", type=int, default=None)
            sp.add_argument("--seed", type=int, default=None)
            sp.add_argument("--out", default=None,
                            help="output directory (KERNEL_DECAY_OUT"
                            " overrides)")
            sp.add_argument("--include-pole-radii", action="store_true")

    sp = sub.add_parser("eval", help="evaluate one kernel sum")
    add_common(sp, with_sweep_flags=False)
    sp.add_argument("--z", help="evaluation point (complex)")
    sp.add_argument("--order", type=int, default=None)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("integrate", help="one circle integral")
    add_common(sp, with_sweep_flags=False)
    sp.add_argument("--r", help="radius (single float)")
    sp.add_argument("--p", help="one exponent")
    sp.add_argument("--mode", default=None)
    sp.set_defaults(func=_cmd_integrate)

    sp = sub.add_parser("verify", help="measure inequalities, exit 1 on"
                        " any failure")
    add_common(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("sweep", help="radius sweep to CSV")
    add_common(sp)
    sp.add_argument("--mode", default=None,
                    help="comma-separated modes (default full)")
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("report", help="radius sweep to CSV plus SVG plot")
    add_common(sp)
    sp.add_argument("--mode", default=None)
    sp.set_defaults(func=lambda a: _cmd_sweep(a, render_svg=True))

    sp = sub.add_parser("list-families", help="print the built-in catalog")
    sp.set_defaults(func=_cmd_list_families)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        if getattr(args, "lnplus_variant", None) is None:
            args.lnplus_variant = "max0"
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KernelDecayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
