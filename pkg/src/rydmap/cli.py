"""Command-line interface.

Subcommands walk the pipeline at increasing depth: `levels` prints
quantum-defect energies, `c6` the van der Waals channel table,
`blockade` the mean shift at one geometry, `gate` a single CZ-gate
evaluation or a Rabi-frequency sweep, and `map` the full spatial
fidelity map with CSV output and a reproducibility manifest.

Exit status is 0 on success and 2 on configuration or input errors;
per-point failures inside a map are embedded in the output rows instead
of aborting the run.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from .blockade import Scheme, blockade_shift, bright_pair_state, \
    scheme_for_level
from .gate import (GateParams, bell_fidelity, calibrate, pulse_duration,
                   run_gate)
from .maps import SweepConfig, run_map, r_min_estimate, write_outputs
from .pairint import compute_c6_table, pair_spectrum
from .species import (SpeciesError, bundled_species_path, load_species,
                      quantum_defect)
from .structure import effective_n, level_energy, parse_level


class ConfigError(ValueError):
    """Bad command-line or config-file input."""


def resolve_species(name_or_path: str) -> str:
    """A bundled species name (rb87, hydrogen) or a file path."""
    if os.path.exists(name_or_path):
        return name_or_path
    try:
        return str(bundled_species_path(name_or_path))
    except SpeciesError:
        raise ConfigError(f"species {name_or_path!r} is neither a file "
                          f"nor a bundled table") from None


def parse_angle(text: str) -> float:
    """Angle in radians; a 'deg' suffix switches to degrees."""
    t = text.strip().lower()
    if t.endswith("deg"):
        return math.radians(float(t[:-3]))
    if t.endswith("rad"):
        t = t[:-3]
    return float(t)


def parse_grid(text: str, what: str) -> tuple[float, float, float]:
    """'min:max:step' -> floats."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{what} must look like min:max:step, "
                          f"got {text!r}")
    lo, hi, step = (float(p) for p in parts)
    return lo, hi, step


def read_config_file(path: str) -> dict[str, str]:
    """key = value lines, # comments, blank lines ignored."""
    values: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(
                        f"{path}:{lineno}: expected key = value")
                key, _, val = line.partition("=")
                key = key.strip().lower()
                if key in values:
                    raise ConfigError(f"{path}:{lineno}: duplicate "
                                      f"key {key!r}")
                values[key] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return values


def _cmd_levels(args) -> int:
    model = load_species(resolve_species(args.species))
    print(f"# species: {model.name}")
    print(f"{'level':>8s} {'defect':>10s} {'n_eff':>10s} "
          f"{'energy/GHz':>16s}")
    for text in args.state:
        level = parse_level(text)
        delta = quantum_defect(model, level.n, level.l, level.j)
        energy = level_energy(model, level)
        print(f"{str(level):>8s} {delta:10.6f} "
              f"{effective_n(model, level):10.4f} {energy:16.6f}")
    return 0


def _cmd_c6(args) -> int:
    model = load_species(resolve_species(args.species))
    level = parse_level(args.state)
    channels = compute_c6_table(
        model, level, n_window=args.n_window,
        defect_cutoff_ghz=args.defect_cutoff, max_terms=args.max_terms)
    print(f"# {model.name} {level} van der Waals channels")
    for ch in channels:
        print(f"{ch.label():>12s}  C6 = {ch.c6:+12.2f} GHz um^6")
        for t in ch.pair_terms:
            print(f"{'':>12s}  ({t.n_a},{t.n_b})  "
                  f"defect = {t.detuning_ghz:+9.4f} GHz  "
                  f"contribution = {t.c6_ghz_um6:+11.2f}")
    print(f"# vdW validity radius estimate: "
          f"{r_min_estimate(channels):.2f} um")
    return 0


def _cmd_blockade(args) -> int:
    model = load_species(resolve_species(args.species))
    level = parse_level(args.state)
    scheme = scheme_for_level(level)
    channels = compute_c6_table(model, level)
    spectrum = pair_spectrum(level, channels)
    state = bright_pair_state(scheme)
    theta = parse_angle(args.theta)
    result = blockade_shift(spectrum, state, args.r, theta)
    print(f"# {model.name} {level} ({scheme.name}), "
          f"R = {args.r} um, theta = {theta:.6f} rad")
    print(f"delta_R = {result.delta_r_mhz:.6f} MHz "
          f"(signed {result.signed_delta_r_mhz:+.6f})")
    print(f"{'pair shift/MHz':>16s} {'weight':>12s}")
    for energy, weight in sorted(result.overlaps,
                                 key=lambda p: -p[1]):
        if weight < 1e-12:
            continue
        print(f"{energy:16.6f} {weight:12.8f}")
    return 0


def _cmd_gate(args) -> int:
    if args.sweep:
        lo, hi, count = args.omegas.split(":")
        omegas = np.linspace(float(lo), float(hi), int(count))
        shifts = np.array([float(s) for s in args.shifts.split(",")])
        out = sys.stdout if args.output is None else open(
            args.output, "w", newline="")
        try:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(("omega", "delta_R", "fidelity"))
            for dr in shifts:
                for om in omegas:
                    cal = calibrate(float(om), delta_r=float(dr))
                    delta = cal.delta_over_omega * om
                    params = GateParams(
                        omega=float(om), delta=float(delta), xi=cal.xi,
                        tau_ns=pulse_duration(float(om), float(delta)),
                        delta_r=float(dr), gamma_r=args.gamma)
                    writer.writerow(("%.10g" % om, "%.10g" % dr,
                                     "%.10g" % bell_fidelity(params)))
        finally:
            if out is not sys.stdout:
                out.close()
        return 0

    if args.delta is not None or args.xi is not None:
        if args.delta is None or args.xi is None:
            raise ConfigError("explicit working point needs both "
                              "--delta and --xi")
        delta, xi = args.delta, args.xi
    else:
        shift = math.inf if args.calibrate == "perfect" else args.delta_r
        cal = calibrate(args.omega, delta_r=shift)
        delta = cal.delta_over_omega * args.omega
        xi = cal.xi
        print(f"# calibrated: Delta/Omega = {cal.delta_over_omega:+.6f}, "
              f"xi = {xi:.6f} rad")
    params = GateParams(omega=args.omega, delta=delta, xi=xi,
                        tau_ns=pulse_duration(args.omega, delta),
                        delta_r=args.delta_r, gamma_r=args.gamma)
    result = run_gate(params, perfect_blockade=args.perfect_blockade)
    print(f"# Omega/2pi = {args.omega} MHz, Delta/2pi = {delta:.6f} MHz, "
          f"xi = {xi:.6f} rad, tau = {params.tau_ns:.4f} ns "
          f"(gate time {2 * params.tau_ns:.4f} ns)")
    print(f"{'sector':>8s} {'amplitude':>24s} {'phase/rad':>12s} "
          f"{'leakage':>12s}")
    for key, amp in result.sector_amplitudes.items():
        print(f"{key:>8s} {amp.real:+12.8f}{amp.imag:+12.8f}j "
              f"{result.phases[key]:12.6f} {result.leakage[key]:12.3e}")
    print(f"fidelity = {result.fidelity:.8f}")
    return 0


_SCHEMES = {"s": Scheme.S_SCHEME, "d": Scheme.D_SCHEME}


def _build_sweep_config(args) -> tuple[SweepConfig, str]:
    raw = read_config_file(args.config) if args.config else {}

    def pick(key: str, fallback):
        return raw.get(key, fallback)

    species = args.species if args.species_given else \
        pick("species", args.species)
    scheme_key = (args.scheme or pick("scheme", None))
    if scheme_key is None:
        raise ConfigError("map needs a scheme (s or d), via --scheme "
                          "or the config file")
    scheme_key = scheme_key.strip().lower()
    if scheme_key not in _SCHEMES:
        raise ConfigError(f"unknown scheme {scheme_key!r}; use s or d")

    if args.r_grid:
        r_lo, r_hi, r_step = parse_grid(args.r_grid, "--r-grid")
    else:
        r_lo = float(pick("r_min", 3.0))
        r_hi = float(pick("r_max", 12.0))
        r_step = float(pick("r_step", 0.1))
    if args.theta_grid:
        t_lo, t_hi, t_step = parse_grid(args.theta_grid, "--theta-grid")
    else:
        t_lo = float(pick("theta_min", 0.0))
        t_hi = float(pick("theta_max", math.pi))
        t_step = float(pick("theta_step", math.pi / 180.0))

    delta = pick("delta", None)
    xi = pick("xi", None)
    validity = pick("validity_radius", None)
    try:
        config = SweepConfig(
            species_path=resolve_species(species),
            scheme=_SCHEMES[scheme_key],
            n=int(pick("n", 70)),
            r_min_um=r_lo, r_max_um=r_hi, r_step_um=r_step,
            theta_min_rad=t_lo, theta_max_rad=t_hi, theta_step_rad=t_step,
            omega_mhz=float(args.omega if args.omega is not None
                            else pick("omega", 7.0)),
            gamma_r_mhz=float(args.gamma if args.gamma is not None
                              else pick("gamma_r", 0.0)),
            delta_mhz=None if delta is None else float(delta),
            xi_rad=None if xi is None else float(xi),
            validity_radius_um=None if validity is None
            else float(validity),
            validity_safety=float(pick("validity_safety", 1.0)),
            threads=int(args.threads if args.threads is not None
                        else pick("threads", 1)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    output = args.output or pick("output", "map.csv")
    return config, output


def _cmd_map(args) -> int:
    config, output = _build_sweep_config(args)
    result = run_map(config)
    manifest_path = write_outputs(result, output)
    n_err = sum(1 for r in result.records if r.error)
    fids = [r.fidelity for r in result.records if not r.error]
    print(f"# wrote {len(result.records)} records to {output} "
          f"(manifest {manifest_path})")
    print(f"# fidelity range [{min(fids):.6f}, {max(fids):.6f}], "
          f"{n_err} error-tagged points, validity radius "
          f"{result.manifest['validity_radius_um']:.2f} um")
    return 0


def _add_shared_options(parser: argparse.ArgumentParser,
                        top_level: bool) -> None:
    # attached to the main parser with real defaults and to every
    # subparser with SUPPRESS, so the flags work on either side of the
    # subcommand without the subparser default clobbering a value the
    # main parser already set
    d = (lambda v: v) if top_level else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--species", default=d("rb87"),
                        help="bundled species name or .species file path")
    parser.add_argument("--config", default=d(None),
                        help="key = value config file (map subcommand)")
    parser.add_argument("--output", default=d(None),
                        help="output file (CSV emitters)")
    parser.add_argument("--threads", type=int, default=d(None),
                        help="worker threads for map sweeps")
    parser.add_argument("--seed", type=int, default=d(None),
                        help="reserved; the pipeline is deterministic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydmap",
        description="Rydberg blockade and CZ-gate fidelity maps for "
                    "alkali atom pairs.")
    _add_shared_options(parser, top_level=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", help="quantum-defect level energies")
    _add_shared_options(p, top_level=False)
    p.add_argument("state", nargs="+", help="levels like 70s1/2")
    p.set_defaults(func=_cmd_levels)

    p = sub.add_parser("c6", help="van der Waals channel coefficients")
    _add_shared_options(p, top_level=False)
    p.add_argument("state", help="initial level, e.g. 70s1/2")
    p.add_argument("--n-window", type=int, default=4)
    p.add_argument("--defect-cutoff", type=float, default=14.0,
                   help="drop pair terms with |defect| above this (GHz)")
    p.add_argument("--max-terms", type=int, default=2,
                   help="keep this many dominant terms per channel")
    p.set_defaults(func=_cmd_c6)

    p = sub.add_parser("blockade", help="mean blockade shift at (R, theta)")
    _add_shared_options(p, top_level=False)
    p.add_argument("state", help="initial level, e.g. 70d3/2")
    p.add_argument("--r", type=float, default=5.0, help="distance, um")
    p.add_argument("--theta", default="0",
                   help="laser-to-axis angle, rad (or e.g. 90deg)")
    p.set_defaults(func=_cmd_blockade)

    p = sub.add_parser("gate", help="CZ gate evaluation or Omega sweep")
    _add_shared_options(p, top_level=False)
    p.add_argument("--omega", type=float, default=7.0,
                   help="Rabi frequency Omega/2pi, MHz")
    p.add_argument("--delta-r", "--deltaR", dest="delta_r", type=float,
                   default=math.inf,
                   help="signed blockade shift/2pi, MHz (default inf)")
    p.add_argument("--gamma", type=float, default=0.0,
                   help="Rydberg decay rate, 1/us")
    p.add_argument("--calibrate", choices=("perfect", "shift"),
                   default="perfect",
                   help="calibrate in the perfect-blockade limit or at "
                        "the given shift")
    p.add_argument("--delta", type=float, default=None,
                   help="explicit Delta/2pi, MHz (with --xi)")
    p.add_argument("--xi", type=float, default=None,
                   help="explicit phase jump, rad (with --delta)")
    p.add_argument("--perfect-blockade", action="store_true",
                   help="drop the doubly excited level entirely")
    p.add_argument("--sweep", action="store_true",
                   help="emit CSV over an Omega grid instead")
    p.add_argument("--omegas", default="2:12:101",
                   help="sweep grid min:max:count, MHz")
    p.add_argument("--shifts", default="30,40,50,60",
                   help="sweep blockade shifts, comma-separated MHz")
    p.set_defaults(func=_cmd_gate)

    p = sub.add_parser("map", help="spatial fidelity map -> CSV + manifest")
    _add_shared_options(p, top_level=False)
    p.add_argument("--scheme", choices=("s", "d"), default=None)
    p.add_argument("--r-grid", default=None, help="R grid min:max:step, um")
    p.add_argument("--theta-grid", default=None,
                   help="theta grid min:max:step, rad")
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.set_defaults(func=_cmd_map)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    args = parser.parse_args(argv)
    args.species_given = any(a.startswith("--species") for a in argv)
    try:
        return args.func(args)
    except (ConfigError, SpeciesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
