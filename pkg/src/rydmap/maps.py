"""Spatial sweeps: species table -> C6 channels -> blockade -> fidelity.

run_map walks an (R, theta) grid for one excitation scheme, computing the
mean blockade shift and the CZ Bell fidelity at every point, and emits
figure-ready records plus a reproducibility manifest.  The gate runs at a
fixed working point calibrated in the perfect-blockade limit (or at
explicitly supplied parameters): the far field where the shift collapses
is exactly the regime where the protocol operates off its design point,
which is what the fidelity map is meant to show.

Records below the van der Waals validity radius are still computed but
flagged invalid; per-point failures (e.g. a vanishing blockade at a
Forster zero) are tagged on the record rather than aborting the sweep.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .blockade import (BrightPairState, ForsterZeroError, Scheme,
                       blockade_shift, bright_pair_state)
from .gate import (GateParams, Sector, bell_overlap, calibrate,
                   evolve_sector, pulse_duration)
from .pairint import InteractionChannel, compute_c6_table, pair_spectrum
from .species import load_species
from .structure import RydbergLevel

SCHEME_LEVELS = {Scheme.S_SCHEME: (0, 0.5), Scheme.D_SCHEME: (2, 1.5)}


@dataclass(frozen=True)
class SweepConfig:
    """Grid, drive, and output options for one fidelity map."""
    species_path: str
    scheme: Scheme
    n: int = 70
    r_min_um: float = 3.0
    r_max_um: float = 12.0
    r_step_um: float = 0.1
    theta_min_rad: float = 0.0
    theta_max_rad: float = math.pi
    theta_step_rad: float = math.pi / 180.0
    omega_mhz: float = 7.0
    gamma_r_mhz: float = 0.0
    # None -> perfect-blockade calibration; otherwise explicit values
    delta_mhz: float | None = None
    xi_rad: float | None = None
    # None -> derive the validity radius from the C6/defect crossover
    validity_radius_um: float | None = None
    validity_safety: float = 1.0
    threads: int = 1

    def __post_init__(self):
        if self.r_min_um <= 0 or self.r_max_um < self.r_min_um:
            raise ValueError("need 0 < r_min_um <= r_max_um")
        if self.r_step_um <= 0 or self.theta_step_rad <= 0:
            raise ValueError("grid steps must be positive")
        if self.theta_max_rad < self.theta_min_rad:
            raise ValueError("need theta_min_rad <= theta_max_rad")
        if not 0.0 <= self.theta_min_rad <= math.pi \
                or not 0.0 <= self.theta_max_rad <= math.pi:
            raise ValueError("theta range must lie in [0, pi]")
        if self.omega_mhz <= 0:
            raise ValueError("omega_mhz must be positive")
        if (self.delta_mhz is None) != (self.xi_rad is None):
            raise ValueError("explicit calibration needs both delta and xi")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class MapRecord:
    """One grid point of the fidelity map."""
    r_um: float
    theta_rad: float
    delta_r_mhz: float           # positive magnitude; nan on error
    fidelity: float              # nan on error
    valid: bool                  # False below the validity radius
    error: str = ""

    @property
    def z_um(self) -> float:
        return self.r_um * math.cos(self.theta_rad)

    @property
    def y_um(self) -> float:
        return self.r_um * math.sin(self.theta_rad)


def grid_values(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive arithmetic grid, endpoint kept when it lands on a step."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def r_min_estimate(channels: list[InteractionChannel], *,
                   safety: float = 1.0) -> float:
    """Distance where the strongest channel's vdW term meets its smallest
    retained defect: (|C6| / |delta_AB,min|)^(1/6), maximized over
    channels, times a safety factor.  Below this the perturbative R^-6
    picture degrades."""
    if not channels:
        raise ValueError("no interaction channels given")
    worst = 0.0
    for ch in channels:
        if ch.c6 is None or not ch.pair_terms:
            raise ValueError(f"channel {ch.label()} carries no C6 terms")
        dmin = min(abs(t.detuning_ghz) for t in ch.pair_terms)
        worst = max(worst, (abs(ch.c6) / dmin) ** (1.0 / 6.0))
    return worst * safety


def scheme_level(scheme: Scheme, n: int) -> RydbergLevel:
    l, j = SCHEME_LEVELS[scheme]
    return RydbergLevel(n=n, l=l, j=j)


@dataclass
class MapResult:
    records: list[MapRecord]
    manifest: dict
    channels: list[InteractionChannel] = field(repr=False, default_factory=list)


class _FixedDriveGate:
    """Gate evaluator for one calibrated drive shared across a map.

    Only the doubly-excitable bb sector feels the blockade shift, so the
    aa and ab return amplitudes are evolved once and reused at every
    grid point."""

    def __init__(self, base: GateParams):
        self.base = base
        self.a_aa = evolve_sector(Sector.AA, base,
                                  steps_per_pulse=1).return_amplitude
        self.a_ab = evolve_sector(Sector.AB, base,
                                  steps_per_pulse=1).return_amplitude

    def fidelity(self, delta_r_mhz: float) -> float:
        base = self.base
        params = GateParams(omega=base.omega, delta=base.delta,
                            xi=base.xi, tau_ns=base.tau_ns,
                            delta_r=delta_r_mhz, gamma_r=base.gamma_r,
                            stark_phase=base.stark_phase)
        a_bb = evolve_sector(Sector.BB, params,
                             steps_per_pulse=1).return_amplitude
        return bell_overlap(self.a_aa, self.a_ab, self.a_ab, a_bb)


def _point(spectrum, state: BrightPairState, gate: _FixedDriveGate,
           r: float, theta: float, r_valid: float) -> MapRecord:
    try:
        shift = blockade_shift(spectrum, state, r, theta)
        fid = gate.fidelity(shift.signed_delta_r_mhz)
        return MapRecord(r_um=r, theta_rad=theta,
                         delta_r_mhz=shift.delta_r_mhz, fidelity=fid,
                         valid=bool(r >= r_valid))
    except (ForsterZeroError, ValueError, RuntimeError) as exc:
        return MapRecord(r_um=r, theta_rad=theta,
                         delta_r_mhz=math.nan, fidelity=math.nan,
                         valid=False, error=f"{type(exc).__name__}: {exc}")


def run_map(config: SweepConfig) -> MapResult:
    """Compute the full (R, theta) fidelity map for one configuration.

    Output order is row-major: R outer, theta inner, independent of the
    thread count; identical config and species file give identical
    records.
    """
    model = load_species(config.species_path)
    level = scheme_level(config.scheme, config.n)
    channels = compute_c6_table(model, level)
    spectrum = pair_spectrum(level, channels)
    state = bright_pair_state(config.scheme)

    if config.delta_mhz is None:
        cal = calibrate(config.omega_mhz)
        delta = cal.delta_over_omega * config.omega_mhz
        xi = cal.xi
    else:
        delta, xi = config.delta_mhz, config.xi_rad
    base = GateParams(omega=config.omega_mhz, delta=delta, xi=xi,
                      tau_ns=pulse_duration(config.omega_mhz, delta),
                      gamma_r=config.gamma_r_mhz)
    gate = _FixedDriveGate(base)

    if config.validity_radius_um is None:
        r_valid = r_min_estimate(channels, safety=config.validity_safety)
    else:
        r_valid = config.validity_radius_um

    rs = grid_values(config.r_min_um, config.r_max_um, config.r_step_um)
    thetas = grid_values(config.theta_min_rad, config.theta_max_rad,
                         config.theta_step_rad)

    def column(r: float) -> list[MapRecord]:
        return [_point(spectrum, state, gate, float(r), float(t), r_valid)
                for t in thetas]

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            columns = list(pool.map(column, rs))
    else:
        columns = [column(r) for r in rs]
    records = [rec for col in columns for rec in col]

    manifest = _manifest(config, model.name, level, channels, r_valid,
                         delta, xi, len(rs), len(thetas))
    return MapResult(records=records, manifest=manifest, channels=channels)


def _manifest(config: SweepConfig, species_name: str, level: RydbergLevel,
              channels, r_valid: float, delta: float, xi: float,
              n_r: int, n_theta: int) -> dict:
    with open(config.species_path, "rb") as fh:
        species_hash = hashlib.sha256(fh.read()).hexdigest()
    cfg = {
        "species_path": str(config.species_path),
        "scheme": config.scheme.name,
        "n": config.n,
        "r_um": [config.r_min_um, config.r_max_um, config.r_step_um],
        "theta_rad": [config.theta_min_rad, config.theta_max_rad,
                      config.theta_step_rad],
        "omega_mhz": config.omega_mhz,
        "gamma_r_mhz": config.gamma_r_mhz,
        "calibration": ("auto" if config.delta_mhz is None
                        else [config.delta_mhz, config.xi_rad]),
        "validity_radius_um": config.validity_radius_um,
        "validity_safety": config.validity_safety,
    }
    blob = json.dumps(cfg, sort_keys=True).encode()
    return {
        "generator": f"rydmap {__version__}",
        "config": cfg,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "species_sha256": species_hash,
        "species_name": species_name,
        "level": str(level),
        "grid_shape": [n_r, n_theta],
        "applied_calibration": {"delta_mhz": delta, "xi_rad": xi},
        "validity_radius_um": r_valid,
        "channels": [
            {
                "label": ch.label(),
                "c6_ghz_um6": ch.c6,
                "terms": [
                    {"n_a": t.n_a, "n_b": t.n_b,
                     "detuning_ghz": t.detuning_ghz,
                     "radial_product_a0sq": t.radial_product,
                     "c6_ghz_um6": t.c6_ghz_um6}
                    for t in ch.pair_terms
                ],
            }
            for ch in channels
        ],
    }


CSV_COLUMNS = ("R", "theta", "z", "y", "delta_R_MHz", "fidelity",
               "valid", "error")


def _fmt(x: float) -> str:
    return "%.10g" % x


def render_csv(records: list[MapRecord]) -> str:
    """Deterministic CSV text for a record list."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow((
            _fmt(rec.r_um), _fmt(rec.theta_rad),
            _fmt(rec.z_um), _fmt(rec.y_um),
            _fmt(rec.delta_r_mhz), _fmt(rec.fidelity),
            int(rec.valid), rec.error,
        ))
    return buf.getvalue()


def write_outputs(result: MapResult, path: str) -> str:
    """Write the CSV and its manifest; returns the manifest path."""
    with open(path, "w", newline="") as fh:
        fh.write(render_csv(result.records))
    manifest_path = path + ".manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(result.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path
