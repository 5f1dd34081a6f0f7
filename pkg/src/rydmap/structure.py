"""Single-atom Rydberg structure: level energies and radial wavefunctions.

Level energies follow the Rydberg-Ritz form with an optional relativistic
fine-structure correction:

    E(n, l, j) / h = -Ry / (n - delta)^2 - Ry alpha^2 / n^4 (n/(j+1/2) - 3/4)

in GHz, with delta the n-dependent quantum defect from the species model.

Radial wavefunctions chi(r) = r R(r) solve the defect-shifted Coulomb
problem at energy -1/(2 n*^2) a.u. with the Numerov method.  Integration
runs inward on a grid uniform in x = sqrt(r), which keeps a nearly constant
number of points per local oscillation across the whole classically allowed
region.  The substitution chi(r) = sqrt(x) u(x) removes the first-derivative
term, leaving u'' = g(x) u with

    g(x) = 4 x^2 f(x^2) + 3 / (4 x^2),
    f(r) = l(l+1)/r^2 - 2/r - 2E.

Integration starts at r_out = 2 n (n + 15) a0, well beyond the outer turning
point, and runs inward through the inner classical turning point until the
solution has decayed to a negligible tail, the numerically growing irregular
solution starts to take over, or the species core radius is reached. The core
region, where a one-electron model is meaningless anyway, is always excluded.
All radial quantities are in atomic units.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import simpson

from .species import SpeciesModel, quantum_defect
from .units import FINE_STRUCTURE_GHZ, RYDBERG_GHZ


class GridError(ValueError):
    """Radial grid cannot resolve the requested state."""


@dataclass(frozen=True, order=True)
class RydbergLevel:
    """One fine-structure level |n, l, j>."""
    n: int
    l: int
    j: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.l < self.n:
            raise ValueError(f"require 0 <= l < n, got l={self.l}, n={self.n}")
        two_j = Fraction(self.j).limit_denominator(2) * 2
        if two_j.denominator != 1 or two_j.numerator % 2 == 0:
            raise ValueError(f"j must be half-integer, got {self.j}")
        if abs(self.j - self.l) != 0.5:
            raise ValueError(f"require |j - l| = 1/2, got l={self.l}, "
                             f"j={self.j}")

    @property
    def two_j(self) -> int:
        return round(2 * self.j)

    @property
    def multiplicity(self) -> int:
        return self.two_j + 1

    def __str__(self) -> str:
        from .species import SPECTROSCOPIC_LETTERS
        return f"{self.n}{SPECTROSCOPIC_LETTERS[self.l]}{self.two_j}/2"


def parse_level(text: str) -> RydbergLevel:
    """Parse spectroscopic notation like '70s1/2' or '70d3/2'."""
    from .species import SPECTROSCOPIC_LETTERS
    m = re.fullmatch(r"(\d+)\s*([a-z])\s*(\d+)/2", text.strip().lower())
    if not m:
        raise ValueError(f"cannot parse level {text!r}; expected "
                         f"e.g. '70s1/2'")
    letter = m.group(2)
    if letter not in SPECTROSCOPIC_LETTERS:
        raise ValueError(f"unknown orbital letter {letter!r} in {text!r}")
    return RydbergLevel(n=int(m.group(1)),
                        l=SPECTROSCOPIC_LETTERS.index(letter),
                        j=int(m.group(3)) / 2.0)


@dataclass(frozen=True)
class GridSpec:
    """Numerov grid controls.

    step is the spacing in x = sqrt(r), in units of sqrt(a0).  The solver
    refuses to run below min_points_per_wavelength at the fastest local
    oscillation, where the integrator would silently lose accuracy.
    """
    step: float = 0.01
    min_points_per_wavelength: float = 10.0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.min_points_per_wavelength < 4:
            raise ValueError("min_points_per_wavelength must be >= 4")


@dataclass(frozen=True)
class RadialWavefunction:
    """Normalized chi(r) = r R(r) sampled on a sqrt-r lattice.

    x holds sqrt(r) at uniform spacing x_step, aligned so x[i] is an exact
    integer multiple of x_step; this lets matrix elements intersect two
    grids without interpolation.  norm_residual is the disagreement between
    two quadrature rules on the norm integral, a cheap accuracy indicator.
    """
    level: RydbergLevel
    energy_au: float
    x: np.ndarray
    chi: np.ndarray
    x_step: float
    node_count: int
    norm_residual: float

    @property
    def r(self) -> np.ndarray:
        return self.x ** 2

    @property
    def lattice_offset(self) -> int:
        """Index of x[0] on the global lattice n * x_step."""
        return round(self.x[0] / self.x_step)


def level_energy(model: SpeciesModel, level: RydbergLevel, *,
                 include_fine_structure: bool = True) -> float:
    """Level energy E/h in GHz relative to the ionization limit."""
    delta = quantum_defect(model, level.n, level.l, level.j)
    n_star = level.n - delta
    energy = -RYDBERG_GHZ / n_star ** 2
    if include_fine_structure:
        energy -= (FINE_STRUCTURE_GHZ / level.n ** 4
                   * (level.n / (level.j + 0.5) - 0.75))
    return energy


def effective_n(model: SpeciesModel, level: RydbergLevel) -> float:
    return level.n - quantum_defect(model, level.n, level.l, level.j)


def _inner_turning_point(level: RydbergLevel, n_star: float) -> float:
    """Inner classical turning point of l(l+1)/r^2 - 2/r + 1/n*^2."""
    if level.l == 0:
        return 0.0
    ll1 = level.l * (level.l + 1)
    disc = max(0.0, 1.0 - ll1 / n_star ** 2)
    return n_star ** 2 * (1.0 - math.sqrt(disc))


def solve_radial(model: SpeciesModel, level: RydbergLevel,
                 grid: GridSpec = GridSpec()) -> RadialWavefunction:
    """Integrate the radial equation inward and normalize.

    Returns chi on the sqrt-r lattice.  Raises GridError when the grid step
    is too coarse for the state's fastest oscillation.
    """
    n_star = level.n - quantum_defect(model, level.n, level.l, level.j)
    energy = -0.5 / n_star ** 2
    r_out = 2.0 * level.n * (level.n + 15.0)
    r_turn = _inner_turning_point(level, n_star)
    h = grid.step

    i_start = max(1, math.ceil(math.sqrt(model.core_radius) / h - 1e-9))
    i_end = math.floor(math.sqrt(r_out) / h + 1e-9)
    if i_end - i_start < 8:
        raise GridError(f"grid for {level} has too few points")
    x = np.arange(i_start, i_end + 1) * h
    r = x ** 2

    ll1 = level.l * (level.l + 1)
    f = ll1 / r ** 2 - 2.0 / r - 2.0 * energy
    g = 4.0 * r * f + 3.0 / (4.0 * r)

    k_max = math.sqrt(max(0.0, -g.min()))
    if k_max > 0:
        ppw = 2.0 * math.pi / (k_max * h)
        if ppw < grid.min_points_per_wavelength:
            raise GridError(
                f"{ppw:.1f} points per wavelength for {level} is below the "
                f"floor of {grid.min_points_per_wavelength}; reduce step"
            )

    # Numerov inward: u_{i-1} = [2 u_i (1 + 5 w_i) - u_{i+1} (1 - w_{i+1})]
    #                           / (1 - w_{i-1}),  w = g h^2 / 12
    w = g * (h * h / 12.0)
    u = np.zeros_like(x)
    u[-1] = 0.0
    u[-2] = 1e-10
    peak = 1e-10
    cut = 0
    for i in range(len(x) - 2, 0, -1):
        u[i - 1] = (2.0 * u[i] * (1.0 + 5.0 * w[i])
                    - u[i + 1] * (1.0 - w[i + 1])) / (1.0 - w[i - 1])
        mag = abs(u[i - 1])
        if mag > peak:
            peak = mag
        if r[i - 1] < r_turn:
            # Inside the inner forbidden region the true solution decays
            # monotonically toward the core.  Stop once the tail is
            # negligible, or once it turns back up, which means the
            # exponentially growing admixture has taken over.
            prev = abs(u[i])
            if mag < 1e-9 * peak or (mag > prev and prev < 0.3 * peak):
                cut = i  # u[i-1] may carry the growing admixture, drop it
                break

    # Strip the negligible inner fringe; its sign is unreliable once the
    # growing admixture is comparable to the decayed true solution.
    while cut < len(x) - 9 and abs(u[cut]) < 1e-8 * peak:
        cut += 1
    x, u = x[cut:], u[cut:]
    chi = np.sqrt(x) * u
    weight = chi * chi * 2.0 * x
    norm_sq = simpson(weight, dx=h)
    if not norm_sq > 0:
        raise GridError(f"normalization failed for {level}")
    chi = chi / math.sqrt(norm_sq)
    residual = abs(np.trapezoid(weight, dx=h) / norm_sq - 1.0)

    # Count sign changes away from the residual inner tail: samples next
    # to a genuine node sit at ~h*|chi'| of the local amplitude, far above
    # this floor, while the decayed tail only flips sign through noise.
    scale = np.abs(chi).max()
    live = np.abs(chi) > 1e-6 * scale
    sign = np.sign(chi)
    node_count = int(np.sum((sign[1:] * sign[:-1] < 0) & live[1:] & live[:-1]))

    return RadialWavefunction(level=level, energy_au=energy, x=x, chi=chi,
                              x_step=h, node_count=node_count,
                              norm_residual=float(residual))


def _common_slices(wf_a: RadialWavefunction,
                   wf_b: RadialWavefunction) -> tuple[slice, slice, int]:
    if not math.isclose(wf_a.x_step, wf_b.x_step, rel_tol=1e-12):
        raise ValueError("wavefunctions live on different lattices")
    off_a, off_b = wf_a.lattice_offset, wf_b.lattice_offset
    lo = max(off_a, off_b)
    hi = min(off_a + len(wf_a.x), off_b + len(wf_b.x))
    if hi - lo < 3:
        raise ValueError("radial grids do not overlap")
    return slice(lo - off_a, hi - off_a), slice(lo - off_b, hi - off_b), lo


def radial_matrix_element(wf_a: RadialWavefunction, wf_b: RadialWavefunction,
                          power: int = 1) -> float:
    """<chi_a | r^power | chi_b> over the shared part of the lattice."""
    sl_a, sl_b, lo = _common_slices(wf_a, wf_b)
    h = wf_a.x_step
    x = np.arange(lo, lo + sl_a.stop - sl_a.start) * h
    integrand = (wf_a.chi[sl_a] * wf_b.chi[sl_b]
                 * x ** (2 * power) * 2.0 * x)
    return float(simpson(integrand, dx=h))


def overlap_integral(wf_a: RadialWavefunction,
                     wf_b: RadialWavefunction) -> float:
    """<chi_a | chi_b>, unity for a normalized wavefunction with itself."""
    return radial_matrix_element(wf_a, wf_b, power=0)
