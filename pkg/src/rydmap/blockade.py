"""Blockade shift of the doubly excited pair as seen by the laser.

The excitation laser defines its own quantization axis (the light
polarization), while the pair Hamiltonian is diagonal in the molecular
frame along the interatomic axis.  With theta the angle between the two
axes, the laser-selected bright pair state is rotated by the single-atom
Wigner matrix on each tensor factor and projected on the interaction
eigenstates |phi> with overlaps kappa_phi.  The mean blockade shift is the
harmonic-type average

    1 / delta_R^2 = sum_phi kappa_phi^2 / Delta_E_phi^2,

reported as a positive magnitude in MHz; the signed variant (sign of the
overlap-weighted mean shift) is what a detuned-laser picture sees.

Two excitation schemes are supported: S_SCHEME addresses a j = 1/2
Rydberg level with the equal superposition of m = +-1/2 per atom, and
D_SCHEME a j = 3/2 level with the opposite-sign m = +-1/2 superposition
(m = +-3/2 stay dark).  Nuclear-spin projections are ignored throughout;
hyperfine structure does not matter at the blockade-shift level.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .angular import wigner_d_matrix
from .pairint import PairSpectrum
from .structure import RydbergLevel


class ForsterZeroError(ValueError):
    """The bright state overlaps an interaction eigenstate with (near) zero
    shift: the blockade is broken at this geometry."""


class Scheme(enum.Enum):
    """Laser excitation scheme, fixing j and the bright superposition."""
    S_SCHEME = 0.5
    D_SCHEME = 1.5

    @property
    def j(self) -> float:
        return self.value

    @property
    def multiplicity(self) -> int:
        return round(2 * self.value) + 1


def scheme_for_level(level: RydbergLevel) -> Scheme:
    if (level.l, level.j) == (0, 0.5):
        return Scheme.S_SCHEME
    if (level.l, level.j) == (2, 1.5):
        return Scheme.D_SCHEME
    raise ValueError(f"no excitation scheme defined for {level}")


@dataclass(frozen=True)
class BrightPairState:
    """Laser-frame two-atom bright state on the (m_A, m_B) product basis."""
    scheme: Scheme
    amplitudes: np.ndarray

    def __post_init__(self):
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"bright state norm {norm} is not 1")


def single_atom_bright_vector(scheme: Scheme) -> np.ndarray:
    """Per-atom superposition, basis m = -j..j ascending."""
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    if scheme is Scheme.S_SCHEME:
        # (|+1/2> + |-1/2>) / sqrt(2)
        return np.array([inv_sqrt2, inv_sqrt2])
    # (|+1/2> - |-1/2>) / sqrt(2) inside j = 3/2
    return np.array([0.0, -inv_sqrt2, inv_sqrt2, 0.0])


def bright_pair_state(scheme: Scheme) -> BrightPairState:
    """Product bright state v (x) v selected by the two-photon drive."""
    v = single_atom_bright_vector(scheme)
    return BrightPairState(scheme=scheme, amplitudes=np.kron(v, v))


def rotate_to_molecular_frame(state: BrightPairState,
                              theta: float) -> np.ndarray:
    """Amplitudes after rotating each atom by theta about the y axis.

    theta is the angle between the laser polarization axis and the
    interatomic axis; the returned vector lives in the molecular frame
    where the pair spectrum is defined.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    d = wigner_d_matrix(state.scheme.j, theta)
    return np.kron(d, d) @ state.amplitudes


@dataclass(frozen=True)
class BlockadeResult:
    """delta_R at one geometry plus the (shift, weight) decomposition."""
    delta_r_mhz: float
    r_um: float
    theta_rad: float
    overlaps: tuple[tuple[float, float], ...]  # (Delta_E_phi MHz, kappa^2)

    @property
    def signed_delta_r_mhz(self) -> float:
        """delta_R carrying the sign of the overlap-weighted mean shift."""
        mean = sum(e * k for e, k in self.overlaps)
        return math.copysign(self.delta_r_mhz, mean if mean != 0 else 1.0)


def blockade_shift(spectrum: PairSpectrum, state: BrightPairState,
                   r_um: float, theta: float) -> BlockadeResult:
    """Mean blockade shift delta_R(R, theta) in MHz.

    Raises ForsterZeroError when an essentially unshifted eigenstate
    carries bright-state weight, which is the blockade-breaking geometry.
    """
    dim = state.scheme.multiplicity ** 2
    if spectrum.eigenvectors.shape != (dim, dim):
        raise ValueError(
            f"spectrum dimension {spectrum.eigenvectors.shape} does not "
            f"match the {state.scheme.name} bright state ({dim})")
    rotated = rotate_to_molecular_frame(state, theta)
    kappa = spectrum.eigenvectors.conj().T @ rotated
    kappa_sq = np.abs(kappa) ** 2
    total = kappa_sq.sum()
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"overlap weights sum to {total}, expected 1")

    energies = spectrum.eigenvalues_at(r_um)
    scale = np.abs(energies).max()
    live = kappa_sq > 1e-12
    if scale == 0.0 or np.any(live & (np.abs(energies) < 1e-12 * scale)):
        raise ForsterZeroError(
            f"unshifted pair eigenstate carries bright-state weight at "
            f"R={r_um} um, theta={theta}: blockade vanishes")

    inverse_sq = float(np.sum(kappa_sq[live] / energies[live] ** 2))
    delta_r = 1.0 / math.sqrt(inverse_sq)
    overlaps = tuple((float(e), float(k))
                     for e, k in zip(energies, kappa_sq))
    return BlockadeResult(delta_r_mhz=delta_r, r_um=r_um, theta_rad=theta,
                          overlaps=overlaps)
