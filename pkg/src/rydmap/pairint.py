"""Pair interaction: vdW channels, C6 coefficients, Zeeman-basis Hamiltonian.

Two atoms prepared in the same Rydberg level |n l j> interact at long range
through second-order dipole-dipole coupling.  Each dipole-allowed pair of
intermediate series (l_A j_A, l_B j_B) forms one channel contributing

    H = sum_k (C6_k / R^6) D_k

on the (2j+1)^2-dimensional Zeeman product basis.  C6_k is a pure radial
quantity (matrix elements and energy defects), while the dyad D_k carries
the complete angular structure, including the fine-structure weights of the
dipole couplings; see Walker and Saffman, PRA 77, 032723 (2008) for this
decomposition.

Conventions:
  - The quantization axis is the interatomic axis; laser geometry enters
    elsewhere by rotating states, never the Hamiltonian.
  - Basis ordering is atom-A major: index = i_A * (2j+1) + i_B with
    m = -j + i ascending per atom.
  - C6 in GHz um^6, Hamiltonians in MHz, distances in um.
  - C6_k = sum over (n_A, n_B) of (R_A R_B)^2 / (-delta_AB): positive C6
    for negative energy defects.  The total projection M = m_A + m_B is
    conserved, so H is block diagonal in M.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .angular import angular_dipole_block
from .species import SpeciesModel
from .structure import (GridSpec, RadialWavefunction, RydbergLevel,
                        level_energy, radial_matrix_element, solve_radial)
from .units import C6_AU_TO_GHZ_UM6, GHZ_TO_MHZ, HARTREE_GHZ

# (R_A R_B)^2 / (-delta) with radial products in a0^2 and the defect in GHz
_C6_PREFACTOR = HARTREE_GHZ * C6_AU_TO_GHZ_UM6


class ForsterResonanceError(ValueError):
    """An intermediate pair level is too close to resonance for a vdW
    treatment; the second-order expansion would diverge."""


@dataclass(frozen=True)
class PairTerm:
    """One (n_A, n_B) contribution to a channel C6 sum."""
    n_a: int
    n_b: int
    detuning_ghz: float
    radial_product: float  # <init|r|A><init|r|B>, a0^2
    c6_ghz_um6: float      # signed contribution, ordering factor included


@dataclass(frozen=True)
class InteractionChannel:
    """One angular channel (l j, l j) -> (l_A j_A, l_B j_B).

    enumerate_channels yields the bare angular identity; c6_coefficient
    returns a copy with the signed C6 and the retained pair terms filled in.
    Partner series are stored in canonical (sorted) order since the channel
    is an unordered pair; the A<->B symmetrization happens in the dyad.
    """
    l_a: int
    j_a: float
    l_b: int
    j_b: float
    c6: float | None = None
    pair_terms: tuple[PairTerm, ...] = ()

    @property
    def symmetric(self) -> bool:
        return (self.l_a, self.j_a) == (self.l_b, self.j_b)

    def top_fraction(self, count: int = 2) -> float:
        """Fraction of sum(|contributions|) carried by the largest terms."""
        mags = sorted((abs(t.c6_ghz_um6) for t in self.pair_terms),
                      reverse=True)
        total = sum(mags)
        return sum(mags[:count]) / total if total else 0.0

    def label(self) -> str:
        from .species import SPECTROSCOPIC_LETTERS
        sa = f"{SPECTROSCOPIC_LETTERS[self.l_a]}{round(2 * self.j_a)}/2"
        sb = f"{SPECTROSCOPIC_LETTERS[self.l_b]}{round(2 * self.j_b)}/2"
        return f"{sa}+{sb}"


@dataclass(frozen=True)
class PairSpectrum:
    """Eigen-decomposition of the pair Hamiltonian at a reference distance.

    eigenvalues_mhz are sorted ascending; eigenvectors[:, i] is the i-th
    eigenvector on the Zeeman product basis.  The spectrum at any other
    distance follows from the exact (reference_r/R)^6 scaling shared by
    every channel.
    """
    basis: tuple[tuple[float, float], ...]
    eigenvalues_mhz: np.ndarray
    eigenvectors: np.ndarray
    reference_r_um: float

    def eigenvalues_at(self, r_um: float) -> np.ndarray:
        if r_um <= 0:
            raise ValueError("distance must be positive")
        return self.eigenvalues_mhz * (self.reference_r_um / r_um) ** 6


def dipole_partner_series(l: int, j: float) -> list[tuple[int, float]]:
    """(l', j') reachable by one dipole photon: |l'-l| = 1, |j'-j| <= 1."""
    partners = []
    for l_new in (l - 1, l + 1):
        if l_new < 0:
            continue
        for j_new in (l_new - 0.5, l_new + 0.5):
            if j_new > 0 and abs(j_new - j) <= 1:
                partners.append((l_new, j_new))
    return partners


def enumerate_channels(initial: RydbergLevel) -> list[InteractionChannel]:
    """All unordered pairs of dipole partner series, canonically sorted."""
    partners = dipole_partner_series(initial.l, initial.j)
    channels = set()
    for a in partners:
        for b in partners:
            lo, hi = sorted((a, b))
            channels.add((*lo, *hi))
    return [InteractionChannel(l_a=c[0], j_a=c[1], l_b=c[2], j_b=c[3])
            for c in sorted(channels)]


def _cached_wavefunction(model: SpeciesModel, level: RydbergLevel,
                         grid: GridSpec,
                         cache: dict | None) -> RadialWavefunction:
    if cache is None:
        return solve_radial(model, level, grid)
    key = (level, grid.step)
    if key not in cache:
        cache[key] = solve_radial(model, level, grid)
    return cache[key]


def c6_coefficient(model: SpeciesModel, initial: RydbergLevel,
                   channel: InteractionChannel, *, n_window: int = 4,
                   defect_cutoff_ghz: float | None = 14.0,
                   max_terms: int | None = 2,
                   degeneracy_guard_ghz: float = 0.010,
                   grid: GridSpec = GridSpec(),
                   cache: dict | None = None) -> InteractionChannel:
    """Fill in the channel's signed C6 (GHz um^6) and its pair terms.

    Sums (R_A R_B)^2 / (-delta_AB) over the distinct intermediate pair
    states with n_A, n_B within +-n_window of the initial n.  Each pair
    state is counted once: symmetric channels run over n_A <= n_B, and
    asymmetric channels use a single partner assignment (the A<->B swap
    lives in the dyad, not here).  Terms with |delta_AB| above
    defect_cutoff_ghz are dropped, and only the max_terms largest
    contributions are kept, so each channel is defined by its near-resonant
    structure; pass None for either knob to lift that cut.  A kept term
    below the degeneracy guard raises ForsterResonanceError since the
    perturbative form has broken down.
    """
    if cache is None:
        cache = {}
    e_init = level_energy(model, initial)
    wf_init = _cached_wavefunction(model, initial, grid, cache)

    terms = []
    total = 0.0
    for n_a in range(initial.n - n_window, initial.n + n_window + 1):
        if n_a <= channel.l_a:
            continue
        lev_a = RydbergLevel(n_a, channel.l_a, channel.j_a)
        rad_a = radial_matrix_element(
            wf_init, _cached_wavefunction(model, lev_a, grid, cache))
        e_a = level_energy(model, lev_a)
        n_b_start = n_a if channel.symmetric else initial.n - n_window
        for n_b in range(n_b_start, initial.n + n_window + 1):
            if n_b <= channel.l_b:
                continue
            lev_b = RydbergLevel(n_b, channel.l_b, channel.j_b)
            detuning = e_a + level_energy(model, lev_b) - 2.0 * e_init
            if (defect_cutoff_ghz is not None
                    and abs(detuning) > defect_cutoff_ghz):
                continue
            if abs(detuning) < degeneracy_guard_ghz:
                raise ForsterResonanceError(
                    f"pair level {lev_a}+{lev_b} sits {detuning * 1e3:.2f} MHz "
                    f"from {initial}+{initial}: van der Waals expansion "
                    "invalid this close to a Forster resonance"
                )
            rad_b = radial_matrix_element(
                wf_init, _cached_wavefunction(model, lev_b, grid, cache))
            product = rad_a * rad_b
            contribution = _C6_PREFACTOR * product * product / -detuning
            total += contribution
            terms.append(PairTerm(n_a=n_a, n_b=n_b, detuning_ghz=detuning,
                                  radial_product=product,
                                  c6_ghz_um6=contribution))
    terms.sort(key=lambda t: abs(t.c6_ghz_um6), reverse=True)
    if max_terms is not None:
        terms = terms[:max_terms]
        total = sum(t.c6_ghz_um6 for t in terms)
    return dataclasses.replace(channel, c6=total, pair_terms=tuple(terms))


def compute_c6_table(model: SpeciesModel, initial: RydbergLevel, *,
                     n_window: int = 4,
                     defect_cutoff_ghz: float | None = 14.0,
                     max_terms: int | None = 2,
                     grid: GridSpec = GridSpec()) -> list[InteractionChannel]:
    """C6 for every channel of the initial level, sharing one solver cache."""
    cache: dict = {}
    return [c6_coefficient(model, initial, ch, n_window=n_window,
                           defect_cutoff_ghz=defect_cutoff_ghz,
                           max_terms=max_terms, grid=grid, cache=cache)
            for ch in enumerate_channels(initial)]


def pair_basis(j: float) -> tuple[tuple[float, float], ...]:
    """(m_A, m_B) labels in atom-A-major order, m ascending per atom."""
    ms = [-j + i for i in range(round(2 * j) + 1)]
    return tuple((ma, mb) for ma in ms for mb in ms)


def pair_m_values(j: float) -> np.ndarray:
    """Total projection M = m_A + m_B per basis index."""
    return np.array([ma + mb for ma, mb in pair_basis(j)])


def _pair_coupling(initial: RydbergLevel, series_a: tuple[int, float],
                   series_b: tuple[int, float]) -> np.ndarray:
    """-(2 d0 d0 + d+ d- + d- d+) restricted to one partner assignment."""
    blocks_a = {q: angular_dipole_block(initial.l, initial.j,
                                        series_a[0], series_a[1], q)
                for q in (-1, 0, 1)}
    blocks_b = {q: angular_dipole_block(initial.l, initial.j,
                                        series_b[0], series_b[1], q)
                for q in (-1, 0, 1)}
    return -(2.0 * np.kron(blocks_a[0], blocks_b[0])
             + np.kron(blocks_a[+1], blocks_b[-1])
             + np.kron(blocks_a[-1], blocks_b[+1]))


def angular_dyad(initial: RydbergLevel,
                 channel: InteractionChannel) -> np.ndarray:
    """Channel dyad D_k = W^T W on the initial (j, j) Zeeman product basis.

    W is the angular part of the two-atom dipole coupling into the channel
    multiplet, with the interatomic axis as quantization axis.  Asymmetric
    channels average the two partner assignments, which keeps D_k symmetric
    under A<->B exchange.  Every D_k is real, symmetric, positive
    semidefinite, and commutes with M = m_A + m_B.
    """
    series_a = (channel.l_a, channel.j_a)
    series_b = (channel.l_b, channel.j_b)
    w = _pair_coupling(initial, series_a, series_b)
    dyad = w.T @ w
    if not channel.symmetric:
        w_swapped = _pair_coupling(initial, series_b, series_a)
        dyad = 0.5 * (dyad + w_swapped.T @ w_swapped)
    return dyad


def vdw_kernel(initial: RydbergLevel,
               channels: list[InteractionChannel]) -> np.ndarray:
    """sum_k C6_k D_k in GHz um^6; H(R) is this divided by R^6."""
    dim = initial.multiplicity ** 2
    kernel = np.zeros((dim, dim))
    for channel in channels:
        if channel.c6 is None:
            raise ValueError(f"channel {channel.label()} has no C6; run "
                             "c6_coefficient first")
        kernel += channel.c6 * angular_dyad(initial, channel)
    return kernel


def build_hamiltonian(initial: RydbergLevel,
                      channels: list[InteractionChannel],
                      r_um: float) -> np.ndarray:
    """Pair Hamiltonian in MHz at interatomic distance r_um."""
    if r_um <= 0:
        raise ValueError("distance must be positive")
    return vdw_kernel(initial, channels) * (GHZ_TO_MHZ / r_um ** 6)


def diagonalize(h_mhz: np.ndarray, *, j: float,
                reference_r_um: float = 1.0) -> PairSpectrum:
    """Full eigen-decomposition of a Hermitian pair Hamiltonian."""
    asym = np.abs(h_mhz - h_mhz.conj().T).max()
    if asym > 1e-10:
        raise ValueError(f"Hamiltonian asymmetry {asym:.2e} exceeds 1e-10")
    basis = pair_basis(j)
    if h_mhz.shape != (len(basis), len(basis)):
        raise ValueError(f"expected {len(basis)}x{len(basis)} matrix for "
                         f"j={j}, got {h_mhz.shape}")
    eigenvalues, eigenvectors = np.linalg.eigh(h_mhz)
    return PairSpectrum(basis=basis, eigenvalues_mhz=eigenvalues,
                        eigenvectors=eigenvectors,
                        reference_r_um=reference_r_um)


def pair_spectrum(initial: RydbergLevel,
                  channels: list[InteractionChannel],
                  reference_r_um: float = 1.0) -> PairSpectrum:
    """Diagonalize the channel-summed Hamiltonian at a reference distance."""
    h = build_hamiltonian(initial, channels, reference_r_um)
    return diagonalize(h, j=initial.j, reference_r_um=reference_r_um)
