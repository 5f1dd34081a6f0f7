"""Rydberg blockade and gate-fidelity maps for alkali atom pairs.

The pipeline: quantum-defect level energies and Numerov radial
wavefunctions (`structure`), van der Waals channel C6 coefficients and
the Zeeman-basis pair Hamiltonian (`pairint`), the angle- and
distance-dependent mean blockade shift (`blockade`), the two-pulse
controlled-phase gate and its Bell fidelity (`gate`), and spatial sweep
orchestration with CSV output (`maps`, `cli`).
"""

__version__ = "0.1.0"

from .angular import clebsch_gordan, wigner_d_matrix
from .blockade import (BlockadeResult, BrightPairState, ForsterZeroError,
                       Scheme, blockade_shift, bright_pair_state,
                       rotate_to_molecular_frame, scheme_for_level)
from .gate import (Calibration, CalibrationError, GateParams, GateResult,
                   Sector, SectorEvolution, bell_fidelity, calibrate,
                   calibrated_params, evolve_sector, fidelity_sweep,
                   pulse_duration, run_gate)
from .maps import (MapRecord, MapResult, SweepConfig, r_min_estimate,
                   render_csv, run_map, write_outputs)
from .pairint import (ForsterResonanceError, InteractionChannel, PairSpectrum,
                      PairTerm, build_hamiltonian, c6_coefficient,
                      compute_c6_table, diagonalize, enumerate_channels,
                      pair_basis, pair_spectrum, vdw_kernel)
from .species import (DefectSeries, SpeciesError, SpeciesModel,
                      bundled_species_path, load_species, quantum_defect,
                      save_species)
from .structure import (GridSpec, RadialWavefunction, RydbergLevel,
                        effective_n, level_energy, overlap_integral,
                        parse_level, radial_matrix_element, solve_radial)

__all__ = [name for name in dir() if not name.startswith("_")]
