"""Physical constants and unit conversions used throughout the package.

All conversion factors live here so that every module agrees on them.
Values are CODATA 2018.

Internal unit conventions:
    energies / frequencies   GHz (atomic structure) or MHz (gate dynamics),
                             always ordinary frequency E/h, never angular
    lengths                  Bohr radii (wavefunctions) or micrometers (pair
                             distances)
    C6 coefficients          GHz um^6
    decay rates              inverse microseconds (equal to MHz as a rate)
"""

import math

# fine-structure constant
ALPHA = 7.2973525693e-3

# Rydberg constant times c, infinite nuclear mass, in GHz.
# Equals (1/2) m_e c^2 alpha^2 / h.
RYDBERG_GHZ = 3.2898419602508e6

# Hartree energy in GHz
HARTREE_GHZ = 2.0 * RYDBERG_GHZ

# (1/2) m_e c^2 alpha^4 / h in GHz, prefactor of the fine-structure term
FINE_STRUCTURE_GHZ = RYDBERG_GHZ * ALPHA**2

# Bohr radius in micrometers
BOHR_RADIUS_UM = 5.29177210903e-5

# 1 Hartree * a0^6 expressed in GHz um^6 (converts atomic-unit C6 values)
C6_AU_TO_GHZ_UM6 = HARTREE_GHZ * BOHR_RADIUS_UM**6

GHZ_TO_MHZ = 1.0e3
MHZ_TO_GHZ = 1.0e-3

TWO_PI = 2.0 * math.pi
