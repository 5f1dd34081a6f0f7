"""Shared fixtures.

The C6 tables need a few hundred Numerov solves each, so everything
derived from them is session scoped and computed once.
"""
import numpy as np
import pytest

from rydmap.blockade import bright_pair_state, scheme_for_level
from rydmap.pairint import compute_c6_table, pair_spectrum
from rydmap.species import bundled_species_path, load_species
from rydmap.structure import RydbergLevel


@pytest.fixture(scope="session")
def rb87():
    return load_species(bundled_species_path("rb87"))


@pytest.fixture(scope="session")
def hydrogen():
    return load_species(bundled_species_path("hydrogen"))


@pytest.fixture(scope="session")
def level_70s():
    return RydbergLevel(n=70, l=0, j=0.5)


@pytest.fixture(scope="session")
def level_70d():
    return RydbergLevel(n=70, l=2, j=1.5)


@pytest.fixture(scope="session")
def channels_70s(rb87, level_70s):
    return compute_c6_table(rb87, level_70s)


@pytest.fixture(scope="session")
def channels_70d(rb87, level_70d):
    return compute_c6_table(rb87, level_70d)


@pytest.fixture(scope="session")
def spectrum_70s(level_70s, channels_70s):
    return pair_spectrum(level_70s, channels_70s)


@pytest.fixture(scope="session")
def spectrum_70d(level_70d, channels_70d):
    return pair_spectrum(level_70d, channels_70d)


@pytest.fixture(scope="session")
def bright_s(level_70s):
    return bright_pair_state(scheme_for_level(level_70s))


@pytest.fixture(scope="session")
def bright_d(level_70d):
    return bright_pair_state(scheme_for_level(level_70d))


@pytest.fixture(autouse=True)
def _seeded_rng():
    # any randomized checks draw from a fixed stream
    np.random.seed(20260816)
