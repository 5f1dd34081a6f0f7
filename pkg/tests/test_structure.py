import math

import numpy as np
import pytest

from rydmap.structure import (GridError, GridSpec, RydbergLevel, effective_n,
                              level_energy, overlap_integral, parse_level,
                              radial_matrix_element, solve_radial)

# frozen against this package's own defect tables; absolute GHz
RB87_LEVELS = [
    ("70s1/2", 3.1312202977, -735.74706484, 66.86877970),
    ("70p1/2", 2.6549488419, -725.37730515, 67.34505116),
    ("70p3/2", 2.6417387189, -725.09255974, 67.35826128),
    ("70d3/2", 1.3479637980, -698.02076975, 68.65203620),
    ("70d5/2", 1.3463392695, -697.98765097, 68.65366073),
    ("70f5/2", 0.0165018449, -671.71314597, 69.98349816),
]


class TestParseLevel:
    @pytest.mark.parametrize("text,expected", [
        ("70s1/2", RydbergLevel(70, 0, 0.5)),
        ("70d3/2", RydbergLevel(70, 2, 1.5)),
        ("  101F7/2 ", RydbergLevel(101, 3, 3.5)),
        ("5 p 3/2", RydbergLevel(5, 1, 1.5)),
    ])
    def test_accepts(self, text, expected):
        assert parse_level(text) == expected

    @pytest.mark.parametrize("text", ["", "70", "s1/2", "70s", "70s2",
                                      "70x1/2", "70s3", "-70s1/2"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_level(text)

    def test_j_must_match_l(self):
        # j = l +- 1/2 enforced by the level type itself
        with pytest.raises(ValueError):
            parse_level("70s3/2")


class TestRydbergLevel:
    def test_ordering_and_str(self):
        a, b = RydbergLevel(70, 0, 0.5), RydbergLevel(70, 1, 0.5)
        assert a < b
        assert str(a) == "70s1/2"
        assert RydbergLevel(70, 2, 1.5).multiplicity == 4

    def test_validation(self):
        with pytest.raises(ValueError):
            RydbergLevel(70, 2, 0.5)   # j not l +- 1/2
        with pytest.raises(ValueError):
            RydbergLevel(2, 2, 1.5)    # n <= l


class TestLevelEnergy:
    @pytest.mark.parametrize("text,defect,energy,n_star", RB87_LEVELS)
    def test_frozen_values(self, rb87, text, defect, energy, n_star):
        level = parse_level(text)
        assert effective_n(rb87, level) == pytest.approx(70 - defect,
                                                         abs=1e-9)
        assert level_energy(rb87, level) == pytest.approx(energy, abs=1e-6)
        assert effective_n(rb87, level) == pytest.approx(n_star, abs=1e-7)

    def test_fine_structure_raises_p3_above_p1(self, rb87):
        e_low = level_energy(rb87, parse_level("70p1/2"))
        e_high = level_energy(rb87, parse_level("70p3/2"))
        assert e_high > e_low

    def test_hydrogen_rydberg_series(self, hydrogen):
        # without fine structure, E_n = -Ry/n^2 exactly
        e = level_energy(hydrogen, RydbergLevel(10, 0, 0.5),
                         include_fine_structure=False)
        assert e == pytest.approx(-3.2898419602508e6 / 100, rel=1e-12)


HYDROGEN_CASES = [(10, 0), (10, 9), (12, 5), (20, 10), (8, 7), (35, 2)]


@pytest.fixture(scope="module")
def solutions(hydrogen):
    return {(n, l): solve_radial(hydrogen, RydbergLevel(n, l, l + 0.5))
            for n, l in HYDROGEN_CASES}


class TestNumerovHydrogen:
    """Hydrogen has closed-form expectation values; the solver must hit
    them without any knowledge of the analytic solutions."""

    CASES = HYDROGEN_CASES

    @pytest.mark.parametrize("n,l", CASES)
    def test_node_count(self, solutions, n, l):
        assert solutions[(n, l)].node_count == n - l - 1

    @pytest.mark.parametrize("n,l", CASES)
    def test_normalized(self, solutions, n, l):
        wf = solutions[(n, l)]
        assert overlap_integral(wf, wf) == pytest.approx(1.0, abs=1e-9)
        assert wf.norm_residual < 1e-6

    @pytest.mark.parametrize("n,l", CASES)
    def test_mean_radius(self, solutions, n, l):
        expected = 0.5 * (3 * n ** 2 - l * (l + 1))
        wf = solutions[(n, l)]
        assert radial_matrix_element(wf, wf) == pytest.approx(
            expected, rel=1e-6)

    @pytest.mark.parametrize("n,l", CASES)
    def test_mean_square_radius(self, solutions, n, l):
        expected = 0.5 * n ** 2 * (5 * n ** 2 + 1 - 3 * l * (l + 1))
        wf = solutions[(n, l)]
        assert radial_matrix_element(wf, wf, power=2) == pytest.approx(
            expected, rel=1e-6)

    def test_same_l_orthogonality(self, hydrogen):
        wf_a = solve_radial(hydrogen, RydbergLevel(10, 0, 0.5))
        wf_b = solve_radial(hydrogen, RydbergLevel(13, 0, 0.5))
        assert abs(overlap_integral(wf_a, wf_b)) < 1e-4

    def test_known_dipole_element(self, hydrogen):
        # |<n l | r | n l-1>| = (3/2) n sqrt(n^2 - l^2) for hydrogen
        wf_a = solve_radial(hydrogen, RydbergLevel(10, 1, 1.5))
        wf_b = solve_radial(hydrogen, RydbergLevel(10, 0, 0.5))
        got = radial_matrix_element(wf_a, wf_b)
        assert abs(got) == pytest.approx(15.0 * math.sqrt(99.0), rel=1e-6)

    def test_energy_matches_bohr(self, hydrogen):
        wf = solve_radial(hydrogen, RydbergLevel(12, 5, 5.5))
        assert wf.energy_au == pytest.approx(-0.5 / 144, rel=1e-12)


class TestNumerovRb87:
    def test_node_count_follows_defect(self, rb87):
        # the defect removes roughly floor(delta) nodes relative to
        # hydrogen's n - l - 1; the exact count of the model solution on
        # the truncated domain is frozen here as a regression anchor
        assert solve_radial(rb87, parse_level("70s1/2")).node_count == 65
        assert solve_radial(rb87, parse_level("70d3/2")).node_count == 66

    def test_norm_and_localization(self, rb87):
        wf = solve_radial(rb87, parse_level("70d3/2"))
        assert overlap_integral(wf, wf) == pytest.approx(1.0, abs=1e-9)
        r_mean = radial_matrix_element(wf, wf)
        n_star = effective_n(rb87, parse_level("70d3/2"))
        expected = 0.5 * (3 * n_star ** 2 - 2 * 3)
        assert r_mean == pytest.approx(expected, rel=5e-3)

    def test_shared_lattice_alignment(self, rb87):
        wf_a = solve_radial(rb87, parse_level("70s1/2"))
        wf_b = solve_radial(rb87, parse_level("71p1/2"))
        # both lattices are integer multiples of the same step
        for wf in (wf_a, wf_b):
            assert np.allclose(wf.x / wf.x_step,
                               np.round(wf.x / wf.x_step), atol=1e-9)

    def test_grid_error_on_coarse_step(self, rb87):
        with pytest.raises(GridError):
            solve_radial(rb87, parse_level("70s1/2"), GridSpec(step=0.5))

    def test_step_convergence(self, hydrogen):
        coarse = solve_radial(hydrogen, RydbergLevel(10, 2, 2.5),
                              GridSpec(step=0.02))
        fine = solve_radial(hydrogen, RydbergLevel(10, 2, 2.5),
                            GridSpec(step=0.005))
        exact = 0.5 * (3 * 100 - 6)
        err_coarse = abs(radial_matrix_element(coarse, coarse) - exact)
        err_fine = abs(radial_matrix_element(fine, fine) - exact)
        assert err_fine < err_coarse
