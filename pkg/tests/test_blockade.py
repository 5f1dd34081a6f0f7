import math

import numpy as np
import pytest

from rydmap.blockade import (BrightPairState, ForsterZeroError, Scheme,
                             blockade_shift, bright_pair_state,
                             rotate_to_molecular_frame, scheme_for_level)
from rydmap.pairint import PairSpectrum, pair_basis
from rydmap.structure import RydbergLevel

# frozen shifts (MHz) for the bundled Rb87 model at R = 5 um
SHIFT_S = {0.0: 28.2909180245, math.pi / 2: 27.8078252815,
           math.pi / 4: 28.0462516833}
SHIFT_D = {0.0: 9.8521285293, math.pi / 2: 23.0624044367,
           math.pi / 4: 11.5571650971}


class TestSchemes:
    def test_level_mapping(self):
        assert scheme_for_level(RydbergLevel(70, 0, 0.5)) is Scheme.S_SCHEME
        assert scheme_for_level(RydbergLevel(70, 2, 1.5)) is Scheme.D_SCHEME

    def test_unsupported_levels(self):
        for level in (RydbergLevel(70, 1, 0.5), RydbergLevel(70, 2, 2.5),
                      RydbergLevel(70, 3, 2.5)):
            with pytest.raises(ValueError):
                scheme_for_level(level)

    def test_bright_state_structure(self):
        s = bright_pair_state(Scheme.S_SCHEME)
        assert s.amplitudes == pytest.approx(
            np.full(4, 0.5), abs=1e-15)
        d = bright_pair_state(Scheme.D_SCHEME)
        # per atom: (|+1/2> - |-1/2>)/sqrt2, stretched m = +-3/2 empty
        amps = d.amplitudes.reshape(4, 4)
        assert amps[0].tolist() == [0, 0, 0, 0]
        assert amps[3].tolist() == [0, 0, 0, 0]
        assert amps[1, 1] == pytest.approx(0.5)
        assert amps[1, 2] == pytest.approx(-0.5)
        assert amps[2, 1] == pytest.approx(-0.5)
        assert amps[2, 2] == pytest.approx(0.5)

    def test_norm_enforced(self):
        with pytest.raises(ValueError):
            BrightPairState(scheme=Scheme.S_SCHEME,
                            amplitudes=np.ones(4))


class TestFrameRotation:
    def test_identity_at_zero(self, bright_d):
        rotated = rotate_to_molecular_frame(bright_d, 0.0)
        assert np.allclose(rotated, bright_d.amplitudes, atol=1e-15)

    @pytest.mark.parametrize("theta", (0.3, 1.0, math.pi / 2, 2.7))
    def test_norm_preserved(self, bright_s, bright_d, theta):
        for state in (bright_s, bright_d):
            rotated = rotate_to_molecular_frame(state, theta)
            assert np.linalg.norm(rotated) == pytest.approx(1.0, abs=1e-12)

    def test_range_validation(self, bright_s):
        for theta in (-0.1, math.pi + 0.1):
            with pytest.raises(ValueError):
                rotate_to_molecular_frame(bright_s, theta)

    def test_single_atom_consistency(self, bright_d):
        # the pair rotation must be the tensor square of the one-atom one
        from rydmap.angular import wigner_d_matrix
        theta = 0.8
        d1 = wigner_d_matrix(1.5, theta)
        expected = np.kron(d1, d1) @ bright_d.amplitudes
        assert np.allclose(rotate_to_molecular_frame(bright_d, theta),
                           expected, atol=1e-14)


class TestBlockadeShift:
    @pytest.mark.parametrize("theta,value", sorted(SHIFT_S.items()))
    def test_s_frozen(self, spectrum_70s, bright_s, theta, value):
        res = blockade_shift(spectrum_70s, bright_s, 5.0, theta)
        assert res.delta_r_mhz == pytest.approx(value, rel=1e-6)
        assert res.signed_delta_r_mhz == pytest.approx(value, rel=1e-6)

    @pytest.mark.parametrize("theta,value", sorted(SHIFT_D.items()))
    def test_d_frozen(self, spectrum_70d, bright_d, theta, value):
        res = blockade_shift(spectrum_70d, bright_d, 5.0, theta)
        assert res.delta_r_mhz == pytest.approx(value, rel=1e-6)
        # the d-state pair interaction is attractive at 70d3/2
        assert res.signed_delta_r_mhz == pytest.approx(-value, rel=1e-6)

    def test_s_overlaps_at_axis(self, spectrum_70s, bright_s):
        res = blockade_shift(spectrum_70s, bright_s, 5.0, 0.0)
        weights = sorted(k for _, k in res.overlaps if k > 1e-9)
        assert weights == pytest.approx([0.25, 0.25, 0.5], abs=1e-9)

    def test_perpendicular_s_state_is_eigenstate(self, spectrum_70s,
                                                 bright_s):
        # at theta = pi/2 the rotated s bright state hits a single
        # eigenvector, so the shift equals that eigenvalue exactly
        res = blockade_shift(spectrum_70s, bright_s, 5.0, math.pi / 2)
        live = [(e, k) for e, k in res.overlaps if k > 1e-9]
        assert len(live) == 1
        assert live[0][1] == pytest.approx(1.0, abs=1e-12)

    def test_mirror_symmetry(self, spectrum_70d, bright_d):
        for theta in (0.2, 0.9, 1.4):
            a = blockade_shift(spectrum_70d, bright_d, 5.0, theta)
            b = blockade_shift(spectrum_70d, bright_d, 5.0, math.pi - theta)
            assert a.delta_r_mhz == pytest.approx(b.delta_r_mhz, rel=1e-12)

    def test_harmonic_mean_bounds(self, spectrum_70d, bright_d):
        res = blockade_shift(spectrum_70d, bright_d, 5.0, 0.7)
        live = [abs(e) for e, k in res.overlaps if k > 1e-12]
        assert min(live) <= res.delta_r_mhz <= max(live)

    def test_overlap_completeness(self, spectrum_70d, bright_d):
        res = blockade_shift(spectrum_70d, bright_d, 5.0, 1.1)
        assert sum(k for _, k in res.overlaps) == pytest.approx(1.0,
                                                                abs=1e-10)

    def test_exact_r6_scaling(self, spectrum_70s, bright_s):
        a = blockade_shift(spectrum_70s, bright_s, 5.0, 0.4)
        b = blockade_shift(spectrum_70s, bright_s, 10.0, 0.4)
        assert b.delta_r_mhz * 2 ** 6 == pytest.approx(a.delta_r_mhz,
                                                       rel=1e-12)

    def test_dimension_mismatch(self, spectrum_70d, bright_s):
        with pytest.raises(ValueError):
            blockade_shift(spectrum_70d, bright_s, 5.0, 0.0)


class TestForsterZero:
    def _synthetic_spectrum(self, eigenvalues):
        basis = pair_basis(0.5)
        return PairSpectrum(basis=basis,
                            eigenvalues_mhz=np.asarray(eigenvalues, float),
                            eigenvectors=np.eye(4),
                            reference_r_um=1.0)

    def test_zero_eigenvalue_with_weight_raises(self, bright_s):
        spec = self._synthetic_spectrum([0.0, 1.0, 2.0, 3.0])
        with pytest.raises(ForsterZeroError):
            blockade_shift(spec, bright_s, 1.0, 0.0)

    def test_all_zero_spectrum_raises(self, bright_s):
        spec = self._synthetic_spectrum([0.0, 0.0, 0.0, 0.0])
        with pytest.raises(ForsterZeroError):
            blockade_shift(spec, bright_s, 1.0, 0.0)

    def test_zero_without_weight_is_fine(self, bright_s):
        # the bright s state at theta=0 has no overlap with the M = +-1
        # basis states, so zeros there are harmless
        spec = self._synthetic_spectrum([2.0, 2.0, 2.0, 2.0])
        eigvecs = np.eye(4)
        spec = PairSpectrum(basis=spec.basis,
                            eigenvalues_mhz=np.array([0.0, 2.0, 2.0, 0.0]),
                            eigenvectors=eigvecs, reference_r_um=1.0)
        # place the zeros on eigenvectors orthogonal to the state
        state = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2)
        bright = BrightPairState(scheme=Scheme.S_SCHEME, amplitudes=state)
        res = blockade_shift(spec, bright, 1.0, 0.0)
        assert res.delta_r_mhz == pytest.approx(2.0, rel=1e-12)

    def test_signed_shift_follows_weighted_mean(self, bright_s):
        spec = self._synthetic_spectrum([-3.0, -2.0, 4.0, 1.0])
        res = blockade_shift(spec, bright_s, 1.0, 0.0)
        mean = sum(e * k for e, k in res.overlaps)
        assert math.copysign(1.0, res.signed_delta_r_mhz) == \
            math.copysign(1.0, mean)
