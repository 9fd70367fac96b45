import numpy as np
import pytest

from z2ladder import (
    ParameterError,
    effective_lattice_spectrum,
    most_localized_other_star_weight,
    perturbative_couplings,
    projected_hop_amplitude,
    single_star_ground_overlap,
)
from z2ladder.effective_lattice import effective_lattice_hamiltonian


class TestGraphStructure:
    def test_isolated_star_spectrum(self):
        # biadjacency J - P has singular values (3, 1, 1, 1), so each star
        # contributes levels -3, -1 (x3), +1 (x3), +3 in units of gamma_m
        spec = effective_lattice_spectrum(1.0, 0.0, 0.0)
        expected = np.sort(np.array([-3.0, -1, -1, -1, 1, 1, 1, 3.0] * 2))
        np.testing.assert_allclose(spec.energies, expected, atol=1e-12)

    def test_internal_gap_is_two_gamma_m(self):
        spec = effective_lattice_spectrum(0.7, 0.0, 0.0)
        assert spec.energies[2] - spec.energies[0] == pytest.approx(1.4)

    def test_degrees(self):
        H = effective_lattice_hamiltonian(1.0, 1.0, 0.0)
        degrees = (np.abs(H) > 0).sum(axis=0)
        # four vertices gain one inter-star bond on top of the three
        assert sorted(degrees) == [3] * 12 + [4] * 4

    def test_flux_validation(self):
        with pytest.raises(ParameterError):
            effective_lattice_spectrum(1.0, 1.0, 0.5)


class TestProjectedHop:
    def test_pi_flux_exact_zero(self):
        assert projected_hop_amplitude(1.0, 0.5, np.pi) == 0.0

    def test_zero_flux_value(self):
        amp = projected_hop_amplitude(2.0, 0.5, 0.0)
        assert amp == pytest.approx(-2.0 * 2.0 * 0.25)

    def test_overlap_is_one_over_two_root_two(self):
        assert single_star_ground_overlap() == pytest.approx(1.0 / (2.0 * np.sqrt(2.0)))

    def test_reproduces_weak_coupling_splitting(self):
        # at gamma_g << gamma_m the zero-flux bonding/antibonding splitting
        # is twice the projected hop amplitude
        gamma_g = 1e-3
        spec = effective_lattice_spectrum(1.0, gamma_g, 0.0)
        splitting = spec.energies[1] - spec.energies[0]
        predicted = 2.0 * abs(projected_hop_amplitude(
            gamma_g, single_star_ground_overlap(), 0.0))
        assert splitting == pytest.approx(predicted, rel=1e-3)

    def test_overlap_validation(self):
        with pytest.raises(ParameterError):
            projected_hop_amplitude(1.0, 1.5, 0.0)


class TestPerturbativeCouplings:
    def test_linear_coefficients(self):
        # fitted slopes over gamma0 <= 0.05 against the 16-vertex graph
        grid = np.array([0.01, 0.02, 0.03, 0.04, 0.05])
        lam = np.array([perturbative_couplings(1.0, g).lam for g in grid])
        hop = np.array([perturbative_couplings(1.0, g).hop_half for g in grid])
        lam_slope = np.polyfit(grid, lam, 1)[0]
        hop_slope = np.polyfit(grid, hop, 1)[0]
        assert abs(lam_slope + 1.549) / 1.549 < 0.01
        assert abs(hop_slope - 0.12875) / 0.12875 < 0.01

    def test_zero_field_limit(self):
        coupling = perturbative_couplings(1.0, 1e-12)
        assert coupling.lam == pytest.approx(2.0, abs=1e-10)
        assert coupling.hop_half == pytest.approx(0.0, abs=1e-12)


class TestPiFluxLocalization:
    def test_ground_pair_exactly_degenerate(self):
        spec = effective_lattice_spectrum(1.0, 1.0, np.pi)
        assert spec.energies[1] - spec.energies[0] < 1e-12

    def test_weak_coupling_residual_is_second_order(self):
        spec = effective_lattice_spectrum(1.0, 1e-6, np.pi)
        assert spec.energies[1] - spec.energies[0] < 1e-11

    def test_other_star_weight_near_four_percent(self):
        weight = most_localized_other_star_weight(1.0, 1.0)
        assert abs(weight - 0.04) < 0.01

    def test_weight_vanishes_at_weak_coupling(self):
        assert most_localized_other_star_weight(1.0, 1e-4) < 1e-6
