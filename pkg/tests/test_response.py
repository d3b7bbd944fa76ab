"""
Tests for the susceptibilities and the mismatch functions.
"""

import numpy as np
import pytest

from src.core.exceptions import ParameterError
from src.physics.model import MismatchSpec
from src.physics.response import (
    RatioForm,
    backaction_residual,
    chi_a,
    chi_a_eff,
    chi_a_eff_cqnc,
    chi_d,
    chi_m,
    inverse_chi_m_sq,
    mismatch_functions,
    ratio,
    ratio_discrepancy,
    ratio_mismatch,
)
from tests.conftest import GAMMA_M, KAPPA, OMEGA_M


class TestSusceptibilities:
    """Closed-form susceptibilities."""

    def test_cavity_dc_and_corner(self):
        assert chi_a(0.0, KAPPA) == pytest.approx(2.0 / KAPPA)
        assert abs(chi_a(KAPPA / 2, KAPPA)) == pytest.approx(np.sqrt(2.0) / KAPPA)

    def test_conjugate_symmetry(self, rng):
        """chi(-omega) = chi(omega)* for every susceptibility."""
        w = rng.uniform(0.0, 2.0 * OMEGA_M, 500)
        np.testing.assert_allclose(chi_a(-w, KAPPA), np.conj(chi_a(w, KAPPA)), rtol=1e-14)
        np.testing.assert_allclose(
            chi_m(-w, OMEGA_M, GAMMA_M), np.conj(chi_m(w, OMEGA_M, GAMMA_M)), rtol=1e-14
        )
        np.testing.assert_allclose(
            chi_d(-w, OMEGA_M, GAMMA_M), np.conj(chi_d(w, OMEGA_M, GAMMA_M)), rtol=1e-14
        )

    def test_mechanical_resonance(self):
        """chi_m(omega_m) = -i/gamma_m and chi_m(0) = 1/omega_m."""
        assert complex(chi_m(OMEGA_M, OMEGA_M, GAMMA_M)) == pytest.approx(-1j / GAMMA_M, rel=1e-12)
        assert complex(chi_m(0.0, OMEGA_M, GAMMA_M)) == pytest.approx(1.0 / OMEGA_M)

    def test_mechanical_half_width(self):
        """|chi_m|^2 halves a half-linewidth away from resonance."""
        peak = abs(chi_m(OMEGA_M, OMEGA_M, GAMMA_M)) ** 2
        edge = abs(chi_m(OMEGA_M + GAMMA_M / 2, OMEGA_M, GAMMA_M)) ** 2
        assert edge / peak == pytest.approx(0.5, rel=1e-5)

    def test_lorentzian_peak_position(self):
        """|chi_m|^2 peaks at omega^2 = omega_m^2 - gamma_m^2/2."""
        w = np.linspace(0.5, 1.2, 700001)
        peak = w[np.argmax(np.abs(chi_m(w, 1.0, 0.5)) ** 2)]
        assert peak == pytest.approx(np.sqrt(1.0 - 0.125), abs=2e-6)

    def test_atomic_negative_mass(self):
        """chi_d(0) -> -1/omega_m for vanishing Gamma and chi_d ~ -chi_m when matched."""
        assert complex(chi_d(0.0, OMEGA_M, 1e-12)) == pytest.approx(-1.0 / OMEGA_M)
        expected = -OMEGA_M / (GAMMA_M**2 / 4 + 1j * OMEGA_M * GAMMA_M)
        assert complex(chi_d(OMEGA_M, OMEGA_M, GAMMA_M)) == pytest.approx(expected, rel=1e-12)
        w = np.linspace(0.9, 1.1, 101) * OMEGA_M
        relative = np.abs(chi_d(w, OMEGA_M, GAMMA_M) + chi_m(w, OMEGA_M, GAMMA_M)) / np.abs(
            chi_m(w, OMEGA_M, GAMMA_M)
        )
        assert np.max(relative) < 1e-6

    def test_inverse_chi_m_sq(self, resonance_grid):
        """The direct |chi_m|^-2 agrees with the reciprocal of |chi_m|^2."""
        direct = inverse_chi_m_sq(resonance_grid, OMEGA_M, GAMMA_M)
        reference = 1.0 / np.abs(chi_m(resonance_grid, OMEGA_M, GAMMA_M)) ** 2
        np.testing.assert_allclose(direct, reference, rtol=1e-12)


class TestRatio:
    """R, r and the cancellation residual."""

    def test_matched_cancellation_is_exact(self, resolved_params, resonance_grid):
        """Gamma = gamma_m: 1 + R = 0 and the residual vanishes identically."""
        assert np.all(1.0 + ratio(resonance_grid, resolved_params) == 0.0)
        assert np.all(backaction_residual(resonance_grid, resolved_params) == 0.0)

    def test_r_vanishes_at_dc(self, published_params):
        params = published_params.resolved(MismatchSpec(decay_mismatch=0.5))
        assert complex(ratio_mismatch(0.0, params)) == 0.0

    def test_r_matches_closed_form(self, published_params, resonance_grid):
        """r = i omega (gamma_m - Gamma)/((omega_m^2 - omega^2) + i omega Gamma) and R = -(1 + r)."""
        params = published_params.resolved(MismatchSpec(decay_mismatch=0.5))
        gamma_d = params.Gamma
        w = resonance_grid
        expected = 1j * w * (GAMMA_M - gamma_d) / ((OMEGA_M**2 - w**2) + 1j * w * gamma_d)
        r = ratio_mismatch(w, params)
        np.testing.assert_allclose(r, expected, rtol=1e-9)
        np.testing.assert_allclose(ratio(w, params), -(1.0 + r), rtol=1e-12)

    def test_exact_ratio_is_chi_d_over_chi_m(self, resolved_params, resonance_grid):
        w = resonance_grid
        exact = ratio(w, resolved_params, RatioForm.EXACT)
        literal = chi_d(w, OMEGA_M, GAMMA_M) / chi_m(w, OMEGA_M, GAMMA_M)
        np.testing.assert_allclose(exact, literal, rtol=1e-12)

    def test_ratio_discrepancy_is_small_off_resonance(self, resolved_params):
        """The dropped Gamma^2/4 shift matters only very close to resonance."""
        assert ratio_discrepancy(0.9 * OMEGA_M, resolved_params) < 1e-12
        assert ratio_discrepancy(OMEGA_M, resolved_params) > 0.0


class TestEffectiveCavity:
    """chi'_a and the mismatch functions."""

    def test_zero_detuning_is_bare_cavity(self, published_params, resonance_grid):
        """Delta = 0 returns chi_a exactly, whatever the coupling mismatch."""
        params = published_params.resolved(MismatchSpec(coupling_mismatch=0.2))
        np.testing.assert_array_equal(
            chi_a_eff(resonance_grid, params), chi_a(resonance_grid, KAPPA)
        )

    def test_cqnc_form_under_matching(self, resolved_params, resonance_grid):
        """With backaction cancelled only the Delta^2 term survives."""
        params = resolved_params.with_detuning(KAPPA)
        np.testing.assert_allclose(
            chi_a_eff(resonance_grid, params, RatioForm.HIGH_Q),
            chi_a_eff_cqnc(resonance_grid, KAPPA, KAPPA),
            rtol=1e-12,
        )
        off_resonance = 0.9 * OMEGA_M
        assert complex(chi_a_eff(off_resonance, params)) == pytest.approx(
            complex(chi_a_eff_cqnc(off_resonance, KAPPA, KAPPA)), rel=1e-6
        )

    def test_uncoupled_detuned_cavity(self, resolved_params, resonance_grid):
        """g = G = 0 leaves the pure detuning expression."""
        params = resolved_params.with_detuning(0.5 * KAPPA).with_coupling(0.0).without_atoms()
        np.testing.assert_allclose(
            chi_a_eff(resonance_grid, params),
            chi_a_eff_cqnc(resonance_grid, KAPPA, 0.5 * KAPPA),
            rtol=1e-12,
        )

    def test_mismatch_functions_at_matching(self, resolved_params, resonance_grid):
        """R = A = -1, r = 0 and Z = 1/kappa at zero detuning."""
        functions = mismatch_functions(resonance_grid, resolved_params)
        np.testing.assert_array_equal(functions.R, -1.0)
        np.testing.assert_array_equal(functions.r, 0.0)
        np.testing.assert_allclose(functions.A, -1.0, rtol=1e-15)
        np.testing.assert_allclose(functions.Z, 1.0 / KAPPA, rtol=1e-12)

    def test_zero_coupling_is_rejected(self, resolved_params):
        """A = (G/g) ... is undefined for g = 0."""
        with pytest.raises(ParameterError):
            mismatch_functions(OMEGA_M, resolved_params.with_coupling(0.0))
