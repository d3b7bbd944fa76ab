"""
Tests for the closed-form spectra and the reference limits.
"""

import math

import numpy as np
import pytest

from src.core.exceptions import ParameterError
from src.physics.model import MechanicalParams, MismatchSpec, SqueezingParams
from src.physics.optimal import g2_sql_optimum, h
from src.physics.spectra import (
    COMPONENTS,
    ThermalMode,
    cqnc_breakdown,
    cqnc_floor,
    sigma_squeezing,
    spectrum_cqnc,
    spectrum_exact,
    spectrum_standard,
    spectrum_standard_squeezed,
    spectrum_zero_detuning,
    sql,
    sql_squeezed,
    standard_breakdown,
    thermal_noise,
    ultimate_limit,
)
from src.physics.response import inverse_chi_m_sq
from tests.conftest import GAMMA_M, KAPPA, OMEGA_M

HIGH_T = ThermalMode.HIGH_TEMPERATURE


class TestExactSpectrum:
    """General spectrum and its breakdown."""

    def test_decomposition(self, published_params, squeezed, resonance_grid):
        """total is the sum of its parts at every frequency."""
        params = published_params.resolved(MismatchSpec(coupling_mismatch=1e-3)).with_detuning(0.3 * KAPPA)
        spectrum = spectrum_exact(resonance_grid, params, squeezed)
        parts = (
            spectrum.thermal + spectrum.field + spectrum.backaction + spectrum.atomic + spectrum.interference
        )
        np.testing.assert_allclose(spectrum.total, parts, rtol=1e-15)
        for name in ("thermal", "field", "backaction", "atomic"):
            assert np.all(getattr(spectrum, name) >= 0.0)

    def test_cqnc_cancellation(self, resolved_params, squeezed, rng):
        """G = g and Gamma = gamma_m remove backaction and interference at every frequency."""
        w = rng.uniform(0.5, 1.5, 1000) * OMEGA_M
        spectrum = spectrum_exact(w, resolved_params, squeezed)
        assert np.all(np.abs(spectrum.backaction) <= 1e-12 * spectrum.total)
        assert np.all(np.abs(spectrum.interference) <= 1e-12 * spectrum.total)

    def test_reduces_to_standard_without_atoms(self, mechanical, vacuum, resonance_grid):
        """G = 0, Delta = 0 and vacuum input give the single-cavity spectrum when kappa >> omega."""
        from src.physics.model import AtomicParams, CavityParams, SensorParams

        params = SensorParams(
            mechanical=mechanical,
            cavity=CavityParams(kappa=1e6 * OMEGA_M),
            atomic=AtomicParams(coupling_G=0.0),
            coupling_g=1e3 * OMEGA_M,
        )
        exact = spectrum_exact(resonance_grid, params, vacuum, HIGH_T)
        standard = spectrum_standard(resonance_grid, params, HIGH_T)
        np.testing.assert_allclose(exact.total, standard, rtol=1e-10)

    def test_zero_coupling_is_rejected(self, resolved_params, vacuum):
        with pytest.raises(ParameterError):
            spectrum_exact(OMEGA_M, resolved_params.with_coupling(0.0), vacuum)

    def test_coupling_mismatch_is_broadband(self, published_params, squeezed):
        """A 1e-3 coupling mismatch adds flat backaction that dominates far from resonance."""
        perfect = published_params.resolved()
        mismatched = published_params.resolved(MismatchSpec(coupling_mismatch=1e-3))
        probes = np.array([OMEGA_M - 20 * GAMMA_M, OMEGA_M, OMEGA_M + 20 * GAMMA_M])

        reference = spectrum_zero_detuning(probes, perfect, squeezed)
        spectrum = spectrum_zero_detuning(probes, mismatched, squeezed)
        excess = (spectrum.backaction + spectrum.interference) - (
            reference.backaction + reference.interference
        )
        assert np.max(excess) / np.min(excess) < 2.0
        assert spectrum.total[0] > reference.total[0]
        assert spectrum.total[2] > reference.total[2]
        exact = spectrum_exact(1.01 * OMEGA_M, mismatched, squeezed)
        assert exact.total[0] > spectrum_exact(1.01 * OMEGA_M, perfect, squeezed).total[0]

    def test_decay_mismatch_is_narrowband(self, published_params, squeezed):
        """A 50% decay mismatch leaves uncancelled noise only near resonance."""
        perfect = published_params.resolved()
        mismatched = published_params.resolved(MismatchSpec(decay_mismatch=0.5))
        band = OMEGA_M + np.linspace(-2.0, 2.0, 81) * GAMMA_M
        far = np.array([OMEGA_M - 20 * GAMMA_M, OMEGA_M + 20 * GAMMA_M])

        def excess(w):
            spectrum = spectrum_zero_detuning(w, mismatched, squeezed)
            reference = spectrum_zero_detuning(w, perfect, squeezed)
            return (spectrum.backaction + spectrum.interference) - (
                reference.backaction + reference.interference
            )

        assert np.all(excess(far) < 0.01 * np.max(excess(band)))


class TestZeroDetuningSpectrum:
    """Resonant-drive form in the kappa >> omega limit."""

    def test_matches_exact_when_kappa_is_large(self, resolved_params, squeezed, resonance_grid):
        """The Markov form converges to the exact one as kappa grows."""
        deviations = []
        for scale in (1e3, 1e4):
            cavity = resolved_params.cavity.model_copy(update={"kappa": scale * KAPPA})
            params = resolved_params.model_copy(update={"cavity": cavity})
            exact = spectrum_exact(resonance_grid, params, squeezed).total
            markov = spectrum_zero_detuning(resonance_grid, params, squeezed).total
            deviations.append(np.max(np.abs(exact - markov) / exact))
        assert deviations[0] < 1e-2
        assert deviations[1] < deviations[0]

    def test_nonzero_detuning_is_rejected(self, resolved_params, vacuum):
        with pytest.raises(ParameterError) as excinfo:
            spectrum_zero_detuning(OMEGA_M, resolved_params.with_detuning(KAPPA), vacuum)
        assert "spectrum_exact" in str(excinfo.value)

    def test_without_atoms_equals_standard_squeezed(self, no_atoms, resonance_grid):
        """G = 0 reproduces the single-cavity spectrum with squeezed input."""
        squeezing = SqueezingParams.pure(10.0, 0.3)
        zero_detuning = spectrum_zero_detuning(resonance_grid, no_atoms, squeezing)
        standard = spectrum_standard_squeezed(resonance_grid, no_atoms, squeezing)
        np.testing.assert_allclose(zero_detuning.total, standard, rtol=1e-12)

    def test_perfect_cqnc_matches_cqnc_form(self, resolved_params, squeezed, resonance_grid):
        """Under perfect matching the Markov form and the cancellation form coincide."""
        zero_detuning = spectrum_zero_detuning(resonance_grid, resolved_params, squeezed).total
        cqnc = spectrum_cqnc(resonance_grid, resolved_params, squeezed)
        np.testing.assert_allclose(zero_detuning, cqnc, rtol=1e-12)


class TestCqncSpectrum:
    """Perfect-cancellation closed form and its squeezing bracket."""

    def test_vacuum_bracket(self, resolved_params, vacuum, resonance_grid):
        """N = M = 0 at zero detuning leaves a bracket of 1/8."""
        breakdown = cqnc_breakdown(resonance_grid, resolved_params, vacuum)
        g = resolved_params.g
        expected = KAPPA / (8.0 * g**2 * GAMMA_M) * inverse_chi_m_sq(resonance_grid, OMEGA_M, GAMMA_M)
        np.testing.assert_allclose(breakdown.field, expected, rtol=1e-14)
        np.testing.assert_array_equal(breakdown.backaction, 0.0)

    def test_sigma_special_cases(self):
        assert sigma_squeezing(0.0, 0j, 0.7) == 0.0
        assert sigma_squeezing(3.0, complex(2.0, 1.0), 0.0) == pytest.approx(3.0 / 4 - 2.0 / 4)
        assert sigma_squeezing(3.0, complex(2.0, 1.5), 0.5) == pytest.approx(
            sigma_squeezing(3.0, complex(2.0, 0.0), 0.5)
        )

    def test_bracket_equals_phase_form(self, rng):
        """1/2 (1/2 + 2y^2)^2 + Sigma equals the phase-form bracket h at any y."""
        n_sq = 4.0
        for y, phi, fraction in rng.uniform([-2.0, -math.pi, 0.0], [2.0, math.pi, 1.0], (50, 3)):
            m_mag = fraction * math.sqrt(n_sq * (n_sq + 1.0))
            m = m_mag * complex(math.cos(phi), math.sin(phi))
            bracket = 0.5 * (0.5 + 2.0 * y**2) ** 2 + sigma_squeezing(n_sq, m, y)
            assert bracket == pytest.approx(h(m_mag, n_sq, y, phi), rel=1e-12, abs=1e-12)

    def test_floor_dominance(self, resolved_params, vacuum):
        """At T = 0 the spectrum stays above the floor and approaches it as g grows."""
        w = 1.001 * OMEGA_M
        floor = cqnc_floor(w, resolved_params.mechanical)[0]
        previous = math.inf
        for scale in (1.0, 10.0, 100.0, 1e4):
            total = spectrum_cqnc(w, resolved_params.with_coupling(scale * resolved_params.g), vacuum, HIGH_T)[0]
            assert floor <= total < previous
            previous = total
        assert previous == pytest.approx(floor, rel=1e-3)

    @pytest.mark.parametrize("gamma_offset", [0.0, 4.0])
    @pytest.mark.parametrize("n_sq", [0.0, 10.0])
    def test_high_power_asymptotics(self, resolved_params, gamma_offset, n_sq):
        """At 10^6 times the optimal g^2 the atoms leave only the floor; the bare cavity diverges."""
        w = OMEGA_M + gamma_offset * GAMMA_M
        mech = resolved_params.mechanical
        squeezing = SqueezingParams.pure(n_sq, 0.0)
        g2 = 1e6 * g2_sql_optimum(w, mech, KAPPA, n_sq, squeezing.re_m)[0]
        params = resolved_params.with_coupling(math.sqrt(g2))

        breakdown = cqnc_breakdown(w, params, squeezing, HIGH_T)
        excess = breakdown.total[0] - breakdown.thermal[0]
        assert excess == pytest.approx(cqnc_floor(w, mech)[0], rel=1e-2)

        standard = spectrum_standard_squeezed(w, params.without_atoms(), squeezing, HIGH_T)[0]
        assert standard / sql(w, mech)[0] > 10.0

    def test_zero_coupling_is_rejected(self, resolved_params, vacuum):
        with pytest.raises(ParameterError):
            spectrum_cqnc(OMEGA_M, resolved_params.with_coupling(0.0), vacuum)


class TestStandardSpectrum:
    """Single-cavity spectra."""

    def test_vacuum_squeezed_equals_standard(self, no_atoms, vacuum, resonance_grid):
        np.testing.assert_array_equal(
            spectrum_standard_squeezed(resonance_grid, no_atoms, vacuum),
            spectrum_standard(resonance_grid, no_atoms),
        )

    def test_breakdown_has_no_atomic_noise(self, no_atoms, squeezed, resonance_grid):
        breakdown = standard_breakdown(resonance_grid, no_atoms, squeezed)
        np.testing.assert_array_equal(breakdown.atomic, 0.0)
        assert set(breakdown.as_dict()) == set(COMPONENTS)

    def test_sql_at_optimal_power(self, no_atoms, mechanical):
        """At g^2 = kappa gamma_m/4 the resonant spectrum sits on the SQL."""
        params = no_atoms.with_coupling(math.sqrt(KAPPA * GAMMA_M / 4.0))
        total = spectrum_standard(OMEGA_M, params, HIGH_T)[0]
        assert total == pytest.approx(sql(OMEGA_M, mechanical)[0], rel=1e-12)


class TestLimits:
    """SQL, squeezed SQL, ultimate limit and the cancellation floor."""

    def test_sql_on_resonance(self, mechanical):
        assert sql(OMEGA_M, mechanical)[0] == pytest.approx(1.0, rel=1e-12)
        assert ultimate_limit(OMEGA_M, mechanical)[0] == pytest.approx(1.0, rel=1e-12)

    def test_pure_squeezing_keeps_the_sql(self, mechanical, resonance_grid):
        """(2N+1)^2 - 4N(N+1) = 1, so pure real-M squeezing leaves the SQL unchanged."""
        n_sq = 10.0
        squeezed_sql = sql_squeezed(resonance_grid, mechanical, n_sq, math.sqrt(n_sq * (n_sq + 1)))
        np.testing.assert_allclose(squeezed_sql, sql(resonance_grid, mechanical), rtol=1e-12)

    def test_ultimate_below_sql(self, mechanical):
        w = np.linspace(0.01, 3.0, 1000) * OMEGA_M
        assert np.all(ultimate_limit(w, mechanical) <= sql(w, mechanical) * (1 + 1e-12))

    def test_floor_on_resonance(self, mechanical):
        expected = 1.0 + GAMMA_M**2 / (8.0 * OMEGA_M**2)
        assert cqnc_floor(OMEGA_M, mechanical)[0] == pytest.approx(expected, rel=1e-15)

    def test_thermal_modes(self):
        hot = MechanicalParams(omega_m=OMEGA_M, gamma_m=GAMMA_M, temperature=1.0)
        assert thermal_noise(hot, ThermalMode.EXACT) == pytest.approx(
            thermal_noise(hot, ThermalMode.HIGH_TEMPERATURE), rel=1e-3
        )
        cold = MechanicalParams(omega_m=OMEGA_M, gamma_m=GAMMA_M)
        assert thermal_noise(cold) == 0.5
        assert thermal_noise(cold, ThermalMode.HIGH_TEMPERATURE) == 0.0
