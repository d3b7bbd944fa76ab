"""
Tests for sensor parameters, the steady state and the validity report.
"""

import math

import pytest
from pydantic import ValidationError
from scipy import constants

from src.core.exceptions import ParameterError
from src.physics import model as sensor_model
from src.physics.model import (
    AtomicParams,
    CavityParams,
    MechanicalParams,
    MismatchSpec,
    SensorParams,
    SqueezingParams,
    coupling_from_power,
    drive_amplitude,
    power_for_coupling,
    si_scale_factor,
    solve_steady_state,
    steady_state_amplitude,
    thermal_number,
    validate,
)
from tests.conftest import (
    G0,
    GAMMA_M,
    KAPPA,
    LASER_POWER,
    OMEGA_M,
    WAVELENGTH,
    make_published_params,
)


class TestParameterModels:
    """Construction-time invariants of the parameter objects."""

    def test_mechanical_rejects_non_positive_frequency(self):
        """omega_m must be positive."""
        with pytest.raises(ValidationError):
            MechanicalParams(omega_m=0.0, gamma_m=1.0)

    def test_cavity_input_rate_defaults_to_kappa(self):
        """kappa_in falls back to kappa and may not exceed it."""
        cavity = CavityParams(kappa=2.0)
        assert cavity.input_rate == 2.0
        with pytest.raises(ValidationError):
            CavityParams(kappa=2.0, kappa_in=3.0)

    def test_parameters_are_frozen(self, mechanical):
        """Parameter objects are immutable."""
        with pytest.raises(ValidationError):
            mechanical.omega_m = 1.0

    def test_squeezing_purity_bound(self):
        """|M|^2 > N(N+1) is rejected and the message names the bound."""
        with pytest.raises(ValidationError) as excinfo:
            SqueezingParams(n_sq=1.0, m_mag=2.0)
        assert "N(N+1)" in str(excinfo.value)

    def test_pure_and_mixed_states(self):
        """The purity flag is set only when the bound is saturated."""
        assert SqueezingParams.pure(10.0).is_pure
        assert SqueezingParams.vacuum().is_pure
        assert not SqueezingParams(n_sq=10.0, m_mag=1.0).is_pure

    def test_squeeze_factor_parametrization(self):
        """N = sinh^2 r and |M| = sinh(2r)/2 describe a pure state."""
        state = SqueezingParams.from_squeeze_factor(1.0)
        assert state.n_sq == pytest.approx(math.sinh(1.0) ** 2)
        assert state.is_pure

    def test_opo_output_is_pure(self):
        """The OPO moments saturate the purity bound and set the bandwidths."""
        state = SqueezingParams.from_opo(epsilon=0.25, gamma_opo=1.0)
        assert state.bandwidth_x == pytest.approx(0.25)
        assert state.bandwidth_y == pytest.approx(0.75)
        assert state.n_sq == pytest.approx(0.125 * (16.0 - 16.0 / 9.0))
        assert state.is_pure

    def test_opo_above_threshold(self):
        """epsilon >= gamma/2 is outside the OPO's stable range."""
        with pytest.raises(ParameterError):
            SqueezingParams.from_opo(epsilon=0.5, gamma_opo=1.0)

    def test_complex_moment(self):
        """phi = pi/2 puts all of M into its imaginary part."""
        state = SqueezingParams.pure(2.0, math.pi / 2)
        assert state.re_m == pytest.approx(0.0, abs=1e-12)
        assert state.im_m == pytest.approx(math.sqrt(6.0))

    def test_mismatch_domain(self):
        """Gamma must stay strictly positive under a decay mismatch."""
        with pytest.raises(ValidationError):
            MismatchSpec(decay_mismatch=-1.0)
        assert MismatchSpec().is_zero

    def test_dephasing_must_be_positive(self):
        """Gamma = 0 is only reachable through the undamped constructor."""
        with pytest.raises(ValidationError):
            AtomicParams(dephasing_Gamma=0.0)
        atomic = AtomicParams.undamped(transition_rate=2.0)
        assert atomic.dephasing_Gamma == 0.0
        assert atomic.coupling_G == 0.0


class TestSteadyState:
    """Intracavity amplitude, coupling and the power map."""

    def test_drive_amplitude(self):
        """E_L = sqrt(P kappa_in/(hbar omega_L))."""
        cavity = CavityParams(kappa=KAPPA, laser_wavelength=WAVELENGTH, laser_power=LASER_POWER)
        photon_energy = constants.hbar * 2.0 * math.pi * constants.c / WAVELENGTH
        assert drive_amplitude(cavity) == pytest.approx(
            math.sqrt(LASER_POWER * KAPPA / photon_energy), rel=1e-14
        )

    def test_published_operating_point(self, published_params):
        """24 uW with G locked to g gives alpha near 1469 and g near 5.54e6 rad/s."""
        state = solve_steady_state(published_params)
        assert state.alpha == pytest.approx(1469.0, rel=1e-2)
        assert state.coupling_g == pytest.approx(5.54e6, rel=1e-2)
        assert state.residual < 1e-12

    def test_bisection_fallback(self, published_params, monkeypatch):
        """A stalled fixed-point iteration hands over to bisection with the same root."""
        expected = solve_steady_state(published_params)
        monkeypatch.setattr(sensor_model, "FIXED_POINT_MAX_ITER", 1)
        state = solve_steady_state(published_params)
        assert state.method == "bisection"
        assert state.alpha == pytest.approx(expected.alpha, rel=1e-10)
        assert state.residual < 1e-12

    def test_zero_power(self):
        """No drive, no field."""
        params = make_published_params(laser_power=0.0)
        assert solve_steady_state(params).alpha == 0.0

    def test_linear_cavity_without_atoms(self):
        """With G = 0 and a fixed detuning the equation is linear: alpha = E/|kappa/2 + i Delta|."""
        params = make_published_params(detuning_c=0.3 * KAPPA).without_atoms()
        drive = drive_amplitude(params.cavity)
        expected = drive / abs(complex(0.5 * KAPPA, 0.3 * KAPPA))
        assert steady_state_amplitude(params, drive) == pytest.approx(expected, rel=1e-12)

    def test_bare_detuning_shift(self):
        """The effective detuning carries the radiation-pressure shift -g0^2 alpha^2/omega_m."""
        params = make_published_params(detuning_is_bare=True).without_atoms()
        state = solve_steady_state(params)
        assert state.detuning == pytest.approx(-(G0**2) * state.alpha**2 / OMEGA_M, rel=1e-12)
        assert state.residual < 1e-12

    def test_power_for_coupling_inverts(self, published_params):
        """power_for_coupling(coupling_from_power(P)) = P."""
        g = coupling_from_power(published_params)
        assert power_for_coupling(published_params, g) == pytest.approx(LASER_POWER, rel=1e-9)

    def test_power_for_coupling_needs_g0(self):
        """Without g0 there is no map between power and coupling."""
        params = make_published_params(g0=0.0)
        with pytest.raises(ParameterError):
            power_for_coupling(params, 1.0)


class TestResolution:
    """Locking of the atomic parameters and mismatch handling."""

    def test_resolved_matches_mechanics(self, resolved_params):
        """Unset atomic fields lock to g, gamma_m and omega_m."""
        assert resolved_params.is_resolved
        assert resolved_params.G == resolved_params.g
        assert resolved_params.Gamma == GAMMA_M
        assert resolved_params.omega_s == OMEGA_M

    def test_coupling_mismatch(self, published_params):
        """G = (1 + mismatch) g, solved together with the steady state."""
        params = published_params.resolved(MismatchSpec(coupling_mismatch=1e-3))
        assert params.G / params.g == pytest.approx(1.001, rel=1e-12)

    def test_decay_mismatch(self, published_params):
        params = published_params.resolved(MismatchSpec(decay_mismatch=0.5))
        assert params.Gamma == pytest.approx(1.5 * GAMMA_M)

    def test_mismatch_requires_unset_field(self):
        """A mismatch cannot be applied on top of an explicit G."""
        params = make_published_params().model_copy(update={"atomic": AtomicParams(coupling_G=1.0)})
        with pytest.raises(ParameterError):
            params.resolved(MismatchSpec(coupling_mismatch=0.1))

    def test_explicit_coupling_skips_steady_state(self, mechanical):
        """An explicit g is kept as is."""
        params = SensorParams(mechanical=mechanical, cavity=CavityParams(kappa=KAPPA), coupling_g=5.0)
        resolved = params.resolved()
        assert resolved.g == 5.0
        assert resolved.G == 5.0


class TestThermalOccupation:
    """Bose factor and its high-temperature approximation."""

    def test_zero_temperature(self, mechanical):
        occupation = thermal_number(mechanical)
        assert occupation.n_bar == 0.0
        assert occupation.high_temperature == 0.0

    def test_unit_occupation(self):
        """hbar omega = k_B T ln 2 gives n_bar = 1."""
        temperature = constants.hbar * OMEGA_M / (constants.k * math.log(2.0))
        mech = MechanicalParams(omega_m=OMEGA_M, gamma_m=GAMMA_M, temperature=temperature)
        assert thermal_number(mech).n_bar == pytest.approx(1.0, rel=1e-12)

    def test_room_temperature_approximation(self):
        """At 300 K the high-temperature form is accurate."""
        mech = MechanicalParams(omega_m=OMEGA_M, gamma_m=GAMMA_M, temperature=300.0)
        assert thermal_number(mech).approximation_ok

    def test_si_scale_factor(self, mechanical):
        expected = constants.hbar * mechanical.mass * OMEGA_M * GAMMA_M
        assert si_scale_factor(mechanical) == pytest.approx(expected)


class TestValidate:
    """Regime checks."""

    def test_published_parameters_pass(self, resolved_params, vacuum):
        """All hard checks pass; the Markov advisory fails without failing the report."""
        report = validate(resolved_params, vacuum)
        assert report.all_passed
        markov = report.get("markov_cavity")
        assert markov.advisory
        assert not markov.passed

    def test_large_dephasing_fails(self, resolved_params, vacuum):
        """Gamma comparable to omega_m breaks the high-Q assumption."""
        params = resolved_params.model_copy(
            update={"atomic": resolved_params.atomic.model_copy(update={"dephasing_Gamma": OMEGA_M})}
        )
        report = validate(params, vacuum)
        assert not report.get("atomic_dephasing").passed
        assert not report.all_passed

    def test_narrow_squeezing_bandwidth(self, resolved_params):
        """An OPO bandwidth below the system rates violates the white-noise limit."""
        squeezing = SqueezingParams.pure(1.0, bandwidth_x=1e3, bandwidth_y=2e3)
        report = validate(resolved_params, squeezing)
        assert not report.get("white_noise_limit").passed

    def test_purity_flag(self, resolved_params, squeezed):
        check = validate(resolved_params, squeezed).get("squeezing_purity")
        assert check.passed
        assert check.flag is True

    def test_report_serializes(self, resolved_params, vacuum):
        entries = validate(resolved_params, vacuum).to_dict()
        assert {entry["name"] for entry in entries} >= {"rotating_wave", "mechanical_quality"}
