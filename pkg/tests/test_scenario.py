import numpy as np
import pytest

from wavetank.scenario import (
    build_initial_state,
    mcewan_default,
    parse_config,
    serialize_config,
    validate,
)
from dataclasses import replace


class TestDefaults:
    def test_reference_stratification(self):
        cfg = mcewan_default()
        assert cfg.strat.N == 1.23
        assert cfg.strat.depth == 0.25

    def test_tank_footprint(self):
        cfg = mcewan_default()
        assert cfg.grid.length == pytest.approx(0.50)
        assert cfg.grid.length >= 8.0 * cfg.paddle.l

    def test_modes_and_horizon(self):
        cfg = mcewan_default()
        assert cfg.modes == (2, 4, 6, 8, 10)
        assert cfg.t_end == 0.02
        assert cfg.sigma == 1.0 and cfg.beta2 == 1.0
        assert cfg.paddle.z0 == pytest.approx(cfg.strat.depth / 2.0)

    def test_default_validates_clean(self):
        assert validate(mcewan_default()) == []


class TestValidate:
    def test_underresolved_pulse_named(self):
        cfg = mcewan_default()
        bad = replace(cfg, paddle=replace(cfg.paddle, l=cfg.grid.h_x / 2.0))
        violations = validate(bad)
        assert any("under-resolved" in v for v in violations)

    def test_z0_out_of_range_named(self):
        cfg = mcewan_default()
        bad = replace(cfg, paddle=replace(cfg.paddle, z0=-0.1))
        assert any("z0" in v for v in validate(bad))

    def test_empty_modes(self):
        bad = replace(mcewan_default(), modes=())
        assert any("modes" in v for v in validate(bad))

    def test_build_rejects_invalid(self):
        cfg = mcewan_default()
        bad = replace(cfg, paddle=replace(cfg.paddle, l=cfg.grid.h_x))
        with pytest.raises(ValueError):
            build_initial_state(bad)


class TestInitialState:
    def test_phi1_peak_is_amplitude(self):
        cfg = mcewan_default()
        assert cfg.paddle.phi1(0.0) == pytest.approx(cfg.paddle.a)

    def test_separable_structure(self):
        cfg = mcewan_default()
        basis = cfg.basis()
        state, report = build_initial_state(cfg, basis)
        coeffs = report.projection.coefficients
        expected = coeffs[:, None] * cfg.paddle.phi1(cfg.grid.x)[None, :]
        np.testing.assert_allclose(state.theta, expected, rtol=1e-14)

    def test_even_in_x_about_pulse_centre(self):
        cfg = mcewan_default()
        state, _ = build_initial_state(cfg)
        theta = state.theta
        # grid is [-L/2, L/2); index 0 is the centre's mirror fixed point
        flipped = np.roll(theta[:, ::-1], 1, axis=1)
        np.testing.assert_allclose(theta, flipped, atol=1e-18)

    def test_odd_modes_empty_for_centered_paddle(self):
        cfg = replace(mcewan_default(), modes=(1, 2, 3, 4, 5, 6, 7, 8, 9, 10))
        state, report = build_initial_state(cfg)
        odd = [i for i, n in enumerate(cfg.modes) if n % 2 == 1]
        assert np.max(np.abs(report.projection.coefficients[odd])) < 1e-12
        assert np.max(np.abs(state.theta[odd])) < 1e-12 * cfg.paddle.a

    def test_energy_accounting(self):
        cfg = mcewan_default()
        _, report = build_initial_state(cfg)
        fr = report.mode_energy_fractions
        assert np.all(fr >= 0)
        assert fr.sum() == pytest.approx(report.projection.captured_fraction)
        assert fr.sum() <= 1.0 + 1e-12
        # five even modes keep essentially all the paddle energy
        assert report.projection.captured_fraction > 0.99

    def test_psi_antisymmetric_about_mid_depth(self):
        cfg = mcewan_default()
        basis = cfg.basis()
        state, report = build_initial_state(cfg, basis)
        z0 = cfg.paddle.z0
        delta = 0.04
        up = basis.evaluate(np.array([z0 + delta]))[:, 0] @ state.theta
        dn = basis.evaluate(np.array([z0 - delta]))[:, 0] @ state.theta
        # antisymmetry holds up to the truncation residual of the basis
        scale = np.max(np.abs(state.theta)) * np.max(basis.amplitudes)
        bound = np.sqrt(report.projection.residual_fraction) * scale * 5
        assert np.max(np.abs(up + dn)) <= bound


class TestConfigRoundTrip:
    def test_round_trip_semantic_equality(self):
        cfg = mcewan_default()
        text = serialize_config(cfg)
        back = parse_config(text)
        assert back == cfg

    def test_round_trip_modified(self):
        cfg = replace(mcewan_default(), t_end=0.125,
                      modes=(2, 4), sigma=2.0)
        assert parse_config(serialize_config(cfg)) == cfg

    def test_partial_file_uses_defaults(self):
        cfg = parse_config("[run]\nt_end = 0.5\n")
        assert cfg.t_end == 0.5
        assert cfg.strat.N == 1.23

    def test_unknown_section_rejected(self):
        with pytest.raises(ValueError):
            parse_config("[frobnicate]\nx = 1\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            parse_config("[run]\nbogus = 1\n")
