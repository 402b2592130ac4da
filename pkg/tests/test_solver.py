import numpy as np
import pytest

from wavetank.solver import (
    Grid,
    ModeState,
    NonFiniteError,
    ONE_STAGE,
    SchemeParams,
    advance,
    discrete_l2_norm,
    full_step,
    half_step,
    one_stage_step,
    suggest_timestep,
)
from wavetank.verification import kdv_soliton_oracle, single_mode_coefficients


def soliton_state(grid, c=1.0, g=6.0, d=1.0, A=2.0):
    orc = kdv_soliton_oracle(c, g, d, A, x0=grid.length / 2.0,
                             domain=grid.length, check_residual=False)
    return orc.state(grid, 0.0), single_mode_coefficients(c, g, d), orc


class TestGrid:
    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            Grid(h_x=0.1, n_points=4)

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            Grid(h_x=0.0, n_points=32)

    def test_length_and_axis(self):
        grid = Grid(h_x=0.25, n_points=16, x0=-2.0)
        assert grid.length == 4.0
        assert grid.x[0] == -2.0
        assert grid.x[-1] == pytest.approx(2.0 - 0.25)


class TestSingleSteps:
    def test_zero_state_stays_zero(self):
        grid = Grid(h_x=0.1, n_points=32)
        coeffs = single_mode_coefficients(1.0, 6.0, 1.0)
        state = ModeState(0.0, np.zeros((1, 32)))
        for stepped in (
            half_step(state, coeffs, grid, 1e-3),
            one_stage_step(state, coeffs, grid, 1e-3),
        ):
            assert np.all(stepped.theta == 0.0)

    def test_constant_state_unchanged(self):
        grid = Grid(h_x=0.1, n_points=32)
        coeffs = single_mode_coefficients(1.3, 2.0, 0.7)
        state = ModeState(0.0, np.full((1, 32), 3.25))
        h = half_step(state, coeffs, grid, 1e-3)
        assert np.all(h.theta == 3.25)
        f = full_step(state, h, coeffs, grid, 1e-3)
        assert np.all(f.theta == 3.25)

    def test_pure_advection_half_step_hand_computed(self):
        # d = c h^2 / 6 cancels the dispersion stencil exactly, leaving
        # theta_i - 0.1 (theta_{i+1} - theta_{i-1}) at tau = 0.1
        h, c, tau = 0.5, 2.0, 0.1
        grid = Grid(h_x=h, n_points=8)
        coeffs = single_mode_coefficients(c, 0.0001, c * h**2 / 6.0)
        coeffs.g[0, 0, 0] = 0.0
        theta = np.array([1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0])
        state = ModeState(0.0, theta[None, :])
        out = half_step(state, coeffs, grid, tau)
        expected = np.array([4.2, 1.8, 2.7, 4.5, 7.2, 11.7, 18.9, 36.0])
        np.testing.assert_allclose(out.theta[0], expected, rtol=1e-14)
        assert out.time == pytest.approx(tau / 2.0)

    def test_one_stage_equals_uncorrected_half_step_at_half_tau(self):
        grid = Grid(h_x=0.05, n_points=64)
        state, coeffs, _ = soliton_state(grid)
        tau = 2e-4
        a = half_step(state, coeffs, grid, tau, dispersion_correction=False)
        b = one_stage_step(state, coeffs, grid, tau / 2.0)
        assert np.array_equal(a.theta, b.theta)

    def test_step_pair_translates_soliton(self):
        # one (half, full) pair moves the exact soliton by ~ speed*tau
        grid = Grid(h_x=1.0 / 24, n_points=24 * 16)
        state, coeffs, orc = soliton_state(grid, c=1.0, g=6.0, d=1.0, A=2.0)
        tau = 5e-6
        h = half_step(state, coeffs, grid, tau)
        f = full_step(state, h, coeffs, grid, tau)
        exact = orc.state(grid, tau)
        err = discrete_l2_norm(f, exact, grid)
        norm = discrete_l2_norm(exact, ModeState(tau, 0 * exact.theta), grid)
        assert err / norm < 1e-5
        # and it beats "did not move at all" by a clear margin
        stay = discrete_l2_norm(f, state, grid)
        assert stay > 3 * err

    def test_half_step_raises_on_nonfinite(self):
        grid = Grid(h_x=0.05, n_points=64)
        state, coeffs, _ = soliton_state(grid)
        state.theta[0, 10] = np.inf
        with pytest.raises(NonFiniteError):
            half_step(state, coeffs, grid, 1e-4)


class TestNorm:
    def test_identical_states_zero(self):
        grid = Grid(h_x=0.01, n_points=100)
        s = ModeState(0.0, np.random.default_rng(0).random((1, 100)))
        assert discrete_l2_norm(s, s, grid) == 0.0

    def test_unit_difference(self):
        grid = Grid(h_x=0.01, n_points=100)
        a = ModeState(0.0, np.zeros((1, 100)))
        b = ModeState(0.0, np.ones((1, 100)))
        assert discrete_l2_norm(a, b, grid) == pytest.approx(1.0, rel=1e-14)

    def test_step_scaling(self):
        a = ModeState(0.0, np.zeros((1, 100)))
        b = ModeState(0.0, np.ones((1, 100)))
        n1 = discrete_l2_norm(a, b, Grid(h_x=0.01, n_points=100))
        n2 = discrete_l2_norm(a, b, Grid(h_x=0.02, n_points=100))
        assert n2 / n1 == pytest.approx(np.sqrt(2.0), rel=1e-12)

    def test_shape_mismatch(self):
        grid = Grid(h_x=0.01, n_points=100)
        a = ModeState(0.0, np.zeros((1, 100)))
        b = ModeState(0.0, np.zeros((2, 100)))
        with pytest.raises(ValueError):
            discrete_l2_norm(a, b, grid)


class TestTimestepPolicy:
    def test_two_stage_formula(self):
        grid = Grid(h_x=0.01, n_points=64)
        coeffs = single_mode_coefficients(1.0, 1.0, 1.0)
        tau = suggest_timestep(grid, coeffs, SchemeParams(tau=1.0, b=1.0))
        assert tau == pytest.approx(1e-8, rel=1e-12)

    def test_halving_h(self):
        coeffs = single_mode_coefficients(1.0, 1.0, 1.0)
        p = SchemeParams(tau=1.0, b=2.5)
        t1 = suggest_timestep(Grid(h_x=0.02, n_points=64), coeffs, p)
        t2 = suggest_timestep(Grid(h_x=0.01, n_points=64), coeffs, p)
        assert t1 / t2 == pytest.approx(16.0, rel=1e-12)

    def test_one_stage_power(self):
        grid = Grid(h_x=0.1, n_points=64)
        coeffs = single_mode_coefficients(1.0, 1.0, 1.0)
        p = SchemeParams(tau=1.0, scheme=ONE_STAGE, b=1.0)
        assert suggest_timestep(grid, coeffs, p) == pytest.approx(1e-6)

    def test_advance_warns_beyond_margin(self):
        grid = Grid(h_x=0.1, n_points=64)
        state, coeffs, _ = soliton_state(grid, d=0.01)
        params = SchemeParams(tau=1e-3, b=1.0)  # b h^4 = 1e-4 < tau
        with pytest.warns(RuntimeWarning):
            advance(state, coeffs, grid, params, state.time + 2e-3)


class TestAdvance:
    def test_zero_span_is_identity(self):
        grid = Grid(h_x=0.05, n_points=64)
        state, coeffs, _ = soliton_state(grid)
        final, report = advance(state, coeffs, grid,
                                SchemeParams(tau=1e-4, b=1e9), state.time)
        assert report.steps == 0
        assert np.array_equal(final.theta, state.theta)

    def test_rejects_backward_span(self):
        grid = Grid(h_x=0.05, n_points=64)
        state, coeffs, _ = soliton_state(grid)
        with pytest.raises(ValueError):
            advance(state, coeffs, grid, SchemeParams(tau=1e-4, b=1e9), -1.0)

    def test_periodic_advection_full_period(self):
        # g = 0, d = 0: profile should come back to where it started
        n, h, c = 256, 1.0 / 16, 0.8
        grid = Grid(h_x=h, n_points=n)
        theta0 = 1.0 / np.cosh(grid.x - grid.length / 2.0) ** 2
        state = ModeState(0.0, theta0[None, :])
        coeffs = single_mode_coefficients(c, 0.0001, 1.0)
        coeffs.g[0, 0, 0] = 0.0
        coeffs.d[0] = 0.0
        period = grid.length / c
        tau = period / 4096
        final, _ = advance(state, coeffs, grid,
                           SchemeParams(tau=tau, b=1e12), period)
        rel = (discrete_l2_norm(final, state, grid)
               / np.sqrt(h * np.sum(theta0**2)))
        assert rel < 1e-2

    def test_mass_conserved_to_roundoff(self):
        grid = Grid(h_x=0.1, n_points=128)
        state, coeffs, _ = soliton_state(grid, c=1.0, g=6.0, d=1.0, A=2.0)
        steps = 1000
        tau = 2e-4
        final, report = advance(state, coeffs, grid,
                                SchemeParams(tau=tau, b=1e9),
                                steps * tau)
        drift = abs(np.sum(final.theta) - np.sum(state.theta)) * grid.h_x
        assert drift <= 1e-12 * steps * np.max(np.abs(state.theta))

    def test_determinism_bitwise(self):
        grid = Grid(h_x=0.1, n_points=128)
        state, coeffs, _ = soliton_state(grid)
        p = SchemeParams(tau=2e-4, b=1e9)
        a, _ = advance(state, coeffs, grid, p, 0.05)
        b, _ = advance(state, coeffs, grid, p, 0.05)
        assert np.array_equal(a.theta, b.theta)

    def test_translation_equivariance_bitwise(self):
        grid = Grid(h_x=0.1, n_points=128)
        state, coeffs, _ = soliton_state(grid)
        shift = 17
        rolled = ModeState(0.0, np.roll(state.theta, shift, axis=1))
        p = SchemeParams(tau=2e-4, b=1e9)
        a, _ = advance(state, coeffs, grid, p, 0.02)
        b, _ = advance(rolled, coeffs, grid, p, 0.02)
        assert np.array_equal(np.roll(a.theta, shift, axis=1), b.theta)

    def test_linear_superposition_with_zero_g(self):
        grid = Grid(h_x=0.1, n_points=128)
        theta0 = np.sin(2 * np.pi * grid.x / grid.length)
        coeffs = single_mode_coefficients(0.7, 0.0001, 0.002)
        coeffs.g[0, 0, 0] = 0.0
        p = SchemeParams(tau=1e-4, b=1e9)
        one, _ = advance(ModeState(0.0, theta0[None, :]), coeffs, grid, p, 0.05)
        two, _ = advance(ModeState(0.0, 2.0 * theta0[None, :]), coeffs, grid,
                         p, 0.05)
        np.testing.assert_allclose(two.theta, 2.0 * one.theta, rtol=1e-13)

    def test_nonfinite_abort_carries_step(self):
        grid = Grid(h_x=0.05, n_points=128)
        state, coeffs, _ = soliton_state(grid)
        bad = SchemeParams(tau=0.05, b=1e12)  # far beyond stability
        with np.errstate(all="ignore"), pytest.raises(NonFiniteError) as err:
            advance(state, coeffs, grid, bad, 10.0)
        assert err.value.step is not None and err.value.step >= 1
        assert err.value.last_state is not None
        assert np.all(np.isfinite(err.value.last_state.theta))

    def test_observers_called_at_intervals(self):
        grid = Grid(h_x=0.1, n_points=128)
        state, coeffs, _ = soliton_state(grid)
        seen = []
        advance(state, coeffs, grid, SchemeParams(tau=1e-4, b=1e9),
                10 * 1e-4, observers=[lambda s, st: seen.append(s)],
                observe_every=2)
        assert seen == [0, 2, 4, 6, 8, 10]

    def test_mode_count_mismatch(self):
        grid = Grid(h_x=0.1, n_points=128)
        coeffs = single_mode_coefficients(1.0, 1.0, 1.0)
        state = ModeState(0.0, np.zeros((2, 128)))
        with pytest.raises(ValueError):
            advance(state, coeffs, grid, SchemeParams(tau=1e-4, b=1e9), 1e-3)
