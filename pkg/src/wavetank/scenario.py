"""McEwan-style release scenarios: paddle-shaped initial data and full
run configurations.

The initial stream function is separable, psi(z, x, 0) = phi1(x) phi2(z)
with a sech pulse along x and an antisymmetric sech*tanh paddle profile
in z.  Projected onto the waveguide basis this gives
theta^n(x, 0) = (Z^n, phi2) phi1(x).

The reference tank is 0.50 m long, 0.25 m deep, N = 1.23 1/s, modes
(2, 4, 6, 8, 10).  The pulse constants a, l, b, z0 are qualitative
paddle parameters, not reference values; the defaults below centre the
paddle at mid-depth, which kills every odd mode by symmetry.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass

import numpy as np

from .modes import Projection, Stratification, build_constant_n_basis, project_profile
from .solver import Grid, ModeState, SchemeParams, TWO_STAGE

__all__ = [
    "PaddleProfile",
    "ScenarioConfig",
    "InitialStateReport",
    "mcewan_default",
    "validate",
    "build_initial_state",
    "serialize_config",
    "parse_config",
    "load_config",
]

MIN_POINTS_PER_PULSE = 10.0
MIN_DOMAIN_PULSE_RATIO = 8.0


@dataclass(frozen=True)
class PaddleProfile:
    """Separable initial disturbance: a/cosh(x/l) times the z-profile
    sqrt(2/(N^2 h)) sech(b (z - z0)) tanh(b (z - z0))."""

    a: float      # horizontal amplitude [m^2/s]
    l: float      # horizontal width [m]
    b: float      # vertical steepness [1/m]
    z0: float     # paddle centre height [m]

    def phi1(self, x):
        return self.a / np.cosh(np.asarray(x, dtype=float) / self.l)

    def phi2(self, z, strat):
        amp = np.sqrt(2.0 / (strat.N**2 * strat.depth))
        arg = self.b * (np.asarray(z, dtype=float) - self.z0)
        return amp / np.cosh(arg) * np.tanh(arg)


@dataclass(frozen=True)
class ScenarioConfig:
    strat: Stratification
    modes: tuple
    paddle: PaddleProfile
    grid: Grid
    scheme: SchemeParams
    t_end: float
    snapshot_every: int
    sigma: float = 1.0
    beta2: float = 1.0

    def basis(self):
        return build_constant_n_basis(self.strat, self.modes)


def mcewan_default():
    """Reference configuration: 50 cm x 25 cm tank, N = 1.23 1/s,
    modes (2, 4, 6, 8, 10), paddle at mid-depth, run to t = 0.02 s.

    a, l, b are qualitative defaults (pulse one tenth of the tank,
    vertical structure confined to the paddle region, stream-function
    amplitude of order 1e-4 m^2/s).  The stability margin b is
    calibrated for this configuration's dispersion coefficients.
    """
    strat = Stratification(N=1.23, depth=0.25)
    paddle = PaddleProfile(a=4e-4, l=0.05, b=40.0, z0=strat.depth / 2.0)
    n_points = 256
    grid = Grid(h_x=0.5 / n_points, n_points=n_points, x0=-0.25)
    scheme = SchemeParams(tau=4e-5, scheme=TWO_STAGE, b=4.0e6)
    return ScenarioConfig(
        strat=strat,
        modes=(2, 4, 6, 8, 10),
        paddle=paddle,
        grid=grid,
        scheme=scheme,
        t_end=0.02,
        snapshot_every=50,
    )


def validate(cfg):
    """Check all scenario invariants; returns a list of violations,
    one human-readable string naming the field and the rule each."""
    out = []
    if not cfg.strat.N > 0:
        out.append(f"stratification.N: must be > 0, got {cfg.strat.N}")
    if not cfg.strat.depth > 0:
        out.append(f"stratification.depth: must be > 0, got {cfg.strat.depth}")
    if cfg.paddle.a == 0:
        out.append("paddle.a: must be nonzero")
    if not cfg.paddle.l > 0:
        out.append(f"paddle.l: must be > 0, got {cfg.paddle.l}")
    if not cfg.paddle.b > 0:
        out.append(f"paddle.b: must be > 0, got {cfg.paddle.b}")
    if not 0 < cfg.paddle.z0 < cfg.strat.depth:
        out.append(
            f"paddle.z0: must lie inside (0, {cfg.strat.depth}), got {cfg.paddle.z0}"
        )
    if len(cfg.modes) == 0:
        out.append("modes: list must not be empty")
    elif any(n < 1 for n in cfg.modes) or len(set(cfg.modes)) != len(cfg.modes):
        out.append(f"modes: indices must be distinct and >= 1, got {cfg.modes}")
    if cfg.paddle.l < MIN_POINTS_PER_PULSE * cfg.grid.h_x:
        out.append(
            f"grid.h_x: pulse width l = {cfg.paddle.l} under-resolved; "
            f"need l >= {MIN_POINTS_PER_PULSE} * h_x = "
            f"{MIN_POINTS_PER_PULSE * cfg.grid.h_x}"
        )
    if cfg.grid.length < MIN_DOMAIN_PULSE_RATIO * cfg.paddle.l:
        out.append(
            f"grid.length: domain {cfg.grid.length} shorter than "
            f"{MIN_DOMAIN_PULSE_RATIO} pulse widths "
            f"({MIN_DOMAIN_PULSE_RATIO * cfg.paddle.l}); wrap-around would "
            f"contaminate the run"
        )
    if cfg.t_end < 0:
        out.append(f"t_end: must be >= 0, got {cfg.t_end}")
    if cfg.snapshot_every < 0:
        out.append(f"snapshot_every: must be >= 0, got {cfg.snapshot_every}")
    return out


@dataclass(frozen=True)
class InitialStateReport:
    """Projection bookkeeping for an initial condition."""

    projection: Projection
    mode_energy_fractions: np.ndarray   # coeff_n^2 / ||phi2||^2 per mode


def build_initial_state(cfg, basis=None):
    """theta^n(x_i, 0) = (Z^n, phi2) phi1(x_i) on the configured grid.

    Returns (ModeState, InitialStateReport); the report carries the
    per-mode energy fractions and the fraction of paddle energy the
    truncated basis misses.  Raises on under-resolved grids.
    """
    violations = validate(cfg)
    if violations:
        raise ValueError("invalid scenario: " + "; ".join(violations))
    if basis is None:
        basis = cfg.basis()
    if tuple(basis.indices) != tuple(cfg.modes):
        raise ValueError(
            f"basis modes {basis.indices} do not match config modes {cfg.modes}"
        )
    proj = project_profile(lambda z: cfg.paddle.phi2(z, cfg.strat), basis)
    theta = proj.coefficients[:, None] * cfg.paddle.phi1(cfg.grid.x)[None, :]
    state = ModeState(time=0.0, theta=theta)
    fractions = proj.coefficients**2 / proj.profile_norm2
    return state, InitialStateReport(projection=proj, mode_energy_fractions=fractions)


# -- flat key = value config files -----------------------------------------

_F = "%.17g"


def serialize_config(cfg):
    """Render a ScenarioConfig as the sectioned key = value text format."""
    cp = configparser.ConfigParser()
    cp["stratification"] = {"N": _F % cfg.strat.N, "depth": _F % cfg.strat.depth}
    cp["paddle"] = {
        "a": _F % cfg.paddle.a,
        "l": _F % cfg.paddle.l,
        "b": _F % cfg.paddle.b,
        "z0": _F % cfg.paddle.z0,
    }
    cp["grid"] = {
        "dx": _F % cfg.grid.h_x,
        "n_points": str(cfg.grid.n_points),
        "x0": _F % cfg.grid.x0,
    }
    cp["scheme"] = {
        "scheme": cfg.scheme.scheme,
        "dt": _F % cfg.scheme.tau,
        "stability_margin": _F % cfg.scheme.b,
        "dispersion_correction": str(cfg.scheme.dispersion_correction),
    }
    cp["run"] = {
        "t_end": _F % cfg.t_end,
        "snapshot_every": str(cfg.snapshot_every),
        "modes": ",".join(str(n) for n in cfg.modes),
        "sigma": _F % cfg.sigma,
        "beta2": _F % cfg.beta2,
    }
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def parse_config(text):
    """Parse the sectioned key = value format back into a ScenarioConfig.

    Missing keys fall back to the reference defaults, so partial files
    are usable; unknown sections or keys are rejected."""
    cp = configparser.ConfigParser()
    cp.read_string(text)
    base = mcewan_default()

    known = {
        "stratification": {"n", "depth"},
        "paddle": {"a", "l", "b", "z0"},
        "grid": {"dx", "n_points", "x0"},
        "scheme": {"scheme", "dt", "stability_margin", "dispersion_correction"},
        "run": {"t_end", "snapshot_every", "modes", "sigma", "beta2"},
    }
    for section in cp.sections():
        if section not in known:
            raise ValueError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in known[section]:
                raise ValueError(f"unknown key {key!r} in section [{section}]")

    def get(section, key, conv, default):
        if cp.has_option(section, key):
            return conv(cp.get(section, key))
        return default

    strat = Stratification(
        N=get("stratification", "n", float, base.strat.N),
        depth=get("stratification", "depth", float, base.strat.depth),
    )
    paddle = PaddleProfile(
        a=get("paddle", "a", float, base.paddle.a),
        l=get("paddle", "l", float, base.paddle.l),
        b=get("paddle", "b", float, base.paddle.b),
        z0=get("paddle", "z0", float, base.paddle.z0),
    )
    grid = Grid(
        h_x=get("grid", "dx", float, base.grid.h_x),
        n_points=get("grid", "n_points", int, base.grid.n_points),
        x0=get("grid", "x0", float, base.grid.x0),
    )
    scheme = SchemeParams(
        tau=get("scheme", "dt", float, base.scheme.tau),
        scheme=get("scheme", "scheme", str, base.scheme.scheme),
        b=get("scheme", "stability_margin", float, base.scheme.b),
        dispersion_correction=get(
            "scheme", "dispersion_correction",
            lambda s: s.strip().lower() in ("true", "1", "yes", "on"),
            base.scheme.dispersion_correction,
        ),
    )
    modes = get(
        "run", "modes",
        lambda s: tuple(int(v) for v in s.replace(" ", "").split(",") if v),
        base.modes,
    )
    return ScenarioConfig(
        strat=strat,
        modes=modes,
        paddle=paddle,
        grid=grid,
        scheme=scheme,
        t_end=get("run", "t_end", float, base.t_end),
        snapshot_every=get("run", "snapshot_every", int, base.snapshot_every),
        sigma=get("run", "sigma", float, base.sigma),
        beta2=get("run", "beta2", float, base.beta2),
    )


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())
