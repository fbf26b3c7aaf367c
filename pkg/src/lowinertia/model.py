"""Two-body reduction of a generating station coupled to a finite-inertia grid.

Both the Kuramoto-like model (damping referenced to the nominal frequency)
and the cage model (damping on the frequency difference between machines)
collapse onto the driven damped pendulum

    delta'' + beta delta' + zeta sin(delta) = tau,   delta = theta_grid - theta_gen

once the grid machines are identical.  This module holds the physical
scenario, performs that reduction and maps the rotor angle back onto
grid and generator angles/frequencies.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BoundaryWarning, NoEquilibrium

__all__ = [
    "ModelKind",
    "Phase",
    "StationScenario",
    "PendulumParams",
    "Trajectory",
    "PhysicalTrajectory",
    "equilibrium_angle",
    "reduce",
    "angles_from_delta",
]


class ModelKind(enum.Enum):
    KURAMOTO = "kuramoto"
    CAGE = "cage"
    INFINITE = "infinite"


class Phase(enum.Enum):
    INITIAL = "initial"
    FINAL = "final"


def _inertia_factor(x: float) -> float:
    """1 + 1/x, with x = inf mapping to exactly 1."""
    return 1.0 if math.isinf(x) else 1.0 + 1.0 / x


@dataclass(frozen=True)
class StationScenario:
    """Physical description of a generator on a grid of finite inertia.

    All torques and damping constants are stored divided by the generator
    inertia ``j_gen``.  ``x`` is J_grid / J_gen and may be ``math.inf``.
    ``k_over_jgen`` is K^K/J_gen for the Kuramoto-like model and
    K^C/J_gen for the cage model.
    """

    model: ModelKind
    x: float
    k_over_jgen: float
    tau_gen_over_jgen: float
    tau_el_initial_over_jgen: float
    tau_el_final_over_jgen: float
    omega_ref: float = 2.0 * math.pi * 50.0
    j_gen: float = 1.0

    def __post_init__(self):
        if not isinstance(self.model, ModelKind):
            object.__setattr__(self, "model", ModelKind(self.model))
        x = float(self.x)
        if self.model is ModelKind.INFINITE and not math.isinf(x):
            raise ValueError("an infinite-grid scenario requires x = inf")
        if not x > 0:
            raise ValueError(f"inertia ratio must be positive, got {x}")
        if not self.j_gen > 0:
            raise ValueError("generator inertia must be positive")
        if self.k_over_jgen < 0:
            raise ValueError("damping must be non-negative")
        if not (self.tau_el_initial_over_jgen > 0 and self.tau_el_final_over_jgen > 0):
            raise ValueError("coupling torques must be positive")
        object.__setattr__(self, "x", x)

    @classmethod
    def from_initial_angle(cls, model, x, k_over_jgen, delta_i, tau_el_initial_over_jgen,
                           tau_el_final_over_jgen, **kw) -> "StationScenario":
        """Build a scenario whose pre-disturbance rotor angle is ``delta_i``.

        ``delta_i`` is theta_grid - theta_gen, so the generator torque that
        holds it there is -tau_el^I sin(delta_i).
        """
        tau_gen = -tau_el_initial_over_jgen * math.sin(delta_i)
        return cls(ModelKind(model), x, k_over_jgen, tau_gen, tau_el_initial_over_jgen,
                   tau_el_final_over_jgen, **kw)

    @property
    def j_grid(self) -> float:
        return self.x * self.j_gen

    @property
    def inertia_factor(self) -> float:
        return _inertia_factor(self.x)

    @property
    def grid_weight(self) -> float:
        """J_gen / (J_grid + J_gen), the share of delta carried by the grid angle."""
        return 0.0 if math.isinf(self.x) else 1.0 / (1.0 + self.x)

    @property
    def gen_weight(self) -> float:
        """J_grid / (J_grid + J_gen)."""
        return 1.0 if math.isinf(self.x) else self.x / (1.0 + self.x)


@dataclass(frozen=True)
class PendulumParams:
    """Reduced driven-damped-pendulum parameters.

    ``delta_i`` and ``delta_ii`` are the pre- and post-disturbance
    equilibria, both on the stable branch, with zeta_ii sin(delta_ii) = tau.
    """

    beta: float
    zeta_i: float
    zeta_ii: float
    tau: float
    delta_i: float
    delta_ii: float

    @classmethod
    def from_torque(cls, beta: float, zeta_i: float, zeta_ii: float, tau: float) -> "PendulumParams":
        delta_i = _stable_angle(tau, zeta_i)
        delta_ii = _stable_angle(tau, zeta_ii)
        return cls(float(beta), float(zeta_i), float(zeta_ii), float(tau), delta_i, delta_ii)

    @classmethod
    def from_initial_angle(cls, beta: float, zeta_i: float, zeta_ii: float,
                           delta_i: float) -> "PendulumParams":
        if math.cos(delta_i) < 0:
            raise NoEquilibrium(f"delta_i = {delta_i} lies on the unstable branch")
        tau = zeta_i * math.sin(delta_i)
        return cls(float(beta), float(zeta_i), float(zeta_ii), tau,
                   float(delta_i), _stable_angle(tau, zeta_ii))

    @property
    def swing(self) -> float:
        """delta_I - delta_II, the initial displacement from the final state."""
        return self.delta_i - self.delta_ii

    def generator_angles(self) -> tuple[float, float]:
        """(delta_I, delta_II) referenced to the generator, theta_gen - theta_grid."""
        return -self.delta_i, -self.delta_ii


def _stable_angle(tau: float, zeta: float) -> float:
    if not zeta > 0:
        raise ValueError(f"coupling must be positive, got {zeta}")
    ratio = tau / zeta
    if abs(ratio) > 1.0:
        raise NoEquilibrium(f"|tau/zeta| = {abs(ratio):.6g} > 1")
    if abs(ratio) == 1.0:
        warnings.warn("equilibrium at the stability boundary", BoundaryWarning, stacklevel=3)
    return math.asin(ratio)


def equilibrium_angle(tau_gen_over_jgen: float, tau_el_over_jgen: float) -> float:
    """Generator-referenced equilibrium angle arcsin(tau_gen / tau_el) on [-pi/2, pi/2]."""
    if not tau_el_over_jgen > 0:
        raise ValueError("coupling torque must be positive")
    ratio = tau_gen_over_jgen / tau_el_over_jgen
    if abs(ratio) > 1.0:
        raise NoEquilibrium(f"|tau_gen/tau_el| = {abs(ratio):.6g} > 1")
    if abs(ratio) == 1.0:
        warnings.warn("equilibrium at the stability boundary", BoundaryWarning, stacklevel=2)
    return math.asin(ratio)


def reduce(scenario: StationScenario, phase: Phase = Phase.FINAL) -> PendulumParams:
    """Reduce a station scenario to pendulum parameters.

    With ``Phase.FINAL`` (the default) the result describes the transient
    from the state-I equilibrium into state II.  ``Phase.INITIAL`` gives
    the undisturbed pre-fault system, i.e. zeta_II = zeta_I.
    """
    f = scenario.inertia_factor
    zeta_i = scenario.tau_el_initial_over_jgen * f
    tau_el_ii = scenario.tau_el_final_over_jgen if phase is Phase.FINAL else scenario.tau_el_initial_over_jgen
    zeta_ii = tau_el_ii * f
    tau = -scenario.tau_gen_over_jgen * f
    if scenario.model is ModelKind.CAGE:
        beta = scenario.k_over_jgen * f
    else:
        beta = scenario.k_over_jgen
    # rotor angle is grid-referenced, hence the sign flip relative to arcsin(tau_gen/tau_el)
    delta_i = -equilibrium_angle(scenario.tau_gen_over_jgen, scenario.tau_el_initial_over_jgen)
    delta_ii = -equilibrium_angle(scenario.tau_gen_over_jgen, tau_el_ii)
    return PendulumParams(beta, zeta_i, zeta_ii, tau, delta_i, delta_ii)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled rotor-angle trajectory.

    ``machine_angles``/``machine_rates`` are only filled by N-body runs and
    are expressed in the frame rotating at the reference frequency.
    """

    times: np.ndarray
    delta: np.ndarray
    delta_dot: np.ndarray
    machine_angles: Optional[np.ndarray] = None
    machine_rates: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) != len(self.delta) or len(t) != len(self.delta_dot):
            raise ValueError("times, delta and delta_dot must be 1-d arrays of equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")


@dataclass(frozen=True, eq=False)
class PhysicalTrajectory:
    times: np.ndarray
    theta_grid: np.ndarray
    theta_gen: np.ndarray
    omega_grid: np.ndarray
    omega_gen: np.ndarray


def angles_from_delta(scenario: StationScenario, traj: Trajectory,
                      theta_gen0: float = 0.0) -> PhysicalTrajectory:
    """Recover grid and generator angles and frequencies from delta(t).

    The centre of inertia rotates uniformly at the reference frequency;
    delta is split between the two machines in inverse proportion to
    their inertia.  ``theta_gen0`` fixes the arbitrary phase origin.
    For an infinite grid the grid angle carries none of delta.
    """
    t = np.asarray(traj.times, dtype=float)
    delta = np.asarray(traj.delta, dtype=float)
    rate = np.asarray(traj.delta_dot, dtype=float)
    w_grid, w_gen = scenario.grid_weight, scenario.gen_weight
    omega = scenario.omega_ref
    theta_grid0 = theta_gen0 + delta[0]
    centre = w_gen * theta_grid0 + w_grid * theta_gen0
    theta_grid = omega * t + centre + w_grid * delta
    theta_gen = omega * t + centre - w_gen * delta
    omega_grid = omega + w_grid * rate
    omega_gen = omega - w_gen * rate
    return PhysicalTrajectory(t, theta_grid, theta_gen, omega_grid, omega_gen)
