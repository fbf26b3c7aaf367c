"""Independent time-domain references: the two-body pendulum and the full star network.

Both run the adaptive Dormand-Prince 5(4) integrator from
:mod:`lowinertia.kernels`, which shares no code with the spectral solvers.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoEquilibrium, ReductionViolated, StepFailure
from .model import ModelKind, PendulumParams, StationScenario, Trajectory

__all__ = [
    "MachineSet",
    "CouplingStep",
    "integrate_pendulum",
    "integrate_nbody",
    "machines_from_scenario",
    "star_equilibrium",
    "time_grid",
]

SPREAD_TOL = 1e-8


def time_grid(t_max: float, samples: int) -> np.ndarray:
    if not t_max > 0 or samples < 2:
        raise ValueError("need t_max > 0 and at least two samples")
    return np.linspace(0.0, t_max, samples)


def _check_tol(tol: float) -> None:
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError(f"tolerance must lie in [1e-12, 1e-6], got {tol}")


def _run(system: int, params: np.ndarray, y0: np.ndarray, t: np.ndarray, tol: float):
    t = np.ascontiguousarray(t, dtype=float)
    if t.ndim != 1 or len(t) < 1 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    y, accepted, rejected, status = kernels.dopri5(
        system, np.ascontiguousarray(params, dtype=float), np.ascontiguousarray(y0, dtype=float),
        t, tol, tol)
    if status == 1:
        raise StepFailure("step size underflow")
    if status == 2:
        raise StepFailure("step budget exhausted")
    return y, {"rtol": tol, "atol": tol, "steps": int(accepted), "rejected": int(rejected),
               "backend": kernels.BACKEND}


def _digest(*values) -> str:
    return hashlib.sha256(repr(values).encode()).hexdigest()[:16]


def integrate_pendulum(params: PendulumParams, t_max: float = 50.0, tol: float = 1e-10,
                       t_eval=None, samples: int = 5001) -> Trajectory:
    """Integrate delta'' + beta delta' + zeta_II sin(delta) = tau from (delta_I, 0)."""
    _check_tol(tol)
    t = time_grid(t_max, samples) if t_eval is None else np.asarray(t_eval, dtype=float)
    y, meta = _run(kernels.PENDULUM, np.array([params.beta, params.zeta_ii, params.tau]),
                   np.array([params.delta_i, 0.0]), t, tol)
    meta.update(solver="ode", params_hash=_digest(params))
    return Trajectory(t, y[:, 0], y[:, 1], meta=meta)


@dataclass(frozen=True, eq=False)
class MachineSet:
    """Star network: machine 0 is the tagged generator, 1..N-1 the grid.

    ``k_self`` damps each machine's deviation from the reference frequency
    (Kuramoto-like); ``k_link`` damps the frequency difference across the
    link to machine 0 (cage).  ``coupling[j]`` is the maximum transmitted
    torque of link 0-j before the disturbance; entry 0 is unused.
    """

    model: ModelKind
    omega_ref: float
    j: np.ndarray
    k_self: np.ndarray
    k_link: np.ndarray
    tau: np.ndarray
    coupling: np.ndarray

    def __post_init__(self):
        n = len(self.j)
        if n < 2:
            raise ValueError("need at least two machines")
        for name in ("k_self", "k_link", "tau", "coupling"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} must have one entry per machine")
        if np.any(np.asarray(self.j) <= 0):
            raise ValueError("inertias must be positive")

    @property
    def n(self) -> int:
        return len(self.j)


@dataclass(frozen=True, eq=False)
class CouplingStep:
    """Link couplings switch to ``final`` at t = 0."""

    final: np.ndarray


def machines_from_scenario(scenario: StationScenario, n_machines: int) -> tuple[MachineSet, CouplingStep]:
    """Split the grid of a scenario into ``n_machines - 1`` identical clones."""
    if scenario.model is ModelKind.INFINITE or math.isinf(scenario.x):
        raise ValueError("a star network needs a finite grid inertia")
    if n_machines < 2:
        raise ValueError("need at least two machines")
    g = n_machines - 1
    jg = scenario.j_gen
    j = np.full(n_machines, scenario.x * jg / g)
    j[0] = jg
    tau = np.full(n_machines, -scenario.tau_gen_over_jgen * jg / g)
    tau[0] = scenario.tau_gen_over_jgen * jg
    k_self = np.zeros(n_machines)
    k_link = np.zeros(n_machines)
    if scenario.model is ModelKind.KURAMOTO:
        k_self[:] = scenario.k_over_jgen * j
    else:
        k_link[1:] = scenario.k_over_jgen * jg / g
    c_i = np.full(n_machines, scenario.tau_el_initial_over_jgen * jg / g)
    c_ii = np.full(n_machines, scenario.tau_el_final_over_jgen * jg / g)
    c_i[0] = c_ii[0] = 0.0
    ms = MachineSet(scenario.model, scenario.omega_ref, j, k_self, k_link, tau, c_i)
    return ms, CouplingStep(c_ii)


def star_equilibrium(machines: MachineSet) -> np.ndarray:
    """Phases (machine 0 at zero) of the synchronous state before the disturbance."""
    tau = np.asarray(machines.tau, dtype=float)
    if abs(tau.sum()) > 1e-12 * max(1.0, np.abs(tau).max()):
        raise NoEquilibrium("torques do not balance; no synchronous state at the reference frequency")
    ratio = tau[1:] / machines.coupling[1:]
    if np.any(np.abs(ratio) > 1.0):
        raise NoEquilibrium("a link cannot carry its machine's torque")
    return np.concatenate([[0.0], np.arcsin(ratio)])


def integrate_nbody(machines: MachineSet, disturbance: CouplingStep, t_max: float = 50.0,
                    tol: float = 1e-10, t_eval=None, samples: int = 5001) -> Trajectory:
    """Integrate all N swing equations in the frame rotating at the reference frequency.

    Starts from the pre-disturbance synchronous state with the couplings
    already switched to their final values.  delta is the phase of grid
    machine 1 minus that of machine 0; the remaining grid machines must
    move with machine 1.
    """
    _check_tol(tol)
    t = time_grid(t_max, samples) if t_eval is None else np.asarray(t_eval, dtype=float)
    n = machines.n
    phi0 = star_equilibrium(machines)
    params = np.concatenate([machines.j, machines.k_self, machines.k_link, machines.tau,
                             np.asarray(disturbance.final, dtype=float)])
    y, meta = _run(kernels.STAR, params, np.concatenate([phi0, np.zeros(n)]), t, tol)
    phi, nu = y[:, :n], y[:, n:]
    spread = 0.0
    if n > 2:
        spread = max(np.abs(phi[:, 2:] - phi[:, 1:2]).max(), np.abs(nu[:, 2:] - nu[:, 1:2]).max())
    if spread > SPREAD_TOL:
        raise ReductionViolated(f"grid machines spread by {spread:.2e}")
    meta.update(solver="nbody", machines=n, clone_spread=float(spread),
                params_hash=_digest(params.tobytes()))
    return Trajectory(t, phi[:, 1] - phi[:, 0], nu[:, 1] - nu[:, 0],
                      machine_angles=phi, machine_rates=nu, meta=meta)
