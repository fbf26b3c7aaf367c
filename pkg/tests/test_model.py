import math

import numpy as np
import pytest

from lowinertia.errors import BoundaryWarning, NoEquilibrium
from lowinertia.model import (ModelKind, PendulumParams, Phase, StationScenario, Trajectory,
                              angles_from_delta, equilibrium_angle, reduce)


def station(model="cage", x=2.0, k=0.3, tau_gen=None, delta_i=math.pi / 3, c1=1.0, c2=2.0):
    if tau_gen is not None:
        return StationScenario(ModelKind(model), x, k, tau_gen, c1, c2)
    return StationScenario.from_initial_angle(model, x, k, delta_i, c1, c2)


class TestReduce:
    def test_cage_beta_finite_x(self):
        assert reduce(station("cage", 2.0)).beta == pytest.approx(0.45, rel=1e-15)

    def test_cage_beta_infinite_x_equals_kuramoto(self):
        cage = reduce(station("cage", math.inf))
        kura = reduce(station("kuramoto", math.inf))
        assert cage.beta == 0.3
        assert cage == kura

    def test_coupling_doubles_at_equal_inertia(self):
        p = reduce(station("kuramoto", 1.0, c1=1.0, c2=1.0))
        assert p.zeta_i == 2.0 and p.zeta_ii == 2.0

    def test_kuramoto_beta_ignores_x(self):
        assert reduce(station("kuramoto", 1.0)).beta == 0.3
        assert reduce(station("kuramoto", 1e3)).beta == 0.3

    def test_infinite_kind_matches_finite_constructors_at_inf(self):
        inf = reduce(station("infinite", math.inf))
        for kind in ("cage", "kuramoto"):
            assert reduce(station(kind, math.inf)) == inf

    @pytest.mark.parametrize("model,x", [(m, x) for m in ("cage", "kuramoto")
                                         for x in (0.5, 1.0, 10.0, math.inf)]
                             + [("infinite", math.inf)])
    def test_final_equilibrium_identity(self, model, x):
        p = reduce(station(model, x))
        assert p.zeta_ii * math.sin(p.delta_ii) - p.tau == pytest.approx(0.0, abs=1e-12)
        assert math.cos(p.delta_ii) > 0

    def test_initial_phase_keeps_coupling(self):
        p = reduce(station(), Phase.INITIAL)
        assert p.zeta_ii == p.zeta_i and p.delta_ii == p.delta_i

    def test_initial_angle_round_trips(self):
        p = reduce(station("kuramoto", 4.0, delta_i=0.7))
        assert p.delta_i == pytest.approx(0.7, abs=1e-15)

    def test_high_inertia_models_agree(self):
        cage = reduce(station("cage", 1e6))
        kura = reduce(station("kuramoto", 1e6))
        assert abs(cage.beta - kura.beta) / kura.beta < 2e-6
        assert (cage.zeta_i, cage.zeta_ii, cage.tau) == (kura.zeta_i, kura.zeta_ii, kura.tau)

    def test_cage_beta_decreases_with_x(self):
        betas = [reduce(station("cage", x)).beta for x in (0.5, 1, 2, 10, 100)]
        assert all(a > b for a, b in zip(betas, betas[1:]))

    def test_no_equilibrium_final(self):
        with pytest.raises(NoEquilibrium):
            reduce(station(c1=1.0, c2=0.5))

    def test_no_equilibrium_initial(self):
        with pytest.raises(NoEquilibrium):
            reduce(station(tau_gen=1.5, c1=1.0, c2=2.0))


class TestEquilibriumAngle:
    def test_half(self):
        assert equilibrium_angle(0.5, 1.0) == pytest.approx(math.pi / 6, abs=1e-15)

    def test_zero(self):
        assert equilibrium_angle(0.0, 2.0) == 0.0

    def test_no_equilibrium(self):
        with pytest.raises(NoEquilibrium):
            equilibrium_angle(1.2, 1.0)

    def test_boundary_warns(self):
        with pytest.warns(BoundaryWarning):
            assert equilibrium_angle(1.0, 1.0) == pytest.approx(math.pi / 2)

    def test_requires_positive_coupling(self):
        with pytest.raises(ValueError):
            equilibrium_angle(0.1, 0.0)


class TestScenarioValidation:
    @pytest.mark.parametrize("kw", [dict(x=0.0), dict(x=-1.0), dict(k=-0.1), dict(c1=0.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            station(**kw)

    def test_infinite_requires_inf(self):
        with pytest.raises(ValueError):
            StationScenario(ModelKind.INFINITE, 5.0, 0.3, 0.1, 1.0, 1.0)

    def test_weights(self):
        s = station(x=3.0)
        assert s.grid_weight == 0.25 and s.gen_weight == 0.75 and s.j_grid == 3.0
        inf = station(x=math.inf)
        assert inf.grid_weight == 0.0 and inf.gen_weight == 1.0 and inf.inertia_factor == 1.0


class TestPendulumParams:
    def test_from_torque(self):
        p = PendulumParams.from_torque(0.5, 1.0, 1.5, 0.5)
        assert p.delta_i == pytest.approx(math.pi / 6)
        assert p.delta_ii == pytest.approx(math.asin(1 / 3))

    def test_unstable_branch_rejected(self):
        with pytest.raises(NoEquilibrium):
            PendulumParams.from_initial_angle(0.5, 1.0, 1.5, 2.0)

    def test_generator_angles(self):
        p = PendulumParams.from_torque(0.5, 1.0, 1.5, 0.5)
        assert p.generator_angles() == (-p.delta_i, -p.delta_ii)


class TestAnglesFromDelta:
    def traj(self, rate):
        t = np.linspace(0, 1, 5)
        return Trajectory(t, 0.3 + rate * t, np.full(5, rate))

    def test_steady_rotation(self):
        s = station(x=2.0)
        phys = angles_from_delta(s, self.traj(0.0))
        assert np.all(phys.omega_grid == s.omega_ref) and np.all(phys.omega_gen == s.omega_ref)

    def test_symmetric_split(self):
        s = station(x=1.0)
        phys = angles_from_delta(s, self.traj(0.2))
        assert np.allclose(phys.omega_grid - s.omega_ref, 0.1, atol=1e-12)
        assert np.allclose(phys.omega_gen - s.omega_ref, -0.1, atol=1e-12)

    @pytest.mark.parametrize("x", [0.3, 1.0, 7.0, 1e4])
    def test_momentum(self, x):
        s = station(x=x)
        t = np.linspace(0, 10, 101)
        tr = Trajectory(t, np.sin(t), np.cos(t))
        phys = angles_from_delta(s, tr)
        lhs = x * phys.omega_grid + phys.omega_gen
        assert np.max(np.abs(lhs / ((1 + x) * s.omega_ref) - 1)) < 1e-10
        assert np.allclose(phys.theta_grid - phys.theta_gen, tr.delta, atol=1e-12)

    def test_infinite_grid_frequency_fixed(self):
        s = station(x=math.inf)
        phys = angles_from_delta(s, self.traj(0.2))
        assert np.all(phys.omega_grid == s.omega_ref)


class TestTrajectory:
    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            Trajectory(np.arange(3.0), np.zeros(2), np.zeros(3))

    def test_monotone(self):
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 1.0, 1.0]), np.zeros(3), np.zeros(3))
