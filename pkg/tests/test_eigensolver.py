import math

import numpy as np
import pytest

from lowinertia.eigensolver import (assemble_super_matrix, auto_truncation,
                                    evaluate, solve, solve_params, verify_truncation)
from lowinertia.hierarchy import Truncation, assemble_blocks
from lowinertia.model import PendulumParams
from lowinertia.oracle import integrate_pendulum

# delta(t) from an independent eighth-order integration (rtol 1e-13)
BASE_REFERENCE = {1.0: 0.42785989345325787, 5.0: 0.3808049905924975,
                  10.0: 0.3457922433849004, 20.0: 0.3391914700837563}
SWING_REFERENCE = {1.0: 0.8742231390554046, 5.0: 0.6577520160942897,
                   10.0: 0.5970264239661933, 20.0: 0.6134688427916607}


@pytest.fixture(scope="module")
def base_solution(base_params, t50):
    rep = auto_truncation(base_params, t50)
    assert rep.converged
    return solve_params(base_params, rep.trunc)


@pytest.fixture(scope="module")
def swing_solution(swing_params, t50):
    rep = auto_truncation(swing_params, t50)
    assert rep.converged
    return solve_params(swing_params, rep.trunc)


class TestSuperMatrix:
    def test_zero_damping_diagonal_blocks(self):
        p = PendulumParams.from_torque(0.0, 1.0, 1.5, 0.5)
        tr = Truncation(4, 3)
        x = assemble_super_matrix(assemble_blocks(p, tr))
        d = tr.block_dim
        for k in range(tr.n_max):
            assert not np.any(x[k * d:(k + 1) * d, k * d:(k + 1) * d])

    def test_constant_row_zero(self, base_params):
        x = assemble_super_matrix(assemble_blocks(base_params, Truncation(5, 4)))
        assert not np.any(x[0]) and not np.any(x[:, 0])

    def test_smallest_layout(self, base_params):
        x = assemble_super_matrix(assemble_blocks(base_params, Truncation(2, 1)))
        s, c = math.sin(base_params.delta_ii), math.cos(base_params.delta_ii)
        z, b = base_params.zeta_ii, base_params.beta
        want = np.zeros((8, 8))
        # -(Q_1^+) in the upper right, -(Q_2^-) lower left, -(Q_2) on block 2
        want[1, 6] = -1.0
        want[2, 4], want[2, 5] = -1.0, 1.0
        want[3, 5] = 1.0
        want[4:, :4] = z * np.array([[0, -s, c, 0], [0, -2 * s, 0, c], [0, 0, 0, -s], [0, 0, 0, -2 * s]])
        want[4:, 4:] = b * np.eye(4)
        assert np.allclose(x, want, rtol=0, atol=1e-15)


class TestSolve:
    def test_identities(self, base_solution, swing_solution):
        for sol in (base_solution, swing_solution):
            c_res, d_res = sol.initial_residuals
            assert c_res < 1e-8 and d_res < 1e-8

    def test_start_point(self, swing_solution, swing_params):
        tr = evaluate(swing_solution, [0.0])
        assert abs(tr.delta[0] - swing_params.delta_i) < 1e-8 and abs(tr.delta_dot[0]) < 1e-8

    def test_conjugate_pairs(self, swing_solution):
        lam, c = swing_solution.lambdas, swing_solution.c
        cplx = np.abs(lam.imag) > 1e-8
        for j in np.nonzero(cplx)[0]:
            k = np.argmin(np.abs(lam - np.conj(lam[j])))
            assert abs(lam[k] - np.conj(lam[j])) < 1e-8 * abs(lam[j])
            assert abs(c[k] - np.conj(c[j])) < 1e-6 * np.abs(c).max()

    def test_retained_modes_decay(self, swing_solution):
        assert np.all(swing_solution.lambdas.real > 0)

    def test_no_swing(self):
        p = PendulumParams.from_torque(0.5, 1.5, 1.5, 0.5)
        sol = solve(assemble_blocks(p, Truncation(6, 6)))
        assert np.allclose(sol.c, 0) and np.allclose(sol.d, 0)
        tr = evaluate(sol, np.linspace(0, 10, 11))
        assert np.all(tr.delta == p.delta_ii) and not np.any(tr.delta_dot)

    def test_matches_frozen_reference(self, base_solution, swing_solution):
        for sol, ref in ((base_solution, BASE_REFERENCE), (swing_solution, SWING_REFERENCE)):
            t = np.array(sorted(ref))
            got = evaluate(sol, t).delta
            assert np.max(np.abs(got - [ref[k] for k in t])) < 1e-8

    def test_matches_ode(self, base_solution, base_params, t50):
        ode = integrate_pendulum(base_params, t_eval=t50, tol=1e-11)
        assert np.max(np.abs(evaluate(base_solution, t50).delta - ode.delta)) < 1e-6

    def test_relaxes_to_final_state(self, swing_solution, swing_params):
        t = 200 / swing_params.beta
        assert abs(swing_solution.delta([t])[0] - swing_params.delta_ii) < 1e-8

    def test_reality(self, swing_solution):
        t = np.linspace(0, 50, 501)
        e = np.exp(-np.outer(t, swing_solution.lambdas))
        assert np.abs((e @ swing_solution.c).imag).max() < 1e-10

    def test_negative_time_rejected(self, base_solution):
        with pytest.raises(ValueError):
            evaluate(base_solution, [-1.0])

    def test_normalized(self, swing_solution):
        v = swing_solution.normalized([0.0, 1e3])
        assert v[0] == pytest.approx(1.0, abs=1e-8) and abs(v[1]) < 1e-8


class TestTruncationSelection:
    def test_auto_converges_and_verifies(self, base_params, t50):
        rep = auto_truncation(base_params, t50)
        dn, dq = verify_truncation(base_params, rep.trunc, t50)
        assert rep.converged and dn < 1e-8 and dq < 1e-8
        assert rep.trunc.q_max == 2 * rep.trunc.n_max

    def test_no_swing_minimal(self):
        p = PendulumParams.from_torque(0.5, 1.5, 1.5, 0.5)
        assert auto_truncation(p, [0.0, 1.0]).trunc == Truncation(2, 1)

    def test_budget_exhausted(self, swing_params, t50):
        rep = auto_truncation(swing_params, t50, tol=1e-14, max_dim=300)
        assert not rep.converged and rep.trunc.dim <= 300

    def test_solution_cache(self, base_params):
        tr = Truncation(6, 6)
        assert solve_params(base_params, tr) is solve_params(base_params, tr)
