import numpy as np

from kgz.ei import ei_init, ei_step, solve_ei
from kgz.mti import KgzInitialData, KgzParams, reconstruct, solve_mti
from kgz.problems import make_problem
from kgz.spectral import from_spectrum, linf, to_spectrum


def zero_data(grid):
    z = np.zeros(grid.N)
    return KgzInitialData(grid=grid, psi0=z, psi1=z, phi0=z, phi1=z)


def rk4_oracle(data, params, tau, grid, nsub=1000):
    """Explicit RK4 on the full Fourier-space ODE system, substep tau/nsub."""
    mu2 = grid.mu**2
    eps2 = params.epsilon**2
    g2 = params.gamma**2
    st = ei_init(data, params)
    y = [
        to_spectrum(st.psi, grid),
        to_spectrum(st.psidot, grid),
        to_spectrum(st.phi, grid),
        to_spectrum(st.phidot, grid),
    ]

    def rhs(y):
        psi = from_spectrum(y[0], grid).real
        phi = from_spectrum(y[2], grid).real
        pf = to_spectrum(psi * phi, grid)
        p2 = to_spectrum(psi * psi, grid)
        return [
            y[1],
            -(mu2 * y[0] + y[0] / eps2 + pf) / eps2,
            y[3],
            -mu2 * (y[2] + p2) / g2,
        ]

    h = tau / nsub
    for _ in range(nsub):
        k1 = rhs(y)
        k2 = rhs([y[i] + 0.5 * h * k1[i] for i in range(4)])
        k3 = rhs([y[i] + 0.5 * h * k2[i] for i in range(4)])
        k4 = rhs([y[i] + h * k3[i] for i in range(4)])
        y = [y[i] + (h / 6) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(4)]
    return [from_spectrum(c, grid).real for c in y]


class TestStep:
    def test_zero_state(self, grid32):
        params = KgzParams(0.5, 1.0)
        st = ei_step(ei_init(zero_data(grid32), params), params, 1e-3, grid32)
        for f in (st.psi, st.psidot, st.phi, st.phidot):
            assert linf(f) == 0.0

    def test_single_mode_linear_rotation(self, grid32):
        # phi = 0 kills the psi*phi source: psi_hat rotates exactly by cos
        params = KgzParams(0.5, 1.0)
        z = np.zeros(grid32.N)
        psi0 = np.cos(grid32.mu[2] * (grid32.x + grid32.L))
        data = KgzInitialData(grid=grid32, psi0=psi0, psi1=z, phi0=z, phi1=z)
        tau = 1e-2
        st = ei_step(ei_init(data, params), params, tau, grid32)
        omega = np.sqrt(1 + params.epsilon**2 * grid32.mu**2) / params.epsilon**2
        expected = np.cos(omega * tau) * to_spectrum(psi0, grid32)
        assert linf(to_spectrum(st.psi, grid32) - expected) < 1e-14
        # phi picks up only the psi^2 source after one step
        assert linf(st.phi) > 0.0

    def test_one_step_vs_rk4_oracle(self, grid64):
        # frozen from the oracle run: err(2e-3) = 5.4e-8, err(1e-3) = 6.8e-9
        data, params, _ = make_problem("ex2", 1, gamma_rule="explicit:1.0", grid_override=grid64)
        for tau in (2e-3, 1e-3):
            oracle = rk4_oracle(data, params, tau, grid64)
            st = ei_step(ei_init(data, params), params, tau, grid64)
            err = max(linf(st.psi - oracle[0]), linf(st.phi - oracle[2]))
            assert err < 0.05 * tau**2


class TestSolve:
    def test_zero_trajectory(self, grid32):
        tr = solve_ei(zero_data(grid32), KgzParams(0.5, 1.0), 1e-2, 0.1, probe_index=0)
        assert linf(tr.final.psi) == 0.0
        assert np.abs(tr.probe_phi).max() == 0.0

    def test_self_convergence_second_order(self):
        data, params, grid = make_problem("ex2", 1)
        T = 0.05
        sols = {tau: solve_ei(data, params, tau, T).final for tau in (2e-3, 1e-3, 5e-4, 2.5e-4)}

        def d(a, b):
            return linf(sols[a].psi - sols[b].psi) + linf(sols[a].phi - sols[b].phi)

        defects = [d(2e-3, 1e-3), d(1e-3, 5e-4), d(5e-4, 2.5e-4)]
        orders = [np.log2(defects[i] / defects[i + 1]) for i in range(2)]
        assert all(1.6 <= p <= 2.4 for p in orders), orders

    def test_snapshot_states_consistent(self, grid32):
        data, params, _ = make_problem("ex2", 2, grid_override=grid32)
        tr = solve_ei(data, params, 1e-3, 0.05, snapshot_times=[0.0, 0.02, 0.05])
        assert [t for t, _ in tr.snapshots] == [0.0, 0.02, 0.05]
        assert linf(tr.snapshots[0][1].psi - data.psi0) < 1e-13
        assert linf(tr.snapshots[-1][1].psi - tr.final.psi) == 0.0

    def test_classical_regime_ei_and_mti_agree(self):
        # eps = gamma = 1: both solvers converge; frozen error levels from
        # the tau_ref = 2e-6 reference run
        data, params, grid = make_problem("ex2", 0, gamma_rule="explicit:1.0")
        T = 0.1
        ref = solve_ei(data, params, 2e-6, T).final
        mti = reconstruct(solve_mti(data, params, 1e-3, T).final)
        ei = solve_ei(data, params, 1e-3, T).final
        err_mti = linf(mti[0] - ref.psi) + linf(mti[1] - ref.phi)
        err_ei = linf(ei.psi - ref.psi) + linf(ei.phi - ref.phi)
        cross = linf(mti[0] - ei.psi) + linf(mti[1] - ei.phi)
        assert err_ei < 2e-6
        assert err_mti < 2e-3
        assert cross <= err_mti + err_ei

    def test_reference_halving_contract(self):
        # halving tau_ref moves the reference by far less than 1e-8
        data, params, grid = make_problem("ex2", 1)
        a = solve_ei(data, params, 2e-6, 0.1).final
        b = solve_ei(data, params, 1e-6, 0.1).final
        assert linf(a.psi - b.psi) + linf(a.phi - b.phi) < 1e-8
