import numpy as np
import pytest

from kgz.coeffs import (
    COEFFICIENT_NAMES,
    alpha_at,
    beta_at,
    build_coefficients,
    coefficient_oracle,
    oscillatory_quadrature,
)
from kgz.spectral import GridError, SpectralGrid

THETA_FAMILY = [n for n in COEFFICIENT_NAMES if n not in ("sigma", "sigmadot")]


def rel_err(v: complex, o: complex) -> float:
    if v == 0 and o == 0:
        return 0.0
    return abs(v - o) / max(abs(o), 1e-300)


def textbook_forms(mu: float, eps: float, gamma: float, tau: float) -> dict:
    """The raw antiderivative expressions with the resonant denominators
    eps^4 w^2 - 1 and 4 - eps^4 th^2 written out; numerically touchy, used
    here only as an independent transcription in a well-conditioned regime."""
    w = np.sqrt(1 + eps**2 * mu**2) / eps**2
    th = mu / gamma
    e1 = np.exp(1j * tau / eps**2)
    e2 = np.exp(2j * tau / eps**2)
    D1 = eps**4 * w**2 - 1
    D2 = 4 - eps**4 * th**2
    ct, st = np.cos(th * tau), np.sin(th * tau)
    return {
        "sigma": eps**2 / (tau * w * D1) * (eps**2 * w * (e1 - np.cos(w * tau)) - 1j * np.sin(w * tau)),
        "sigmadot": eps**2 / (tau * D1) * (1j * e1 - 1j * np.cos(w * tau) + eps**2 * w * np.sin(w * tau)),
        "alpha_tau": eps**2 * th / D2 * (eps**2 * th * ct + 2j * st - e2 * eps**2 * th),
        "kappa": (
            2 * eps**4 * th / D2**2 * (4j * eps**2 * th * e2 - 4j * eps**2 * th * ct + (4 + eps**4 * th**2) * st)
            + 2 * tau * eps**2 * th / D2 * (eps**2 * th * ct + 2j * st)
        ),
        "chi1": 1 - ct + eps**2 * th / D2 * (2j * st + eps**2 * th * ct - eps**2 * th * e2),
        "chi2": (2 * eps**2 * th * st - 4j * ct + 1j * (4 + eps**4 * th**2 * (e2 - 1))) / D2,
        "beta_tau": eps**2 * th**2 / D2 * (2j * ct - eps**2 * th * st - 2j * e2),
        "rho": (
            2 * tau * eps**2 * th**2 / D2 * (2j * ct - eps**2 * th * st)
            + 2 * eps**4 * th**2 / D2**2 * ((4 + eps**4 * th**2) * ct - (4 + eps**4 * th**2) * e2 + 4j * eps**2 * th * st)
        ),
        "chidot1": th * st - eps**2 * th**2 / D2 * (2j * e2 - 2j * ct + eps**2 * th * st),
        "chidot2": 2 * th / D2 * (2j * st + eps**2 * th * ct - eps**2 * th * e2),
    }


class TestClosedFormValues:
    def test_theta_family_vanishes_at_zero_mode(self, grid32):
        C = build_coefficients(grid32, 0.25, 0.5, 0.01)
        for name in THETA_FAMILY:
            assert C.named(name)[0] == 0.0

    def test_alpha_beta_start_at_zero(self):
        # empty integral at s = 0; endpoint matches the tabulated value
        C = build_coefficients(SpectralGrid(L=np.pi, N=16), 0.25, 0.5, 0.01)
        th = C.theta[3]
        assert alpha_at(0.0, th, 0.25, 0.01) == 0.0
        assert beta_at(0.0, th, 0.25, 0.01) == 0.0
        assert abs(alpha_at(0.01, th, 0.25, 0.01) - C.alpha_tau[3]) < 1e-15
        assert abs(beta_at(0.01, th, 0.25, 0.01) - C.beta_tau[3]) < 1e-15

    def test_reference_point_against_oracle(self):
        # (eps, gamma, tau, L, N) = (0.25, 0.5, 0.01, pi, 64)
        grid = SpectralGrid(L=np.pi, N=64)
        C = build_coefficients(grid, 0.25, 0.5, 0.01)
        for l in range(-32, 32):
            for name in COEFFICIENT_NAMES:
                o = coefficient_oracle(name, l, 0.25, 0.5, 0.01, grid)
                assert rel_err(C.named(name)[l % 64], o) < 1e-10, (name, l)

    @pytest.mark.parametrize("eps,gamma,tau", [(0.5, 1.0, 0.05), (0.25, 0.5, 0.02), (0.8, 0.9, 0.1)])
    def test_matches_textbook_transcription(self, eps, gamma, tau):
        # same antiderivatives, independently transcribed; compare where the
        # raw denominators are well conditioned
        grid = SpectralGrid(L=np.pi, N=16)
        C = build_coefficients(grid, eps, gamma, tau)
        for lpos in range(1, 8):
            printed = textbook_forms(grid.mu[lpos], eps, gamma, tau)
            for name in COEFFICIENT_NAMES:
                assert rel_err(C.named(name)[lpos], printed[name]) < 1e-11, (name, lpos)

    def test_euler_identities(self, grid32):
        for (eps, gamma, tau) in [(0.5, 1.0, 1e-3), (0.1, 0.3, 0.05), (2**-6, 2**-5, 2e-3)]:
            C = build_coefficients(grid32, eps, gamma, tau)
            scale1 = np.abs(C.alpha_tau).max() + 1e-30
            scale2 = np.abs(C.beta_tau).max() + 1e-30
            assert np.abs(C.chi1 + 1j * C.chi2 - 2 * C.alpha_tau).max() < 1e-12 * max(1, scale1)
            assert np.abs(C.chidot1 + 1j * C.chidot2 - 2 * C.beta_tau).max() < 1e-12 * max(1, scale2)

    def test_kernel_bounds(self, grid32):
        for (eps, gamma, tau) in [(0.5, 1.0, 0.01), (2**-4, 2**-3, 1e-3), (1.0, 1.0, 0.2)]:
            C = build_coefficients(grid32, eps, gamma, tau)
            th = np.abs(C.theta)
            slack = 1 + 1e-12
            assert np.all(np.abs(C.sigma) <= eps**2 * slack)
            assert np.all(np.abs(C.sigmadot) <= slack)
            assert np.all(np.abs(C.alpha_tau) <= th * tau * slack + 1e-30)
            assert np.all(np.abs(C.kappa) <= 2 * th * tau**2 * slack + 1e-30)
            assert np.all(np.abs(C.beta_tau) <= th**2 * tau * slack + 1e-30)
            assert np.all(np.abs(C.rho) <= 2 * th**2 * tau**2 * slack + 1e-30)

    def test_even_in_mode_index(self, grid32):
        C = build_coefficients(grid32, 0.3, 0.7, 0.02)
        for name in COEFFICIENT_NAMES:
            v = C.named(name)
            for l in range(1, grid32.N // 2):  # Nyquist mode has no partner
                d = abs(v[l] - v[-l])
                assert d <= 1e-14 * max(abs(v[l]), 1e-30), (name, l)

    def test_resonant_theta_mode_handled(self):
        # eps = 1/2, gamma = 1, L = pi: 4 - eps^4 theta^2 = 0 exactly at l = 8
        grid = SpectralGrid(L=np.pi, N=32)
        eps, gamma, tau = 0.5, 1.0, 0.02
        assert abs(4 - eps**4 * (grid.mu[8] / gamma) ** 2) < 1e-12
        C = build_coefficients(grid, eps, gamma, tau)
        for name in THETA_FAMILY:
            o = coefficient_oracle(name, 8, eps, gamma, tau, grid)
            assert rel_err(C.named(name)[8], o) < 1e-8, name
            assert np.isfinite(C.named(name)).all()

    def test_invalid_inputs(self, grid32):
        with pytest.raises(GridError):
            build_coefficients(grid32, -0.1, 0.5, 0.01)
        with pytest.raises(GridError):
            build_coefficients(grid32, 0.1, 0.5, 0.0)
        with pytest.raises(GridError):
            coefficient_oracle("nonsense", 1, 0.5, 1.0, 0.01, grid32)


class TestOracle:
    def test_sigma_small_tau_limit(self):
        # at eps = 1, l = 0 the kernel is exactly resonant; sigma -> tau/2
        grid = SpectralGrid(L=np.pi, N=16)
        devs = []
        for tau in (1e-4, 1e-5):
            s = coefficient_oracle("sigma", 0, 1.0, 1.0, tau, grid)
            devs.append(abs(s / (tau / 2) - 1.0))
        assert devs[0] < 1e-3
        assert devs[1] < devs[0] / 5  # deviation is O(tau)

    def test_kappa_by_nested_quadrature(self):
        grid = SpectralGrid(L=np.pi, N=16)
        eps, gamma, tau = 0.25, 0.5, 0.01
        C = build_coefficients(grid, eps, gamma, tau)
        th = C.theta[5]
        nested = oscillatory_quadrature(
            lambda s: 2.0 * alpha_at(s, th, eps, tau), 0.0, tau, 2.0 / eps**2 + abs(th)
        )
        assert abs(nested - C.kappa[5]) < 1e-9 * max(1.0, abs(C.kappa[5]))

    def test_quadrature_on_known_integral(self):
        val = oscillatory_quadrature(lambda s: np.exp(1j * 40 * s), 0.0, 1.0, 40.0)
        exact = (np.exp(40j) - 1) / 40j
        assert abs(val - exact) < 1e-13

    def test_empty_interval(self):
        assert oscillatory_quadrature(lambda s: np.ones_like(s), 0.0, 0.0, 10.0) == 0.0
