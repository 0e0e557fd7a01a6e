"""Oscillatory quadrature weights of the multiscale integrator.

Every weight is an exact integral of a trigonometric kernel against the
carrier exp(i s/eps^2) (or its square) over one step [0, tau]:

    sigma    = int sin(omega(tau-s))/(tau omega) e^{is/eps^2} ds
    sigmadot = (1/tau) int cos(omega(tau-s)) e^{is/eps^2} ds
    alpha(s) = int_0^s theta sin(theta(tau-u)) e^{2iu/eps^2} du
    kappa    = int_0^tau 2 alpha(s) ds
    beta(s)  = int_0^s theta^2 cos(theta(tau-u)) e^{2iu/eps^2} du
    rho      = int_0^tau 2 beta(s) ds
    chi1/chi2       = int 2 theta   sin(theta(tau-s)) e^{is/eps^2} cos/sin(s/eps^2) ds
    chidot1/chidot2 = int 2 theta^2 cos(theta(tau-s)) e^{is/eps^2} cos/sin(s/eps^2) ds

with omega = sqrt(1+eps^2 mu^2)/eps^2 and theta = mu/gamma per mode.

The textbook antiderivative expressions divide by eps^4*omega^2 - 1 =
eps^2*mu^2 (sigma family) or 4 - eps^4*theta^2 (theta family) and lose up to
eps_mach/(theta*tau) digits to cancellation long before those denominators
are small.  Here each integral is instead assembled from the two primitives

    E(nu) = int_0^T e^{i nu s} ds       = T e^{i nu T/2} sinc(nu T/2),
    W(nu) = int_0^T (T-s) e^{i nu s} ds = T^2 psi(nu T),

which are uniformly stable in nu (kappa and rho use W after exchanging the
order of the double integral, which turns the inner antiderivative into the
weight (tau-s)).  The result is the same closed form, evaluated without
cancellation; equivalence with the defining integrals is enforced by the
quadrature oracle below, which is part of the test surface.

Modes whose resonance measure |eps^2 mu^2| (sigma family) or
|4 - eps^4 theta^2| (theta family) falls below RESONANCE_DELTA are evaluated
by the oracle directly; the defining integrals are regular there.

One weight needs a third path: chi2 is smaller than every other assembly
piece by the product (theta*tau)*(tau/eps^2) when both factors are < 1, so
no antiderivative arrangement can reach it in double precision.  In exactly
that regime the integrand has a phase span below 2 rad, and the oracle
reduces to a fixed handful of Gauss panels, machine-exact and O(1) per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import GridError, SpectralGrid

RESONANCE_DELTA = 1e-6

COEFFICIENT_NAMES = (
    "sigma",
    "sigmadot",
    "alpha_tau",
    "kappa",
    "chi1",
    "chi2",
    "beta_tau",
    "rho",
    "chidot1",
    "chidot2",
)

_SIGMA_FAMILY = ("sigma", "sigmadot")


def _sinc(x: np.ndarray) -> np.ndarray:
    return np.sinc(np.asarray(x) / np.pi)


def _interval_exp(nu: np.ndarray, T: float) -> np.ndarray:
    """E(nu) = int_0^T exp(i nu s) ds, stable for all nu including 0."""
    half = 0.5 * nu * T
    return T * np.exp(1j * half) * _sinc(half)


def _psi(x: np.ndarray) -> np.ndarray:
    """psi(x) = int_0^1 (1-u) e^{ixu} du = (ix + 1 - e^{ix})/x^2, stable."""
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < 0.5
    xs = np.where(small, 0.0, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (1j * xs + 1.0 - np.exp(1j * xs)) / np.where(small, 1.0, xs**2)
    # Taylor sum_k (ix)^k / (k! (k+1)(k+2)); 20 terms is exact for |x| < 0.5
    ix = 1j * np.where(small, x, 0.0)
    series = np.zeros_like(ix)
    term = np.ones_like(ix)  # (ix)^k / k!
    for k in range(20):
        series = series + term / ((k + 1) * (k + 2))
        term = term * ix / (k + 1)
    return np.where(small, series, direct)


def _interval_exp_ramp(nu: np.ndarray, T: float) -> np.ndarray:
    """W(nu) = int_0^T (T-s) exp(i nu s) ds = T^2 psi(nu T)."""
    return T**2 * _psi(nu * T)


def omega_modes(grid: SpectralGrid, eps: float) -> np.ndarray:
    """omega_l = sqrt(1 + eps^2 mu_l^2)/eps^2 in FFT layout."""
    return np.sqrt(1.0 + eps**2 * grid.mu**2) / eps**2


@dataclass(frozen=True)
class MtiCoefficients:
    """Per-mode weights and trig factors for one (grid, eps, gamma, tau)."""

    grid: SpectralGrid
    eps: float
    gamma: float
    tau: float
    omega: np.ndarray
    theta: np.ndarray
    sigma: np.ndarray
    sigmadot: np.ndarray
    alpha_tau: np.ndarray
    kappa: np.ndarray
    chi1: np.ndarray
    chi2: np.ndarray
    beta_tau: np.ndarray
    rho: np.ndarray
    chidot1: np.ndarray
    chidot2: np.ndarray
    # trig factors of the linear (Duhamel) part of the update
    cos_omega_tau: np.ndarray
    sin_omega_tau: np.ndarray
    sin_omega_tau_over: np.ndarray  # sin(omega tau)/omega
    cos_theta_tau: np.ndarray
    sin_theta_tau: np.ndarray
    sin_theta_tau_over: np.ndarray  # sin(theta tau)/theta, = tau at l = 0
    tau_theta2_cos_theta_tau: np.ndarray
    kinetic_phase: np.ndarray  # exp(i mu^2 tau / 2), exact free-Schroedinger flow
    exp_i_tau_eps2: complex  # exp(i tau / eps^2)

    def named(self, name: str) -> np.ndarray:
        if name not in COEFFICIENT_NAMES:
            raise GridError(f"unknown coefficient name {name!r}")
        return getattr(self, name)


def _closed_forms(
    omega: np.ndarray, theta: np.ndarray, eps: float, tau: float
) -> dict[str, np.ndarray]:
    a = 1.0 / eps**2
    b = 2.0 / eps**2
    e_w = np.exp(1j * omega * tau)
    e_t = np.exp(1j * theta * tau)
    E_am = _interval_exp(a - omega, tau)
    E_ap = _interval_exp(a + omega, tau)
    E_bm = _interval_exp(b - theta, tau)
    E_bp = _interval_exp(b + theta, tau)
    E_tm = _interval_exp(-theta, tau)
    E_tp = _interval_exp(theta, tau)
    W_bm = _interval_exp_ramp(b - theta, tau)
    W_bp = _interval_exp_ramp(b + theta, tau)
    return {
        "sigma": (e_w * E_am - np.conj(e_w) * E_ap) / (2j * tau * omega),
        "sigmadot": (e_w * E_am + np.conj(e_w) * E_ap) / (2.0 * tau),
        "alpha_tau": theta * (e_t * E_bm - np.conj(e_t) * E_bp) / 2j,
        "kappa": theta * (e_t * W_bm - np.conj(e_t) * W_bp) / 1j,
        "chi1": theta * (e_t * (E_bm + E_tm) - np.conj(e_t) * (E_bp + E_tp)) / 2j,
        "chi2": -0.5 * theta * (e_t * (E_bm - E_tm) - np.conj(e_t) * (E_bp - E_tp)),
        "beta_tau": 0.5 * theta**2 * (e_t * E_bm + np.conj(e_t) * E_bp),
        "rho": theta**2 * (e_t * W_bm + np.conj(e_t) * W_bp),
        "chidot1": 0.5 * theta**2 * (e_t * (E_bm + E_tm) + np.conj(e_t) * (E_bp + E_tp)),
        "chidot2": -0.5j * theta**2 * (e_t * (E_bm - E_tm) + np.conj(e_t) * (E_bp - E_tp)),
    }


def alpha_at(s, theta: float, eps: float, tau: float):
    """alpha(s) for one mode (s scalar or array); alpha(0) = 0, alpha(tau) = alpha_tau."""
    b = 2.0 / eps**2
    e_t = np.exp(1j * theta * tau)
    return theta * (e_t * _interval_exp(b - theta, s) - np.conj(e_t) * _interval_exp(b + theta, s)) / 2j


def beta_at(s, theta: float, eps: float, tau: float):
    """beta(s) for one mode (s scalar or array); beta(0) = 0, beta(tau) = beta_tau."""
    b = 2.0 / eps**2
    e_t = np.exp(1j * theta * tau)
    return 0.5 * theta**2 * (e_t * _interval_exp(b - theta, s) + np.conj(e_t) * _interval_exp(b + theta, s))


def build_coefficients(
    grid: SpectralGrid, eps: float, gamma: float, tau: float
) -> MtiCoefficients:
    """All per-mode weights for fixed (grid, eps, gamma, tau).

    Built once per trajectory and reused across steps.  Modes inside the
    RESONANCE_DELTA margin of a degenerate denominator are filled from the
    quadrature oracle (the sigma family always triggers at l = 0, where the
    kernel is exactly resonant with the carrier).
    """
    if eps <= 0 or gamma <= 0 or tau <= 0:
        raise GridError(f"parameters must be positive, got eps={eps} gamma={gamma} tau={tau}")
    mu = grid.mu
    omega = omega_modes(grid, eps)
    theta = mu / gamma

    values = _closed_forms(omega, theta, eps, tau)

    sigma_guard = np.flatnonzero(np.abs(eps**2 * mu**2) < RESONANCE_DELTA)
    theta_guard = np.flatnonzero(np.abs(4.0 - eps**4 * theta**2) < RESONANCE_DELTA)
    for l_pos in sigma_guard:
        for name in _SIGMA_FAMILY:
            values[name][l_pos] = _oracle_value(name, omega[l_pos], theta[l_pos], eps, tau)
    for l_pos in theta_guard:
        for name in COEFFICIENT_NAMES:
            if name not in _SIGMA_FAMILY:
                values[name][l_pos] = _oracle_value(name, omega[l_pos], theta[l_pos], eps, tau)
    # chi2 cancellation zone: both oscillations slow, integral non-oscillatory
    chi2_guard = np.flatnonzero(
        (np.abs(theta) * tau < 1.0) & (2.0 * tau / eps**2 < 1.0) & (theta != 0.0)
    )
    for l_pos in chi2_guard:
        values["chi2"][l_pos] = _oracle_value("chi2", omega[l_pos], theta[l_pos], eps, tau)

    cos_wt = np.cos(omega * tau)
    sin_wt = np.sin(omega * tau)
    cos_tt = np.cos(theta * tau)
    sin_tt = np.sin(theta * tau)
    return MtiCoefficients(
        grid=grid,
        eps=eps,
        gamma=gamma,
        tau=tau,
        omega=omega,
        theta=theta,
        cos_omega_tau=cos_wt,
        sin_omega_tau=sin_wt,
        sin_omega_tau_over=sin_wt / omega,
        cos_theta_tau=cos_tt,
        sin_theta_tau=sin_tt,
        sin_theta_tau_over=tau * _sinc(theta * tau),
        tau_theta2_cos_theta_tau=tau * theta**2 * cos_tt,
        kinetic_phase=np.exp(0.5j * mu**2 * tau),
        exp_i_tau_eps2=complex(np.exp(1j * tau / eps**2)),
        **values,
    )


# ---------------------------------------------------------------------------
# Quadrature oracle: evaluates the defining integrals directly.


def oscillatory_quadrature(f, t0: float, t1: float, nu_max: float) -> complex:
    """Composite 12-point Gauss-Legendre with panels <= 1/8 oscillation period.

    Deterministic by construction; nu_max must bound every angular frequency
    present in f.  Used by the tests and by the resonance-guarded modes.
    """
    if t1 <= t0:
        return 0.0 + 0.0j
    span = t1 - t0
    n_panels = max(4, int(np.ceil(4.0 * span * max(nu_max, 1.0) / np.pi)))
    nodes, weights = np.polynomial.legendre.leggauss(12)
    edges = np.linspace(t0, t1, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = (0.5 * span / n_panels)
    s = mid + half * nodes[None, :]
    vals = f(s.ravel()).reshape(s.shape)
    return complex(half * np.sum(vals @ weights))


def _oracle_value(name: str, omega: float, theta: float, eps: float, tau: float) -> complex:
    a = 1.0 / eps**2
    b = 2.0 / eps**2
    if name == "sigma":
        f = lambda s: np.sin(omega * (tau - s)) / (tau * omega) * np.exp(1j * a * s)
        nu = a + omega
    elif name == "sigmadot":
        f = lambda s: np.cos(omega * (tau - s)) / tau * np.exp(1j * a * s)
        nu = a + omega
    elif name == "alpha_tau":
        f = lambda s: theta * np.sin(theta * (tau - s)) * np.exp(1j * b * s)
        nu = b + abs(theta)
    elif name == "kappa":
        # int_0^tau 2 alpha(s) ds after exchanging the order of integration
        f = lambda s: 2.0 * (tau - s) * theta * np.sin(theta * (tau - s)) * np.exp(1j * b * s)
        nu = b + abs(theta)
    elif name == "chi1":
        f = lambda s: 2.0 * theta * np.sin(theta * (tau - s)) * np.exp(1j * a * s) * np.cos(a * s)
        nu = b + abs(theta)
    elif name == "chi2":
        f = lambda s: 2.0 * theta * np.sin(theta * (tau - s)) * np.exp(1j * a * s) * np.sin(a * s)
        nu = b + abs(theta)
    elif name == "beta_tau":
        f = lambda s: theta**2 * np.cos(theta * (tau - s)) * np.exp(1j * b * s)
        nu = b + abs(theta)
    elif name == "rho":
        f = lambda s: 2.0 * (tau - s) * theta**2 * np.cos(theta * (tau - s)) * np.exp(1j * b * s)
        nu = b + abs(theta)
    elif name == "chidot1":
        f = lambda s: 2.0 * theta**2 * np.cos(theta * (tau - s)) * np.exp(1j * a * s) * np.cos(a * s)
        nu = b + abs(theta)
    elif name == "chidot2":
        f = lambda s: 2.0 * theta**2 * np.cos(theta * (tau - s)) * np.exp(1j * a * s) * np.sin(a * s)
        nu = b + abs(theta)
    else:
        raise GridError(f"unknown coefficient name {name!r}")
    return oscillatory_quadrature(f, 0.0, tau, nu)


def coefficient_oracle(
    name: str, l: int, eps: float, gamma: float, tau: float, grid: SpectralGrid
) -> complex:
    """Defining integral of one coefficient for mode l, by adaptive panels."""
    if name not in COEFFICIENT_NAMES:
        raise GridError(f"unknown coefficient name {name!r}")
    mu_l = np.pi * l / grid.L
    omega_l = float(np.sqrt(1.0 + eps**2 * mu_l**2) / eps**2)
    return _oracle_value(name, omega_l, mu_l / gamma, eps, tau)
