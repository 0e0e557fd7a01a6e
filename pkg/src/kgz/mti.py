"""Multiscale time integrator for the Klein-Gordon-Zakharov system.

The fields (psi, phi) of

    eps^2 psi_tt - psi_xx + psi/eps^2 + psi*phi = 0,
    gamma^2 phi_tt - phi_xx - (psi^2)_xx   = 0,

are decomposed as

    psi = e^{it/eps^2} z + e^{-it/eps^2} conj(z) + r,
    phi = -2|z|^2 + I + q,

where z is the slow envelope, r the carrier remainder, I the exact free-wave
initial layer (module freewave) and q the acoustic remainder.  One step
advances (z, q, qdot, r, rdot) through, in order: a Lie-Trotter split step
for z (exact potential phase with the window integral J^n, then the exact
kinetic group e^{i mu^2 tau/2}); the trigonometric update for q with the
oscillatory weights alpha/kappa/chi of module coeffs; a fresh envelope
derivative zdot from the z equation; the trigonometric update for r with
sigma; qdot with beta/rho/chidot; and rdot with sigmadot.  Every carrier
phase e^{i t_n/eps^2} is computed from t_n = n*tau with a single rounding.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .coeffs import MtiCoefficients, build_coefficients
from .freewave import FreeWaveData, freewave_at, freewave_init, window_integral_J
from .spectral import (
    GridError,
    SpectralGrid,
    conj_spectrum,
    d2x,
    from_spectrum,
    is_real_field,
    realify,
    to_spectrum,
)


@dataclass(frozen=True)
class KgzParams:
    """The two small parameters: eps (plasma period) and gamma (1/sound speed)."""

    epsilon: float
    gamma: float

    def __post_init__(self) -> None:
        if not 0 < self.epsilon <= 1:
            raise GridError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.gamma <= 0:
            raise GridError(f"gamma must be positive, got {self.gamma}")
        if self.epsilon >= self.gamma:
            warnings.warn(
                f"epsilon={self.epsilon} >= gamma={self.gamma}: outside the "
                "scheme's target regime 0 < eps < gamma",
                stacklevel=2,
            )
        # gamma > 1 occurs for the torus example's gamma = e*eps rule at
        # eps = 1/2; the scheme itself only needs gamma > 0.


@dataclass(frozen=True)
class KgzInitialData:
    """Real initial fields (psi0, psi1, phi0, phi1) on a common grid.

    The PDE initial slopes are psi_t(0) = psi1/eps^2 and phi_t(0) = phi1/gamma.
    """

    grid: SpectralGrid
    psi0: np.ndarray
    psi1: np.ndarray
    phi0: np.ndarray
    phi1: np.ndarray

    def __post_init__(self) -> None:
        for name in ("psi0", "psi1", "phi0", "phi1"):
            f = getattr(self, name)
            self.grid.check_field(f)
            if not is_real_field(f):
                raise GridError(f"initial field {name} must be real-valued")


@dataclass(frozen=True)
class MtiState:
    """Decomposed unknowns at time level n (t_n = n*tau)."""

    grid: SpectralGrid
    params: KgzParams
    n: int
    tau: float
    z: np.ndarray
    zdot: np.ndarray  # cached envelope derivative at t_n
    r: np.ndarray
    rdot: np.ndarray
    q: np.ndarray
    qdot: np.ndarray
    fw: FreeWaveData

    @property
    def t_n(self) -> float:
        return self.n * self.tau


def _envelope_derivative(
    z: np.ndarray, q: np.ndarray, I: np.ndarray, grid: SpectralGrid
) -> np.ndarray:
    """zdot = (i/2)[-z_xx + (-2|z|^2 + q + I) z]."""
    return 0.5j * (-d2x(z, grid) + (-2.0 * np.abs(z) ** 2 + q + I) * z)


def decompose_initial(
    data: KgzInitialData, params: KgzParams, tau: float = 0.0
) -> MtiState:
    """Multiscale initial state: z = (psi0 - i psi1)/2, r = q = qdot = 0,
    rdot = -2 Re zdot(0), layer data from the free-wave slices."""
    grid = data.grid
    z0 = 0.5 * (data.psi0 - 1j * data.psi1).astype(np.complex128)
    fw = freewave_init(z0, data.phi0, data.phi1, params.gamma, grid)
    I0 = freewave_at(fw, 0.0)
    zdot0 = _envelope_derivative(z0, np.zeros(grid.N), I0, grid)
    return MtiState(
        grid=grid,
        params=params,
        n=0,
        tau=tau,
        z=z0,
        zdot=zdot0,
        r=np.zeros(grid.N),
        rdot=-2.0 * np.real(zdot0),
        q=np.zeros(grid.N),
        qdot=np.zeros(grid.N),
        fw=fw,
    )


def mti_step(state: MtiState, C: MtiCoefficients) -> MtiState:
    """One step t_n -> t_n + tau of the multiscale integrator."""
    grid = state.grid
    if C.grid is not grid and (C.grid.N != grid.N or C.grid.L != grid.L):
        raise GridError("coefficient table was built for a different grid")
    if C.eps != state.params.epsilon or C.gamma != state.params.gamma:
        raise GridError("coefficient table was built for different parameters")
    tau, eps = C.tau, C.eps
    t_n = state.n * tau
    e1 = complex(np.exp(1j * t_n / eps**2))
    e2 = e1 * e1
    z, zdot, r, rdot, q, qdot = state.z, state.zdot, state.r, state.rdot, state.q, state.qdot

    I_new = freewave_at(state.fw, t_n + tau)
    J = window_integral_J(state.fw, t_n, tau)

    # z: exact potential phase, then the exact kinetic group
    phase = 0.5 * (-2.0 * tau * np.abs(z) ** 2 + tau * q + J)
    z_new_hat = C.kinetic_phase * np.fft.fft(z * np.exp(1j * phase)) / grid.N
    z_new = from_spectrum(z_new_hat, grid)

    # q: trigonometric update with the oscillatory source A^n
    q_hat = to_spectrum(q, grid)
    qdot_hat = to_spectrum(qdot, grid)
    r_hat = to_spectrum(r, grid)
    rdot_hat = to_spectrum(rdot, grid)
    r_p = realify(from_spectrum(rdot_hat / C.omega, grid))
    h_z2 = to_spectrum(z_new * z_new, grid)
    h_zzdot = to_spectrum(z * zdot, grid)
    h_zr = to_spectrum(z * r, grid)
    h_zrp = to_spectrum(z * r_p, grid)
    h_z2_c = conj_spectrum(h_z2)
    h_zzdot_c = conj_spectrum(h_zzdot)
    h_zr_c = conj_spectrum(h_zr)
    h_zrp_c = conj_spectrum(h_zrp)
    A = (
        e2 * (C.alpha_tau * h_z2 - C.kappa * h_zzdot)
        + np.conj(e2) * (np.conj(C.alpha_tau) * h_z2_c - np.conj(C.kappa) * h_zzdot_c)
        + e1 * (C.chi1 * h_zr + C.chi2 * h_zrp)
        + np.conj(e1) * (np.conj(C.chi1) * h_zr_c + np.conj(C.chi2) * h_zrp_c)
    )
    q_new_hat = C.cos_theta_tau * q_hat + C.sin_theta_tau_over * qdot_hat - A
    q_new = realify(from_spectrum(q_new_hat, grid))

    # fresh envelope derivative at t_{n+1}
    lap_z_new = from_spectrum(-grid.mu**2 * z_new_hat, grid)
    zdot_new = 0.5j * (-lap_z_new + (-2.0 * np.abs(z_new) ** 2 + q_new + I_new) * z_new)

    # r: trigonometric update driven by the zdot increment
    dzh = to_spectrum(zdot_new - zdot, grid)
    dzh_c = conj_spectrum(dzh)
    r_new_hat = (
        C.cos_omega_tau * r_hat
        + C.sin_omega_tau_over * rdot_hat
        - e1 * C.sigma * dzh
        - np.conj(e1) * np.conj(C.sigma) * dzh_c
    )
    r_new = realify(from_spectrum(r_new_hat, grid))

    # qdot: with the telescoping source g^n and the r^2 rectangle term
    g = 4.0 * np.real(np.conj(z_new) * zdot_new - np.conj(z) * zdot)
    B = (
        e2 * (C.beta_tau * h_z2 - C.rho * h_zzdot)
        + np.conj(e2) * (np.conj(C.beta_tau) * h_z2_c - np.conj(C.rho) * h_zzdot_c)
        + e1 * (C.chidot1 * h_zr + C.chidot2 * h_zrp)
        + np.conj(e1) * (np.conj(C.chidot1) * h_zr_c + np.conj(C.chidot2) * h_zrp_c)
    )
    qdot_new_hat = (
        -C.theta * C.sin_theta_tau * q_hat
        + C.cos_theta_tau * qdot_hat
        + to_spectrum(g, grid)
        - C.tau_theta2_cos_theta_tau * to_spectrum(r * r, grid)
        - B
    )
    qdot_new = realify(from_spectrum(qdot_new_hat, grid))

    # rdot: needs f^{n+1} = (-2|z|^2 + q + I) r at the new level
    f_new = (-2.0 * np.abs(z_new) ** 2 + q_new + I_new) * r_new
    rdot_new_hat = (
        -C.omega * C.sin_omega_tau * r_hat
        + C.cos_omega_tau * rdot_hat
        - (tau / eps**2) * to_spectrum(f_new, grid)
        - e1 * C.sigmadot * dzh
        - np.conj(e1) * np.conj(C.sigmadot) * dzh_c
    )
    rdot_new = realify(from_spectrum(rdot_new_hat, grid))

    return replace(
        state,
        n=state.n + 1,
        z=z_new,
        zdot=zdot_new,
        r=r_new,
        rdot=rdot_new,
        q=q_new,
        qdot=qdot_new,
    )


def reconstruct(state: MtiState) -> tuple[np.ndarray, np.ndarray]:
    """(psi, phi) at t_n from the decomposition."""
    t_n = state.t_n
    e1 = complex(np.exp(1j * t_n / state.params.epsilon**2))
    psi = realify(e1 * state.z + np.conj(e1 * state.z) + state.r)
    phi = -2.0 * np.abs(state.z) ** 2 + freewave_at(state.fw, t_n) + state.q
    return psi, realify(phi)


def reconstruct_derivatives(state: MtiState) -> tuple[np.ndarray, np.ndarray]:
    """(psi_t, phi_t) at t_n; needed by the energy functional."""
    eps = state.params.epsilon
    t_n = state.t_n
    e1 = complex(np.exp(1j * t_n / eps**2))
    w = e1 * (state.zdot + 1j * state.z / eps**2)
    psidot = realify(w + np.conj(w) + state.rdot)
    _, Idot = freewave_at(state.fw, t_n, with_deriv=True)
    phidot = -4.0 * np.real(np.conj(state.z) * state.zdot) + Idot + state.qdot
    return psidot, realify(phidot)


def steps_for_horizon(tau: float, T: float) -> int:
    """Number of steps; tau must divide T up to rounding slack."""
    if tau <= 0 or T < 0:
        raise GridError(f"invalid horizon: tau={tau}, T={T}")
    n = int(round(T / tau)) if T > 0 else 0
    if abs(n * tau - T) > 1e-9 * max(T, tau):
        raise GridError(f"tau={tau} does not divide T={T}")
    return n


def _snapshot_steps(snapshot_times, tau: float, n_steps: int) -> dict[int, float]:
    table: dict[int, float] = {}
    for t in snapshot_times:
        k = int(round(t / tau))
        if abs(k * tau - t) > 1e-9 * max(abs(t), tau) or not 0 <= k <= n_steps:
            raise GridError(f"snapshot time {t} is not a step multiple within [0, T]")
        table[k] = t
    return table


@dataclass
class Trajectory:
    """Solver output: final state plus any requested snapshots/probe series."""

    final: object
    snapshots: list  # (t, state) pairs at requested times
    probe_t: np.ndarray | None = None
    probe_psi: np.ndarray | None = None
    probe_phi: np.ndarray | None = None


def solve_mti(
    data: KgzInitialData,
    params: KgzParams,
    tau: float,
    T: float,
    snapshot_times=(),
    probe_index: int | None = None,
    coefficients: MtiCoefficients | None = None,
) -> Trajectory:
    """Run the integrator to T = n*tau, collecting snapshots along the way."""
    n_steps = steps_for_horizon(tau, T)
    snaps = _snapshot_steps(snapshot_times, tau, n_steps)
    C = coefficients
    if C is None and n_steps > 0:
        C = build_coefficients(data.grid, params.epsilon, params.gamma, tau)
    state = decompose_initial(data, params, tau)
    probe = ([], [], []) if probe_index is not None else None

    def record(st: MtiState) -> None:
        if probe is not None:
            psi, phi = reconstruct(st)
            probe[0].append(st.t_n)
            probe[1].append(psi[probe_index])
            probe[2].append(phi[probe_index])

    out = []
    if state.n in snaps:
        out.append((snaps[state.n], state))
    record(state)
    for _ in range(n_steps):
        state = mti_step(state, C)
        record(state)
        if state.n in snaps:
            out.append((snaps[state.n], state))
    traj = Trajectory(final=state, snapshots=out)
    if probe is not None:
        traj.probe_t = np.array(probe[0])
        traj.probe_psi = np.array(probe[1])
        traj.probe_phi = np.array(probe[2])
    return traj
