"""Deuflhard-type exponential integrator: the benchmark and reference solver.

Works directly on the physical unknowns (psi, psidot, phi, phidot).  The
linear Klein-Gordon/wave parts are propagated exactly per Fourier mode with
frequencies omega_l = sqrt(1+eps^2 mu_l^2)/eps^2 and theta_l = mu_l/gamma;
the nonlinear sources psi*phi and psi^2 enter through the trapezoidal rule.
The scheme is second order for fixed O(1) parameters but needs tau = O(eps^2)
to see the carrier oscillation, which is exactly why it serves as the
negative control for the multiscale integrator.

Reference-solution contract: a reference run uses a step tau_ref small
enough that halving it no longer moves the answer at the tolerance of
interest; the harness records that self-check next to every error it
reports.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .coeffs import omega_modes
from .mti import KgzInitialData, KgzParams, Trajectory, _snapshot_steps, steps_for_horizon
from .spectral import SpectralGrid, from_spectrum, realify, to_spectrum


@dataclass(frozen=True)
class EiState:
    grid: SpectralGrid
    params: KgzParams
    n: int
    tau: float
    psi: np.ndarray
    psidot: np.ndarray
    phi: np.ndarray
    phidot: np.ndarray

    @property
    def t_n(self) -> float:
        return self.n * self.tau


def ei_init(data: KgzInitialData, params: KgzParams, tau: float = 0.0) -> EiState:
    """psi_t(0) = psi1/eps^2 and phi_t(0) = phi1/gamma per the PDE data."""
    return EiState(
        grid=data.grid,
        params=params,
        n=0,
        tau=tau,
        psi=realify(data.psi0),
        psidot=realify(data.psi1) / params.epsilon**2,
        phi=realify(data.phi0),
        phidot=realify(data.phi1) / params.gamma,
    )


@dataclass(frozen=True)
class _EiFactors:
    """Per-mode trig factors reused across all steps of one run."""

    cos_w: np.ndarray
    sin_w: np.ndarray
    sin_w_over: np.ndarray
    cos_t: np.ndarray
    sin_t: np.ndarray
    sin_t_over: np.ndarray  # sin(theta tau)/theta, tau at l = 0
    omega: np.ndarray
    theta: np.ndarray


def _factors(grid: SpectralGrid, params: KgzParams, tau: float) -> _EiFactors:
    omega = omega_modes(grid, params.epsilon)
    theta = grid.mu / params.gamma
    return _EiFactors(
        cos_w=np.cos(omega * tau),
        sin_w=np.sin(omega * tau),
        sin_w_over=np.sin(omega * tau) / omega,
        cos_t=np.cos(theta * tau),
        sin_t=np.sin(theta * tau),
        sin_t_over=tau * np.sinc(theta * tau / np.pi),
        omega=omega,
        theta=theta,
    )


def _step_spectral(
    F: _EiFactors,
    eps2: float,
    tau: float,
    grid: SpectralGrid,
    psi_h: np.ndarray,
    psid_h: np.ndarray,
    phi_h: np.ndarray,
    phid_h: np.ndarray,
    pf_h: np.ndarray,
    p2_h: np.ndarray,
):
    """One update in spectral space; pf_h/p2_h are hat(psi*phi), hat(psi^2)."""
    N = grid.N
    psi1_h = F.cos_w * psi_h + F.sin_w_over * psid_h - (0.5 * tau / eps2) * F.sin_w_over * pf_h
    phi1_h = F.cos_t * phi_h + F.sin_t_over * phid_h - (0.5 * tau) * F.theta * F.sin_t * p2_h
    psi1 = np.fft.ifft(psi1_h).real * N
    phi1 = np.fft.ifft(phi1_h).real * N
    pf1_h = np.fft.fft(psi1 * phi1) / N
    p21_h = np.fft.fft(psi1 * psi1) / N
    psid1_h = (
        -F.omega * F.sin_w * psi_h
        + F.cos_w * psid_h
        - (0.5 * tau / eps2) * (F.cos_w * pf_h + pf1_h)
    )
    phid1_h = (
        -F.theta * F.sin_t * phi_h
        + F.cos_t * phid_h
        - 0.5 * tau * F.theta**2 * (F.cos_t * p2_h + p21_h)
    )
    return psi1_h, psid1_h, phi1_h, phid1_h, psi1, phi1, pf1_h, p21_h


def ei_step(state: EiState, params: KgzParams, tau: float, grid: SpectralGrid) -> EiState:
    """Single step; convenience wrapper around the spectral kernel."""
    F = _factors(grid, params, tau)
    psi_h = to_spectrum(state.psi, grid)
    psid_h = to_spectrum(state.psidot, grid)
    phi_h = to_spectrum(state.phi, grid)
    phid_h = to_spectrum(state.phidot, grid)
    pf_h = to_spectrum(realify(state.psi) * realify(state.phi), grid)
    p2_h = to_spectrum(realify(state.psi) ** 2, grid)
    psi1_h, psid1_h, phi1_h, phid1_h, psi1, phi1, _, _ = _step_spectral(
        F, params.epsilon**2, tau, grid, psi_h, psid_h, phi_h, phid_h, pf_h, p2_h
    )
    return replace(
        state,
        n=state.n + 1,
        tau=tau,
        psi=psi1,
        psidot=realify(from_spectrum(psid1_h, grid)),
        phi=phi1,
        phidot=realify(from_spectrum(phid1_h, grid)),
    )


def solve_ei(
    data: KgzInitialData,
    params: KgzParams,
    tau: float,
    T: float,
    snapshot_times=(),
    probe_index: int | None = None,
) -> Trajectory:
    """Run the exponential integrator; the hot loop stays in spectral space."""
    grid = data.grid
    n_steps = steps_for_horizon(tau, T)
    snaps = _snapshot_steps(snapshot_times, tau, n_steps)
    F = _factors(grid, params, tau)
    eps2 = params.epsilon**2
    N = grid.N

    state0 = ei_init(data, params, tau)
    psi, phi = state0.psi, state0.phi
    psi_h = np.fft.fft(psi) / N
    psid_h = np.fft.fft(state0.psidot) / N
    phi_h = np.fft.fft(phi) / N
    phid_h = np.fft.fft(state0.phidot) / N
    pf_h = np.fft.fft(psi * phi) / N
    p2_h = np.fft.fft(psi * psi) / N

    probe = ([], [], []) if probe_index is not None else None
    out = []

    def materialize(n: int) -> EiState:
        return EiState(
            grid=grid,
            params=params,
            n=n,
            tau=tau,
            psi=np.fft.ifft(psi_h).real * N,
            psidot=np.fft.ifft(psid_h).real * N,
            phi=np.fft.ifft(phi_h).real * N,
            phidot=np.fft.ifft(phid_h).real * N,
        )

    def record(n: int) -> None:
        if probe is not None:
            probe[0].append(n * tau)
            probe[1].append(psi[probe_index])
            probe[2].append(phi[probe_index])

    if 0 in snaps:
        out.append((snaps[0], materialize(0)))
    record(0)
    for n in range(n_steps):
        psi_h, psid_h, phi_h, phid_h, psi, phi, pf_h, p2_h = _step_spectral(
            F, eps2, tau, grid, psi_h, psid_h, phi_h, phid_h, pf_h, p2_h
        )
        record(n + 1)
        if n + 1 in snaps:
            out.append((snaps[n + 1], materialize(n + 1)))

    traj = Trajectory(final=materialize(n_steps), snapshots=out)
    if probe is not None:
        traj.probe_t = np.array(probe[0])
        traj.probe_psi = np.array(probe[1])
        traj.probe_phi = np.array(probe[2])
    return traj
