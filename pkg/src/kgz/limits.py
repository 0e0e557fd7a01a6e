"""Limit models, eta convergence metrics, and the conserved energy.

Two Schroedinger limits of the system as eps < gamma -> 0:

  * nls:  2i z_t - z_xx - 2|z|^2 z = 0 with z(0) = (psi0 - i psi1)/2, the
    cubic limit; phi is approximated by -2|z|^2 + I_nls with the free wave
    I_nls started from (phi0 + 2|z0|^2, phi1/gamma) - first layer only.
  * op:   2i z_t - z_xx + (-2|z|^2 + I) z = 0, the semi-limit with the
    oscillatory potential; I is the full layer of module freewave, whose
    initial slope carries the derivative correction 2 Im(conj(z0) z0_xx).

Both are integrated by Lie-Trotter splitting: exact potential phase (using
the exact window integral of I for the op variant) followed by the exact
kinetic group.  Both subflows are L2 isometries, so ||z|| is conserved.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .freewave import FreeWaveData, freewave_at, freewave_init, window_integral_J
from .mti import KgzInitialData, KgzParams, _snapshot_steps, steps_for_horizon
from .spectral import (
    GridError,
    SpectralGrid,
    d2x,
    from_spectrum,
    l2_norm,
    realify,
    to_spectrum,
)

VARIANTS = ("nls", "op")


@dataclass(frozen=True)
class NlsState:
    grid: SpectralGrid
    params: KgzParams
    variant: str
    n: int
    tau: float
    z: np.ndarray
    fw: FreeWaveData  # I_nls (nls) or the full layer I (op); used to rebuild phi

    @property
    def t_n(self) -> float:
        return self.n * self.tau


def zdot_nls_initial(z0: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """z_t(0) of the cubic limit equation: -(i/2)(z0_xx + 2|z0|^2 z0)."""
    return -0.5j * (d2x(z0, grid) + 2.0 * np.abs(z0) ** 2 * z0)


def nls_init(
    data: KgzInitialData, params: KgzParams, variant: str, tau: float = 0.0
) -> NlsState:
    if variant not in VARIANTS:
        raise GridError(f"unknown limit-model variant {variant!r}")
    grid = data.grid
    z0 = 0.5 * (data.psi0 - 1j * data.psi1).astype(np.complex128)
    if variant == "op":
        fw = freewave_init(z0, data.phi0, data.phi1, params.gamma, grid)
    else:
        I0 = realify(data.phi0) + 2.0 * np.abs(z0) ** 2
        fw = FreeWaveData(
            grid=grid,
            gamma=params.gamma,
            I0_hat=to_spectrum(I0, grid),
            Idot0_hat=to_spectrum(realify(data.phi1) / params.gamma, grid),
        )
    return NlsState(grid=grid, params=params, variant=variant, n=0, tau=tau, z=z0, fw=fw)


def nls_step(state: NlsState, params: KgzParams, tau: float, grid: SpectralGrid) -> NlsState:
    """Lie-Trotter: potential phase (with J^n for the op variant), then kinetic."""
    z = state.z
    phase = -tau * np.abs(z) ** 2
    if state.variant == "op":
        phase = phase + 0.5 * window_integral_J(state.fw, state.n * tau, tau)
    z_mid = z * np.exp(1j * phase)
    z_new = from_spectrum(np.exp(0.5j * grid.mu**2 * tau) * to_spectrum(z_mid, grid), grid)
    return replace(state, n=state.n + 1, tau=tau, z=z_new)


def limit_reconstruct(state: NlsState) -> tuple[np.ndarray, np.ndarray]:
    """(psi, phi) of the limit model at t_n."""
    t_n = state.t_n
    e1 = complex(np.exp(1j * t_n / state.params.epsilon**2))
    psi = realify(e1 * state.z + np.conj(e1 * state.z))
    phi = -2.0 * np.abs(state.z) ** 2 + freewave_at(state.fw, t_n)
    return psi, realify(phi)


def solve_nls(
    data: KgzInitialData,
    params: KgzParams,
    variant: str,
    tau: float,
    T: float,
    snapshot_times=(),
):
    """Snapshots of the limit model; mirrors the shape of solve_mti output."""
    from .mti import Trajectory

    n_steps = steps_for_horizon(tau, T)
    snaps = _snapshot_steps(snapshot_times, tau, n_steps)
    state = nls_init(data, params, variant, tau)
    out = []
    if 0 in snaps:
        out.append((snaps[0], state))
    for _ in range(n_steps):
        state = nls_step(state, params, tau, data.grid)
        if state.n in snaps:
            out.append((snaps[state.n], state))
    return Trajectory(final=state, snapshots=out)


def eta_metrics(
    kgz_fields: tuple[np.ndarray, np.ndarray],
    limit_fields: tuple[np.ndarray, np.ndarray],
    grid: SpectralGrid,
) -> tuple[float, float]:
    """(eta_psi, eta_phi): discrete L2 distances between the two solutions."""
    psi_a, phi_a = kgz_fields
    psi_b, phi_b = limit_fields
    grid.check_field(psi_a), grid.check_field(psi_b)
    return (
        l2_norm(np.asarray(psi_a) - np.asarray(psi_b), grid),
        l2_norm(np.asarray(phi_a) - np.asarray(phi_b), grid),
    )


def kgz_energy(
    psi: np.ndarray,
    psidot: np.ndarray,
    phi: np.ndarray,
    phidot: np.ndarray,
    params: KgzParams,
    grid: SpectralGrid,
) -> float:
    """Conserved energy of the system.

    E = int eps^2 psi_t^2 + |psi_x|^2 + psi^2/eps^2
        + (gamma^2/2)|phivar_x|^2 + phi^2/2 + phi psi^2 dx,

    where phivar solves phivar_xx = phi_t.  On the torus the zero mode of
    phi_t has no inverse Laplacian; it is dropped, which shifts E by a
    constant in time (the mean of phi_t is conserved), so energy *drift*
    diagnostics are unaffected.
    """
    eps, gamma = params.epsilon, params.gamma
    psi = realify(psi)
    psidot = realify(psidot)
    phi = realify(phi)
    phidot = realify(phidot)
    psi_hat = to_spectrum(psi, grid)
    phid_hat = to_spectrum(phidot, grid)
    mu2 = grid.mu**2
    grad_psi_sq = 2.0 * grid.L * float(np.sum(mu2 * np.abs(psi_hat) ** 2))
    inv = np.zeros(grid.N)
    inv[1:] = 1.0 / mu2[1:]
    grad_phivar_sq = 2.0 * grid.L * float(np.sum(inv * np.abs(phid_hat) ** 2))
    pointwise = grid.dx * float(
        np.sum(eps**2 * psidot**2 + psi**2 / eps**2 + 0.5 * phi**2 + phi * psi**2)
    )
    return pointwise + grad_psi_sq + 0.5 * gamma**2 * grad_phivar_sq
