"""Exact propagation of the acoustic initial layer.

The layer I solves the free wave equation gamma^2 I_tt - I_xx = 0 with data

    I(x,0)   = phi0 + 2|z0|^2,
    I_t(x,0) = phi1/gamma + 2 Im(conj(z0) * z0_xx),

and evolves mode-wise as I_l(t) = cos(theta_l t) I_l(0) + sin(theta_l t)/theta_l I_l'(0)
with theta_l = mu_l/gamma.  Everything here is evaluated in closed form from
the t = 0 spectra (never step-recursed), including the window integral
J^n = int_0^tau I(., t_n + s) ds used by the z splitting step.  Zero-mode
limits are polynomial in t and are built into the product/sinc evaluation,
so no thresholded division appears anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import GridError, SpectralGrid, d2x, from_spectrum, realify, to_spectrum


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with the exact limit 1 at x = 0."""
    return np.sinc(np.asarray(x) / np.pi)


@dataclass(frozen=True)
class FreeWaveData:
    """Spectra of the layer at t = 0 plus the acoustic mode frequencies."""

    grid: SpectralGrid
    gamma: float
    I0_hat: np.ndarray
    Idot0_hat: np.ndarray

    @property
    def theta(self) -> np.ndarray:
        return self.grid.mu / self.gamma


def freewave_init(
    z0: np.ndarray, phi0: np.ndarray, phi1: np.ndarray, gamma: float, grid: SpectralGrid
) -> FreeWaveData:
    """Build the layer data from the physical initial fields."""
    if gamma <= 0:
        raise GridError(f"gamma must be positive, got {gamma}")
    z0 = grid.check_field(z0)
    I0 = realify(phi0) + 2.0 * np.abs(z0) ** 2
    Idot0 = realify(phi1) / gamma + 2.0 * np.imag(np.conj(z0) * d2x(z0, grid))
    return FreeWaveData(
        grid=grid,
        gamma=gamma,
        I0_hat=to_spectrum(I0, grid),
        Idot0_hat=to_spectrum(Idot0, grid),
    )


def freewave_at(fw: FreeWaveData, t: float, with_deriv: bool = False):
    """I(., t) as a real field; optionally also I_t(., t)."""
    th = fw.theta
    c = np.cos(th * t)
    s_over = t * _sinc(th * t)  # sin(theta*t)/theta, exact limit t at theta=0
    I_hat = c * fw.I0_hat + s_over * fw.Idot0_hat
    I = realify(from_spectrum(I_hat, fw.grid))
    if not with_deriv:
        return I
    Idot_hat = -th * np.sin(th * t) * fw.I0_hat + c * fw.Idot0_hat
    return I, realify(from_spectrum(Idot_hat, fw.grid))


def window_integral_J(fw: FreeWaveData, t_n: float, tau: float) -> np.ndarray:
    """int_0^tau I(., t_n + s) ds, exact per mode.

    Mode-wise, with t_mid = t_n + tau/2:

        [sin(theta t_{n+1}) - sin(theta t_n)]/theta
            = tau cos(theta t_mid) sinc(theta tau/2),
        [cos(theta t_n) - cos(theta t_{n+1})]/theta^2
            = tau t_mid sinc(theta t_mid) sinc(theta tau/2),

    whose theta -> 0 limits (tau and (t_{n+1}^2 - t_n^2)/2) are automatic.
    """
    if tau <= 0:
        raise GridError(f"window length must be positive, got tau={tau}")
    th = fw.theta
    t_mid = t_n + 0.5 * tau
    half = _sinc(0.5 * th * tau)
    w0 = tau * np.cos(th * t_mid) * half
    w1 = tau * t_mid * _sinc(th * t_mid) * half
    J_hat = w0 * fw.I0_hat + w1 * fw.Idot0_hat
    return realify(from_spectrum(J_hat, fw.grid))
