"""Periodic 1D Fourier collocation grid and spectral primitives.

All solvers in this package share the conventions set here: the domain is
[-L, L] with N equispaced nodes x_j = -L + j*(2L/N), and a field is
represented by its complex samples at the nodes.  Spectra are stored in FFT
layout for the mode indices l = 0, 1, ..., N/2-1, -N/2, ..., -1 with basis
functions exp(i*mu_l*(x+L)), mu_l = pi*l/L, so that

    f(x_j) = sum_l  c_l * exp(i*mu_l*(x_j+L)).

The unpaired Nyquist mode l = -N/2 is kept as-is; second derivatives use
-mu_l**2, which maps real fields to real fields regardless.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Configuration error: incompatible grid, field length, or parameters."""


@dataclass(frozen=True)
class SpectralGrid:
    """Collocation grid on [-L, L] with N nodes (N even, >= 4).

    Attributes:
        L: half-length of the periodic domain.
        N: number of collocation nodes / retained Fourier modes.
        dealias: when True, pointwise products are filtered by the 2/3 rule.
            Off by default; the scheme is reproduced without dealiasing.
    """

    L: float
    N: int
    dealias: bool = False
    x: np.ndarray = field(init=False, repr=False, compare=False)
    mu: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.L <= 0:
            raise GridError(f"domain half-length must be positive, got L={self.L}")
        if self.N % 2 != 0 or self.N < 4:
            raise GridError(f"mode count must be even and >= 4, got N={self.N}")
        dx = 2.0 * self.L / self.N
        object.__setattr__(self, "x", -self.L + dx * np.arange(self.N))
        # FFT-layout integer mode indices [0, 1, ..., N/2-1, -N/2, ..., -1]
        indices = np.fft.fftfreq(self.N, d=1.0 / self.N)
        object.__setattr__(self, "mu", (np.pi / self.L) * indices)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    def zeros(self) -> np.ndarray:
        return np.zeros(self.N, dtype=np.complex128)

    def dealias_mask(self) -> np.ndarray:
        """Boolean 2/3-rule mask in FFT layout (True = keep mode)."""
        cutoff = (2.0 / 3.0) * np.abs(self.mu).max()
        return np.abs(self.mu) <= cutoff

    def check_field(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != (self.N,):
            raise GridError(f"field length {f.shape} does not match grid N={self.N}")
        return f.astype(np.complex128, copy=False)


def to_spectrum(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Coefficients c_l of the trigonometric interpolant of f (FFT layout).

    With nodes x_j the basis exp(i*mu_l*(x_j+L)) equals exp(2*pi*i*j*l/N),
    so c = fft(f)/N reproduces f exactly at the nodes.  Cost O(N log N).
    """
    f = grid.check_field(f)
    return np.fft.fft(f) / grid.N


def from_spectrum(c: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Evaluate the interpolant sum_l c_l exp(i*mu_l*(x_j+L)) at the nodes."""
    c = grid.check_field(c)
    return np.fft.ifft(c) * grid.N


def d2x(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Spectral second derivative: mode l is multiplied by -mu_l**2."""
    c = to_spectrum(f, grid)
    return from_spectrum(-grid.mu**2 * c, grid)


def pointwise_product(f: np.ndarray, h: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Collocation (sample-wise) product, optionally 2/3-rule filtered."""
    f = grid.check_field(f)
    h = grid.check_field(h)
    p = f * h
    if grid.dealias:
        p = from_spectrum(np.where(grid.dealias_mask(), to_spectrum(p, grid), 0.0), grid)
    return p


def conj_spectrum(c: np.ndarray) -> np.ndarray:
    """Spectrum of conj(f) from the spectrum of f: conj(c)[-l], in FFT layout."""
    out = np.conj(c)
    out[1:] = out[:0:-1].copy()
    return out


def imag_residue(f: np.ndarray) -> float:
    """max|Im f| relative to max(1, max|f|); 0 for an exactly real field."""
    f = np.asarray(f)
    if not np.iscomplexobj(f):
        return 0.0
    scale = max(1.0, float(np.abs(f).max(initial=0.0)))
    return float(np.abs(f.imag).max(initial=0.0)) / scale


def is_real_field(f: np.ndarray, tol: float = 1e-9) -> bool:
    return imag_residue(f) < tol


def realify(f: np.ndarray) -> np.ndarray:
    """Drop the (spurious) imaginary part; used to re-symmetrize real unknowns."""
    return np.asarray(f).real.astype(np.float64)


def linf(f: np.ndarray) -> float:
    return float(np.abs(np.asarray(f)).max(initial=0.0))


def l2_norm(f: np.ndarray, grid: SpectralGrid) -> float:
    """Discrete L2 norm with trapezoid-exact quadrature weight 2L/N."""
    f = np.asarray(f)
    return float(np.sqrt(grid.dx * np.sum(np.abs(f) ** 2)))
