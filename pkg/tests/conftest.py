import numpy as np
import pytest

from kgz.spectral import SpectralGrid


@pytest.fixture
def grid32() -> SpectralGrid:
    return SpectralGrid(L=np.pi, N=32)


@pytest.fixture
def grid64() -> SpectralGrid:
    return SpectralGrid(L=np.pi, N=64)


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_complex_field(grid: SpectralGrid, seed: int = 0) -> np.ndarray:
    g = rng(seed)
    return g.standard_normal(grid.N) + 1j * g.standard_normal(grid.N)


def random_real_field(grid: SpectralGrid, seed: int = 0) -> np.ndarray:
    return rng(seed).standard_normal(grid.N)


def dft_oracle(f: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """O(N^2) direct summation of the interpolation coefficients."""
    N = grid.N
    j = np.arange(N)
    ls = np.fft.fftfreq(N, d=1.0 / N)
    basis = np.exp(2j * np.pi * np.outer(ls, j) / N)
    return basis.conj() @ np.asarray(f) / N


def idft_oracle(c: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    N = grid.N
    j = np.arange(N)
    ls = np.fft.fftfreq(N, d=1.0 / N)
    basis = np.exp(2j * np.pi * np.outer(j, ls) / N)
    return basis @ np.asarray(c)
