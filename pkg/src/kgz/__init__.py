"""Uniformly accurate multiscale spectral solvers for the
Klein-Gordon-Zakharov system with small plasma-period and sound-speed
parameters, plus the benchmark exponential integrator, the Schroedinger
limit models, and an experiment harness."""

from .coeffs import MtiCoefficients, build_coefficients, coefficient_oracle
from .ei import EiState, ei_init, ei_step, solve_ei
from .freewave import FreeWaveData, freewave_at, freewave_init, window_integral_J
from .limits import NlsState, eta_metrics, kgz_energy, limit_reconstruct, nls_init, nls_step, solve_nls
from .mti import (
    KgzInitialData,
    KgzParams,
    MtiState,
    decompose_initial,
    mti_step,
    reconstruct,
    reconstruct_derivatives,
    solve_mti,
)
from .problems import domain_for, make_problem
from .spectral import SpectralGrid, d2x, from_spectrum, pointwise_product, to_spectrum

__version__ = "0.1.0"
