"""The benchmark initial-data families and their domain conventions.

Four problems, selected by id (short aliases in parentheses):

  * ex1_whole_space (ex1): localized data sech(x^2), e^{-x^2}/2, sin(x)e^{-x^2},
    sech(x^2)/sqrt(pi) on the expanding box [-2^(m0+3), 2^(m0+3)], gamma = 2 eps.
  * ex2_torus (ex2): trigonometric data on [-pi, pi], gamma = e*eps.
  * ex3_incompatible (ex3): the sech/exp pair with phi0 offset from the limit
    profile by a smooth compactly supported oscillatory bump rho, and phi1
    matched to the limit derivative; gamma = 2 eps.
  * sec1_compatible (sec1): same with rho removed - data that matches the
    Schroedinger limit exactly.

eps is always 2^(-m0).  Here sech(x^2) means 1/cosh(x^2).  The default grids
keep dx at 1/16 (ex1/ex3/sec1) and pi/128 (ex2); for ex3/sec1 the box is
max(64, 2^(m0+3)) so that layers traveling at speed 1/gamma = 2^(m0-1) stay
far from the boundary for t <= 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .limits import zdot_nls_initial
from .mti import KgzInitialData, KgzParams
from .spectral import GridError, SpectralGrid

PROBLEM_IDS = ("ex1_whole_space", "ex2_torus", "ex3_incompatible", "sec1_compatible")

_ALIASES = {
    "ex1": "ex1_whole_space",
    "ex2": "ex2_torus",
    "ex3": "ex3_incompatible",
    "sec1": "sec1_compatible",
}


def canonical_id(problem_id: str) -> str:
    pid = _ALIASES.get(problem_id, problem_id)
    if pid not in PROBLEM_IDS:
        raise GridError(f"unknown problem id {problem_id!r}")
    return pid


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    m0: int
    gamma_rule: str  # "2eps" | "e*eps" | "explicit:<value>"

    def params(self) -> KgzParams:
        eps = 2.0**-self.m0
        if self.gamma_rule == "2eps":
            gamma = 2.0 * eps
        elif self.gamma_rule == "e*eps":
            gamma = float(np.e) * eps
        elif self.gamma_rule.startswith("explicit:"):
            gamma = float(self.gamma_rule.split(":", 1)[1])
        else:
            raise GridError(f"unknown gamma rule {self.gamma_rule!r}")
        return KgzParams(epsilon=eps, gamma=gamma)


def default_gamma_rule(problem_id: str) -> str:
    return "e*eps" if canonical_id(problem_id) == "ex2_torus" else "2eps"


def domain_for(problem_id: str, m0: int) -> tuple[float, int]:
    """(L, default N) keeping dx at the benchmark values."""
    pid = canonical_id(problem_id)
    if pid == "ex2_torus":
        return float(np.pi), 256
    if m0 < 1:
        raise GridError(f"{pid} requires m0 >= 1 (keeps gamma = 2 eps <= 1), got {m0}")
    if pid == "ex1_whole_space":
        L = float(2 ** (m0 + 3))
    else:  # ex3 / sec1: box large enough for the t <= 1 layer excursion
        L = float(max(64, 2 ** (m0 + 3)))
    return L, int(32 * L)  # dx = 1/16


def smooth_step(x: np.ndarray) -> np.ndarray:
    """g(x) = f(x)/(f(x)+f(1-x)) with f(x) = e^{-1/x} on x > 0; C-infinity,
    g = 0 for x <= 0, g = 1 for x >= 1, and g(x) + g(1-x) = 1."""

    def f(u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)

    fx = f(x)
    return fx / (fx + f(1.0 - np.asarray(x)))


def incompatibility_bump(x: np.ndarray) -> np.ndarray:
    """rho(x): oscillatory bump supported in (-18, 18), |rho| <= 1."""
    x = np.asarray(x, dtype=np.float64)
    return (
        smooth_step((x + 18.0) / 10.0)
        * smooth_step((18.0 - x) / 9.0)
        * np.cos(2.0 * x + np.pi / 4.0)
    )


def _sech(x: np.ndarray) -> np.ndarray:
    # cosh overflows to inf for |x| > ~710; 1/inf = 0 is the right tail value
    with np.errstate(over="ignore"):
        return 1.0 / np.cosh(x)


def make_problem(
    problem_id: str,
    m0: int,
    gamma_rule: str | None = None,
    grid_override: SpectralGrid | None = None,
) -> tuple[KgzInitialData, KgzParams, SpectralGrid]:
    """Sample a benchmark problem on its rule-determined (or overridden) grid."""
    pid = canonical_id(problem_id)
    rule = gamma_rule if gamma_rule is not None else default_gamma_rule(pid)
    spec = ProblemSpec(id=pid, m0=m0, gamma_rule=rule)
    params = spec.params()
    if grid_override is not None:
        grid = grid_override
    else:
        L, N = domain_for(pid, m0)
        grid = SpectralGrid(L=L, N=N)
    x = grid.x

    if pid == "ex1_whole_space":
        psi0 = _sech(x**2)
        psi1 = 0.5 * np.exp(-(x**2))
        phi0 = np.sin(x) * np.exp(-(x**2))
        phi1 = _sech(x**2) / np.sqrt(np.pi)
    elif pid == "ex2_torus":
        psi0 = 2.0 * np.sin(x) / (2.0 - np.cos(x))
        psi1 = np.cos(x) ** 2
        phi0 = np.cos(x) / (2.0 - np.sin(x))
        phi1 = np.sin(x) * np.cos(2.0 * x) / (2.0 - np.cos(x))
    else:  # ex3_incompatible / sec1_compatible
        psi0 = _sech(x**2)
        psi1 = 0.5 * np.exp(-(x**2))
        phi0 = -0.5 * (psi0**2 + psi1**2)
        if pid == "ex3_incompatible":
            phi0 = phi0 + incompatibility_bump(x)
        z0 = 0.5 * (psi0 - 1j * psi1)
        phi1 = -4.0 * params.gamma * np.real(z0 * np.conj(zdot_nls_initial(z0, grid)))

    data = KgzInitialData(grid=grid, psi0=psi0, psi1=psi1, phi0=phi0, phi1=phi1)
    return data, params, grid
