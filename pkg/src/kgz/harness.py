"""Experiment orchestration and CSV persistence.

Each experiment writes one (or two) RFC-4180 CSV files whose header names
exactly the record fields used, next to a `<name>.meta.json` sidecar holding
the resolved configuration, schema version, reference self-checks and wall
times.  Data files contain no timestamps or timings, so a repeated run is
byte-identical; wall times live only in the sidecar.

Reference policy: errors are measured against the exponential integrator run
at ref_tau (default min(1e-6, eps^2/20), the meshing constraint of the
benchmark scheme).  When self-checking is on, the reference is re-run at
ref_tau/2 and the difference is stored per sweep point; rows whose reported
error is within 100x of the self-check are flagged UNRELIABLE.

Sweep cells are independent trajectories; with threads > 1 they run in a
process pool, and rows are always assembled in (epsilon, tau, N) order so
the output does not depend on completion order.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .coeffs import COEFFICIENT_NAMES, build_coefficients, coefficient_oracle
from .ei import solve_ei
from .limits import eta_metrics, kgz_energy, limit_reconstruct, solve_nls
from .mti import (
    decompose_initial,
    reconstruct,
    reconstruct_derivatives,
    solve_mti,
    steps_for_horizon,
)
from .problems import canonical_id, domain_for, make_problem
from .spectral import GridError, SpectralGrid, linf

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "accuracy-time",
    "accuracy-space",
    "limit-rates",
    "energy",
    "super-resolution",
    "solve",
    "coeffs-dump",
)

ERROR_COLUMNS = dict(
    accuracy_time=["epsilon", "gamma", "tau", "N", "T", "err_psi_linf", "err_phi_linf", "err_total"],
    accuracy_space=["epsilon", "gamma", "tau", "N", "T", "err_psi_linf", "err_phi_linf", "err_total"],
    limit_rates=["epsilon", "gamma", "tau", "N", "T", "eta_nls_psi", "eta_nls_phi", "eta_op_psi", "eta_op_phi"],
    energy=["epsilon", "gamma", "tau", "N", "T", "energy_rel_err"],
    super_resolution=["epsilon", "gamma", "tau", "N", "T", "err_psi_linf", "err_phi_linf", "err_total"],
)


@dataclass
class RunConfig:
    experiment: str
    problem: str = "ex2"
    m0: list[int] = field(default_factory=lambda: [3])
    gamma_rule: str | None = None
    tau: list[float] = field(default_factory=lambda: [1e-3])
    N: list[int] = field(default_factory=list)
    T: float = 0.5
    solver: str = "mti"
    ref_solver: str = "ei"
    ref_tau: float | None = None
    out: str = "."
    snapshots: list[float] = field(default_factory=list)
    probe_x: float | None = None
    dealias: bool = False
    threads: int = 1
    self_check: bool = True

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise GridError(f"unknown experiment {self.experiment!r}")
        canonical_id(self.problem)
        if self.solver not in ("mti", "ei"):
            raise GridError(f"unknown solver {self.solver!r}")
        if self.ref_solver != "ei":
            raise GridError("only the exponential integrator is a valid reference solver")
        if not self.m0:
            raise GridError("at least one m0 value is required")
        if self.experiment in ("accuracy-time", "accuracy-space", "energy", "super-resolution", "limit-rates"):
            for tau in self.tau:
                steps_for_horizon(tau, self.T)
        if self.experiment in ("accuracy-time", "super-resolution") and self.ref_tau is not None:
            if self.ref_tau > min(self.tau) / 100.0:
                raise GridError(
                    f"ref_tau={self.ref_tau} too coarse: must be <= min(tau)/100 = {min(self.tau) / 100.0}"
                )


def resolved_ref_tau(cfg: RunConfig, epsilon: float) -> float:
    if cfg.ref_tau is not None:
        return cfg.ref_tau
    return min(1e-6, epsilon**2 / 20.0)


def _problem_grid(cfg: RunConfig, m0: int) -> SpectralGrid | None:
    """Override grid from cfg.N (single value) for non-space experiments."""
    if cfg.experiment != "accuracy-space" and cfg.N:
        L, _ = domain_for(cfg.problem, m0)
        return SpectralGrid(L=L, N=cfg.N[0], dealias=cfg.dealias)
    if cfg.dealias:
        L, N = domain_for(cfg.problem, m0)
        return SpectralGrid(L=L, N=N, dealias=True)
    return None


def _solve_fields(solver, data, params, tau, T):
    if solver == "mti":
        return reconstruct(solve_mti(data, params, tau, T).final)
    st = solve_ei(data, params, tau, T).final
    return st.psi, st.phi


def _max_norm_errors(got, ref):
    e_psi = linf(got[0] - ref[0])
    e_phi = linf(got[1] - ref[1])
    return e_psi, e_phi, e_psi + e_phi


# ---------------------------------------------------------------------------
# accuracy-time


@dataclass(frozen=True)
class _TimeCell:
    cfg: RunConfig
    m0: int


def _run_time_cell(cell: _TimeCell):
    cfg, m0 = cell.cfg, cell.m0
    data, params, grid = make_problem(cfg.problem, m0, cfg.gamma_rule, _problem_grid(cfg, m0))
    ref_tau = resolved_ref_tau(cfg, params.epsilon)
    t0 = time.perf_counter()
    ref = _solve_fields("ei", data, params, ref_tau, cfg.T)
    self_check = None
    if cfg.self_check:
        ref_half = _solve_fields("ei", data, params, ref_tau / 2.0, cfg.T)
        self_check = _max_norm_errors(ref, ref_half)[2]
    rows = []
    for tau in sorted(cfg.tau):
        got = _solve_fields(cfg.solver, data, params, tau, cfg.T)
        e_psi, e_phi, e_tot = _max_norm_errors(got, ref)
        rows.append(
            dict(
                epsilon=params.epsilon,
                gamma=params.gamma,
                tau=tau,
                N=grid.N,
                T=cfg.T,
                err_psi_linf=e_psi,
                err_phi_linf=e_phi,
                err_total=e_tot,
            )
        )
    meta = dict(
        epsilon=params.epsilon,
        ref_tau=ref_tau,
        ref_self_check=self_check,
        wall_time_s=time.perf_counter() - t0,
    )
    return rows, meta


def run_accuracy_time(cfg: RunConfig):
    cfg.validate()
    cells = [_TimeCell(cfg, m0) for m0 in sorted(cfg.m0)]
    results = _pool_map(_run_time_cell, cells, cfg.threads)
    rows, metas = [], []
    for cell_rows, meta in results:
        rows.extend(cell_rows)
        metas.append(meta)
    rows.sort(key=lambda r: (r["epsilon"], r["tau"], r["N"]))
    flagged = _flag_unreliable(rows, metas)
    _write_experiment(cfg, "accuracy_time", rows, dict(reference_checks=metas, unreliable_rows=flagged))
    return rows


def _flag_unreliable(rows, metas):
    """Row indices whose reference self-check exceeds 1% of the error."""
    checks = {m["epsilon"]: m.get("ref_self_check") for m in metas}
    flagged = []
    for i, r in enumerate(rows):
        c = checks.get(r["epsilon"])
        if c is not None and "err_total" in r and c >= 0.01 * max(r["err_total"], 1e-300):
            flagged.append(i)
    return flagged


# ---------------------------------------------------------------------------
# accuracy-space


def run_accuracy_space(cfg: RunConfig):
    cfg.validate()
    if not cfg.N:
        raise GridError("accuracy-space needs an N list")
    Ns = sorted(cfg.N)
    for N in Ns:
        if N & (N - 1):
            raise GridError(f"N values must be powers of two (nested grids), got {N}")
    tau = min(cfg.tau)
    N_ref = 2 * Ns[-1]
    rows, metas = [], []
    for m0 in sorted(cfg.m0):
        L, _ = domain_for(cfg.problem, m0)
        t0 = time.perf_counter()
        data, params, grid_ref = make_problem(
            cfg.problem, m0, cfg.gamma_rule, SpectralGrid(L=L, N=N_ref, dealias=cfg.dealias)
        )
        # same solver and same tau on the fine grid: the spatial error isolates
        ref = _solve_fields(cfg.solver, data, params, tau, cfg.T)
        for N in Ns:
            dN, pN, gN = make_problem(cfg.problem, m0, cfg.gamma_rule, SpectralGrid(L=L, N=N, dealias=cfg.dealias))
            got = _solve_fields(cfg.solver, dN, pN, tau, cfg.T)
            stride = N_ref // N
            e_psi = linf(got[0] - ref[0][::stride])
            e_phi = linf(got[1] - ref[1][::stride])
            rows.append(
                dict(
                    epsilon=params.epsilon,
                    gamma=params.gamma,
                    tau=tau,
                    N=N,
                    T=cfg.T,
                    err_psi_linf=e_psi,
                    err_phi_linf=e_phi,
                    err_total=e_psi + e_phi,
                )
            )
        metas.append(dict(epsilon=params.epsilon, N_ref=N_ref, wall_time_s=time.perf_counter() - t0))
    rows.sort(key=lambda r: (r["epsilon"], r["tau"], r["N"]))
    _write_experiment(cfg, "accuracy_space", rows, dict(reference_checks=metas))
    return rows


# ---------------------------------------------------------------------------
# limit-rates


def _eta_sample_times(cfg: RunConfig):
    if cfg.snapshots:
        return sorted(cfg.snapshots)
    return [round(0.1 * k, 12) for k in range(1, int(round(cfg.T / 0.1)) + 1)]


@dataclass(frozen=True)
class _EtaCell:
    cfg: RunConfig
    m0: int


def _run_eta_cell(cell: _EtaCell):
    cfg, m0 = cell.cfg, cell.m0
    data, params, grid = make_problem(cfg.problem, m0, cfg.gamma_rule, _problem_grid(cfg, m0))
    tau = min(cfg.tau)
    times = _eta_sample_times(cfg)
    t0 = time.perf_counter()
    kgz = solve_mti(data, params, tau, cfg.T, snapshot_times=times)
    nls = solve_nls(data, params, "nls", tau, cfg.T, snapshot_times=times)
    op = solve_nls(data, params, "op", tau, cfg.T, snapshot_times=times)
    eps = params.epsilon
    rows = []
    for (t, sk), (_, sn), (_, so) in zip(kgz.snapshots, nls.snapshots, op.snapshots):
        fields = reconstruct(sk)
        nls_psi, nls_phi = eta_metrics(fields, limit_reconstruct(sn), grid)
        op_psi, op_phi = eta_metrics(fields, limit_reconstruct(so), grid)
        rows.append(
            dict(
                epsilon=eps,
                gamma=params.gamma,
                tau=tau,
                N=grid.N,
                T=t,
                eta_nls_psi=nls_psi / eps,
                eta_nls_phi=nls_phi / eps,
                eta_op_psi=op_psi / eps**2,
                eta_op_phi=op_phi / eps,
            )
        )
    return rows, dict(epsilon=eps, wall_time_s=time.perf_counter() - t0)


def run_limit_rates(cfg: RunConfig):
    cfg.validate()
    results = _pool_map(_run_eta_cell, [_EtaCell(cfg, m0) for m0 in sorted(cfg.m0)], cfg.threads)
    rows, metas = [], []
    for cell_rows, meta in results:
        rows.extend(cell_rows)
        metas.append(meta)
    rows.sort(key=lambda r: (r["epsilon"], r["tau"], r["N"], r["T"]))
    notes = dict(
        scaling="eta_nls_psi and eta_nls_phi are divided by epsilon; "
        "eta_op_psi by epsilon^2; eta_op_phi by epsilon",
        reference_checks=metas,
    )
    _write_experiment(cfg, "limit_rates", rows, notes)
    return rows


# ---------------------------------------------------------------------------
# energy


def run_energy(cfg: RunConfig):
    cfg.validate()
    if cfg.solver != "mti":
        raise GridError("the energy experiment tracks the multiscale solver")
    rows, metas = [], []
    degenerate = []
    for m0 in sorted(cfg.m0):
        data, params, grid = make_problem(cfg.problem, m0, cfg.gamma_rule, _problem_grid(cfg, m0))
        for tau in sorted(cfg.tau):
            t0 = time.perf_counter()
            times = cfg.snapshots or [round(k * cfg.T / 20, 12) for k in range(1, 21)]
            times = [t for t in times if abs(round(t / tau) * tau - t) < 1e-9 * max(t, tau)]
            st0 = decompose_initial(data, params, tau)
            psi0, phi0 = reconstruct(st0)
            psid0, phid0 = reconstruct_derivatives(st0)
            E0 = kgz_energy(psi0, psid0, phi0, phid0, params, grid)
            tr = solve_mti(data, params, tau, cfg.T, snapshot_times=times)
            is_degenerate = E0 == 0.0
            for t, s in tr.snapshots:
                psi, phi = reconstruct(s)
                psid, phid = reconstruct_derivatives(s)
                E = kgz_energy(psi, psid, phi, phid, params, grid)
                err = abs(E - E0) if is_degenerate else abs(E - E0) / abs(E0)
                rows.append(
                    dict(epsilon=params.epsilon, gamma=params.gamma, tau=tau, N=grid.N, T=t, energy_rel_err=err)
                )
            if is_degenerate:
                degenerate.append(dict(epsilon=params.epsilon, tau=tau, note="E0 = 0: absolute error reported"))
            metas.append(
                dict(epsilon=params.epsilon, tau=tau, E0=E0, wall_time_s=time.perf_counter() - t0)
            )
    rows.sort(key=lambda r: (r["epsilon"], r["tau"], r["N"], r["T"]))
    _write_experiment(cfg, "energy", rows, dict(reference_checks=metas, degenerate=degenerate))
    return rows


# ---------------------------------------------------------------------------
# super-resolution (the negative control of the benchmark integrator)


def run_super_resolution(cfg: RunConfig):
    cfg.validate()
    tau = max(cfg.tau)
    out = {"mti": [], "ei": []}
    metas = []
    for m0 in sorted(cfg.m0):
        data, params, grid = make_problem(cfg.problem, m0, cfg.gamma_rule, _problem_grid(cfg, m0))
        ref_tau = resolved_ref_tau(cfg, params.epsilon)
        t0 = time.perf_counter()
        ref = _solve_fields("ei", data, params, ref_tau, cfg.T)
        self_check = None
        if cfg.self_check:
            ref_half = _solve_fields("ei", data, params, ref_tau / 2.0, cfg.T)
            self_check = _max_norm_errors(ref, ref_half)[2]
        for solver in ("mti", "ei"):
            got = _solve_fields(solver, data, params, tau, cfg.T)
            e_psi, e_phi, e_tot = _max_norm_errors(got, ref)
            out[solver].append(
                dict(
                    epsilon=params.epsilon,
                    gamma=params.gamma,
                    tau=tau,
                    N=grid.N,
                    T=cfg.T,
                    err_psi_linf=e_psi,
                    err_phi_linf=e_phi,
                    err_total=e_tot,
                )
            )
        metas.append(
            dict(epsilon=params.epsilon, ref_tau=ref_tau, ref_self_check=self_check, wall_time_s=time.perf_counter() - t0)
        )
    for solver, rows in out.items():
        rows.sort(key=lambda r: (r["epsilon"], r["tau"], r["N"]))
        flagged = _flag_unreliable(rows, metas)
        _write_experiment(
            cfg,
            "super_resolution",
            rows,
            dict(reference_checks=metas, unreliable_rows=flagged, solver=solver),
            stem=f"super_resolution_{solver}",
        )
    return out


# ---------------------------------------------------------------------------
# solve: snapshots and probe series


def run_solve(cfg: RunConfig):
    cfg.validate()
    m0 = cfg.m0[0]
    data, params, grid = make_problem(cfg.problem, m0, cfg.gamma_rule, _problem_grid(cfg, m0))
    tau = min(cfg.tau)
    times = sorted(set(cfg.snapshots or [cfg.T]))
    probe_index = None
    if cfg.probe_x is not None:
        probe_index = int(np.argmin(np.abs(grid.x - cfg.probe_x)))
    t0 = time.perf_counter()
    os.makedirs(cfg.out, exist_ok=True)
    written = []
    if cfg.solver == "mti":
        tr = solve_mti(data, params, tau, cfg.T, snapshot_times=times, probe_index=probe_index)
        from .freewave import freewave_at

        for t, s in tr.snapshots:
            psi, phi = reconstruct(s)
            I = freewave_at(s.fw, s.t_n)
            cols = dict(
                x=grid.x, psi=psi, phi=phi, z_re=s.z.real, z_im=s.z.imag, r=s.r, q=s.q, I=I
            )
            written.append(_write_columns(cfg.out, _snapshot_name(t), cols))
    else:
        tr = solve_ei(data, params, tau, cfg.T, snapshot_times=times, probe_index=probe_index)
        for t, s in tr.snapshots:
            cols = dict(x=grid.x, psi=s.psi, phi=s.phi)
            written.append(_write_columns(cfg.out, _snapshot_name(t), cols))
    if probe_index is not None:
        cols = dict(t=tr.probe_t, psi=np.real(tr.probe_psi), phi=np.real(tr.probe_phi))
        written.append(_write_columns(cfg.out, "probe", cols))
    meta = dict(
        schema_version=SCHEMA_VERSION,
        experiment="solve",
        config=_config_dict(cfg),
        files=[os.path.basename(w) for w in written],
        probe_node=probe_index,
        wall_time_s=time.perf_counter() - t0,
    )
    _write_meta(os.path.join(cfg.out, "solve.meta.json"), meta)
    return written


def _snapshot_name(t: float) -> str:
    return "snapshot_t" + repr(float(t)).replace(".", "p").replace("-", "m")


# ---------------------------------------------------------------------------
# coeffs-dump


def run_coeffs_dump(cfg: RunConfig):
    cfg.validate()
    m0 = cfg.m0[0]
    data, params, grid = make_problem(cfg.problem, m0, cfg.gamma_rule, _problem_grid(cfg, m0))
    tau = min(cfg.tau)
    C = build_coefficients(grid, params.epsilon, params.gamma, tau)
    rows = []
    for l in range(-grid.N // 2, grid.N // 2):
        for name in COEFFICIENT_NAMES:
            v = C.named(name)[l % grid.N]
            o = coefficient_oracle(name, l, params.epsilon, params.gamma, tau, grid)
            rel = 0.0 if (v == 0 and o == 0) else abs(v - o) / max(abs(o), 1e-300)
            rows.append(
                dict(
                    l=l,
                    name=name,
                    closed_form_re=v.real,
                    closed_form_im=v.imag,
                    oracle_re=o.real,
                    oracle_im=o.imag,
                    rel_err=rel,
                )
            )
    rows.sort(key=lambda r: (r["l"], r["name"]))
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, "coeffs_dump.csv")
    _write_csv(path, ["l", "name", "closed_form_re", "closed_form_im", "oracle_re", "oracle_im", "rel_err"], rows)
    _write_meta(
        os.path.join(cfg.out, "coeffs_dump.meta.json"),
        dict(
            schema_version=SCHEMA_VERSION,
            experiment="coeffs-dump",
            config=_config_dict(cfg),
            columns=["l", "name", "closed_form_re", "closed_form_im", "oracle_re", "oracle_im", "rel_err"],
        ),
    )
    return path


# ---------------------------------------------------------------------------
# plumbing


def _pool_map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: str, columns: list[str], rows: list[dict]) -> str:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_format_value(r[c]) for c in columns])
    return path


def _write_columns(out_dir: str, stem: str, cols: dict) -> str:
    path = os.path.join(out_dir, stem + ".csv")
    names = list(cols)
    arrays = [np.asarray(cols[k]) for k in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for i in range(len(arrays[0])):
            w.writerow([_format_value(a[i]) for a in arrays])
    return path


def _config_dict(cfg: RunConfig) -> dict:
    return asdict(cfg)


def _write_meta(path: str, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_experiment(cfg: RunConfig, kind: str, rows: list[dict], extra: dict, stem: str | None = None):
    os.makedirs(cfg.out, exist_ok=True)
    stem = stem or kind
    columns = ERROR_COLUMNS[kind]
    path = os.path.join(cfg.out, stem + ".csv")
    _write_csv(path, columns, rows)
    meta = dict(
        schema_version=SCHEMA_VERSION,
        experiment=cfg.experiment,
        config=_config_dict(cfg),
        columns=columns,
        **extra,
    )
    _write_meta(os.path.join(cfg.out, stem + ".meta.json"), meta)
    return path


RUNNERS = {
    "accuracy-time": run_accuracy_time,
    "accuracy-space": run_accuracy_space,
    "limit-rates": run_limit_rates,
    "energy": run_energy,
    "super-resolution": run_super_resolution,
    "solve": run_solve,
    "coeffs-dump": run_coeffs_dump,
}


def run_experiment(cfg: RunConfig):
    cfg.validate()
    return RUNNERS[cfg.experiment](cfg)
