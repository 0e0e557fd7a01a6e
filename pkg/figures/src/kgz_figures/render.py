"""Panel renderers for the solver's CSV outputs.

Every renderer is a pure function of the CSV bytes and the figure spec: no
numerics are recomputed here, values are plotted verbatim, and the output
image is deterministic (fixed size, dpi, fonts, pinned PNG metadata, no
timestamps).  Error panels are log-log and carry a first-order guide line.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = (
    "time-error-panel",
    "space-error-panel",
    "energy-panel",
    "limit-rate-panel",
    "profile-panel",
)

_RC = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
}

_PNG_METADATA = {"Software": "kgz-figures"}


class SchemaError(ValueError):
    """Input CSV does not carry the columns the panel needs."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list[str]
    output: str
    title: str | None = None
    options: dict = field(default_factory=dict)


@dataclass
class Table:
    path: str
    columns: list[str]
    data: dict  # column -> list[str]

    def __len__(self) -> int:
        return len(next(iter(self.data.values()))) if self.data else 0

    def floats(self, name: str) -> np.ndarray:
        return np.array([float(v) for v in self.data[name]])

    def require(self, needed: list[str]) -> None:
        missing = [c for c in needed if c not in self.columns]
        if missing:
            raise SchemaError(
                f"{self.path}: missing columns {missing}; found {self.columns}"
            )


def load_table(path: str) -> Table:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: empty file (no header)")
    columns = rows[0]
    data = {c: [] for c in columns}
    for r in rows[1:]:
        for c, v in zip(columns, r):
            data[c].append(v)
    return Table(path=path, columns=columns, data=data)


def _finish(fig, spec: FigureSpec) -> str:
    fig.savefig(spec.output, metadata=_PNG_METADATA)
    plt.close(fig)
    return spec.output


def _empty_panel(spec: FigureSpec, message: str) -> str:
    warnings.warn(f"{spec.kind}: {message}; rendering empty axes", stacklevel=2)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.set_title(spec.title or spec.kind)
        ax.text(0.5, 0.5, "no data", ha="center", va="center", transform=ax.transAxes)
        return _finish(fig, spec)


def _eps_label(eps: float) -> str:
    k = -np.log2(eps)
    if abs(k - round(k)) < 1e-12:
        return f"eps = 2^-{int(round(k))}"
    return f"eps = {eps:g}"


def _slope_one_guide(ax, x: np.ndarray, y: np.ndarray) -> None:
    # anchor the guide at the largest abscissa of the data cloud
    x0, y0 = x.max(), np.median(y[x == x.max()])
    xs = np.array([x.min(), x.max()])
    ax.loglog(xs, y0 * xs / x0, "k--", linewidth=1, label="slope 1")


def _per_epsilon_series(table: Table, xcol: str, ycol: str):
    eps = table.floats("epsilon")
    xs = table.floats(xcol)
    ys = table.floats(ycol)
    for e in sorted(set(eps), reverse=True):
        m = eps == e
        order = np.argsort(xs[m])
        yield e, xs[m][order], ys[m][order]


def render_time_error_panel(spec: FigureSpec) -> str:
    table = load_table(spec.inputs[0])
    table.require(["epsilon", "tau", "err_total"])
    if len(table) == 0:
        return _empty_panel(spec, "header-only CSV")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for e, xs, ys in _per_epsilon_series(table, "tau", "err_total"):
            ax.loglog(xs, ys, "o-", label=_eps_label(e))
        _slope_one_guide(ax, table.floats("tau"), table.floats("err_total"))
        ax.set_xlabel("tau")
        ax.set_ylabel("max-norm error")
        ax.set_title(spec.title or "temporal error")
        ax.legend()
        return _finish(fig, spec)


def render_space_error_panel(spec: FigureSpec) -> str:
    table = load_table(spec.inputs[0])
    table.require(["epsilon", "N", "err_total"])
    if len(table) == 0:
        return _empty_panel(spec, "header-only CSV")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for e, xs, ys in _per_epsilon_series(table, "N", "err_total"):
            ax.semilogy(xs, ys, "s-", label=_eps_label(e))
        ax.set_xlabel("N")
        ax.set_ylabel("max-norm error")
        ax.set_title(spec.title or "spatial error (spectral decay)")
        ax.legend()
        return _finish(fig, spec)


def render_energy_panel(spec: FigureSpec) -> str:
    table = load_table(spec.inputs[0])
    table.require(["epsilon", "tau", "T", "energy_rel_err"])
    if len(table) == 0:
        return _empty_panel(spec, "header-only CSV")
    eps = table.floats("epsilon")
    taus = table.floats("tau")
    ts = table.floats("T")
    errs = table.floats("energy_rel_err")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for e in sorted(set(eps), reverse=True):
            for tau in sorted(set(taus[eps == e])):
                m = (eps == e) & (taus == tau)
                order = np.argsort(ts[m])
                ax.loglog(ts[m][order], errs[m][order], "o-", label=f"{_eps_label(e)}, tau={tau:g}")
        keep = errs > 0
        if keep.any():
            _slope_one_guide(ax, ts[keep], errs[keep])
        ax.set_xlabel("t")
        ax.set_ylabel("|E(t) - E(0)| / |E(0)|")
        ax.set_title(spec.title or "energy drift")
        ax.legend()
        return _finish(fig, spec)


_LIMIT_COLUMNS = ["eta_nls_psi", "eta_nls_phi", "eta_op_psi", "eta_op_phi"]
_LIMIT_LABELS = {
    "eta_nls_psi": "eta_nls^psi / eps",
    "eta_nls_phi": "eta_nls^phi / eps",
    "eta_op_psi": "eta_op^psi / eps^2",
    "eta_op_phi": "eta_op^phi / eps",
}


def render_limit_rate_panel(spec: FigureSpec) -> str:
    table = load_table(spec.inputs[0])
    table.require(["epsilon", "T"] + _LIMIT_COLUMNS)
    if len(table) == 0:
        return _empty_panel(spec, "header-only CSV")
    eps = table.floats("epsilon")
    ts = table.floats("T")
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(2, 2, figsize=(8.0, 5.6))
        for ax, col in zip(axes.ravel(), _LIMIT_COLUMNS):
            ys = table.floats(col)
            for e in sorted(set(eps), reverse=True):
                m = eps == e
                order = np.argsort(ts[m])
                ax.plot(ts[m][order], ys[m][order], "o-", label=_eps_label(e), markersize=3)
            ax.set_xlabel("t")
            ax.set_ylabel(_LIMIT_LABELS[col])
            ax.legend()
        fig.suptitle(spec.title or "convergence to the limit models")
        fig.tight_layout()
        return _finish(fig, spec)


def render_profile_panel(spec: FigureSpec) -> str:
    tables = [load_table(p) for p in spec.inputs]
    with plt.rc_context(_RC):
        if all("t" in t.columns for t in tables):  # probe series
            fig, axes = plt.subplots(2, 1, figsize=(8.0, 5.6), sharex=True)
            for t in tables:
                t.require(["t", "psi", "phi"])
                if len(t) == 0:
                    plt.close(fig)
                    return _empty_panel(spec, "header-only CSV")
                axes[0].plot(t.floats("t"), t.floats("psi"), linewidth=0.8, label=t.path)
                axes[1].plot(t.floats("t"), t.floats("phi"), linewidth=0.8, label=t.path)
            axes[0].set_ylabel("psi(probe, t)")
            axes[1].set_ylabel("phi(probe, t)")
            axes[1].set_xlabel("t")
        else:
            fig, axes = plt.subplots(2, 1, figsize=(8.0, 5.6), sharex=True)
            for t in tables:
                t.require(["x", "psi", "phi"])
                if len(t) == 0:
                    plt.close(fig)
                    return _empty_panel(spec, "header-only CSV")
                axes[0].plot(t.floats("x"), t.floats("psi"), linewidth=0.8, label=t.path)
                axes[1].plot(t.floats("x"), t.floats("phi"), linewidth=0.8, label=t.path)
            axes[0].set_ylabel("psi(x)")
            axes[1].set_ylabel("phi(x)")
            axes[1].set_xlabel("x")
        for ax in axes:
            ax.legend()
        fig.suptitle(spec.title or "solution profiles")
        fig.tight_layout()
        return _finish(fig, spec)


_RENDERERS = {
    "time-error-panel": render_time_error_panel,
    "space-error-panel": render_space_error_panel,
    "energy-panel": render_energy_panel,
    "limit-rate-panel": render_limit_rate_panel,
    "profile-panel": render_profile_panel,
}


def render(spec: FigureSpec) -> str:
    if spec.kind not in _RENDERERS:
        raise SchemaError(f"unknown figure kind {spec.kind!r}")
    if not spec.inputs:
        raise SchemaError("no input CSV given")
    return _RENDERERS[spec.kind](spec)
