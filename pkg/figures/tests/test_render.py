import json
import os

import numpy as np
import pytest

from kgz_figures import FigureSpec, SchemaError, render
from kgz_figures.cli import cli_main, make_all

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def write_csv(path, header, rows):
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return str(v)

    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\r\n")
        for r in rows:
            fh.write(",".join(fmt(v) for v in r) + "\r\n")
    return str(path)


@pytest.fixture
def accuracy_time_csv(tmp_path):
    header = ["epsilon", "gamma", "tau", "N", "T", "err_psi_linf", "err_phi_linf", "err_total"]
    rows = []
    for eps in (0.5, 0.125):
        for tau in (4e-3, 2e-3, 1e-3):
            err = 0.2 * tau * (1 + eps)
            rows.append([eps, 2 * eps, tau, 256, 0.5, err / 2, err / 2, err])
    return write_csv(tmp_path / "accuracy_time.csv", header, rows)


@pytest.fixture
def energy_csv(tmp_path):
    header = ["epsilon", "gamma", "tau", "N", "T", "energy_rel_err"]
    rows = [[0.25, 0.5, 1e-3, 256, round(0.1 * k, 3), 1e-5 * k] for k in range(1, 11)]
    return write_csv(tmp_path / "energy.csv", header, rows)


@pytest.fixture
def limit_csv(tmp_path):
    header = ["epsilon", "gamma", "tau", "N", "T", "eta_nls_psi", "eta_nls_phi", "eta_op_psi", "eta_op_phi"]
    rows = []
    for eps in (0.125, 0.0625):
        for k in range(1, 11):
            t = round(0.1 * k, 3)
            rows.append([eps, 2 * eps, 1e-4, 2048, t, 0.5 + 0.1 * t, 0.4, 2.5, 0.3])
    return write_csv(tmp_path / "limit_rates.csv", header, rows)


@pytest.fixture
def snapshot_csv(tmp_path):
    header = ["x", "psi", "phi", "z_re", "z_im", "r", "q", "I"]
    x = np.linspace(-np.pi, np.pi, 64, endpoint=False)
    rows = [[xi, np.sin(xi), np.cos(xi), 0.1, 0.0, 0.0, 0.0, 0.2] for xi in x]
    return write_csv(tmp_path / "snapshot_t0p5.csv", header, rows)


class TestPanels:
    def test_time_error_panel(self, accuracy_time_csv, tmp_path):
        out = str(tmp_path / "time.png")
        assert render(FigureSpec("time-error-panel", [accuracy_time_csv], out)) == out
        assert open(out, "rb").read(8) == PNG_MAGIC

    def test_time_error_panel_has_slope_guide(self, accuracy_time_csv, tmp_path, monkeypatch):
        # inspect the axes: a dashed guide labeled "slope 1" must be present
        import matplotlib.pyplot as plt

        captured = {}
        orig_savefig = plt.Figure.savefig

        def spy(fig, *a, **k):
            captured["labels"] = [ln.get_label() for ax in fig.axes for ln in ax.get_lines()]
            return orig_savefig(fig, *a, **k)

        monkeypatch.setattr(plt.Figure, "savefig", spy)
        render(FigureSpec("time-error-panel", [accuracy_time_csv], str(tmp_path / "g.png")))
        assert "slope 1" in captured["labels"]

    def test_space_error_panel(self, tmp_path):
        header = ["epsilon", "gamma", "tau", "N", "T", "err_psi_linf", "err_phi_linf", "err_total"]
        rows = [[0.125, 0.25, 1e-5, N, 0.5, 0.0, 0.0, 10.0 ** (-k)] for k, N in enumerate((16, 32, 64, 128))]
        path = write_csv(tmp_path / "accuracy_space.csv", header, rows)
        out = str(tmp_path / "space.png")
        render(FigureSpec("space-error-panel", [path], out))
        assert open(out, "rb").read(8) == PNG_MAGIC

    def test_energy_panel(self, energy_csv, tmp_path):
        out = str(tmp_path / "energy.png")
        render(FigureSpec("energy-panel", [energy_csv], out))
        assert os.path.exists(out)

    def test_limit_rate_panel(self, limit_csv, tmp_path):
        out = str(tmp_path / "limits.png")
        render(FigureSpec("limit-rate-panel", [limit_csv], out))
        assert os.path.exists(out)

    def test_profile_panel_snapshot_and_probe(self, snapshot_csv, tmp_path):
        out = str(tmp_path / "profile.png")
        render(FigureSpec("profile-panel", [snapshot_csv], out))
        assert os.path.exists(out)
        probe = write_csv(
            tmp_path / "probe.csv",
            ["t", "psi", "phi"],
            [[0.01 * k, np.cos(10 * k * 0.01), 0.5] for k in range(50)],
        )
        out2 = str(tmp_path / "probe.png")
        render(FigureSpec("profile-panel", [probe], out2))
        assert os.path.exists(out2)


class TestContracts:
    def test_deterministic_bytes(self, accuracy_time_csv, tmp_path):
        a, b = str(tmp_path / "a.png"), str(tmp_path / "b.png")
        render(FigureSpec("time-error-panel", [accuracy_time_csv], a))
        render(FigureSpec("time-error-panel", [accuracy_time_csv], b))
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_header_only_csv_warns_but_renders(self, tmp_path):
        path = write_csv(tmp_path / "empty.csv", ["epsilon", "gamma", "tau", "N", "T", "err_psi_linf", "err_phi_linf", "err_total"], [])
        out = str(tmp_path / "empty.png")
        with pytest.warns(UserWarning, match="empty"):
            render(FigureSpec("time-error-panel", [path], out))
        assert open(out, "rb").read(8) == PNG_MAGIC

    def test_schema_mismatch_reports_columns(self, tmp_path):
        path = write_csv(tmp_path / "bad.csv", ["foo", "bar"], [[1, 2]])
        with pytest.raises(SchemaError, match="missing columns"):
            render(FigureSpec("time-error-panel", [path], str(tmp_path / "x.png")))

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SchemaError):
            render(FigureSpec("pie-chart", ["x.csv"], str(tmp_path / "x.png")))


class TestCli:
    def test_single_panel(self, accuracy_time_csv, tmp_path, capsys):
        out = str(tmp_path / "cli.png")
        assert cli_main(["time-error-panel", "--in", accuracy_time_csv, "--out", out]) == 0
        assert os.path.exists(out)

    def test_schema_mismatch_exit_code(self, tmp_path, capsys):
        path = write_csv(tmp_path / "bad.csv", ["foo"], [[1]])
        code = cli_main(["time-error-panel", "--in", path, "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "missing columns" in capsys.readouterr().err

    def test_make_all(self, accuracy_time_csv, energy_csv, limit_csv, snapshot_csv, tmp_path):
        # sidecars as the harness writes them
        for stem, experiment in [
            ("accuracy_time", "accuracy-time"),
            ("energy", "energy"),
            ("limit_rates", "limit-rates"),
        ]:
            (tmp_path / f"{stem}.meta.json").write_text(
                json.dumps({"schema_version": 1, "experiment": experiment, "columns": []})
            )
        (tmp_path / "solve.meta.json").write_text(
            json.dumps({"schema_version": 1, "experiment": "solve", "files": ["snapshot_t0p5.csv"]})
        )
        images = make_all(str(tmp_path), str(tmp_path / "img"))
        names = sorted(os.path.basename(p) for p in images)
        assert names == [
            "accuracy_time.png",
            "energy.png",
            "limit_rates.png",
            "solve_profiles.png",
        ]
        for p in images:
            assert open(p, "rb").read(8) == PNG_MAGIC

    def test_make_all_empty_dir(self, tmp_path, capsys):
        assert cli_main(["make-all", "--dir", str(tmp_path)]) == 0
        assert "nothing to render" in capsys.readouterr().err

    def test_make_all_respects_env(self, accuracy_time_csv, tmp_path, monkeypatch, capsys):
        (tmp_path / "accuracy_time.meta.json").write_text(
            json.dumps({"schema_version": 1, "experiment": "accuracy-time"})
        )
        monkeypatch.setenv("KGZ_OUT_DIR", str(tmp_path))
        assert cli_main(["make-all"]) == 0
        assert (tmp_path / "accuracy_time.png").exists()
