"""Figure scripts against real run directories and hand-built inputs."""

import os
import subprocess
import sys

import numpy as np
import pytest

from mmplots import (plot_diffusion_history, plot_field2d, plot_profiles,
                     read_profile_csv, read_vtk_structured_points)
from mmplots.cli import main as make_figures
from mmplots.io import FormatError, read_metric_csv


@pytest.fixture(scope="module")
def run1d(tmp_path_factory):
    out = tmp_path_factory.mktemp("run1d")
    subprocess.run([sys.executable, "-m", "multimat.cli", "run", "--case", "test1",
                    "--cells", "50", "--t-end", "0.001",
                    "--snapshot-every", "0.0005", "--out", str(out)], check=True)
    subprocess.run([sys.executable, "-m", "multimat.cli", "metrics",
                    "--run", str(out)], check=True)
    return out


@pytest.fixture(scope="module")
def run2d(tmp_path_factory):
    out = tmp_path_factory.mktemp("run2d")
    subprocess.run([sys.executable, "-m", "multimat.cli", "run", "--case", "test4",
                    "--cells", "24,24", "--t-end", "0.2",
                    "--snapshot-every", "0.2", "--out", str(out)], check=True)
    return out


def test_read_profile_csv(run1d):
    snaps = sorted(p for p in os.listdir(run1d) if p.startswith("snapshot_"))
    prof = read_profile_csv(run1d / snaps[-1])
    assert prof["x"].size == 50
    assert prof["z"].shape == (5, 50)
    np.testing.assert_allclose(prof["z"].sum(axis=0), 1.0, atol=1e-12)
    assert "y" in prof and "rho_k" in prof


def test_read_vtk(run2d):
    snaps = sorted(p for p in os.listdir(run2d) if p.endswith(".vtk"))
    snap = read_vtk_structured_points(run2d / snaps[-1])
    assert (snap["nx"], snap["ny"]) == (24, 24)
    assert {"rho", "p", "material"} <= set(snap["scalars"])
    assert snap["vectors"]["velocity"].shape == (24, 24, 3)
    z = np.stack([snap["scalars"][f"Z_{k}"] for k in range(1, 5)])
    np.testing.assert_allclose(z.sum(axis=0), 1.0, atol=1e-12)


def test_plot_profiles(run1d, tmp_path):
    snaps = sorted(p for p in os.listdir(run1d) if p.startswith("snapshot_"))
    imgs = plot_profiles([run1d / snaps[-1]], ["rho", "p", "Z_2"], tmp_path)
    assert [os.path.basename(p) for p in imgs] == [
        "profile_rho.png", "profile_p.png", "profile_Z_2.png"]
    for p in imgs:
        assert os.path.getsize(p) > 1000


def test_plot_profiles_empty_list_is_noop(run1d, tmp_path):
    assert plot_profiles([run1d / "snapshot_0000.csv"], [], tmp_path) == []
    assert list(tmp_path.iterdir()) == []


def test_plot_profiles_with_exact_and_zoom(tmp_path):
    out = tmp_path / "exact.csv"
    subprocess.run([sys.executable, "-m", "multimat.cli", "exact", "--case",
                    "test2", "--t", "0.12", "--cells", "100", "--out", str(out)],
                   check=True)
    run = tmp_path / "run"
    subprocess.run([sys.executable, "-m", "multimat.cli", "run", "--case", "test2",
                    "--cells", "100", "--out", str(run)], check=True)
    imgs = plot_profiles([run / "snapshot_0001.csv"], ["rho"], tmp_path,
                         exact_csv=out, zoom=(0.55, 0.75))
    assert imgs and imgs[0].endswith("profile_rho_zoom.png")


def test_plot_profiles_grid_mismatch(run1d, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,rho,u,p,Z_1\n0.5,1.0,0.0,1.0,1.0\n")
    with pytest.raises(FormatError, match="grid differs"):
        plot_profiles([run1d / "snapshot_0000.csv", bad], ["rho"], tmp_path)


def test_plot_field2d(run2d, tmp_path):
    snaps = sorted(p for p in os.listdir(run2d) if p.endswith(".vtk"))
    img = plot_field2d(run2d / snaps[-1], "material", tmp_path / "mat.png",
                       vmin=1.0, vmax=4.0)
    assert os.path.getsize(img) > 1000
    with pytest.raises(FormatError, match="no scalar"):
        plot_field2d(run2d / snaps[-1], "vorticity", tmp_path / "x.png")


def test_plot_field2d_uniform_field(tmp_path):
    # A constant scalar renders without error (single-color map).
    path = tmp_path / "uniform.vtk"
    n = 4
    body = "\n".join(["# vtk DataFile Version 3.0", "t", "ASCII",
                      "DATASET STRUCTURED_POINTS",
                      f"DIMENSIONS {n} {n} 1", "ORIGIN 0 0 0", "SPACING 1 1 1",
                      f"POINT_DATA {n * n}",
                      "SCALARS rho double 1", "LOOKUP_TABLE default"]
                     + ["1.0"] * (n * n)) + "\n"
    path.write_text(body)
    img = plot_field2d(path, "rho", tmp_path / "u.png")
    assert os.path.getsize(img) > 1000


def test_plot_diffusion_history(run1d, tmp_path):
    img = plot_diffusion_history(run1d / "diffusion_cells.csv",
                                 tmp_path / "hist.png")
    assert os.path.getsize(img) > 1000
    hist = read_metric_csv(run1d / "diffusion_cells.csv")
    assert hist["t"].size >= 2 and len(hist["series"]) == 5


def test_plot_diffusion_history_empty(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("t,Z_1_percent\n")
    img = plot_diffusion_history(empty, tmp_path / "hist.png")
    assert os.path.exists(img)


def test_make_figures_1d(run1d, capsys):
    assert make_figures([str(run1d)]) == 0
    written = capsys.readouterr().out.split()
    assert any(p.endswith("profile_Z_5.png") for p in written)
    assert any(p.endswith("diffusion_history.png") for p in written)
    for p in written:
        assert os.path.exists(p)


def test_make_figures_2d(run2d, capsys):
    assert make_figures([str(run2d)]) == 0
    written = capsys.readouterr().out.split()
    names = {os.path.basename(p) for p in written}
    assert {"field_material.png", "field_rho.png", "field_p.png"} <= names


def test_make_figures_bad_dir(tmp_path, capsys):
    assert make_figures([str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_reruns_byte_identical(run1d, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert make_figures([str(run1d), "--out", str(a)]) == 0
    assert make_figures([str(run1d), "--out", str(b)]) == 0
    for name in os.listdir(a):
        with open(a / name, "rb") as fa, open(b / name, "rb") as fb:
            assert fa.read() == fb.read(), name


def test_inputs_never_modified(run1d, tmp_path):
    before = {p: (run1d / p).stat().st_mtime_ns for p in os.listdir(run1d)
              if p.endswith((".csv", ".json", ".vtk"))}
    make_figures([str(run1d), "--out", str(tmp_path / "figs")])
    after = {p: (run1d / p).stat().st_mtime_ns for p in before}
    assert before == after
