"""Command-line interface: run artifacts, exact profiles, metrics, errors."""

import json
import os

import numpy as np
import pytest

from multimat.cli import main


def _run_small(tmp_path, extra=()):
    out = tmp_path / "run"
    rc = main(["run", "--case", "test1", "--cells", "50", "--t-end", "0.001",
               "--snapshot-every", "0.0005", "--out", str(out), *extra])
    assert rc == 0
    return out


def test_run_writes_manifest_and_snapshots(tmp_path):
    out = _run_small(tmp_path)
    with open(out / "manifest.json") as fh:
        man = json.load(fh)
    assert man["steps"] > 0
    assert man["t_end"] >= 0.001
    assert man["config"]["cells"] == [50]
    assert man["config"]["name"] == "test1"
    assert man["max_z_violation"] <= 1e-12
    for key in ("partial_mass", "momentum", "energy"):
        assert abs(man["conservation_drift"][key]) <= 1e-11
    assert set(man["diffusion_cells_percent"]) == {f"Z_{k}" for k in range(1, 6)}
    snaps = man["snapshots"]
    assert len(snaps) >= 2
    for s in snaps:
        assert (out / s["file"]).exists()


def test_csv_schema_and_simplex(tmp_path):
    out = _run_small(tmp_path)
    with open(out / "manifest.json") as fh:
        man = json.load(fh)
    path = out / man["snapshots"][-1]["file"]
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    m = 5
    assert header == (["x", "rho", "u", "p"]
                      + [f"Z_{k}" for k in range(1, m + 1)]
                      + [f"Y_{k}" for k in range(1, m + 1)]
                      + [f"rho_{k}" for k in range(1, m + 1)])
    data = np.genfromtxt(path, delimiter=",", names=True)
    z = np.stack([data[f"Z_{k}"] for k in range(1, m + 1)])
    y = np.stack([data[f"Y_{k}"] for k in range(1, m + 1)])
    assert np.all((z >= 0.0) & (z <= 1.0))
    np.testing.assert_allclose(z.sum(axis=0), 1.0, rtol=0, atol=1e-12)
    np.testing.assert_allclose(y.sum(axis=0), 1.0, rtol=0, atol=1e-12)
    assert data["x"][0] == pytest.approx(0.01)  # 50-cell centers on [0, 1]


def test_run_byte_stable(tmp_path):
    out_a = _run_small(tmp_path / "a")
    out_b = _run_small(tmp_path / "b")
    with open(out_a / "snapshot_0001.csv", "rb") as fa, \
            open(out_b / "snapshot_0001.csv", "rb") as fb:
        assert fa.read() == fb.read()


def test_vtk_snapshot_structure(tmp_path):
    out = tmp_path / "run2d"
    rc = main(["run", "--case", "test4", "--cells", "24,24", "--t-end", "0.2",
               "--snapshot-every", "0.2", "--out", str(out)])
    assert rc == 0
    with open(out / "manifest.json") as fh:
        man = json.load(fh)
    vtks = [s["file"] for s in man["snapshots"] if s["file"].endswith(".vtk")]
    assert vtks
    text = (out / vtks[-1]).read_text()
    assert text.startswith("# vtk DataFile Version 3.0")
    assert "DATASET STRUCTURED_POINTS" in text
    assert "DIMENSIONS 24 24 1" in text
    assert "POINT_DATA 576" in text
    for name in ("rho", "p", "Z_1", "Z_4", "material"):
        assert f"SCALARS {name} double 1" in text
    assert "VECTORS velocity double" in text


def test_exact_profile_csv(tmp_path):
    out = tmp_path / "exact.csv"
    rc = main(["exact", "--case", "test2", "--t", "0.12", "--cells", "200",
               "--out", str(out)])
    assert rc == 0
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert data["x"].size == 200
    z = np.stack([data[f"Z_{k}"] for k in (1, 2, 3)])
    np.testing.assert_array_equal(z.sum(axis=0), 1.0)
    assert data["p"][0] == pytest.approx(1.0)  # undisturbed left state


def test_metrics_command(tmp_path):
    out = _run_small(tmp_path)
    rc = main(["metrics", "--run", str(out)])
    assert rc == 0
    table = np.genfromtxt(out / "diffusion_cells.csv", delimiter=",", names=True)
    assert table["t"].size >= 2
    assert "Z_1_percent" in table.dtype.names


def test_convergence_command(tmp_path, capsys):
    rc = main(["convergence", "--case", "test2", "--cells", "25,50,100",
               "--scheme", "upwind", "--t-end", "0.05"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("scheme,cells,rho,u,p,Z_1")
    assert any(line.startswith("upwind,rate,") for line in lines)


def test_cases_command(capsys):
    assert main(["cases"]) == 0
    outp = capsys.readouterr().out
    for cid in (f"test{i}" for i in range(1, 8)):
        assert cid in outp


def test_case_config_mutual_exclusion(tmp_path, capsys):
    assert main(["run", "--case", "test1", "--config", "x.json"]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["run", "--t-end", "0.1"]) == 1


def test_bad_cells_count_fails(capsys):
    assert main(["run", "--case", "test1", "--cells", "10,10"]) == 1
    assert "error:" in capsys.readouterr().err


def test_config_file_roundtrip_through_cli(tmp_path):
    from multimat.cases import builtin
    cfg = builtin("test1")
    cfg.t_end = 0.0005
    path = tmp_path / "case.json"
    cfg.save(path)
    out = tmp_path / "run"
    rc = main(["run", "--config", str(path), "--cells", "40", "--out", str(out)])
    assert rc == 0
    assert (out / "manifest.json").exists()
