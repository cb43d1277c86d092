"""make-figures <run-dir>: standard figure set from a completed run."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .figures import plot_diffusion_history, plot_field2d, plot_profiles
from .io import FormatError


def _figures_for_run(run_dir, out_dir):
    manifest_path = os.path.join(run_dir, "manifest.json")
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{manifest_path}: {exc}") from exc

    snaps = manifest.get("snapshots", [])
    if not snaps:
        raise FormatError(f"{run_dir}: manifest lists no snapshots")
    m = len(manifest.get("diffusion_cells_percent", {})) or None
    written = []

    csvs = [s["file"] for s in snaps if s["file"].endswith(".csv")]
    vtks = [s["file"] for s in snaps if s["file"].endswith(".vtk")]
    if csvs:
        last = os.path.join(run_dir, csvs[-1])
        n_mat = m or 0
        variables = ["rho", "u", "p"] + [f"Z_{k + 1}" for k in range(n_mat)]
        written += plot_profiles([last], variables, out_dir,
                                 labels=[manifest["config"].get("scheme", "run")])
    if vtks:
        last = os.path.join(run_dir, vtks[-1])
        for scalar in ("material", "rho", "p"):
            written.append(plot_field2d(
                last, scalar, os.path.join(out_dir, f"field_{scalar}.png")))
    metric = os.path.join(run_dir, "diffusion_cells.csv")
    if os.path.exists(metric):
        written.append(plot_diffusion_history(
            metric, os.path.join(out_dir, "diffusion_history.png")))
    return written


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="make-figures",
        description="render the standard figure set for a multimat run directory")
    parser.add_argument("run_dir")
    parser.add_argument("--out", help="output directory (default: <run-dir>/figures)")
    args = parser.parse_args(argv)
    out_dir = args.out or os.path.join(args.run_dir, "figures")
    try:
        written = _figures_for_run(args.run_dir, out_dir)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
