"""Figure builders: 1D profile overlays, 2D colormaps, diffusion history."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import FormatError, read_metric_csv, read_profile_csv, read_vtk_structured_points

_SAVE = {"dpi": 140, "bbox_inches": "tight"}


def _var_series(prof, var):
    if var in ("rho", "u", "p"):
        return prof[var]
    for key, pre in (("z", "Z_"), ("y", "Y_"), ("rho_k", "rho_")):
        if var.startswith(pre):
            k = int(var[len(pre):]) - 1
            if key not in prof or not 0 <= k < prof[key].shape[0]:
                raise FormatError(f"variable {var!r} not present in snapshot")
            return prof[key][k]
    raise FormatError(f"unknown variable {var!r}")


def plot_profiles(csv_paths, variables, out_dir, labels=None, exact_csv=None,
                  zoom=None, prefix="profile"):
    """One overlay figure per variable from 1D snapshot CSVs.

    ``labels`` names each input curve (defaults to the file stem);
    ``exact_csv`` adds a reference line; ``zoom`` is an optional (xmin,
    xmax) window. Returns the list of written image paths; an empty
    variable list is a no-op.
    """
    if not variables:
        return []
    profs = [read_profile_csv(p) for p in csv_paths]
    if not profs:
        raise FormatError("no input snapshots")
    x0 = profs[0]["x"]
    for path, prof in zip(csv_paths, profs):
        if prof["x"].shape != x0.shape or not np.allclose(prof["x"], x0):
            raise FormatError(f"{path}: grid differs from {csv_paths[0]}")
    if labels is None:
        labels = [os.path.splitext(os.path.basename(p))[0] for p in csv_paths]
    exact = read_profile_csv(exact_csv) if exact_csv else None

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for var in variables:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        if exact is not None:
            try:
                ax.plot(exact["x"], _var_series(exact, var), "k-", lw=1.0,
                        label="exact")
            except FormatError:
                pass  # exact files carry a subset of the variables
        for prof, label in zip(profs, labels):
            ax.plot(prof["x"], _var_series(prof, var), marker=".", ms=2.5,
                    lw=0.8, label=label)
        if zoom is not None:
            ax.set_xlim(*zoom)
        ax.set_xlabel("x")
        ax.set_ylabel(var)
        ax.legend(loc="best", fontsize=8)
        ax.grid(alpha=0.3)
        name = f"{prefix}_{var}.png" if zoom is None else f"{prefix}_{var}_zoom.png"
        path = os.path.join(out_dir, name)
        fig.savefig(path, **_SAVE)
        plt.close(fig)
        written.append(path)
    return written


def plot_field2d(vtk_path, scalar, out_path, vmin=None, vmax=None, cmap="viridis"):
    """Colormap of one scalar from a structured-points snapshot.

    ``vmin``/``vmax`` pin the color scale so a snapshot series renders
    comparably. Returns ``out_path``.
    """
    snap = read_vtk_structured_points(vtk_path)
    if scalar not in snap["scalars"]:
        have = ", ".join(sorted(snap["scalars"])) or "none"
        raise FormatError(f"{vtk_path}: no scalar {scalar!r} (have: {have})")
    arr = snap["scalars"][scalar]
    ox, oy, _ = snap["origin"]
    sx, sy, _ = snap["spacing"]
    extent = (ox - 0.5 * sx, ox + (snap["nx"] - 0.5) * sx,
              oy - 0.5 * sy, oy + (snap["ny"] - 0.5) * sy)
    fig, ax = plt.subplots(figsize=(6.0, 6.0 * snap["ny"] / snap["nx"] + 0.8))
    im = ax.imshow(arr, origin="lower", extent=extent, aspect="equal",
                   vmin=vmin, vmax=vmax, cmap=cmap, interpolation="nearest")
    fig.colorbar(im, ax=ax, label=scalar, shrink=0.85)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    fig.savefig(out_path, **_SAVE)
    plt.close(fig)
    return out_path


def plot_diffusion_history(metric_csv, out_path):
    """Percent of diffusion cells over time, one line per material.

    An empty metric file yields an empty axes (still a valid image).
    Returns ``out_path``.
    """
    hist = read_metric_csv(metric_csv)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, vals in sorted(hist["series"].items()):
        ax.plot(hist["t"], vals, marker=".", ms=3, label=name.replace("_percent", ""))
    ax.set_xlabel("t")
    ax.set_ylabel("diffusion cells [%]")
    ax.set_ylim(bottom=0.0)
    if hist["series"]:
        ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    fig.savefig(out_path, **_SAVE)
    plt.close(fig)
    return out_path
