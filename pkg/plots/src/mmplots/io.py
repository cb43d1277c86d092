"""Readers for the documented run-directory formats."""

from __future__ import annotations

import numpy as np


class FormatError(ValueError):
    """Input file does not match the documented schema."""


def read_profile_csv(path):
    """1D snapshot CSV: columns x,rho,u,p,Z_1..m,Y_1..m,rho_1..m.

    Returns {"x", "rho", "u", "p", "z": (m, n), "y": (m, n),
    "rho_k": (m, n)}; Y_/rho_ blocks are optional (exact-profile files
    carry only x/rho/u/p/Z_k).
    """
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names or ()
    for col in ("x", "rho", "u", "p"):
        if col not in names:
            raise FormatError(f"{path}: missing column {col!r}")
    m = sum(1 for n in names if n.startswith("Z_"))
    if m == 0:
        raise FormatError(f"{path}: no Z_k columns")
    out = {c: np.atleast_1d(data[c]) for c in ("x", "rho", "u", "p")}
    out["z"] = np.stack([np.atleast_1d(data[f"Z_{k + 1}"]) for k in range(m)])
    for key, pre in (("y", "Y_"), ("rho_k", "rho_")):
        if f"{pre}1" in names:
            out[key] = np.stack(
                [np.atleast_1d(data[f"{pre}{k + 1}"]) for k in range(m)])
    return out


def read_vtk_structured_points(path):
    """ASCII STRUCTURED_POINTS reader for the solver's 2D snapshots.

    Returns {"nx", "ny", "origin", "spacing", "scalars": {name: (ny, nx)},
    "vectors": {name: (ny, nx, 3)}}.
    """
    with open(path) as f:
        lines = f.read().split("\n")
    if not lines or not lines[0].startswith("# vtk DataFile"):
        raise FormatError(f"{path}: not a VTK file")
    i = 0
    nx = ny = npts = None
    origin = spacing = (0.0, 0.0, 0.0)
    scalars = {}
    vectors = {}

    def take_floats(start, count):
        vals = []
        j = start
        while len(vals) < count:
            if j >= len(lines):
                raise FormatError(f"{path}: truncated data section")
            vals.extend(float(v) for v in lines[j].split())
            j += 1
        if len(vals) != count:
            raise FormatError(f"{path}: ragged data section")
        return np.asarray(vals), j

    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("DATASET") and "STRUCTURED_POINTS" not in line:
            raise FormatError(f"{path}: unsupported dataset {line!r}")
        if line.startswith("DIMENSIONS"):
            nx, ny, nz = (int(v) for v in line.split()[1:4])
            if nz != 1:
                raise FormatError(f"{path}: expected a single slab, got nz={nz}")
        elif line.startswith("ORIGIN"):
            origin = tuple(float(v) for v in line.split()[1:4])
        elif line.startswith("SPACING"):
            spacing = tuple(float(v) for v in line.split()[1:4])
        elif line.startswith("POINT_DATA"):
            npts = int(line.split()[1])
        elif line.startswith("SCALARS"):
            name = line.split()[1]
            if npts is None or nx is None:
                raise FormatError(f"{path}: SCALARS before POINT_DATA/DIMENSIONS")
            if not lines[i + 1].strip().startswith("LOOKUP_TABLE"):
                raise FormatError(f"{path}: SCALARS without LOOKUP_TABLE")
            vals, i = take_floats(i + 2, npts)
            scalars[name] = vals.reshape(ny, nx)
            continue
        elif line.startswith("VECTORS"):
            name = line.split()[1]
            if npts is None or nx is None:
                raise FormatError(f"{path}: VECTORS before POINT_DATA/DIMENSIONS")
            vals, i = take_floats(i + 1, 3 * npts)
            vectors[name] = vals.reshape(ny, nx, 3)
            continue
        i += 1
    if nx is None or npts is None:
        raise FormatError(f"{path}: missing DIMENSIONS or POINT_DATA")
    if npts != nx * ny:
        raise FormatError(f"{path}: POINT_DATA {npts} != {nx}*{ny}")
    return {"nx": nx, "ny": ny, "origin": origin, "spacing": spacing,
            "scalars": scalars, "vectors": vectors}


def read_metric_csv(path):
    """Diffusion-cell history CSV: t,Z_1_percent,...; tolerates empty files."""
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    names = data.dtype.names or ()
    if not names:
        return {"t": np.empty(0), "series": {}}
    if "t" not in names:
        raise FormatError(f"{path}: missing column 't'")
    t = np.atleast_1d(data["t"])
    series = {n: np.atleast_1d(data[n]) for n in names if n != "t"}
    return {"t": t, "series": series}
