"""Command-line entry point.

Subcommands: ``run`` (simulate a case), ``exact`` (reference profiles),
``metrics`` (diagnostics over saved 1D snapshots), ``convergence``
(mesh-family driver), ``cases`` (list built-ins).

Output formats:
- 1D snapshots: CSV with columns x, rho, u, p, Z_1..Z_m, Y_1..Y_m,
  rho_1..rho_m, written at 17 significant digits (lossless round-trip).
- 2D snapshots: legacy ASCII VTK structured points (scalars rho, p, each
  Z_k and the material map sum_k k*Z_k; 3-component velocity vectors).
- Every run writes manifest.json echoing the effective configuration,
  step count, wall time and conservation drift.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, cases, diagnostics, riemann_oracle, solver
from .errors import ConfigError, MultimatError
from .state import primitives_from_arrays

_FMT = "%.17g"

_CASE_SUMMARY = {
    "test1": "1D five-material passive transport, 100 cells, periodic",
    "test2": "1D three-gas shock-tube juxtaposition, 500 cells",
    "test3": "1D high-pressure-ratio juxtaposition, 2000 cells",
    "test4": "2D four-material passive transport, 200x200, periodic",
    "test5": "2D triple-point, 700x300, walls",
    "test6": "2D shock-bubble interaction, 1250x250, walls",
    "test7": "2D three-material shear layer, 1000x1000, periodic",
}


def _threads(args):
    n = args.threads if args.threads is not None else os.environ.get("MULTIMAT_THREADS")
    return int(n) if n is not None else 1


def _load_config(args):
    if (args.case is None) == (getattr(args, "config", None) is None):
        raise ConfigError("choose exactly one of --case or --config")
    if args.case is not None:
        cfg = cases.builtin(args.case, fix_shock_table=args.fix_shock_table)
    else:
        cfg = cases.load_config(args.config)
    if args.scheme:
        cfg.scheme = args.scheme
    if args.cells:
        parts = tuple(int(v) for v in args.cells.split(","))
        if len(parts) != cfg.dims:
            raise ConfigError(f"--cells needs {cfg.dims} value(s)")
        cfg.cells = parts
    if args.cfl is not None:
        cfg.c_cfl = args.cfl
    if args.t_end is not None:
        cfg.t_end = args.t_end
    if args.snapshot_every is not None:
        cfg.snapshot_every = args.snapshot_every
    if args.out:
        cfg.out_dir = args.out
    return cfg


def _primitives(fields, eos_list):
    return primitives_from_arrays(fields.pm, fields.z, fields.mom,
                                  fields.rhoE, eos_list, where="output")


def write_csv_1d(path, x, prim, m):
    cols = [x, prim["rho"][0], prim["u"][0, 0], prim["p"][0]]
    header = ["x", "rho", "u", "p"]
    for k in range(m):
        cols.append(prim["z"][k, 0])
        header.append(f"Z_{k + 1}")
    for k in range(m):
        cols.append(prim["y"][k, 0])
        header.append(f"Y_{k + 1}")
    for k in range(m):
        cols.append(prim["rho_k"][k, 0])
        header.append(f"rho_{k + 1}")
    data = np.column_stack(cols)
    np.savetxt(path, data, fmt=_FMT, delimiter=",",
               header=",".join(header), comments="")


def write_vtk_2d(path, config, prim, z):
    nx, ny = config.cells
    (x0, x1), (y0, y1) = config.domain
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    m = z.shape[0]
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write("multimat snapshot\n")
        f.write("ASCII\nDATASET STRUCTURED_POINTS\n")
        f.write(f"DIMENSIONS {nx} {ny} 1\n")
        f.write(f"ORIGIN {_FMT % (x0 + 0.5 * dx)} {_FMT % (y0 + 0.5 * dy)} 0\n")
        f.write(f"SPACING {_FMT % dx} {_FMT % dy} 1\n")
        f.write(f"POINT_DATA {nx * ny}\n")

        def scalar(name, arr):
            f.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            np.savetxt(f, np.asarray(arr, float).ravel(), fmt=_FMT)

        scalar("rho", prim["rho"])
        scalar("p", prim["p"])
        for k in range(m):
            scalar(f"Z_{k + 1}", z[k])
        matmap = sum((k + 1) * z[k] for k in range(m))
        scalar("material", matmap)
        f.write("VECTORS velocity double\n")
        vel = np.stack([prim["u"][0].ravel(), prim["u"][1].ravel(),
                        np.zeros(nx * ny)], axis=1)
        np.savetxt(f, vel, fmt=_FMT)


class _SnapshotWriter:
    def __init__(self, cfg, out_dir):
        self.cfg = cfg
        self.out_dir = out_dir
        self.index = 0
        self.times = []
        self.files = []

    def __call__(self, t, fields):
        prim = _primitives(fields, self.cfg.materials)
        prim["z"] = fields.z
        if self.cfg.dims == 1:
            name = f"snapshot_{self.index:04d}.csv"
            x = cases.cell_centers(self.cfg)[0]
            write_csv_1d(os.path.join(self.out_dir, name), x, prim, fields.m)
        else:
            name = f"snapshot_{self.index:04d}.vtk"
            write_vtk_2d(os.path.join(self.out_dir, name), self.cfg, prim, fields.z)
        self.times.append(t)
        self.files.append(name)
        self.index += 1


def cmd_run(args):
    cfg = _load_config(args)
    out_dir = cfg.out_dir or f"out_{cfg.name or 'run'}"
    os.makedirs(out_dir, exist_ok=True)
    writer = _SnapshotWriter(cfg, out_dir)

    def progress(step, t, dt):
        print(f"step {step} t={t:.6e} dt={dt:.6e}", file=sys.stderr)

    res = solver.run(cfg, on_snapshot=writer,
                     progress_every=args.progress_every,
                     progress=progress if args.progress_every else None)
    f = res["fields"]
    pct = {f"Z_{k + 1}": diagnostics.diffusion_cells(f.z[k]) for k in range(f.m)}
    manifest = {
        "version": __version__,
        "config": cfg.to_dict(),
        "threads": _threads(args),
        "steps": res["steps"],
        "t_end": res["t"],
        "wall_time_s": res["wall_time"],
        "conservation_drift": res["drift"],
        "max_z_violation": res["max_z_violation"],
        "diffusion_cells_percent": pct,
        "snapshots": [{"t": t, "file": n}
                      for t, n in zip(writer.times, writer.files)],
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(writer.files)} snapshot(s) to {out_dir} "
          f"({res['steps']} steps, {res['wall_time']:.2f}s)")
    return 0


def cmd_exact(args):
    cfg = cases.builtin(args.case) if args.case else cases.load_config(args.config)
    sol = riemann_oracle.compose_juxtaposed(cfg)
    n = args.cells or cfg.cells[0]
    cfg.cells = (n,)
    x = cases.cell_centers(cfg)[0]
    prof = sol.profile(x, args.t)
    m = len(cfg.materials)
    z = np.zeros((m, n))
    z[prof["material"], np.arange(n)] = 1.0
    header = ["x", "rho", "u", "p"] + [f"Z_{k + 1}" for k in range(m)]
    data = np.column_stack([x, prof["rho"], prof["u"], prof["p"]] + list(z))
    out = args.out or "-"
    if out == "-":
        np.savetxt(sys.stdout, data, fmt=_FMT, delimiter=",",
                   header=",".join(header), comments="")
    else:
        np.savetxt(out, data, fmt=_FMT, delimiter=",",
                   header=",".join(header), comments="")
    return 0


def _read_snapshot_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    m = sum(1 for n in names if n.startswith("Z_"))
    return {
        "x": data["x"],
        "rho": data["rho"],
        "u": data["u"],
        "p": data["p"],
        "z": np.stack([data[f"Z_{k + 1}"] for k in range(m)]),
        "y": np.stack([data[f"Y_{k + 1}"] for k in range(m)]),
    }


def cmd_metrics(args):
    run_dir = args.run
    with open(os.path.join(run_dir, "manifest.json")) as fh:
        manifest = json.load(fh)
    rows = []
    for snap in manifest["snapshots"]:
        if not snap["file"].endswith(".csv"):
            raise ConfigError("metrics currently reads 1D CSV snapshots")
        s = _read_snapshot_csv(os.path.join(run_dir, snap["file"]))
        pct = [diagnostics.diffusion_cells(s["z"][k], args.epsilon)
               for k in range(s["z"].shape[0])]
        rows.append([snap["t"]] + pct)
    m = len(rows[0]) - 1
    header = ",".join(["t"] + [f"Z_{k + 1}_percent" for k in range(m)])
    out = os.path.join(run_dir, "diffusion_cells.csv")
    np.savetxt(out, np.asarray(rows), fmt=_FMT, delimiter=",",
               header=header, comments="")
    print(f"wrote {out}")
    return 0


def cmd_convergence(args):
    cfg0 = cases.builtin(args.case)
    if cfg0.dims != 1:
        raise ConfigError("convergence driver supports 1D cases")
    cells = [int(v) for v in args.cells.split(",")]
    if len(cells) < 3:
        raise ConfigError("need at least 3 mesh sizes")
    sol = riemann_oracle.compose_juxtaposed(cfg0)
    t_end = args.t_end if args.t_end is not None else cfg0.t_end
    schemes = ["antidiffusive", "upwind"] if args.scheme == "both" else [args.scheme]
    m = len(cfg0.materials)
    var_names = (["rho", "u", "p"] + [f"Z_{k + 1}" for k in range(m)]
                 + [f"Y_{k + 1}" for k in range(m)])
    print("scheme,cells," + ",".join(var_names))
    all_rates = {}
    for scheme in schemes:
        errs = {v: [] for v in var_names}
        for n in cells:
            cfg = cases.builtin(args.case)
            cfg.cells = (n,)
            cfg.scheme = scheme
            cfg.t_end = t_end
            res = solver.run(cfg)
            f = res["fields"]
            (x0, x1) = cfg.domain[0]
            faces = np.linspace(x0, x1, n + 1)
            prof = sol.cell_averages(faces, t_end)
            prim = _primitives(f, cfg.materials)
            num = {"rho": prim["rho"][0], "u": prim["u"][0, 0], "p": prim["p"][0]}
            ref = {"rho": prof["rho"], "u": prof["u"], "p": prof["p"]}
            for k in range(m):
                num[f"Z_{k + 1}"] = f.z[k, 0]
                ref[f"Z_{k + 1}"] = prof["z"][k]
                num[f"Y_{k + 1}"] = prim["y"][k, 0]
                ref[f"Y_{k + 1}"] = prof["y"][k]
            line = [scheme, str(n)]
            for v in var_names:
                e = diagnostics.l1_error(num[v], ref[v])
                errs[v].append(e)
                line.append(_FMT % e)
            print(",".join(line))
        dxs = [1.0 / n for n in cells]
        # A variable the waves never reached has zero error on every mesh;
        # report nan instead of aborting the whole table.
        rates = {v: (diagnostics.convergence_rates(errs[v], dxs)
                     if all(e > 0.0 for e in errs[v]) else float("nan"))
                 for v in var_names}
        all_rates[scheme] = rates
        print(",".join([scheme, "rate"] + [_FMT % rates[v] for v in var_names]))
    return 0


def cmd_cases(args):
    for cid in sorted(_CASE_SUMMARY):
        print(f"{cid}: {_CASE_SUMMARY[cid]}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="multimat",
                                description="finite-volume multi-material flow solver")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--case", choices=sorted(_CASE_SUMMARY))
        sp.add_argument("--config")
        sp.add_argument("--scheme", choices=["upwind", "antidiffusive"])
        sp.add_argument("--cells")
        sp.add_argument("--cfl", type=float)
        sp.add_argument("--t-end", type=float, dest="t_end")
        sp.add_argument("--out")
        sp.add_argument("--snapshot-every", type=float, dest="snapshot_every")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--fix-shock-table", action="store_true")
        sp.add_argument("--progress-every", type=int, default=0)

    sp = sub.add_parser("run", help="run a simulation")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("exact", help="exact reference profile as CSV")
    sp.add_argument("--case", choices=["test2", "test3"])
    sp.add_argument("--config")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--cells", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("metrics", help="metrics over saved snapshots")
    sp.add_argument("--run", required=True)
    sp.add_argument("--epsilon", type=float, default=diagnostics.DIFFUSION_EPS)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("convergence", help="mesh-family error/rate table")
    sp.add_argument("--case", required=True, choices=["test2", "test3"])
    sp.add_argument("--cells", required=True)
    sp.add_argument("--scheme", default="both",
                    choices=["both", "upwind", "antidiffusive"])
    sp.add_argument("--t-end", type=float, dest="t_end")
    sp.set_defaults(func=cmd_convergence)

    sp = sub.add_parser("cases", help="list built-in cases")
    sp.set_defaults(func=cmd_cases)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MultimatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
