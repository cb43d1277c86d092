"""Built-in test cases and the JSON configuration schema.

A case is a declarative description: domain, mesh, boundary kinds, CFL
number, end time, material EOS list and an ordered list of regions.
Regions are evaluated first-match-wins at cell centers and produce sharp
0/1 color functions. All values are SI.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .eos import PerfectGas, StiffenedGas, VanDerWaals, eos_from_dict
from .errors import ConfigError
from .state import FieldSet

SQ2, SQ3 = math.sqrt(2.0), math.sqrt(3.0)

CASE_IDS = tuple(f"test{i}" for i in range(1, 8))


@dataclass
class Region:
    """Geometric predicate plus the uniform state assigned inside it."""

    shape: str
    params: dict
    material: int          # 0-based
    rho: float
    p: float
    u: tuple

    def contains(self, x, y):
        pr = self.params
        if self.shape == "all":
            return np.ones(np.broadcast_shapes(np.shape(x), np.shape(y)), bool)
        if self.shape == "interval":
            return (x >= pr["min"]) & (x < pr["max"])
        if self.shape == "halfplane":
            v = x if pr["axis"] == "x" else y
            return v < pr["value"] if pr["side"] == "below" else v >= pr["value"]
        if self.shape == "rect":
            return ((x >= pr["xmin"]) & (x < pr["xmax"])
                    & (y >= pr["ymin"]) & (y < pr["ymax"]))
        if self.shape == "disk":
            r2 = (x - pr["cx"]) ** 2 + (y - pr["cy"]) ** 2
            return r2 <= pr["r"] ** 2
        if self.shape == "ring":
            r2 = (x - pr["cx"]) ** 2 + (y - pr["cy"]) ** 2
            return (r2 > pr["r_inner"] ** 2) & (r2 < pr["r_outer"] ** 2)
        if self.shape == "star":
            # strip of half-width h crossed with two oblique bands of
            # half-width w around slopes +/- s through the center
            dx_, dy_ = x - pr["cx"], y - pr["cy"]
            s, h, w = pr["slope"], pr["half_height"], pr["half_width"]
            return ((np.abs(dy_) < h)
                    & (np.abs(dy_ - s * dx_) < w)
                    & (np.abs(dy_ + s * dx_) < w))
        raise ConfigError(f"unknown region shape {self.shape!r}")

    def to_dict(self):
        return {"shape": self.shape, **self.params, "material": self.material + 1,
                "rho": self.rho, "p": self.p, "u": list(self.u)}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        shape = d.pop("shape")
        mat = int(d.pop("material")) - 1
        rho, p = float(d.pop("rho")), float(d.pop("p"))
        u = tuple(float(v) for v in d.pop("u"))
        return cls(shape, d, mat, rho, p, u)


@dataclass
class CaseConfig:
    dims: int
    domain: tuple            # ((x0, x1),) or ((x0, x1), (y0, y1))
    cells: tuple             # (nx,) or (nx, ny)
    bc: dict                 # {"x": (lo, hi), "y": (lo, hi)}
    c_cfl: float
    t_end: float
    scheme: str
    materials: list
    regions: list
    velocity_perturbation: dict | None = None
    snapshot_every: float | None = None
    out_dir: str | None = None
    name: str = "custom"
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "name": self.name,
            "dims": self.dims,
            "domain": [list(ax) for ax in self.domain],
            "cells": list(self.cells),
            "bc": {ax: list(self.bc[ax]) for ax in self.bc},
            "c_cfl": self.c_cfl,
            "t_end": self.t_end,
            "scheme": self.scheme,
            "materials": [m.to_dict() for m in self.materials],
            "regions": [r.to_dict() for r in self.regions],
        }
        if self.velocity_perturbation:
            d["velocity_perturbation"] = self.velocity_perturbation
        if self.snapshot_every:
            d["snapshot_every"] = self.snapshot_every
        if self.out_dir:
            d["out_dir"] = self.out_dir
        if self.notes:
            d["notes"] = self.notes
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(
                dims=int(d["dims"]),
                domain=tuple(tuple(float(v) for v in ax) for ax in d["domain"]),
                cells=tuple(int(v) for v in d["cells"]),
                bc={ax: tuple(v) for ax, v in d["bc"].items()},
                c_cfl=float(d["c_cfl"]),
                t_end=float(d["t_end"]),
                scheme=d.get("scheme", "antidiffusive"),
                materials=[eos_from_dict(mm) for mm in d["materials"]],
                regions=[Region.from_dict(r) for r in d["regions"]],
                velocity_perturbation=d.get("velocity_perturbation"),
                snapshot_every=d.get("snapshot_every"),
                out_dir=d.get("out_dir"),
                name=d.get("name", "custom"),
                notes=d.get("notes", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad case config: {exc}") from exc

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))


def load_config(path):
    return CaseConfig.load(path)


def _interval(lo, hi, mat, rho, p=1e5, u=(100.0,)):
    return Region("interval", {"min": lo, "max": hi}, mat, rho, p, u)


def builtin(case_id, fix_shock_table=False):
    """Exact configuration of one of the seven built-in cases."""
    if case_id == "test1":
        mats = [PerfectGas(1.6), StiffenedGas(4.4, 6e8), VanDerWaals(1.4, 5.0, 1e-3),
                StiffenedGas(2.4, 2e8), PerfectGas(1.6)]
        xs = (0.0, 0.1, 0.25, 0.7, 0.9, 1.0)
        rhos = (50.0, 1000.0, 500.0, 1200.0, 150.0)
        regions = [_interval(xs[k], xs[k + 1], k, rhos[k]) for k in range(5)]
        return CaseConfig(1, ((0.0, 1.0),), (100,), {"x": ("periodic", "periodic")},
                          0.9, 0.01, "antidiffusive", mats, regions, name=case_id)
    if case_id == "test2":
        # gamma = 1.4 / 2.4 / 1.6 left-to-right: this assignment reproduces
        # the reference wave speeds D1 = 2.2780, D2 = 2.034 and
        # t_shock = 0.0878 simultaneously, while 1.6 / 2.4 / 1.4 does not.
        mats = [PerfectGas(1.4), PerfectGas(2.4), PerfectGas(1.6)]
        regions = [
            _interval(0.0, 0.4, 0, 1.0, 1.0, (0.0,)),
            _interval(0.4, 0.6, 1, 0.125, 0.1, (0.0,)),
            _interval(0.6, 1.0 + 1e-9, 2, 0.1, 0.1, (0.0,)),
        ]
        return CaseConfig(1, ((0.0, 1.0),), (500,), {"x": ("transparent", "transparent")},
                          0.8, 0.12, "antidiffusive", mats, regions, name=case_id)
    if case_id == "test3":
        mats = [StiffenedGas(4.4, 6e8), PerfectGas(2.4), PerfectGas(1.4)]
        regions = [
            _interval(0.0, 0.75, 0, 1000.0, 1e9, (0.0,)),
            _interval(0.75, 0.95, 1, 50.0, 1e5, (0.0,)),
            _interval(0.95, 1.0 + 1e-9, 2, 1.0, 1e5, (0.0,)),
        ]
        return CaseConfig(1, ((0.0, 1.0),), (2000,), {"x": ("transparent", "transparent")},
                          0.8, 270e-6, "antidiffusive", mats, regions, name=case_id)
    if case_id == "test4":
        mats = [PerfectGas(2.2), PerfectGas(1.6), PerfectGas(1.4), PerfectGas(1.2)]
        u = (SQ2, SQ3)
        regions = [
            Region("rect", {"xmin": 27.5, "xmax": 32.5, "ymin": 27.5, "ymax": 32.5},
                   3, 10.0, 1.0, u),
            Region("star", {"cx": 30.0, "cy": 30.0, "slope": SQ3,
                            "half_height": 7.5, "half_width": 15.0}, 2, 1.0, 1.0, u),
            Region("disk", {"cx": 30.0, "cy": 30.0, "r": 15.0}, 1, 0.1, 1.0, u),
            Region("all", {}, 0, 0.01, 1.0, u),
        ]
        return CaseConfig(2, ((0.0, 60.0), (0.0, 60.0)), (200, 200),
                          {"x": ("periodic", "periodic"), "y": ("periodic", "periodic")},
                          0.8, 42.5, "antidiffusive", mats, regions, name=case_id)
    if case_id == "test5":
        mats = [PerfectGas(1.6), PerfectGas(1.5), PerfectGas(1.4)]
        rest = (0.0, 0.0)
        regions = [
            Region("halfplane", {"axis": "x", "side": "below", "value": 1.0},
                   0, 1.0, 1.0, rest),
            Region("halfplane", {"axis": "y", "side": "above", "value": 1.5},
                   1, 0.125, 0.1, rest),
            Region("all", {}, 2, 1.0, 0.1, rest),
        ]
        return CaseConfig(2, ((0.0, 7.0), (0.0, 3.0)), (700, 300),
                          {"x": ("wall", "wall"), "y": ("wall", "wall")},
                          0.8, 5.0, "antidiffusive", mats, regions, name=case_id)
    if case_id == "test6":
        mats = [PerfectGas(1.4), PerfectGas(1.249), PerfectGas(1.6)]
        cx, cy = 0.225, 0.0445
        if fix_shock_table:
            left = dict(rho=1.225, p=1.01325e5, u=(0.0, 0.0))
            right = dict(rho=1.686, p=1.59e5, u=(-113.5, 0.0))
        else:
            # states assigned as printed in the source table; see the
            # fix_shock_table option for the shock-consistent pairing
            left = dict(rho=1.686, p=1.59e5, u=(0.0, 0.0))
            right = dict(rho=1.225, p=1.01325e5, u=(-113.5, 0.0))
        regions = [
            Region("disk", {"cx": cx, "cy": cy, "r": 0.015}, 2, 0.138, 1.01325e5, (0.0, 0.0)),
            Region("ring", {"cx": cx, "cy": cy, "r_inner": 0.015, "r_outer": 0.025},
                   1, 3.863, 1.01325e5, (0.0, 0.0)),
            Region("halfplane", {"axis": "x", "side": "below", "value": 0.275},
                   0, left["rho"], left["p"], left["u"]),
            Region("all", {}, 0, right["rho"], right["p"], right["u"]),
        ]
        cfg = CaseConfig(2, ((0.0, 0.445), (0.0, 0.089)), (1250, 250),
                         {"x": ("wall", "wall"), "y": ("wall", "wall")},
                         0.8, 1.2e-3, "antidiffusive", mats, regions, name=case_id)
        cfg.notes["shock_table"] = "fixed" if fix_shock_table else "as printed"
        return cfg
    if case_id == "test7":
        mats = [PerfectGas(5.0 / 3.0), PerfectGas(1.4), PerfectGas(2.4)]
        regions = [
            Region("rect", {"xmin": 0.25, "xmax": 0.75, "ymin": 0.25, "ymax": 0.75},
                   1, 2.0, 2.5, (0.5, 0.0)),
            Region("rect", {"xmin": 0.0, "xmax": 1.0 + 1e-9, "ymin": 0.25, "ymax": 0.75},
                   2, 2.0, 2.5, (0.5, 0.0)),
            Region("all", {}, 0, 1.0, 2.5, (-0.5, 0.0)),
        ]
        pert = {"type": "gaussian_bands", "component": "u2", "omega0": 0.1,
                "sigma": 0.05 / math.sqrt(2.0), "centers": [0.25, 0.75],
                "wavenumber": 4.0 * math.pi}
        return CaseConfig(2, ((0.0, 1.0), (0.0, 1.0)), (1000, 1000),
                          {"x": ("periodic", "periodic"), "y": ("periodic", "periodic")},
                          0.8, 2.0, "antidiffusive", mats, regions,
                          velocity_perturbation=pert, name=case_id)
    raise ConfigError(f"unknown case id {case_id!r}; choose one of {CASE_IDS}")


def cell_centers(config):
    (x0, x1) = config.domain[0]
    nx = config.cells[0]
    dx = (x1 - x0) / nx
    xc = x0 + (np.arange(nx) + 0.5) * dx
    if config.dims == 1:
        return xc, np.zeros(1), dx, dx
    (y0, y1) = config.domain[1]
    ny = config.cells[1]
    dy = (y1 - y0) / ny
    yc = y0 + (np.arange(ny) + 0.5) * dy
    return xc, yc, dx, dy


def instantiate(config):
    """Sample the region list at cell centers into a FieldSet."""
    from .state import conserved_from_primitive  # noqa: F401 (docs)
    xc, yc, dx, dy = cell_centers(config)
    nx = config.cells[0]
    ny = config.cells[1] if config.dims == 2 else 1
    m = len(config.materials)
    bc = dict(config.bc)
    if config.dims == 1:
        bc.setdefault("y", ("transparent", "transparent"))
    fields = FieldSet(config.dims, nx, ny, dx, dy, m, bc)

    X, Y = np.meshgrid(xc, yc if config.dims == 2 else np.array([0.0]))
    assigned = np.zeros((ny, nx), bool)
    rho = np.zeros((ny, nx))
    p = np.zeros((ny, nx))
    u = np.zeros((config.dims, ny, nx))
    mat = np.zeros((ny, nx), int)
    for reg in config.regions:
        if reg.material < 0 or reg.material >= m:
            raise ConfigError(f"region references material {reg.material + 1} of {m}")
        mask = reg.contains(X, Y) & ~assigned
        if not np.any(mask):
            continue
        mat[mask] = reg.material
        rho[mask] = reg.rho
        p[mask] = reg.p
        uu = np.broadcast_to(np.asarray(reg.u, float)[: config.dims, None], (config.dims, 1))
        u[:, mask] = uu
        assigned |= mask
    if not np.all(assigned):
        j, i = np.argwhere(~assigned)[0]
        raise ConfigError(
            f"cell at x={X[j, i]:.6g}, y={Y[j, i]:.6g} not covered by any region")

    vp = config.velocity_perturbation
    if vp:
        if vp.get("type") != "gaussian_bands" or vp.get("component") != "u2":
            raise ConfigError(f"unknown velocity perturbation {vp!r}")
        sig = float(vp["sigma"])
        bump = sum(np.exp(-((Y - c) ** 2) / (2.0 * sig * sig)) for c in vp["centers"])
        u[1] += float(vp["omega0"]) * np.sin(float(vp["wavenumber"]) * X) * bump

    for k in range(m):
        mk = mat == k
        fields.z[k][mk] = 1.0
        fields.pm[k][mk] = rho[mk]
    ke = 0.5 * rho * np.sum(u * u, axis=0)
    rho_e = np.zeros_like(rho)
    for k, eq in enumerate(config.materials):
        mk = mat == k
        if np.any(mk):
            rho_e[mk] = rho[mk] * np.asarray(eq.energy(rho[mk], p[mk]))
    fields.rhoE[:] = rho_e + ke
    fields.mom[:] = rho * u
    fields.validate()
    return fields
