"""Grid and cell state: conserved/primitive conversion and ghost cells.

Field arrays are stored interior-only with shape (ny, nx) per scalar,
(m, ny, nx) for per-material fields and (dims, ny, nx) for momentum.
1D runs use ny = 1. Sweeps pad two ghost layers along their own axis
only (the flux stencil spans cells i-1..i+2).
"""

from __future__ import annotations

import numpy as np

from . import eos as eos_mod
from .errors import ConfigError, StateError

NGHOST = 2

BC_KINDS = ("periodic", "transparent", "wall")


class FieldSet:
    """Dense cell data for a 1D or 2D Cartesian grid (no ghosts stored).

    Attributes
    ----------
    z : (m, ny, nx) color functions
    pm : (m, ny, nx) partial masses rho_k Z_k
    mom : (dims, ny, nx) momentum components
    rhoE : (ny, nx) total energy density
    bc : {"x": (lo, hi), "y": (lo, hi)} boundary kinds
    """

    def __init__(self, dims, nx, ny, dx, dy, m, bc):
        if dims not in (1, 2):
            raise ConfigError("dims must be 1 or 2")
        self.dims = dims
        self.nx, self.ny = int(nx), int(ny)
        self.dx, self.dy = float(dx), float(dy)
        self.m = int(m)
        for axis in ("x", "y")[: dims]:
            lo, hi = bc[axis]
            if lo not in BC_KINDS or hi not in BC_KINDS:
                raise ConfigError(f"unknown boundary kind in {bc[axis]!r}")
            if ("periodic" in (lo, hi)) and lo != hi:
                raise ConfigError("periodic boundaries must pair up")
        self.bc = bc
        self.z = np.zeros((m, ny, nx))
        self.pm = np.zeros((m, ny, nx))
        self.mom = np.zeros((dims, ny, nx))
        self.rhoE = np.zeros((ny, nx))

    def copy(self):
        out = FieldSet(self.dims, self.nx, self.ny, self.dx, self.dy, self.m, self.bc)
        out.z[:] = self.z
        out.pm[:] = self.pm
        out.mom[:] = self.mom
        out.rhoE[:] = self.rhoE
        return out

    @property
    def rho(self):
        return self.pm.sum(axis=0)

    def validate(self):
        if np.any(self.z < 0.0) or np.any(self.z > 1.0):
            raise StateError("color function outside [0, 1]")
        if np.max(np.abs(self.z.sum(axis=0) - 1.0)) > 1e-12:
            raise StateError("color functions do not sum to 1")
        if np.any(self.rho <= 0.0):
            raise StateError("non-positive mixture density")


def phasic_density(pm, z, z_floor=eos_mod.Z_FLOOR):
    """rho_k = (rho_k Z_k) / Z_k, zero where the phase has vanished."""
    pm = np.asarray(pm, float)
    z = np.asarray(z, float)
    act = (z > z_floor) & (pm > 0.0)
    return np.where(act, pm / np.where(act, z, 1.0), 0.0)


def phasic_density_raw(pm, z):
    """The ratio pm / z without the vanishing-phase cutoff.

    Used for face mass fluxes: the flux of rho_k Z_k must track the
    color flux all the way into the extinction tail, otherwise the two
    fields decay at different rates and their ratio diverges just above
    the closure threshold.
    """
    pm = np.asarray(pm, float)
    z = np.asarray(z, float)
    act = (z > 0.0) & (pm > 0.0)
    return np.where(act, pm / np.where(act, z, 1.0), 0.0)


def primitives_from_arrays(pm, z, mom, rhoE, eos_list, where="cell"):
    """Vectorized conserved -> primitive conversion.

    ``mom`` has the velocity-component axis first. Returns a dict with
    rho, u (components, u), p, e, rho_k, y.
    """
    rho = pm.sum(axis=0)
    if np.any(rho <= 0.0):
        raise StateError(f"non-positive density in {where}")
    u = mom / rho
    ke = 0.5 * rho * np.sum(u * u, axis=0)
    rho_e = rhoE - ke
    if np.any(rho_e < 0.0):
        raise StateError(f"negative internal energy in {where}")
    rho_k = phasic_density(pm, z)
    p = eos_mod.mixture_pressure(z, rho_k, rho_e, eos_list)
    return {
        "rho": rho,
        "u": u,
        "p": p,
        "rho_e": rho_e,
        "rho_k": rho_k,
        "y": pm / rho,
    }


def primitive_from_conserved(cell, eos_list):
    """Single-cell conversion; ``cell`` maps names to values.

    Expects keys pm (length m), z (length m), mom (length dims), rhoE.
    """
    pm = np.asarray(cell["pm"], float)[:, None, None]
    z = np.asarray(cell["z"], float)[:, None, None]
    mom = np.atleast_1d(np.asarray(cell["mom"], float))[:, None, None]
    rhoE = np.asarray(cell["rhoE"], float).reshape(1, 1)
    pr = primitives_from_arrays(pm, z, mom, rhoE, eos_list)
    return {
        "rho": float(pr["rho"][0, 0]),
        "u": pr["u"][:, 0, 0].copy(),
        "p": float(pr["p"][0, 0]),
        "z": np.asarray(cell["z"], float).copy(),
        "y": pr["y"][:, 0, 0].copy(),
        "rho_k": pr["rho_k"][:, 0, 0].copy(),
    }


def conserved_from_primitive(prim, eos_list, z_floor=eos_mod.Z_FLOOR):
    """Inverse of :func:`primitive_from_conserved`.

    Expects keys rho_k (phasic densities), z, u, p.
    """
    z = np.asarray(prim["z"], float)
    rho_k = np.asarray(prim["rho_k"], float)
    u = np.atleast_1d(np.asarray(prim["u"], float))
    p = float(prim["p"])
    pm = z * rho_k
    rho = pm.sum()
    if rho <= 0.0:
        raise StateError("non-positive density")
    rho_e = 0.0
    for k, eq in enumerate(eos_list):
        if z[k] > z_floor and rho_k[k] > 0.0:
            rho_e += z[k] * rho_k[k] * float(eq.energy(rho_k[k], p))
    rhoE = rho_e + 0.5 * rho * float(u @ u)
    return {"pm": pm, "z": z.copy(), "mom": rho * u, "rhoE": rhoE}


# ---------------------------------------------------------------------------
# Ghost cells
# ---------------------------------------------------------------------------

def _pad_indices(n, kind_lo, kind_hi):
    """Interior source index for each padded cell along one axis."""
    idx = np.empty(n + 2 * NGHOST, dtype=int)
    idx[NGHOST:-NGHOST] = np.arange(n)
    if kind_lo == "periodic":
        idx[:NGHOST] = np.arange(n - NGHOST, n)
    else:
        idx[:NGHOST] = 0
    if kind_hi == "periodic":
        idx[-NGHOST:] = np.arange(NGHOST)
    else:
        idx[-NGHOST:] = n - 1
    return idx


def fill_ghost(fields, axis="x"):
    """Padded copies of the field arrays along one sweep axis.

    Returns a dict with z, pm, mom, rhoE arrays extended by two ghost
    layers on each end of ``axis``. Wall ghosts negate the velocity
    component normal to that wall; transparent and wall both copy the
    nearest interior cell otherwise. Idempotent by construction (ghosts
    are recomputed from interior data only).
    """
    ax = {"x": -1, "y": -2}[axis]
    n = fields.nx if axis == "x" else fields.ny
    lo, hi = fields.bc[axis]
    idx = _pad_indices(n, lo, hi)
    z = np.take(fields.z, idx, axis=ax)
    pm = np.take(fields.pm, idx, axis=ax)
    mom = np.take(fields.mom, idx, axis=ax)
    rhoE = np.take(fields.rhoE, idx, axis=ax)
    normal = 0 if axis == "x" else 1
    if lo == "wall":
        sl = [slice(None)] * mom.ndim
        sl[ax] = slice(0, NGHOST)
        mom[(normal, *sl[1:])] *= -1.0
    if hi == "wall":
        sl = [slice(None)] * mom.ndim
        sl[ax] = slice(-NGHOST, None)
        mom[(normal, *sl[1:])] *= -1.0
    return {"z": z, "pm": pm, "mom": mom, "rhoE": rhoE}
