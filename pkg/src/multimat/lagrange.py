"""Acoustic Lagrangian half of the scheme: face fluxes, CFL step, update.

All functions are vectorized over arbitrary leading shape with the sweep
axis last. A padded array of S cells has S-1 faces; face f sits between
cells f and f+1.
"""

from __future__ import annotations

import numpy as np

from .errors import HyperbolicityError, TimeStepError

L_FLOOR = 0.1


def acoustic_flux(rho_l, u_l, p_l, c2_l, rho_r, u_r, p_r, c2_r):
    """Relaxation face flux (p*, u*, (rho c)*).

    (rho c)* = sqrt(max(rho c^2 left/right) * min(rho left/right)); the
    mixed max/min pairing keeps the impedance finite across strong
    density jumps.
    """
    rc2_l = rho_l * c2_l
    rc2_r = rho_r * c2_r
    rc = np.sqrt(np.maximum(rc2_l, rc2_r) * np.minimum(rho_l, rho_r))
    if np.any(~(rc > 0.0)):
        raise HyperbolicityError("non-positive acoustic impedance at a face")
    p_star = 0.5 * (p_l + p_r) - 0.5 * rc * (u_r - u_l)
    u_star = 0.5 * (u_l + u_r) - 0.5 * (p_r - p_l) / rc
    return p_star, u_star, rc


def compute_dt(u_star, rho_c_star, rho_l, rho_r, dx, c_cfl, dt_max=np.inf):
    """Time step from the face-wise acoustic CFL bound.

    Inputs are arrays over the faces participating in the bound (faces
    between real cells plus the two boundary faces against ghosts). The
    step is additionally clipped so every Lagrangian volume factor stays
    above L_FLOOR; returns (dt, n_clipped) where n_clipped counts faces
    whose compression triggered the clip.
    """
    if not 0.0 < c_cfl <= 1.0:
        raise TimeStepError(f"CFL number {c_cfl} outside (0, 1]")
    signal = np.maximum(np.abs(u_star), rho_c_star / np.minimum(rho_l, rho_r))
    smax = float(np.max(signal)) if signal.size else 0.0
    if smax <= 0.0:
        dt = dt_max
        if not np.isfinite(dt):
            raise TimeStepError("static field and no dt_max configured")
    else:
        dt = min(c_cfl * dx / smax, dt_max)
    # L_i = 1 + (dt/dx) * (u*_{i+1/2} - u*_{i-1/2}) must stay above floor.
    du = np.diff(u_star, axis=-1)
    comp = float(np.max(-du)) if du.size else 0.0
    n_clipped = 0
    if comp > 0.0 and dt * comp / dx > 1.0 - L_FLOOR:
        dt_clip = (1.0 - L_FLOOR) * dx / comp
        if dt_clip < dt:
            n_clipped = int(np.count_nonzero(dt * (-du) / dx > 1.0 - L_FLOOR))
            dt = dt_clip
    return dt, n_clipped


def lagrange_update(pm, z, mom_n, mom_t, rhoE, p_star, u_star, dt, dx):
    """Cell update in material coordinates.

    Cell arrays span S cells along the last axis; ``p_star``/``u_star``
    span the S-1 faces. The update is returned for the S-2 inner cells
    (each needs both adjacent faces). ``mom_t`` may be None in 1D.

    Returns a dict with the volume factors L, the conservative-update
    numerators (num_mom, num_rhoE; partial masses and transverse
    momentum keep their cell values as numerators) and the tilde state
    (numerator / L). Color functions are untouched by this step.
    """
    lam = dt / dx
    du = u_star[..., 1:] - u_star[..., :-1]
    L = 1.0 + lam * du
    if np.any(L <= 0.0):
        raise TimeStepError("Lagrangian volume factor collapsed (L <= 0)")
    num_mom = mom_n[..., 1:-1] - lam * (p_star[..., 1:] - p_star[..., :-1])
    pu = p_star * u_star
    num_rhoE = rhoE[..., 1:-1] - lam * (pu[..., 1:] - pu[..., :-1])
    out = {
        "L": L,
        "num_mom": num_mom,
        "num_rhoE": num_rhoE,
        "num_pm": pm[..., 1:-1],
        "pm": pm[..., 1:-1] / L,
        "z": z[..., 1:-1],
        "mom_n": num_mom / L,
        "rhoE": num_rhoE / L,
    }
    if mom_t is not None:
        out["num_mom_t"] = mom_t[..., 1:-1]
        out["mom_t"] = mom_t[..., 1:-1] / L
    return out
