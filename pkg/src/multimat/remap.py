"""Remap onto the Eulerian grid with upwind or anti-diffusive color fluxes.

The anti-diffusive choice picks each color-function face value as close
as possible to the downwind value inside a trust interval built from
three constraints: consistency (between the neighbor values), an L-inf
stability bound, and the unity constraint across materials (enforced by
a sequential recursion over k). When the local velocity pattern rules
the bound out, the face falls back to plain upwind.

Vectorized kernels operate on padded sweep arrays: cells along the last
axis (S of them), faces between consecutive cells (S-1), with fluxes
produced for the inner faces f = 1 .. S-3.
"""

from __future__ import annotations

import numpy as np

from .errors import InternalConsistencyError, StabilityViolationError

# Faces slower than this (relative to the sweep's fastest face) use the
# upwind fallback; the stability bounds divide by u*.
VELOCITY_FLOOR_REL = 1e-12

# Width by which floating-point noise may leave an interval empty before
# it is treated as a formula bug rather than round-off.
_EMPTY_TOL = 1e-11


def upwind_color_flux(z_i, z_i1, u_star):
    """Donor-cell color flux; ties (u* = 0) take the right state."""
    z_i = np.asarray(z_i, float)
    z_i1 = np.asarray(z_i1, float)
    return np.where(u_star > 0.0, z_i, z_i1)


def consistency_bounds(z_k_i, z_k_i1):
    return min(z_k_i, z_k_i1), max(z_k_i, z_k_i1)


def stability_bounds(z_stencil, u_prev, u_face, u_next, dt, dx, u_floor=0.0):
    """L-inf stability interval for the flux at face i+1/2, or None.

    ``z_stencil`` holds (z_{i-1}, z_i, z_{i+1}, z_{i+2}) for one
    material. Applicable only when the face velocity and its upwind
    neighbor face (i-1/2 for rightward flow, i+3/2 for leftward) share
    the sign; otherwise the caller falls back to upwind.
    """
    zm1, z0, z1, z2 = (float(v) for v in z_stencil)
    if abs(u_face) <= u_floor:
        return None
    if u_face > 0.0 and u_prev > 0.0:
        phi = (u_prev - dx / dt) / u_face
        mm, MM = min(zm1, z0), max(zm1, z0)
        a = z0 + (MM - z0) * phi
        A = z0 + (mm - z0) * phi
    elif u_face < 0.0 and u_next < 0.0:
        phi = (u_next + dx / dt) / u_face
        mm, MM = min(z1, z2), max(z1, z2)
        a = z1 + (MM - z1) * phi
        A = z1 + (mm - z1) * phi
    else:
        return None
    return min(a, A), max(a, A)


def admissible_interval(cons, stab):
    """[omega, Omega] = consistency  intersect  stability (both required)."""
    lo = max(cons[0], stab[0])
    hi = min(cons[1], stab[1])
    if lo > hi:
        if lo - hi <= _EMPTY_TOL * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            return mid, mid
        raise InternalConsistencyError(
            f"empty admissible interval [{lo}, {hi}]")
    return lo, hi


def trust_intervals(omega, big_omega, fluxes_fixed):
    """Trust interval [d_k, D_k] for the next material in the recursion.

    ``fluxes_fixed`` are the face values already chosen for materials
    before k; ``omega``/``big_omega`` are the admissible bounds for
    materials k..m-1 (k first). The unity constraint squeezes material
    k's interval by what the fixed fluxes used up and what later
    materials can still contribute.
    """
    f_sum = float(np.sum(fluxes_fixed))
    suf_lo = float(np.sum(omega[1:]))
    suf_hi = float(np.sum(big_omega[1:]))
    d = max(omega[0], 1.0 - f_sum - suf_hi)
    D = min(big_omega[0], 1.0 - f_sum - suf_lo)
    if d > D:
        if d - D <= _EMPTY_TOL * max(1.0, abs(d), abs(D)):
            mid = 0.5 * (d + D)
            return mid, mid
        raise InternalConsistencyError(f"empty trust interval [{d}, {D}]")
    return d, D


def antidiffusive_color_fluxes(z_stencil, u_prev, u_face, u_next, dt, dx,
                               u_floor=0.0):
    """Face color fluxes for all m materials at one face.

    ``z_stencil`` has shape (m, 4) holding columns i-1, i, i+1, i+2.
    Falls back to the upwind vector whenever the stability bound is not
    applicable at this face (one shared test for all materials).
    """
    z_stencil = np.asarray(z_stencil, float)
    m = z_stencil.shape[0]
    up = upwind_color_flux(z_stencil[:, 1], z_stencil[:, 2], u_face)
    stab0 = stability_bounds(z_stencil[0], u_prev, u_face, u_next, dt, dx, u_floor)
    if stab0 is None:
        return up
    omega = np.empty(m)
    big = np.empty(m)
    for k in range(m):
        stab = stab0 if k == 0 else stability_bounds(
            z_stencil[k], u_prev, u_face, u_next, dt, dx, u_floor)
        cons = consistency_bounds(z_stencil[k, 1], z_stencil[k, 2])
        omega[k], big[k] = admissible_interval(cons, stab)
    z_do = np.where(u_face > 0.0, z_stencil[:, 2], z_stencil[:, 1])
    flux = np.empty(m)
    for k in range(m):
        d, D = trust_intervals(omega[k:], big[k:], flux[:k])
        flux[k] = min(max(z_do[k], d), D)
    return flux


# ---------------------------------------------------------------------------
# Vectorized sweep kernels
# ---------------------------------------------------------------------------

def color_fluxes_sweep(z, u_star, dt, dx, scheme):
    """Color fluxes at inner faces f = 1 .. S-3 of a padded sweep.

    z: (m, R, S) pre-remap colors; u_star: (R, S-1). Returns (m, R, S-3).
    """
    zl = z[..., 1:-2]
    zr = z[..., 2:-1]
    uf = u_star[..., 1:-1]
    upwind = np.where(uf > 0.0, zl, zr)
    if scheme == "upwind":
        return upwind

    mm = np.minimum(z[..., :-1], z[..., 1:])
    MM = np.maximum(z[..., :-1], z[..., 1:])
    m_f, M_f = mm[..., 1:-1], MM[..., 1:-1]
    u_prev = u_star[..., :-2]
    u_next = u_star[..., 2:]
    u_floor = VELOCITY_FLOOR_REL * max(1.0, float(np.max(np.abs(u_star))))
    case_a = (uf > 0.0) & (u_prev > 0.0) & (np.abs(uf) > u_floor)
    case_b = (uf < 0.0) & (u_next < 0.0) & (np.abs(uf) > u_floor)
    applicable = case_a | case_b
    if not np.any(applicable):
        return upwind

    inv_lam = dx / dt
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        phi = np.where(case_a, (u_prev - inv_lam), (u_next + inv_lam)) / uf
    phi = np.where(applicable, phi, 0.0)
    anchor = np.where(case_a, zl, zr)
    ext_hi = np.where(case_a, MM[..., :-2], MM[..., 2:])
    ext_lo = np.where(case_a, mm[..., :-2], mm[..., 2:])
    a = anchor + (ext_hi - anchor) * phi
    A = anchor + (ext_lo - anchor) * phi
    lo_s = np.minimum(a, A)
    hi_s = np.maximum(a, A)

    omega = np.maximum(m_f, lo_s)
    big = np.minimum(M_f, hi_s)
    gap = omega - big
    if np.any(gap[:, applicable] > _EMPTY_TOL):
        raise InternalConsistencyError("empty admissible interval in sweep")
    bad = gap > 0.0
    if np.any(bad):
        mid = 0.5 * (omega + big)
        omega = np.where(bad, mid, omega)
        big = np.where(bad, mid, big)

    z_do = np.where(uf > 0.0, zr, zl)
    nm = z.shape[0]
    flux = np.empty_like(upwind)
    # Suffix sums over materials after k (unity-constraint headroom).
    suf_lo = np.concatenate(
        [np.cumsum(omega[::-1], axis=0)[::-1][1:], np.zeros((1,) + omega.shape[1:])])
    suf_hi = np.concatenate(
        [np.cumsum(big[::-1], axis=0)[::-1][1:], np.zeros((1,) + big.shape[1:])])
    f_sum = np.zeros(omega.shape[1:])
    for k in range(nm):
        d = np.maximum(omega[k], 1.0 - f_sum - suf_hi[k])
        D = np.minimum(big[k], 1.0 - f_sum - suf_lo[k])
        gap = d - D
        if np.any(gap[applicable] > _EMPTY_TOL):
            raise InternalConsistencyError("empty trust interval in sweep")
        bad = gap > 0.0
        if np.any(bad):
            mid = 0.5 * (d + D)
            d = np.where(bad, mid, d)
            D = np.where(bad, mid, D)
        flux[k] = np.minimum(np.maximum(z_do[k], d), D)
        f_sum = f_sum + flux[k]
    return np.where(applicable, flux, upwind)


def remap_face_flux(tilde, z_flux, u_star_faces):
    """Assembled face quantities for the remap update.

    ``tilde`` holds per-cell Lagrangian values over S-2 cells (material
    axis first where applicable): rho_k, rhoe_k (phasic rho_k e_k), u
    (sweep-normal velocity), and optionally u_t. ``z_flux`` and
    ``u_star_faces`` cover the S-3 inner faces. Phasic quantities and
    velocity take their donor-cell value by the sign of u*.
    """
    donor_right = ~(u_star_faces > 0.0)
    rho_k = np.where(donor_right, tilde["rho_k"][..., 1:], tilde["rho_k"][..., :-1])
    rhoe_k = np.where(donor_right, tilde["rhoe_k"][..., 1:], tilde["rhoe_k"][..., :-1])
    u = np.where(donor_right, tilde["u"][..., 1:], tilde["u"][..., :-1])
    pm_flux = z_flux * rho_k
    rho = pm_flux.sum(axis=0)
    rho_e = (z_flux * rhoe_k).sum(axis=0)
    out = {"pm": pm_flux, "rho": rho, "u": u, "z": z_flux}
    ke = u * u
    if "u_t" in tilde:
        u_t = np.where(donor_right, tilde["u_t"][..., 1:], tilde["u_t"][..., :-1])
        ke = ke + u_t * u_t
        out["mom_t"] = rho * u_t
    out["mom"] = rho * u
    out["rhoE"] = rho_e + 0.5 * rho * ke
    return out


def remap_update(lag, face, u_star, dt, dx):
    """Project the Lagrangian state back onto the fixed grid.

    ``lag`` is the dict from lagrange_update (S-2 cells), ``face`` comes
    from remap_face_flux and ``u_star`` spans the same S-3 inner faces.
    Returns conserved arrays for the S-4 real cells. The conserved
    quantities use the telescoped form (Lagrangian numerator minus the
    face-flux difference) so that sums over a periodic domain cancel
    exactly; the color functions use the volume-factor form, whose face
    sums are exactly 1 by construction of the fluxes.
    """
    lam = dt / dx

    def ddiff(flux_arr):
        q = u_star * flux_arr
        return q[..., 1:] - q[..., :-1]

    inner = slice(1, -1)
    pm_new = lag["num_pm"][..., inner] - lam * ddiff(face["pm"])
    mom_new = lag["num_mom"][..., inner] - lam * ddiff(face["mom"])
    rhoE_new = lag["num_rhoE"][..., inner] - lam * ddiff(face["rhoE"])
    du = u_star[..., 1:] - u_star[..., :-1]
    z_new = lag["z"][..., inner] * (1.0 + lam * du) - lam * ddiff(face["z"])
    out = {"pm": pm_new, "mom": mom_new, "rhoE": rhoE_new, "z": z_new}
    if "mom_t" in face:
        out["mom_t"] = lag["num_mom_t"][..., inner] - lam * ddiff(face["mom_t"])
    return out


def sanitize_colors(z, pm, tol=1e-12):
    """Clamp round-off excursions of Z_k to [0, 1] and renormalize.

    Raises StabilityViolationError for violations beyond ``tol`` (those
    indicate a scheme bug, not round-off). Partial masses only get tiny
    negatives zeroed; their sum is left untouched (conservation).
    Returns (z, pm, max_violation_seen).
    """
    viol = max(float(np.max(-z, initial=0.0)), float(np.max(z - 1.0, initial=0.0)))
    if viol > tol:
        i = np.unravel_index(int(np.argmax(np.maximum(-z, z - 1.0))), z.shape)
        raise StabilityViolationError(
            f"color function out of [0,1] by {viol:.3e} at index {i}")
    zsum = z.sum(axis=0)
    if np.max(np.abs(zsum - 1.0)) > tol:
        raise StabilityViolationError("color functions sum away from 1")
    z = np.clip(z, 0.0, 1.0)
    z = z / z.sum(axis=0)
    rho = pm.sum(axis=0)
    if np.any(pm < -tol * rho):
        raise StabilityViolationError("negative partial mass beyond round-off")
    pm = np.maximum(pm, 0.0)
    return z, pm, viol
