"""Quantitative metrics: diffusion-cell counting, L1 errors and convergence
rates, run-to-run permutation differences, conservation audits.

All functions are pure: they read snapshots/arrays and return numbers, so
re-evaluation is bit-identical and safe to run concurrently.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

#: A cell is a diffusion cell for material k when eps <= Z_k <= 1 - eps.
DIFFUSION_EPS = 1e-6


def diffusion_cells(z_k, epsilon=DIFFUSION_EPS):
    """Percentage of diffusion cells for one material's color field."""
    z_k = np.asarray(z_k, dtype=float)
    count = int(np.sum((z_k >= epsilon) & (z_k <= 1.0 - epsilon)))
    return 100.0 * count / z_k.size


def l1_error(numeric, reference):
    """Relative L1 error sum|a - ref| / sum|ref| (plain L1 if ref sums to 0)."""
    a = np.asarray(numeric, dtype=float)
    r = np.asarray(reference, dtype=float)
    if a.shape != r.shape:
        raise ConfigError(f"shape mismatch {a.shape} vs {r.shape}")
    denom = float(np.sum(np.abs(r)))
    num = float(np.sum(np.abs(a - r)))
    return num / denom if denom > 0.0 else num / a.size


def convergence_rates(errors, dxs):
    """Least-squares slope of log(error) vs log(dx) over a mesh family."""
    errors = np.asarray(errors, dtype=float)
    dxs = np.asarray(dxs, dtype=float)
    if errors.size != dxs.size or errors.size < 3:
        raise ConfigError("convergence rate needs at least 3 mesh points")
    if np.any(errors <= 0.0) or np.any(dxs <= 0.0):
        raise ConfigError("errors and dx must be positive for log regression")
    slope, _ = np.polyfit(np.log(dxs), np.log(errors), 1)
    return float(slope)


def _primitives(snapshot):
    """rho, u, p, Z (m,...), Y (m,...) from a snapshot dict."""
    return (snapshot["rho"], snapshot["u"], snapshot["p"],
            snapshot["z"], snapshot["y"])


def permutation_diff(snaps_a, snaps_b, sigma):
    """Maximal differences between a run and a material-permuted rerun.

    ``snaps_a``/``snaps_b`` are equal-length sequences of snapshot dicts
    with keys rho/u/p (cell arrays) and z/y (material-first arrays);
    ``sigma`` maps material index of run A to the index it has in run B.
    Returns {"e1": {rho,u,p}, "e2": {z: per-material array, y: ...}} where
    e1(a) = max |a - b| / (a + b) with 0 where both vanish, and
    e2(a_k) = max |a_k - b_{sigma(k)}|.
    """
    sigma = np.asarray(sigma, dtype=int)
    if len(snaps_a) != len(snaps_b):
        raise ConfigError("snapshot sequences differ in length")
    m = sigma.size
    if sorted(sigma.tolist()) != list(range(m)):
        raise ConfigError("sigma is not a permutation")
    e1 = {"rho": 0.0, "u": 0.0, "p": 0.0}
    e2 = {"z": np.zeros(m), "y": np.zeros(m)}
    for sa, sb in zip(snaps_a, snaps_b):
        for name in ("rho", "u", "p"):
            a = np.asarray(sa[name], dtype=float)
            b = np.asarray(sb[name], dtype=float)
            denom = a + b
            rel = np.where(denom != 0.0, np.abs(a - b) / np.where(denom != 0.0, denom, 1.0), 0.0)
            e1[name] = max(e1[name], float(np.max(np.abs(rel))))
        for name in ("z", "y"):
            a = np.asarray(sa[name], dtype=float)
            b = np.asarray(sb[name], dtype=float)
            diff = np.abs(a - b[sigma])
            e2[name] = np.maximum(e2[name], diff.reshape(m, -1).max(axis=1))
    return {"e1": e1, "e2": e2}


def conservation_audit(history):
    """Relative drift series for partial masses, momentum and total energy.

    ``history`` is a sequence of (t, totals) pairs where totals comes from
    ``solver.conservation_totals``. Returns {"t": array, "partial_mass":
    (n, m) drifts, "momentum": (n, dims), "energy": (n,)} relative to the
    first entry (zero totals fall back to the total-mass scale).
    """
    if not history:
        raise ConfigError("empty history")
    ts = np.asarray([t for t, _ in history], dtype=float)
    if np.any(np.diff(ts) <= 0.0):
        raise ConfigError("timestamps must be strictly increasing")
    t0, tot0 = history[0]
    mass = float(np.sum(tot0["partial_mass"]))
    out = {"t": ts}
    for name in ("partial_mass", "momentum"):
        ref = np.atleast_1d(np.asarray(tot0[name], dtype=float))
        scale = np.maximum(np.abs(ref), mass)
        rows = [np.abs(np.atleast_1d(tot[name]) - ref) / scale for _, tot in history]
        out[name] = np.asarray(rows)
    e_ref = float(tot0["energy"])
    out["energy"] = np.asarray(
        [abs(float(tot["energy"]) - e_ref) / max(abs(e_ref), mass) for _, tot in history])
    return out


def shock_position(rho, x, x_lo, x_hi):
    """Location of the strongest density jump inside [x_lo, x_hi].

    Used to compare the numeric shock front against the exact wave speeds:
    returns the face position with the largest |rho_{i+1} - rho_i|.
    """
    rho = np.asarray(rho, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    jumps = np.abs(np.diff(rho))
    faces = 0.5 * (x[:-1] + x[1:])
    ok = (faces >= x_lo) & (faces <= x_hi)
    if not np.any(ok):
        raise ConfigError("no faces inside the search window")
    idx = np.flatnonzero(ok)[int(np.argmax(jumps[ok]))]
    return float(faces[idx])
