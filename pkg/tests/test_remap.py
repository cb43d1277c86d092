"""Color-function fluxes (upwind and anti-diffusive) and the grid projection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multimat import remap
from multimat.errors import StabilityViolationError


# ---------------------------------------------------------------------------
# Elementary flux pieces
# ---------------------------------------------------------------------------

def test_upwind_flux_cases():
    zl = np.array([0.2, 0.8])
    zr = np.array([0.9, 0.1])
    np.testing.assert_array_equal(remap.upwind_color_flux(zl, zr, 1.0), zl)
    np.testing.assert_array_equal(remap.upwind_color_flux(zl, zr, -1.0), zr)
    np.testing.assert_array_equal(remap.upwind_color_flux(zl, zr, 0.0), zr)
    assert remap.upwind_color_flux(zl, zr, 1.0).sum() == pytest.approx(1.0)


def test_consistency_bounds():
    assert remap.consistency_bounds(0.2, 0.7) == (0.2, 0.7)
    assert remap.consistency_bounds(1.0, 1.0) == (1.0, 1.0)
    assert remap.consistency_bounds(1.0, 0.0) == (0.0, 1.0)


def test_stability_bounds_uniform_contains_value():
    b = remap.stability_bounds([0.3, 0.3, 0.3, 0.3], 1.0, 1.0, 1.0, 0.5, 1.0)
    assert b[0] <= 0.3 <= b[1]


def test_stability_bounds_hand_example():
    # Rightward flow, u_prev = u_face = u, dt*u/dx = 0.5:
    # phi = (u - dx/dt)/u = 1 - 2 = -1 with z_{i-1} = 0, z_i = 1
    # gives bounds [1, 2].
    u = 1.0
    dt, dx = 0.5, 1.0
    b = remap.stability_bounds([0.0, 1.0, 0.3, 0.7], u, u, 0.2, dt, dx)
    assert b == pytest.approx((1.0, 2.0), rel=1e-14)


def test_stability_bounds_not_applicable():
    # Sign change between the face and its upwind neighbor face.
    assert remap.stability_bounds([0.1, 0.2, 0.3, 0.4], -1.0, 1.0, 1.0, 0.5, 1.0) is None
    assert remap.stability_bounds([0.1, 0.2, 0.3, 0.4], 1.0, -1.0, 1.0, 0.5, 1.0) is None
    # Face velocity below the floor.
    assert remap.stability_bounds([0.1, 0.2, 0.3, 0.4], 1.0, 1e-15, 1.0, 0.5, 1.0,
                                  u_floor=1e-12) is None


def test_stability_bound_implication_brute_force():
    # Every flux inside the returned interval must keep the updated cell
    # value inside the local bound of its upwind pair (deriving the bound
    # from the update formula rather than trusting the algebra).
    rng = np.random.default_rng(11)
    for _ in range(500):
        z = rng.uniform(0.0, 1.0, 4)
        u = rng.uniform(0.05, 2.0)
        u_prev = rng.uniform(0.05, 2.0)
        dx = 1.0
        dt = rng.uniform(0.05, 0.95) * dx / max(u, u_prev)
        b = remap.stability_bounds(z, u_prev, u, 0.0, dt, dx)
        assert b is not None
        lam = dt / dx
        # Upwind flux at the left face of the cell holding z[1].
        f_left = z[0]
        mm, MM = min(z[0], z[1]), max(z[0], z[1])
        for f in np.linspace(b[0], b[1], 7):
            z_new = z[1] * (1.0 + lam * (u - u_prev)) - lam * (u * f - u_prev * f_left)
            assert mm - 1e-12 <= z_new <= MM + 1e-12


def test_admissible_interval():
    assert remap.admissible_interval((0.0, 1.0), (0.3, 2.0)) == (0.3, 1.0)
    assert remap.admissible_interval((0.5, 0.5), (0.0, 1.0)) == (0.5, 0.5)


def test_admissible_interval_contains_upwind():
    rng = np.random.default_rng(21)
    for _ in range(500):
        z = rng.uniform(0.0, 1.0, 4)
        u = rng.uniform(0.05, 2.0)
        u_prev = rng.uniform(0.05, 2.0)
        dt = rng.uniform(0.05, 0.95) / max(u, u_prev)
        stab = remap.stability_bounds(z, u_prev, u, 0.0, dt, 1.0)
        cons = remap.consistency_bounds(z[1], z[2])
        lo, hi = remap.admissible_interval(cons, stab)
        up = z[1]  # rightward flow donor
        assert lo - 1e-12 <= up <= hi + 1e-12


def test_trust_intervals_two_materials_complement():
    # With two materials the second flux is pinned to 1 - flux_1 whenever
    # that value is admissible.
    omega = np.array([0.2, 0.1])
    big = np.array([0.6, 0.9])
    d1, D1 = remap.trust_intervals(omega, big, np.array([]))
    assert (d1, D1) == (0.2, 0.6)
    f1 = 0.45
    d2, D2 = remap.trust_intervals(omega[1:], big[1:], np.array([f1]))
    assert d2 == pytest.approx(1.0 - f1)
    assert D2 == pytest.approx(1.0 - f1)


def test_trust_intervals_three_materials_hand_example():
    omega = np.array([0.1, 0.2, 0.3])
    big = np.array([0.5, 0.6, 0.7])
    d1, D1 = remap.trust_intervals(omega, big, np.array([]))
    assert d1 == pytest.approx(0.1)  # max(0.1, 1 - 0.6 - 0.7)
    assert D1 == pytest.approx(0.5)  # min(0.5, 1 - 0.2 - 0.3)
    # Exhaustive cross-check: D1 must equal the largest f1 for which
    # admissible f2, f3 summing to 1 - f1 exist (and d1 the smallest).
    f1s = np.linspace(0.0, 1.0, 2001)
    feas = [(omega[1] + omega[2] <= 1.0 - f1 <= big[1] + big[2])
            and omega[0] <= f1 <= big[0] for f1 in f1s]
    idx = np.flatnonzero(feas)
    assert f1s[idx[0]] == pytest.approx(d1, abs=1e-3)
    assert f1s[idx[-1]] == pytest.approx(D1, abs=1e-3)


def test_antidiffusive_uniform_field():
    z = np.tile(np.array([[0.25], [0.75]]), (1, 4))
    f = remap.antidiffusive_color_fluxes(z, 1.0, 1.0, 1.0, 0.4, 1.0)
    np.testing.assert_allclose(f, [0.25, 0.75], rtol=1e-14)


def test_antidiffusive_sum_is_one():
    rng = np.random.default_rng(17)
    for _ in range(500):
        m = rng.integers(2, 4)
        z = rng.dirichlet(np.ones(m), size=4).T  # (m, 4) simplex columns
        u = rng.uniform(-2.0, 2.0, 3)
        dt = rng.uniform(0.05, 0.95) / max(1e-9, np.max(np.abs(u)))
        f = remap.antidiffusive_color_fluxes(z, u[0], u[1], u[2], dt, 1.0)
        assert abs(f.sum() - 1.0) <= 1e-12
        assert np.all(f >= -1e-12)


def test_antidiffusive_reduces_to_upwind_when_not_applicable():
    rng = np.random.default_rng(5)
    z = rng.dirichlet([1.0, 1.0], size=4).T
    f = remap.antidiffusive_color_fluxes(z, -1.0, 1.0, 1.0, 0.4, 1.0)
    np.testing.assert_array_equal(f, z[:, 1])


def test_step_transport_stays_sharp():
    # Advect a two-material step at constant velocity; the anti-diffusive
    # choice must keep at most one partially-mixed cell after traversal.
    n = 50
    z1 = np.zeros(n)
    z1[: n // 2] = 1.0
    z = np.stack([z1, 1.0 - z1])
    u = 1.0
    dx = 1.0 / n
    dt = 0.5 * dx / u
    n_steps = int(0.3 / (u * dt))
    zp = z.copy()
    for _ in range(n_steps):
        zg = np.concatenate([zp[:, :1], zp[:, :1], zp, zp[:, -1:], zp[:, -1:]],
                            axis=1)  # 2-ghost transparent pad
        uf = np.full(zg.shape[1] - 1, u)
        flux = remap.color_fluxes_sweep(zg[:, None, :], uf[None, :], dt, dx,
                                        "antidiffusive")[:, 0, :]
        lam = dt / dx
        inner = zg[:, 2:-2]
        zp = inner - lam * u * (flux[:, 1:] - flux[:, :-1])
    exact = np.zeros(n)
    exact[: n // 2 + int(round(0.3 * n))] = 1.0
    mixed = np.sum((zp[0] > 1e-9) & (zp[0] < 1.0 - 1e-9))
    assert mixed <= 1
    assert np.sum(np.abs(zp[0] - exact)) <= 1.0 + 1e-9  # at most one cell of error


def test_sweep_kernel_matches_scalar_reference():
    # The vectorized sweep must agree with the per-face scalar routine.
    rng = np.random.default_rng(23)
    for trial in range(50):
        m = int(rng.integers(2, 4))
        s = 10
        z = rng.dirichlet(np.ones(m), size=s).T[:, None, :]
        u_star = rng.uniform(-2.0, 2.0, s - 1)[None, :]
        dx = 0.1
        dt = rng.uniform(0.05, 0.95) * dx / np.max(np.abs(u_star))
        got = remap.color_fluxes_sweep(z, u_star, dt, dx, "antidiffusive")
        u_floor = remap.VELOCITY_FLOOR_REL * max(1.0, float(np.max(np.abs(u_star))))
        for f in range(s - 3):
            stencil = z[:, 0, f: f + 4]
            ref = remap.antidiffusive_color_fluxes(
                stencil, u_star[0, f], u_star[0, f + 1], u_star[0, f + 2],
                dt, dx, u_floor)
            np.testing.assert_allclose(got[:, 0, f], ref, rtol=1e-12, atol=1e-14,
                                       err_msg=f"trial {trial} face {f}")


def test_sweep_upwind_path():
    rng = np.random.default_rng(2)
    z = rng.dirichlet([1.0, 1.0, 1.0], size=8).T[:, None, :]
    u_star = rng.uniform(-1.0, 1.0, 7)[None, :]
    got = remap.color_fluxes_sweep(z, u_star, 0.01, 0.1, "upwind")
    expect = np.where(u_star[None, :, 1:-1] > 0, z[..., 1:-2], z[..., 2:-1])
    np.testing.assert_array_equal(got, expect)


# ---------------------------------------------------------------------------
# Remap projection
# ---------------------------------------------------------------------------

def _tilde_uniform(m, s, rho_k=2.0, rhoe_k=5.0, u=0.0):
    return {
        "rho_k": np.full((m, 1, s), rho_k),
        "rhoe_k": np.full((m, 1, s), rhoe_k),
        "u": np.full((1, s), u),
    }


def test_remap_update_zero_velocity_identity():
    m, s = 2, 8  # padded cells; lagrange output spans s-2, faces s-3
    z = np.tile(np.array([[0.3], [0.7]]), (1, s - 2))[:, None, :]
    lag = {
        "num_pm": np.full((m, 1, s - 2), 1.0),
        "num_mom": np.zeros((1, s - 2)),
        "num_rhoE": np.full((1, s - 2), 4.0),
        "z": z,
    }
    u_star = np.zeros((1, s - 3))
    tilde = _tilde_uniform(m, s - 2)
    flux = np.tile(np.array([[0.3], [0.7]]), (1, s - 3))[:, None, :]
    face = remap.remap_face_flux(tilde, flux, u_star)
    out = remap.remap_update(lag, face, u_star, 0.1, 0.5)
    np.testing.assert_array_equal(out["pm"], lag["num_pm"][..., 1:-1])
    np.testing.assert_array_equal(out["z"], z[..., 1:-1])
    np.testing.assert_array_equal(out["rhoE"], lag["num_rhoE"][..., 1:-1])


def test_remap_face_flux_donor_side():
    m, s = 2, 5
    tilde = {
        "rho_k": np.arange(m * s, dtype=float).reshape(m, 1, s) + 1.0,
        "rhoe_k": np.arange(m * s, dtype=float).reshape(m, 1, s) + 10.0,
        "u": np.arange(s, dtype=float)[None, :] - 2.0,
    }
    z_flux = np.full((m, 1, s - 1), 0.5)
    u_star = np.array([[1.0, -1.0, 1.0, -1.0]])
    face = remap.remap_face_flux(tilde, z_flux, u_star)
    # u* > 0 takes the left cell, u* < 0 the right cell.
    assert face["u"][0, 0] == tilde["u"][0, 0]
    assert face["u"][0, 1] == tilde["u"][0, 2]
    assert face["pm"][0, 0, 0] == pytest.approx(0.5 * tilde["rho_k"][0, 0, 0])
    assert face["pm"][0, 0, 1] == pytest.approx(0.5 * tilde["rho_k"][0, 0, 2])
    # Total energy assembles rho e + rho u^2 / 2 from the face pieces.
    k0 = face["rho"][0, 0] * face["u"][0, 0] ** 2 / 2.0
    rhoe = (z_flux[:, 0, 0] * np.array([tilde["rhoe_k"][0, 0, 0],
                                        tilde["rhoe_k"][1, 0, 0]])).sum()
    assert face["rhoE"][0, 0] == pytest.approx(rhoe + k0, rel=1e-14)


def test_upwind_remap_matches_donor_cell_advection():
    # Uniform velocity, uniform pressure: the full remap of partial mass
    # must equal independent donor-cell transport of the same field.
    n = 16
    rng = np.random.default_rng(31)
    rho = rng.uniform(0.5, 2.0, n)
    u = 1.0
    dx = 1.0 / n
    dt = 0.4 * dx / u
    lam = dt / dx
    # Periodic pad by two cells.
    pad = np.concatenate([rho[-2:], rho, rho[:2]])
    s = pad.size
    z = np.ones((1, 1, s))
    pm = pad[None, None, :]
    u_star = np.full((1, s - 1), u)
    p_star = np.full((1, s - 1), 1.0)
    from multimat import lagrange
    lag = lagrange.lagrange_update(pm, z, pad[None, :] * u, None,
                                   np.full((1, s), 3.0), p_star, u_star, dt, dx)
    tilde = {"rho_k": lag["pm"] / lag["z"], "rhoe_k": np.full((1, 1, s - 2), 1.0),
             "u": lag["mom_n"] / lag["pm"].sum(axis=0)}
    flux = remap.color_fluxes_sweep(z, u_star, dt, dx, "upwind")
    face = remap.remap_face_flux(tilde, flux, u_star[..., 1:-1])
    out = remap.remap_update(lag, face, u_star[..., 1:-1], dt, dx)
    expect = rho - lam * u * (rho - np.roll(rho, 1))
    np.testing.assert_allclose(out["pm"][0, 0], expect, rtol=1e-12)


def test_sanitize_colors():
    z = np.array([[[1.0 + 5e-13, -5e-13]], [[-5e-13, 1.0 + 5e-13]]])
    pm = np.array([[[1.0, 0.0]], [[0.0, 2.0]]])
    z2, pm2, viol = remap.sanitize_colors(z, pm)
    assert 0.0 < viol <= 1e-12
    assert np.all(z2 >= 0.0) and np.all(z2 <= 1.0)
    np.testing.assert_allclose(z2.sum(axis=0), 1.0, rtol=0, atol=1e-15)
    with pytest.raises(StabilityViolationError):
        remap.sanitize_colors(np.array([[[1.5]], [[-0.5]]]), np.ones((2, 1, 1)))


@settings(max_examples=300, deadline=None)
@given(data=st.data())
def test_updated_colors_stay_on_simplex(data):
    # One projection step from random simplex columns and CFL-compliant
    # velocities keeps every Z column on the simplex.
    m = data.draw(st.integers(2, 3))
    s = 9
    cols = [data.draw(st.lists(st.floats(1e-3, 1.0), min_size=m, max_size=m))
            for _ in range(s)]
    z = np.array([np.array(c) / np.sum(c) for c in cols]).T[:, None, :]
    u = np.array([data.draw(st.floats(-2.0, 2.0)) for _ in range(s - 1)])[None, :]
    dx = 0.1
    vmax = max(1e-6, float(np.max(np.abs(u))))
    # Keep lam*(|u_l| + |u_r|) <= 1: compressive faces fall back to the
    # donor cell, which is only a convex update under this bound.
    dt = data.draw(st.floats(0.05, 0.45)) * dx / vmax
    flux = remap.color_fluxes_sweep(z, u, dt, dx, "antidiffusive")
    lam = dt / dx
    uf = u[..., 1:-1]
    du = uf[..., 1:] - uf[..., :-1]
    q = uf * flux
    z_new = z[..., 2:-2] * (1.0 + lam * du) - lam * (q[..., 1:] - q[..., :-1])
    assert np.all(z_new >= -1e-12)
    assert np.all(z_new <= 1.0 + 1e-12)
    np.testing.assert_allclose(z_new.sum(axis=0), 1.0, rtol=0, atol=1e-12)
