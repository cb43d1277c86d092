"""Exact Riemann solver for perfect/stiffened gases, used as a reference.

A stiffened gas behaves exactly like a perfect gas in the shifted pressure
P = p + pi: the Hugoniot curve, the isentrope P ~ rho^gamma and the sound
speed c^2 = gamma*P/rho all keep the perfect-gas algebra. The solver below
therefore runs the classical two-wave iteration on shifted pressures, which
gives a single code path for both laws.

`compose_juxtaposed` chains two such solutions for the three-material
shock-tube layouts: a first fan whose right-going shock later hits the
initially stationary second interface, spawning a transmitted shock and a
reflected wave. The composed profile is exact up to the time the reflected
wave re-interacts with the first fan (the validity window).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import PerfectGas, StiffenedGas
from .errors import ClosureFailureError, ConfigError, VacuumError

_TOL = 1e-14
_MAX_ITER = 200


def _gamma_pi(eos):
    if isinstance(eos, PerfectGas):
        return eos.gamma, 0.0
    if isinstance(eos, StiffenedGas):
        return eos.gamma, eos.pi
    raise ConfigError("exact solver supports perfect and stiffened gases only")


@dataclass(frozen=True)
class Side:
    """One initial state of the Riemann problem, with precomputed constants."""

    rho: float
    u: float
    p: float
    gamma: float
    pi: float

    @property
    def shifted_p(self):
        return self.p + self.pi

    @property
    def c(self):
        return np.sqrt(self.gamma * self.shifted_p / self.rho)


def _side(state, eos):
    gamma, pi = _gamma_pi(eos)
    rho, u, p = float(state["rho"]), float(state["u"]), float(state["p"])
    if rho <= 0.0 or p + pi <= 0.0:
        raise ConfigError("non-physical Riemann input state")
    return Side(rho, u, p, gamma, pi)


def _f_side(p, s):
    """Velocity change across the wave facing side ``s`` and its dp-derivative."""
    P = p + s.pi
    Pk = s.shifted_p
    g = s.gamma
    if P > Pk:  # shock
        a = 2.0 / ((g + 1.0) * s.rho)
        b = (g - 1.0) / (g + 1.0) * Pk
        root = np.sqrt(a / (P + b))
        f = (P - Pk) * root
        df = root * (1.0 - 0.5 * (P - Pk) / (P + b))
    elif P <= 0.0:  # vacuum limit of the rarefaction branch
        f = -2.0 * s.c / (g - 1.0)
        df = np.inf
    else:  # rarefaction
        f = 2.0 * s.c / (g - 1.0) * ((P / Pk) ** ((g - 1.0) / (2.0 * g)) - 1.0)
        df = (P / Pk) ** (-(g + 1.0) / (2.0 * g)) / (s.rho * s.c)
    return f, df


@dataclass(frozen=True)
class RiemannSolution:
    left: Side
    right: Side
    p_star: float
    u_star: float
    rho_star_l: float
    rho_star_r: float
    # Wave speeds: (head, tail) coincide for shocks.
    left_head: float
    left_tail: float
    right_head: float
    right_tail: float

    @property
    def left_is_shock(self):
        return self.p_star > self.left.p

    @property
    def right_is_shock(self):
        return self.p_star > self.right.p


def solve_exact(left, right, left_eos, right_eos):
    """Exact solution of the two-state problem; states are dicts rho/u/p."""
    sl, sr = _side(left, left_eos), _side(right, right_eos)
    du = sr.u - sl.u
    # Positivity of both shifted star pressures bounds p from below.
    p_floor = max(-sl.pi, -sr.pi)
    # Pressure when both waves are full rarefactions down to P -> 0.
    f_floor = (_f_side(p_floor, sl)[0] + _f_side(p_floor, sr)[0] + du)
    if f_floor >= 0.0:
        raise VacuumError("states separate faster than the gases can expand")

    scale = max(sl.shifted_p, sr.shifted_p)
    # Linearized (primitive-variable) guess, clamped into the bracket.
    p0 = 0.5 * (sl.p + sr.p) - 0.125 * du * (sl.rho + sr.rho) * (sl.c + sr.c)
    hi = max(p0, sl.p, sr.p) + scale
    g_hi = _f_side(hi, sl)[0] + _f_side(hi, sr)[0] + du
    n = 0
    while g_hi < 0.0:
        hi = p_floor + 10.0 * (hi - p_floor)
        g_hi = _f_side(hi, sl)[0] + _f_side(hi, sr)[0] + du
        n += 1
        if n > _MAX_ITER:
            raise ClosureFailureError("pressure bracket expansion failed",
                                      residual=abs(g_hi))
    lo = p_floor
    p = min(max(p0, lo + 1e-12 * scale), hi)
    for _ in range(_MAX_ITER):
        fl, dfl = _f_side(p, sl)
        fr, dfr = _f_side(p, sr)
        g = fl + fr + du
        if g > 0.0:
            hi = p
        else:
            lo = p
        step = g / (dfl + dfr)
        p_new = p - step
        if not (lo < p_new < hi):  # Newton left the bracket: bisect
            p_new = 0.5 * (lo + hi)
        if abs(p_new - p) <= _TOL * max(abs(p_new) + sl.pi, abs(p_new) + sr.pi, scale):
            p = p_new
            break
        p = p_new
    fl, _ = _f_side(p, sl)
    fr, _ = _f_side(p, sr)
    u_star = 0.5 * (sl.u + sr.u) + 0.5 * (fr - fl)

    def star_density(s):
        ratio = (p + s.pi) / s.shifted_p
        beta = (s.gamma - 1.0) / (s.gamma + 1.0)
        if p > s.p:
            return s.rho * (ratio + beta) / (beta * ratio + 1.0)
        return s.rho * ratio ** (1.0 / s.gamma)

    rho_l, rho_r = star_density(sl), star_density(sr)

    def wave_speeds(s, sign, rho_star):
        ratio = (p + s.pi) / s.shifted_p
        g = s.gamma
        if p > s.p:
            speed = s.u + sign * s.c * np.sqrt(
                (g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g))
            return speed, speed
        c_star = np.sqrt(g * (p + s.pi) / rho_star)
        return s.u + sign * s.c, u_star + sign * c_star

    lh, lt = wave_speeds(sl, -1.0, rho_l)
    rh, rt = wave_speeds(sr, +1.0, rho_r)
    return RiemannSolution(sl, sr, float(p), float(u_star), float(rho_l),
                           float(rho_r), float(lh), float(lt), float(rh), float(rt))


def sample(sol, xi):
    """Self-similar state at xi = x/t: dict rho/u/p plus side ('L' or 'R')."""
    xi = float(xi)
    if xi <= sol.u_star:
        s, sign = sol.left, -1.0
        head, tail = sol.left_head, sol.left_tail
        rho_star, side = sol.rho_star_l, "L"
    else:
        s, sign = sol.right, +1.0
        head, tail = sol.right_head, sol.right_tail
        rho_star, side = sol.rho_star_r, "R"
    if (xi - head) * sign >= 0.0:
        return {"rho": s.rho, "u": s.u, "p": s.p, "side": side}
    if (xi - tail) * sign <= 0.0:
        return {"rho": rho_star, "u": sol.u_star, "p": sol.p_star, "side": side}
    # Inside the rarefaction fan.
    g = s.gamma
    u = (2.0 / (g + 1.0)) * (-sign * s.c + 0.5 * (g - 1.0) * s.u + xi)
    c = s.c + sign * 0.5 * (g - 1.0) * (u - s.u)
    P = s.shifted_p * (c / s.c) ** (2.0 * g / (g - 1.0))
    rho = g * P / (c * c)
    return {"rho": float(rho), "u": float(u), "p": float(P - s.pi), "side": side}


@dataclass(frozen=True)
class JuxtaposedSolution:
    """Exact reference for the three-material shock-tube layouts."""

    x1: float            # first interface (Riemann problem)
    x2: float            # second interface (initially stationary contact)
    primary: RiemannSolution
    secondary: RiemannSolution
    state3: dict         # untouched third-material state
    d1: float            # primary right shock speed
    d2: float            # transmitted shock speed
    t_shock: float       # time the primary shock reaches x2
    t_valid: float       # reflected wave meets the primary contact

    def profile(self, x, t):
        """Exact rho/u/p and material index (0-based) at positions ``x``."""
        if t > self.t_valid:
            raise ConfigError(
                f"requested t={t:g} beyond the composition validity window "
                f"t<={self.t_valid:g}")
        x = np.asarray(x, dtype=float)
        rho = np.empty_like(x)
        u = np.empty_like(x)
        p = np.empty_like(x)
        mat = np.empty(x.shape, dtype=int)
        contact1 = self.x1 + self.primary.u_star * t
        for i, xi in np.ndenumerate(x):
            if t <= self.t_shock:
                if xi >= self.x2:
                    st = self.state3
                    m = 2
                else:
                    if t > 0.0:
                        st = sample(self.primary, (xi - self.x1) / t)
                    else:
                        st = (self.primary_left_state() if xi < self.x1
                              else self.primary_right_state())
                    m = 0 if xi < contact1 else 1
            else:
                tau = t - self.t_shock
                if xi < self.x2 + self.secondary.left_head * tau:
                    # Primary fan, unaffected by the interaction yet.
                    st = sample(self.primary, (xi - self.x1) / t)
                    m = 0 if xi < contact1 else 1
                else:
                    st = sample(self.secondary, (xi - self.x2) / tau)
                    m = 1 if xi < self.x2 + self.secondary.u_star * tau else 2
            rho[i], u[i], p[i] = st["rho"], st["u"], st["p"]
            mat[i] = m
        return {"rho": rho, "u": u, "p": p, "material": mat}

    def breakpoints(self, t):
        """Positions of all wave fronts and material boundaries at time ``t``."""
        pr = self.primary
        pts = [self.x2]
        pts += [self.x1 + s * t
                for s in (pr.left_head, pr.left_tail, pr.u_star, pr.right_head)]
        if t > self.t_shock:
            tau = t - self.t_shock
            se = self.secondary
            pts += [self.x2 + s * tau
                    for s in (se.left_head, se.left_tail, se.u_star, se.right_head)]
        return sorted(pts)

    def cell_averages(self, x_faces, t):
        """Exact cell averages of rho/u/p and material volume fractions.

        Each cell is split at the wave positions so every quadrature piece is
        smooth; a 3-point Gauss rule per piece then makes the averages exact
        for constants and indicator fields and high-order inside fans.
        """
        x_faces = np.asarray(x_faces, dtype=float)
        n = x_faces.size - 1
        breaks = [b for b in self.breakpoints(t)
                  if x_faces[0] < b < x_faces[-1]]
        edges = np.unique(np.concatenate([x_faces, np.asarray(breaks)]))
        lo, hi = edges[:-1], edges[1:]
        keep = (hi - lo) > 1e-15 * (x_faces[-1] - x_faces[0])
        lo, hi = lo[keep], hi[keep]
        cell = np.clip(np.searchsorted(x_faces, 0.5 * (lo + hi)) - 1, 0, n - 1)
        # 3-point Gauss-Legendre nodes/weights on [0, 1].
        gx = 0.5 * (1.0 + np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)]))
        gw = np.array([5.0, 8.0, 5.0]) / 18.0
        xq = (lo[:, None] + (hi - lo)[:, None] * gx[None, :]).ravel()
        wq = ((hi - lo)[:, None] * gw[None, :]).ravel()
        cq = np.repeat(cell, gx.size)
        prof = self.profile(xq, t)
        dx = np.bincount(cq, weights=wq, minlength=n)
        out = {v: np.bincount(cq, weights=wq * prof[v], minlength=n) / dx
               for v in ("rho", "u", "p")}
        nmat = max(int(prof["material"].max()) + 1, 3)
        out["z"] = np.stack([
            np.bincount(cq, weights=wq * (prof["material"] == k), minlength=n) / dx
            for k in range(nmat)])
        mass = np.bincount(cq, weights=wq * prof["rho"], minlength=n)
        out["y"] = np.stack([
            np.bincount(cq, weights=wq * prof["rho"] * (prof["material"] == k),
                        minlength=n) / mass
            for k in range(nmat)])
        return out

    def primary_left_state(self):
        s = self.primary.left
        return {"rho": s.rho, "u": s.u, "p": s.p}

    def primary_right_state(self):
        s = self.primary.right
        return {"rho": s.rho, "u": s.u, "p": s.p}


def compose_juxtaposed(config):
    """Build the exact reference from a three-interval 1D case config."""
    regions = config.regions
    if config.dims != 1 or len(regions) != 3 or len(config.materials) != 3:
        raise ConfigError("composition requires a three-interval 1D case")
    for r in regions:
        if r.shape != "interval":
            raise ConfigError("composition requires interval regions")
    x1 = regions[0].params["max"]
    x2 = regions[1].params["max"]
    states = [{"rho": r.rho, "u": r.u[0], "p": r.p} for r in regions]
    eos = list(config.materials)
    if states[1]["p"] != states[2]["p"] or states[1]["u"] != states[2]["u"]:
        raise ConfigError("second interface must start as a stationary contact")

    primary = solve_exact(states[0], states[1], eos[0], eos[1])
    if not primary.right_is_shock:
        raise ConfigError("composition expects a right-going primary shock")
    d1 = primary.right_head
    if d1 <= 0.0:
        raise ConfigError("primary shock does not move toward the second interface")
    t_shock = (x2 - x1) / d1

    post_shock = {"rho": primary.rho_star_r, "u": primary.u_star, "p": primary.p_star}
    secondary = solve_exact(post_shock, states[2], eos[1], eos[2])
    d2 = secondary.right_head

    # Validity: the reflected (left-going in the post-shock frame) wave of the
    # secondary problem meets the primary contact at t_valid.
    s_ref = secondary.left_head
    c1, u1 = x1, primary.u_star
    rel = u1 - s_ref
    if rel <= 0.0:
        t_valid = np.inf
    else:
        t_valid = (x2 - s_ref * t_shock - c1) / rel
    return JuxtaposedSolution(x1, x2, primary, secondary, states[2],
                              float(d1), float(d2), float(t_shock), float(t_valid))
