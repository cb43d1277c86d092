"""Per-material thermodynamics and the isobaric mixture closure.

Every supported material law is expressed in Mie-Gruneisen form

    rho*e = rho*e_ref(rho) + (p - p_ref(rho)) / Gamma(rho),

parameterized by three curves Gamma, e_ref, p_ref of the phasic density.
Perfect and stiffened gases have constant curves, Van der Waals has
density-dependent ones, and the tabular kind interpolates user data.
Working in this common form lets the mixture pressure be solved in closed
form for any combination of materials while a bracketed iterative solver
is kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    ClosureFailureError,
    EosDomainError,
    HypothesisViolationError,
)

# Below this volume fraction a phase is dropped from the closure sums and
# its phasic density/energy are treated as 0 (avoids 0/0 in rho_k Z_k / Z_k).
# Kept near round-off: color that arrives in a cell carries the matching
# phasic mass and energy fluxes, and the isobaric closure only returns the
# unperturbed pressure on a uniform-p/u state if every phase that brought
# energy also participates in the closure. Energy parked below this cutoff
# is ignored by the closure; with stiffened gases the resulting pressure
# error is amplified by |p_ref|/p (1e4 in the water-like regimes), so the
# cutoff must stay small enough that amplification * Z_FLOOR stays below
# round-off-level pressure noise.
Z_FLOOR = 1e-14

# Phases below this volume fraction whose pm/z ratio has drifted outside
# the EOS density domain are likewise dropped. Near the Z_FLOOR cutoff
# the mass flux freezes while the color keeps advecting, so cells that
# re-emerge above the cutoff can carry a stale ratio; their closure
# contribution is O(Z_DUST) and discarding it is harmless, whereas a
# domain violation at a substantial volume fraction is a real error.
Z_DUST = 1e-6


class Eos:
    """Base class: generic Mie-Gruneisen evaluations from the three curves.

    Subclasses provide ``gruneisen``, ``ref_energy``, ``ref_pressure`` and
    their density derivatives; all accept and return numpy-broadcastable
    values.
    """

    #: True when ``in_domain(rho)`` is exactly ``rho > 0`` (lets the mixture
    #: routines vectorize the domain check across materials).
    positive_domain = True

    def validate_density(self, rho):
        rho = np.asarray(rho, dtype=float)
        if np.any(rho <= 0.0):
            raise EosDomainError(f"{self!r}: non-positive density")
        return rho

    def in_domain(self, rho):
        """Where the EOS curves are defined (elementwise)."""
        return np.asarray(rho, float) > 0.0

    def closure_constants(self):
        """(Gamma, p_ref) when all three curves are density-independent
        and the reference energy vanishes; None otherwise. Enables the
        density-free fast path in the mixture closure."""
        return None

    # --- curves (overridden) -------------------------------------------
    def gruneisen(self, rho):
        raise NotImplementedError

    def ref_energy(self, rho):
        raise NotImplementedError

    def ref_pressure(self, rho):
        raise NotImplementedError

    def d_gruneisen(self, rho):
        raise NotImplementedError

    def d_ref_energy(self, rho):
        raise NotImplementedError

    def d_ref_pressure(self, rho):
        raise NotImplementedError

    # --- generic evaluations -------------------------------------------
    def energy(self, rho, p):
        """Specific internal energy e(rho, p)."""
        rho = self.validate_density(rho)
        gam = self._checked_gruneisen(rho)
        return self.ref_energy(rho) + (np.asarray(p, float) - self.ref_pressure(rho)) / (gam * rho)

    def pressure(self, rho, e):
        """Pressure p(rho, e); exact inverse of :meth:`energy`."""
        rho = self.validate_density(rho)
        gam = self._checked_gruneisen(rho)
        return self.ref_pressure(rho) + gam * rho * (np.asarray(e, float) - self.ref_energy(rho))

    def xi(self, rho):
        """d(rho e)/dp at fixed rho; equals 1/Gamma and must be positive."""
        rho = self.validate_density(rho)
        return 1.0 / self._checked_gruneisen(rho)

    def sound_speed_sq(self, rho, p):
        """Squared phasic sound speed from the pressure law.

        Positivity is not enforced here: Van der Waals states can lose it
        locally, and only the mixture value matters for hyperbolicity.
        """
        rho = self.validate_density(rho)
        p = np.asarray(p, dtype=float)
        gam = self._checked_gruneisen(rho)
        pref = self.ref_pressure(rho)
        dp = p - pref
        return (
            self.d_ref_pressure(rho)
            + dp * self.d_gruneisen(rho) / gam
            - gam * rho * self.d_ref_energy(rho)
            + dp / rho
            + gam * p / rho
        )

    def _checked_gruneisen(self, rho):
        gam = np.asarray(self.gruneisen(rho), dtype=float)
        if np.any(gam <= 0.0):
            raise HypothesisViolationError(f"{self!r}: Gamma <= 0 (xi must be positive)")
        return gam

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class PerfectGas(Eos):
    gamma: float

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise EosDomainError("perfect gas requires gamma > 1")

    def gruneisen(self, rho):
        return np.full_like(np.asarray(rho, float), self.gamma - 1.0)

    def ref_energy(self, rho):
        return np.zeros_like(np.asarray(rho, float))

    ref_pressure = ref_energy
    d_gruneisen = ref_energy
    d_ref_energy = ref_energy
    d_ref_pressure = ref_energy

    def closure_constants(self):
        return (self.gamma - 1.0, 0.0)

    def to_dict(self):
        return {"kind": "perfect_gas", "gamma": self.gamma}


@dataclass(frozen=True)
class StiffenedGas(Eos):
    gamma: float
    pi: float

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise EosDomainError("stiffened gas requires gamma > 1")
        if self.pi < 0.0:
            raise EosDomainError("stiffened gas requires pi >= 0")

    def gruneisen(self, rho):
        return np.full_like(np.asarray(rho, float), self.gamma - 1.0)

    def ref_energy(self, rho):
        return np.zeros_like(np.asarray(rho, float))

    def ref_pressure(self, rho):
        return np.full_like(np.asarray(rho, float), -self.gamma * self.pi)

    d_gruneisen = ref_energy
    d_ref_energy = ref_energy
    d_ref_pressure = ref_energy

    def closure_constants(self):
        return (self.gamma - 1.0, -self.gamma * self.pi)

    def to_dict(self):
        return {"kind": "stiffened_gas", "gamma": self.gamma, "pi": self.pi}


@dataclass(frozen=True)
class VanDerWaals(Eos):
    """p = (gamma-1)/(1-b rho) * (rho e + a rho^2) - a rho^2.

    Cast in Mie-Gruneisen form: Gamma = (gamma-1)/(1-b rho), p_ref = 0,
    rho e_ref = a rho^2 (1-b rho)/(gamma-1) - a rho^2.
    """

    gamma: float
    a: float
    b: float

    positive_domain = False

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise EosDomainError("Van der Waals requires gamma > 1")

    def validate_density(self, rho):
        rho = super().validate_density(rho)
        if np.any(1.0 - self.b * rho <= 0.0):
            raise EosDomainError("Van der Waals: 1 - b*rho must stay positive")
        return rho

    def in_domain(self, rho):
        rho = np.asarray(rho, float)
        return (rho > 0.0) & (1.0 - self.b * rho > 0.0)

    def gruneisen(self, rho):
        return (self.gamma - 1.0) / (1.0 - self.b * np.asarray(rho, float))

    def d_gruneisen(self, rho):
        cov = 1.0 - self.b * np.asarray(rho, float)
        return (self.gamma - 1.0) * self.b / (cov * cov)

    def ref_energy(self, rho):
        rho = np.asarray(rho, float)
        return self.a * rho * (1.0 - self.b * rho) / (self.gamma - 1.0) - self.a * rho

    def d_ref_energy(self, rho):
        rho = np.asarray(rho, float)
        return self.a * (1.0 - 2.0 * self.b * rho) / (self.gamma - 1.0) - self.a

    def ref_pressure(self, rho):
        return np.zeros_like(np.asarray(rho, float))

    d_ref_pressure = ref_pressure

    def to_dict(self):
        return {"kind": "van_der_waals", "gamma": self.gamma, "a": self.a, "b": self.b}


class TabulatedMieGruneisen(Eos):
    """Mie-Gruneisen curves given as samples over strictly increasing rho.

    Monotone piecewise-cubic (PCHIP) interpolation supplies both values
    and the density derivatives needed by the sound speed.
    """

    positive_domain = False

    def __init__(self, rho, gruneisen, e_ref, p_ref, source=None):
        rho = np.asarray(rho, dtype=float)
        if rho.ndim != 1 or rho.size < 2 or np.any(np.diff(rho) <= 0.0):
            raise EosDomainError("tabular EOS needs strictly increasing rho samples")
        if np.any(np.asarray(gruneisen, float) <= 0.0):
            raise HypothesisViolationError("tabular EOS: Gamma samples must be positive")
        self._rho_min, self._rho_max = rho[0], rho[-1]
        self._gam = PchipInterpolator(rho, gruneisen)
        self._eref = PchipInterpolator(rho, e_ref)
        self._pref = PchipInterpolator(rho, p_ref)
        self._dgam = self._gam.derivative()
        self._deref = self._eref.derivative()
        self._dpref = self._pref.derivative()
        self.source = source

    @classmethod
    def from_csv(cls, path):
        """Load columns rho, Gamma, e_ref, p_ref from a CSV file."""
        data = np.genfromtxt(path, delimiter=",", names=True)
        try:
            cols = data["rho"], data["Gamma"], data["e_ref"], data["p_ref"]
        except (KeyError, ValueError) as exc:
            raise EosDomainError(f"{path}: expected columns rho,Gamma,e_ref,p_ref") from exc
        return cls(*cols, source=str(path))

    def validate_density(self, rho):
        rho = super().validate_density(rho)
        if np.any(rho < self._rho_min) or np.any(rho > self._rho_max):
            raise EosDomainError("tabular EOS evaluated outside sampled density range")
        return rho

    def in_domain(self, rho):
        rho = np.asarray(rho, float)
        return (rho >= self._rho_min) & (rho <= self._rho_max)

    def gruneisen(self, rho):
        return self._gam(rho)

    def ref_energy(self, rho):
        return self._eref(rho)

    def ref_pressure(self, rho):
        return self._pref(rho)

    def d_gruneisen(self, rho):
        return self._dgam(rho)

    def d_ref_energy(self, rho):
        return self._deref(rho)

    def d_ref_pressure(self, rho):
        return self._dpref(rho)

    def __repr__(self):
        return f"TabulatedMieGruneisen(source={self.source!r})"

    def to_dict(self):
        return {"kind": "mie_gruneisen_table", "csv": self.source}


def eos_from_dict(d):
    kind = d.get("kind")
    if kind == "perfect_gas":
        return PerfectGas(gamma=d["gamma"])
    if kind == "stiffened_gas":
        return StiffenedGas(gamma=d["gamma"], pi=d["pi"])
    if kind == "van_der_waals":
        return VanDerWaals(gamma=d["gamma"], a=d["a"], b=d["b"])
    if kind == "mie_gruneisen_table":
        return TabulatedMieGruneisen.from_csv(d["csv"])
    raise EosDomainError(f"unknown EOS kind {kind!r}")


# ---------------------------------------------------------------------------
# Mixture closure
# ---------------------------------------------------------------------------

def active_phases(z, z_floor=Z_FLOOR):
    """Boolean mask of phases that participate in the closure sums."""
    return np.asarray(z, float) > z_floor


def closure_active(z, rho_k, eos_list, z_floor=Z_FLOOR):
    """Active mask for the closure sums, with dust exclusion.

    A phase participates when Z_k exceeds ``z_floor`` and its phasic
    density lies in the material's domain. Near the threshold the phasic
    ratio can be stale (mass transport freezes below the threshold while
    the color keeps moving), so out-of-domain densities at trace volume
    fractions (< Z_DUST) are dropped from the sums -- their contribution
    is O(Z_DUST) at most. Out-of-domain densities at non-trace fractions
    are a genuine failure and raise.
    """
    z = np.asarray(z, dtype=float)
    rho_k = np.broadcast_to(np.asarray(rho_k, dtype=float), z.shape)
    act = z > z_floor
    ok = rho_k > 0.0
    for k, eos in enumerate(eos_list):
        if not eos.positive_domain:
            ok[k] = np.asarray(eos.in_domain(rho_k[k]), dtype=bool)
    bad = act & ~ok
    if bad.any():
        serious = bad & (z >= Z_DUST)
        if serious.any():
            k = int(np.argwhere(serious)[0][0])
            raise EosDomainError(
                f"material {k}: density outside the EOS domain at volume "
                f"fraction >= {Z_DUST:g}")
        act &= ok
    return act


def _masked_density(rho_k, act):
    """Densities with inactive entries replaced by a valid active value.

    Keeps vectorized EOS-curve evaluation inside the material's density
    domain even where the phase has vanished. Returns None if an active
    entry is non-positive.
    """
    rho_k = np.asarray(rho_k, dtype=float)
    act = np.asarray(act, dtype=bool)
    vals = np.extract(act, np.broadcast_to(rho_k, act.shape))
    if vals.size and np.any(vals <= 0.0):
        return None
    fill = vals[0] if vals.size else 1.0
    return np.where(act, rho_k, fill)


def mixture_pressure(z, rho_k, rho_e, eos_list, z_floor=Z_FLOOR):
    """Pressure of the isobaric mixture, rho*e = sum_k Z_k rho_k e_k(rho_k, p).

    ``z`` and ``rho_k`` have the material index on axis 0. Phases with
    Z_k below ``z_floor`` are excluded. Uses the closed form valid for
    Mie-Gruneisen materials; since every supported law is expressed in
    that form the result is exact (linear equation in p).
    """
    z = np.asarray(z, dtype=float)
    rho_k = np.asarray(rho_k, dtype=float)
    rho_e = np.asarray(rho_e, dtype=float)
    act = closure_active(z, rho_k, eos_list, z_floor)
    # The reference terms can exceed the pressure by several orders of
    # magnitude (stiffened gases) and cancel; extended precision keeps
    # the closure noise below the scheme's own round-off.
    num = rho_e.astype(np.longdouble) + 0.0
    den = np.zeros(np.broadcast_shapes(z.shape[1:], rho_e.shape), dtype=np.longdouble)
    for k, eos in enumerate(eos_list):
        a = act[k]
        zk = np.where(a, z[k], 0.0).astype(np.longdouble)
        const = eos.closure_constants()
        if const is not None:
            gam, pref = np.longdouble(const[0]), np.longdouble(const[1])
            num = num + zk * (pref / gam)
            den = den + zk / gam
            continue
        if not np.any(a):
            continue
        rk = _masked_density(rho_k[k], a)
        if rk is None:
            raise EosDomainError(f"material {k}: non-positive density with Z_k > threshold")
        rk = eos.validate_density(rk)
        gam = np.asarray(eos.gruneisen(rk), dtype=np.longdouble)
        contrib_num = zk * (np.asarray(eos.ref_pressure(rk), np.longdouble) / gam
                            - rho_k[k] * np.asarray(eos.ref_energy(rk), np.longdouble))
        contrib_den = zk / gam
        num = num + np.where(a, contrib_num, 0.0)
        den = den + np.where(a, contrib_den, 0.0)
    if np.any(den <= 0.0):
        raise ClosureFailureError("no active phase in closure (sum Z_k/Gamma_k <= 0)")
    return np.asarray(num / den, dtype=float)


def closure_residual(p, z, rho_k, rho_e, eos_list, z_floor=Z_FLOOR):
    """Xi(p) = sum_k Z_k rho_k e_k(rho_k, p) - rho*e (scalar inputs)."""
    total = -rho_e
    for k, eos in enumerate(eos_list):
        if z[k] > z_floor:
            total += z[k] * rho_k[k] * eos.energy(rho_k[k], p)
    return total


def mixture_pressure_iterative(z, rho_k, rho_e, eos_list, z_floor=Z_FLOOR,
                               rel_tol=1e-14, max_expand=200):
    """Scalar closure solve by bracketed bisection with a Newton polish.

    Independent of :func:`mixture_pressure`; Xi is strictly increasing
    (xi_k > 0), so a sign change brackets the unique root. Kept as the
    general-EOS path and as a cross-check oracle for the closed form.
    """
    z = np.asarray(z, float)
    rho_k = np.asarray(rho_k, float)
    xi_tot = sum(z[k] * eos_list[k].xi(rho_k[k]) for k in range(len(eos_list))
                 if z[k] > z_floor)
    scale = max(abs(float(rho_e)) / float(xi_tot), 1e-300)

    def f(p):
        return closure_residual(p, z, rho_k, rho_e, eos_list, z_floor)

    lo, hi = 1e-8 * scale, 1e8 * scale
    flo, fhi = f(lo), f(hi)
    n = 0
    while fhi < 0.0 and n < max_expand:
        hi *= 10.0
        fhi = f(hi)
        n += 1
    while flo > 0.0 and n < max_expand:
        # Xi increasing: walk the lower end down, through 0 into negative
        # pressures (stiffened gases admit p > -gamma*pi).
        lo = lo / 10.0 if lo > scale * 1e-12 else lo - hi
        flo = f(lo)
        n += 1
    if flo > 0.0 or fhi < 0.0:
        raise ClosureFailureError(
            f"closure bracket not found in [{lo:g}, {hi:g}]", residual=min(abs(flo), abs(fhi)))
    # Bisection to a narrow interval, then Newton using dXi/dp = sum z_k xi_k.
    while hi - lo > 1e-8 * max(abs(lo), abs(hi), scale):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    p = 0.5 * (lo + hi)
    for _ in range(8):
        r = f(p)
        step = r / xi_tot
        p_new = min(max(p - step, lo), hi)
        if abs(p_new - p) <= rel_tol * max(abs(p), scale):
            p = p_new
            break
        p = p_new
    return p


def mixture_sound_speed_sq(z, rho_k, p, eos_list, z_floor=Z_FLOOR):
    """c^2 of the medium: rho*xi*c^2 = sum_k Z_k rho_k xi_k c_k^2.

    Returns the raw value; the caller decides whether c^2 <= 0 aborts
    (hyperbolicity check happens where the cell index is known).
    """
    z = np.asarray(z, dtype=float)
    rho_k = np.asarray(rho_k, dtype=float)
    act = closure_active(z, rho_k, eos_list, z_floor)
    num = np.zeros(np.broadcast_shapes(z.shape[1:], np.shape(p)), dtype=float)
    xi = np.zeros_like(num)
    rho = np.zeros_like(num)
    p = np.asarray(p, dtype=float)
    for k, eos in enumerate(eos_list):
        a = act[k]
        zk = np.where(a, z[k], 0.0)
        const = eos.closure_constants()
        if const is not None:
            # rho_k c_k^2 = (p - p_ref) + Gamma p, so the phasic density
            # cancels from the numerator term z_k rho_k xi_k c_k^2.
            gam, pref = const
            num = num + zk * (((1.0 + gam) * p - pref) / gam)
            xi = xi + zk / gam
            rho = rho + zk * np.where(a, rho_k[k], 0.0)
            continue
        if not np.any(a):
            continue
        rk = _masked_density(rho_k[k], a)
        if rk is None:
            raise EosDomainError(f"material {k}: non-positive density with Z_k > threshold")
        xi_k = eos.xi(rk)
        ck2 = eos.sound_speed_sq(rk, p)
        num = num + np.where(a, z[k] * rho_k[k] * xi_k * ck2, 0.0)
        xi = xi + np.where(a, z[k] * xi_k, 0.0)
        rho = rho + np.where(a, z[k] * rho_k[k], 0.0)
    return num / (rho * xi)


# Spec-level operation aliases (cell/scalar friendly).

def phasic_energy(eos, rho_k, p_k):
    return eos.energy(rho_k, p_k)


def phasic_pressure(eos, rho_k, e_k):
    return eos.pressure(rho_k, e_k)


def phasic_xi(eos, rho_k):
    return eos.xi(rho_k)


def phasic_sound_speed_sq(eos, rho_k, p_k):
    return eos.sound_speed_sq(rho_k, p_k)
