"""The particle interface: admissible trace pairs and traversals.

A profile through the thickened particle conserves the relative momentum
alpha and descends the sonic potential by exactly 1 (the Dirac mass).  A
subsonic entry crosses continuously; a supersonic entry may additionally
jump to the mirror density through an internal standing shock after
consuming a fraction theta of the mass, which opens a whole family of
exits.  ``traverse`` enumerates the admissible exits, ``germ_residual``
measures how far a given trace pair is from admissibility, and
``integrate_profile`` recomputes exits by brute-force ODE integration
without ever inverting the potential, serving as the independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .backend import kernels
from .drag import DragLaw, NoRootError, SonicPotential, as_power_law, mirror

THETA_SAMPLES = 257


class ProfilePinched(RuntimeError):
    """The in-particle ODE hit the sonic line without a prescribed jump."""


@dataclass(frozen=True)
class ParticleState:
    """Particle-frame state: density rho > 0 and relative momentum alpha."""

    rho: float
    alpha: float

    def __post_init__(self):
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise ValueError(f"density must be positive and finite, got {self.rho}")
        if not math.isfinite(self.alpha):
            raise ValueError(f"relative momentum must be finite, got {self.alpha}")

    def is_subsonic(self, c: float) -> bool:
        return c * self.rho >= abs(self.alpha)


@dataclass(frozen=True)
class GermPair:
    """Candidate (left trace, right trace) pair across the particle."""

    minus: ParticleState
    plus: ParticleState
    v: float = 0.0
    theta: Optional[float] = None


@dataclass(frozen=True)
class Identity:
    """alpha = 0: the particle is transparent, the state passes unchanged."""


@dataclass(frozen=True)
class UniqueSubsonic:
    exit: ParticleState


@dataclass(frozen=True)
class JumpExits:
    """Exit densities reachable with an internal standing shock.

    lo/hi bound the exits attained on the theta scan; at_theta0 and
    at_theta1 are the endpoint exits when feasible (jumping immediately
    gives the largest drop of the mirrored branch, jumping at the end exits
    at the mirror of the continuous exit).
    """

    lo: float
    hi: float
    at_theta0: Optional[float]
    at_theta1: Optional[float]


@dataclass(frozen=True)
class SupersonicFamily:
    continuous_exit: Optional[ParticleState]
    jump_exits: Optional[JumpExits]


@dataclass(frozen=True)
class NoTraversal:
    """No admissible exit: the profile pinches on the sonic line."""


TraversalOutcome = Union[Identity, UniqueSubsonic, SupersonicFamily, NoTraversal]


def reflect(obj):
    """x -> -x image: alpha changes sign and trace sides swap (involution)."""
    if isinstance(obj, ParticleState):
        return ParticleState(obj.rho, -obj.alpha)
    if isinstance(obj, GermPair):
        return GermPair(minus=reflect(obj.plus), plus=reflect(obj.minus),
                        v=-obj.v, theta=obj.theta)
    raise TypeError(f"cannot reflect {type(obj).__name__}")


def exit_for_theta(entry: ParticleState, theta: float, law: DragLaw,
                   c: float) -> Optional[ParticleState]:
    """Exit of a supersonic entry when the internal shock sits at fraction theta.

    Two stages: descend the supersonic branch by theta, jump to the mirror
    density, then descend the subsonic branch by 1 - theta.  Returns None
    (infeasible) when either descent exceeds the available potential.
    """
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if entry.alpha <= 0.0:
        raise ValueError("exit_for_theta expects alpha > 0; reflect first")
    if entry.is_subsonic(c):
        raise ValueError("exit_for_theta expects a supersonic entry")
    pot = SonicPotential(law, entry.alpha, c)
    f_in = pot.value(entry.rho)
    if f_in < theta:
        return None
    rho_jump = pot.inverse(f_in - theta, "supersonic")
    f_mirror = pot.value(mirror(entry.alpha, c, rho_jump))
    if f_mirror < 1.0 - theta:
        return None
    rho_exit = pot.inverse(f_mirror - (1.0 - theta), "subsonic")
    return ParticleState(rho_exit, entry.alpha)


def traverse(entry: ParticleState, law: DragLaw, c: float,
             theta_samples: int = THETA_SAMPLES) -> TraversalOutcome:
    """All admissible exit states across the particle for an entry with alpha >= 0.

    Subsonic entries cross continuously iff one unit of potential is
    available; supersonic entries combine the continuous exit (when it
    exists) with the scanned family of internal-shock exits.  The scan
    reports the attained interval; when the shock-compatibility inequality
    fails the theta -> exit map can be non-monotone, so no completeness
    beyond the scanned set is claimed.
    """
    if entry.alpha < 0.0:
        raise ValueError("traverse expects alpha >= 0; reflect first")
    if entry.alpha == 0.0:
        return Identity()
    pot = SonicPotential(law, entry.alpha, c)
    f_in = pot.value(entry.rho)
    if entry.is_subsonic(c):
        if f_in >= 1.0:
            rho_exit = pot.inverse(f_in - 1.0, "subsonic")
            return UniqueSubsonic(ParticleState(rho_exit, entry.alpha))
        return NoTraversal()
    continuous = None
    if f_in >= 1.0:
        try:
            continuous = ParticleState(pot.inverse(f_in - 1.0, "supersonic"),
                                       entry.alpha)
        except NoRootError:
            continuous = None
    exits = []
    at0 = at1 = None
    for i in range(theta_samples):
        theta = i / (theta_samples - 1)
        out = exit_for_theta(entry, theta, law, c)
        if out is None:
            continue
        exits.append(out.rho)
        if i == 0:
            at0 = out.rho
        if i == theta_samples - 1:
            at1 = out.rho
    jump = JumpExits(min(exits), max(exits), at0, at1) if exits else None
    if continuous is None and jump is None:
        return NoTraversal()
    return SupersonicFamily(continuous, jump)


@dataclass(frozen=True)
class GermResidual:
    """Distance of a trace pair from the admissibility relations."""

    alpha_mismatch: float
    relation_residual: float
    case: str
    sides_ok: bool

    def as_dict(self) -> dict:
        return {
            "alpha_mismatch": self.alpha_mismatch,
            "relation_residual": self.relation_residual,
            "case": self.case,
            "sides_ok": self.sides_ok,
        }


GERM_TOL = 1.0e-8


def germ_residual(pair: GermPair, law: DragLaw, c: float,
                  tol: float = GERM_TOL) -> tuple[GermResidual, bool]:
    """Residual record and membership verdict for a candidate trace pair.

    Matches the pair against the admissibility cases: equal states at
    alpha = 0, a unit potential drop when both traces sit on the same side
    of the sonic line, or the two-stage internal-shock balance when a
    supersonic entry exits subsonic.  Membership additionally requires the
    ordering c rho_in >= c rho_out >= |alpha| for subsonic crossings.
    """
    a_minus = pair.minus.alpha
    a_plus = pair.plus.alpha
    mismatch = abs(a_minus - a_plus)
    alpha = a_minus
    if alpha < 0.0:
        if a_plus > 0.0:
            # grossly mismatched signs: no admissibility case applies
            res = GermResidual(mismatch, math.inf, "mismatched", False)
            return res, False
        reflected = reflect(pair)
        res, member = germ_residual(reflected, law, c, tol)
        res = GermResidual(mismatch, res.relation_residual, res.case, res.sides_ok)
        return res, member and mismatch <= tol * max(1.0, abs(alpha))
    if alpha == 0.0:
        scale = max(pair.minus.rho, pair.plus.rho)
        residual = abs(pair.minus.rho - pair.plus.rho) / scale
        res = GermResidual(mismatch, residual, "identity", True)
        return res, residual <= tol and mismatch <= tol
    rho_in, rho_out = pair.minus.rho, pair.plus.rho
    pot = SonicPotential(law, alpha, c)
    s = pot.sonic_density
    entry_subsonic = c * rho_in >= alpha
    exit_subsonic = c * rho_out >= alpha
    if entry_subsonic or not exit_subsonic:
        # same-side crossing: unit drop along one monotone branch
        case = "subsonic" if entry_subsonic else "supersonic"
        residual = abs(pot.value(rho_in) - pot.value(rho_out) - 1.0)
        sides = (entry_subsonic == exit_subsonic)
        if entry_subsonic:
            sides = sides and (rho_in >= rho_out - tol * rho_in) \
                and (c * rho_out >= alpha - tol * alpha)
        res = GermResidual(mismatch, residual, case, sides)
        return res, (residual <= tol and sides
                     and mismatch <= tol * max(1.0, abs(alpha)))
    # supersonic entry, subsonic exit: internal standing shock at fraction theta
    f_in = pot.value(rho_in)
    f_out = pot.value(rho_out)

    def signed(theta):
        if f_in < theta:
            return None
        rho_jump = pot.inverse(f_in - theta, "supersonic")
        return pot.value(mirror(alpha, c, rho_jump)) - f_out - (1.0 - theta)

    if pair.theta is not None:
        val = signed(pair.theta)
        residual = abs(val) if val is not None else math.inf
    else:
        best = math.inf
        prev_t = prev_v = None
        bracket = None
        for i in range(THETA_SAMPLES):
            theta = i / (THETA_SAMPLES - 1)
            val = signed(theta)
            if val is None:
                prev_t = prev_v = None
                continue
            best = min(best, abs(val))
            if prev_v is not None and (val < 0.0) != (prev_v < 0.0):
                bracket = (prev_t, theta)
            prev_t, prev_v = theta, val
        if bracket is not None:
            lo, hi = bracket
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                vm = signed(mid)
                vl = signed(lo)
                if vm is None or vl is None:
                    break
                if (vm < 0.0) == (vl < 0.0):
                    lo = mid
                else:
                    hi = mid
            vm = signed(0.5 * (lo + hi))
            if vm is not None:
                best = min(best, abs(vm))
        residual = best
    sides = rho_out >= s - tol * s and rho_in < s
    res = GermResidual(mismatch, residual, "supersonic_jump", sides)
    return res, (residual <= tol and sides
                 and mismatch <= tol * max(1.0, abs(alpha)))


_REG_CODES = {"ramp": 0, "smoothstep": 1}


def integrate_profile(entry: ParticleState, law: DragLaw, c: float,
                      regularizer: str = "ramp", epsilon: float = 1.0,
                      theta: Optional[float] = None,
                      steps: int = 10000) -> ParticleState:
    """Brute-force traversal oracle: integrate the in-particle density ODE.

    Marches rho'(xi) = -D(rho, alpha) H'(xi) / (c^2 - alpha^2/rho^2) with a
    fixed-step fourth-order scheme across the thickened particle, inserting
    the standing-shock jump where the smoothed step reaches theta when one
    is prescribed.  The relative momentum is constant by construction and
    the potential is never inverted, so agreement with ``traverse`` is a
    genuine two-route check.  Raises ProfilePinched when the branch runs
    into the sonic line (the oracle analogue of NoTraversal).
    """
    if regularizer not in _REG_CODES:
        raise ValueError(f"unknown regularizer {regularizer!r}")
    if not (epsilon > 0.0):
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if steps < 10:
        raise ValueError(f"need at least 10 steps, got {steps}")
    if entry.alpha == 0.0:
        raise ValueError("the profile is trivial at alpha = 0")
    if entry.alpha < 0.0:
        out = integrate_profile(reflect(entry), law, c, regularizer, epsilon,
                                theta, steps)
        return reflect(out)
    if theta is not None:
        if not (0.0 <= theta <= 1.0):
            raise ValueError(f"theta must lie in [0, 1], got {theta}")
        if entry.is_subsonic(c):
            raise ValueError("an internal shock requires a supersonic entry")
    reg = _REG_CODES[regularizer]

    pw = as_power_law(law)
    if pw is not None:
        rho, status = kernels.profile_rk4_pw(
            pw.lam, pw.n, pw.m, c, entry.alpha, entry.rho, epsilon, steps, reg,
            theta if theta is not None else 0.0, theta is not None)
        if status != kernels.PROFILE_OK:
            raise ProfilePinched(
                f"profile pinched near the sonic density (entry rho={entry.rho})")
        return ParticleState(rho, entry.alpha)
    return _integrate_generic(entry, law, c, reg, epsilon, theta, steps)


def profile_trajectory(entry: ParticleState, law: DragLaw, c: float,
                       regularizer: str = "ramp", epsilon: float = 1.0,
                       theta: Optional[float] = None,
                       steps: int = 10000) -> list[tuple[float, float]]:
    """(xi, rho) samples of the in-particle profile at every integration step.

    Same march as ``integrate_profile`` with the trajectory recorded; used
    for profile output files.  Requires alpha > 0.
    """
    if entry.alpha <= 0.0:
        raise ValueError("profile_trajectory expects alpha > 0; reflect first")
    if regularizer not in _REG_CODES:
        raise ValueError(f"unknown regularizer {regularizer!r}")
    reg = _REG_CODES[regularizer]
    trail: list[tuple[float, float]] = []
    _integrate_generic(entry, law, c, reg, epsilon, theta, steps, trail)
    return trail


def _integrate_generic(entry, law, c, reg, epsilon, theta, steps, trail=None):
    alpha = entry.alpha
    s = alpha / c

    def dstep(xi):
        return kernels.reg_deriv(reg, epsilon, xi)

    def rhs(xi, rho):
        return -law(rho, alpha) * dstep(xi) / (c * c - alpha * alpha / (rho * rho))

    def leg(xi0, xi1, nsteps, rho, above):
        def inside(r):
            return r > 0.0 and (r > s if above else r < s)

        if not inside(rho):
            raise ProfilePinched(f"profile pinched at rho={rho}")
        if trail is not None:
            trail.append((xi0, rho))
        if nsteps <= 0:
            return rho
        h = (xi1 - xi0) / nsteps
        for i in range(nsteps):
            xi = xi0 + i * h
            k1 = rhs(xi, rho)
            r2 = rho + 0.5 * h * k1
            if not inside(r2):
                raise ProfilePinched(f"profile pinched near rho={rho}")
            k2 = rhs(xi + 0.5 * h, r2)
            r3 = rho + 0.5 * h * k2
            if not inside(r3):
                raise ProfilePinched(f"profile pinched near rho={rho}")
            k3 = rhs(xi + 0.5 * h, r3)
            r4 = rho + h * k3
            if not inside(r4):
                raise ProfilePinched(f"profile pinched near rho={rho}")
            k4 = rhs(xi + h, r4)
            rho += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            if not (inside(rho) and math.isfinite(rho)):
                raise ProfilePinched(f"profile pinched near rho={rho}")
            if trail is not None:
                trail.append((xi0 + (i + 1) * h, rho))
        return rho

    if theta is None:
        rho = leg(-0.5 * epsilon, 0.5 * epsilon, steps, entry.rho, entry.rho > s)
    else:
        xi_j = kernels.reg_jump_position(reg, epsilon, theta)
        steps1 = min(max(int(round(steps * (xi_j + 0.5 * epsilon) / epsilon)), 0), steps)
        rho = leg(-0.5 * epsilon, xi_j, steps1, entry.rho, False)
        rho = mirror(alpha, c, rho)
        rho = leg(xi_j, 0.5 * epsilon, steps - steps1, rho, True)
    return ParticleState(rho, alpha)
