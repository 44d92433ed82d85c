"""Accessible states around the particle.

Left of a particle moving at speed v, a self-similar solution can present
any state reachable from the left datum through waves not faster than v;
right of it, anything connected to the right datum by waves not slower
than v.  In the (rho, alpha) plane each set is the datum, the graph of a
monotone subsonic curve, and an open supersonic region bounded by the
standing-shock image of that graph.  The curves are closed-form; their
inverses g_sub are monotone bisections and everything here is pure
geometry, independent of the drag law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .backend import kernels
from .euler import FluidState
from .germ import ParticleState


class NoCrossingError(RuntimeError):
    """The two subsonic graphs have disjoint ranges; carries diagnostics."""


def _sonic_cross(curve, rho_start, sign, c):
    # unique density where the curve meets alpha = sign * c * rho; the
    # difference is concave (minus side) / convex (plus side) with a single
    # crossing, so expand geometrically then bisect
    def h(rho):
        return curve(rho) - sign * c * rho

    lo = rho_start
    hlo = h(lo)
    if hlo == 0.0:
        return lo
    hi = 2.0 * max(lo, 1.0e-300)
    for _ in range(600):
        if (h(hi) > 0.0) != (hlo > 0.0):
            break
        lo = hi
        hi *= 2.0
    else:
        raise NoCrossingError("sonic crossing not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (h(mid) > 0.0) == (hlo > 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1.0e-14 * mid:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AccessibleCurveMinus:
    """States reachable on the particle's left from the left datum.

    rho_ex is the curve extremity (lowest reachable density), rho_mc the
    density where the 1-wave curve meets alpha = -c rho, alpha_top the
    value at the extremity (the largest alpha on the subsonic graph).
    """

    rho_datum: float
    alpha_datum: float
    v: float
    c: float
    rho_ex: float
    rho_mc: float
    alpha_top: float

    def f(self, rho: float) -> float:
        """1-wave curve value; defined for rho >= rho_ex."""
        if rho < self.rho_ex * (1.0 - 1.0e-12):
            raise ValueError(f"rho={rho} below the curve extremity {self.rho_ex}")
        return kernels.curve_minus(self.rho_datum, self.alpha_datum, self.c, rho)

    def f_sub(self, rho: float) -> float:
        """Subsonic graph: the curve down to its sonic crossing, then -c rho."""
        if rho <= self.rho_mc:
            return self.f(rho)
        return -self.c * rho

    def g_sub(self, alpha: float) -> float:
        """Monotone inverse of f_sub; raises outside (-inf, alpha_top]."""
        rho = kernels.g_sub_minus(self.rho_datum, self.alpha_datum, self.c,
                                  self.rho_ex, self.rho_mc, alpha)
        if math.isnan(rho):
            raise ValueError(
                f"alpha={alpha} above the subsonic range top {self.alpha_top}")
        return rho

    def f_sup(self, rho: float) -> float:
        """Boundary of the supersonic region at density rho.

        For rho past the sonic crossing the boundary is the sonic line
        itself; below it, the boundary is the standing-shock image of the
        subsonic graph, i.e. the alpha < -c rho solving
        alpha^2 / (c^2 rho) = g_sub(alpha), found by bisection.
        """
        c = self.c
        if rho >= self.rho_mc:
            return -c * rho

        def h(alpha):
            return alpha * alpha / (c * c * rho) - self.g_sub(alpha)

        hi = -c * rho
        lo = -c * self.rho_mc
        if h(hi) >= 0.0:
            return hi
        for _ in range(600):
            if h(lo) > 0.0:
                break
            lo *= 2.0
        else:
            raise NoCrossingError("supersonic boundary not bracketed")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if h(mid) > 0.0:
                lo = mid
            else:
                hi = mid
            if abs(hi - lo) <= 1.0e-13 * abs(mid):
                break
        return 0.5 * (lo + hi)

    def in_supersonic_region(self, state: ParticleState) -> bool:
        """Strict membership in the open region below the supersonic boundary."""
        rho, alpha = state.rho, state.alpha
        if alpha >= -self.c * rho:
            return False
        # below the boundary iff the standing-shock image overshoots the graph
        return kernels.mirror_density(self.c, alpha, rho) > self.g_sub(alpha)


@dataclass(frozen=True)
class AccessibleCurvePlus:
    """Mirror-image structure right of the particle, from the right datum."""

    rho_datum: float
    alpha_datum: float
    v: float
    c: float
    rho_ex: float
    rho_mc: float
    alpha_bottom: float

    def f(self, rho: float) -> float:
        if rho < self.rho_ex * (1.0 - 1.0e-12):
            raise ValueError(f"rho={rho} below the curve extremity {self.rho_ex}")
        return kernels.curve_plus(self.rho_datum, self.alpha_datum, self.c, rho)

    def f_sub(self, rho: float) -> float:
        if rho <= self.rho_mc:
            return self.f(rho)
        return self.c * rho

    def g_sub(self, alpha: float) -> float:
        rho = kernels.g_sub_plus(self.rho_datum, self.alpha_datum, self.c,
                                 self.rho_ex, self.rho_mc, alpha)
        if math.isnan(rho):
            raise ValueError(
                f"alpha={alpha} below the subsonic range bottom {self.alpha_bottom}")
        return rho

    def f_sup(self, rho: float) -> float:
        c = self.c
        if rho >= self.rho_mc:
            return c * rho

        def h(alpha):
            return alpha * alpha / (c * c * rho) - self.g_sub(alpha)

        lo = c * rho
        hi = c * self.rho_mc
        if h(lo) >= 0.0:
            return lo
        for _ in range(600):
            if h(hi) > 0.0:
                break
            hi *= 2.0
        else:
            raise NoCrossingError("supersonic boundary not bracketed")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if h(mid) > 0.0:
                hi = mid
            else:
                lo = mid
            if abs(hi - lo) <= 1.0e-13 * abs(mid):
                break
        return 0.5 * (lo + hi)

    def in_supersonic_region(self, state: ParticleState) -> bool:
        rho, alpha = state.rho, state.alpha
        if alpha <= self.c * rho:
            return False
        return kernels.mirror_density(self.c, alpha, rho) > self.g_sub(alpha)


def build_minus(left: FluidState, v: float, c: float) -> AccessibleCurveMinus:
    """Accessible set left of the particle from the left datum.

    The rarefaction branch exists when the datum 1-characteristic is not
    faster than the particle; otherwise only 1-shocks can lag behind it and
    the extremity is the standing-shock image of the datum.
    """
    alpha_d = left.alpha(v)
    u_rel = alpha_d / left.rho
    if u_rel - c <= 0.0:
        rho_ex = left.rho * math.exp(u_rel / c - 1.0)
    else:
        rho_ex = alpha_d * alpha_d / (c * c * left.rho)

    def f(rho):
        return kernels.curve_minus(left.rho, alpha_d, c, rho)

    rho_mc = _sonic_cross(f, rho_ex, -1.0, c)
    alpha_top = f(rho_ex)
    return AccessibleCurveMinus(left.rho, alpha_d, v, c, rho_ex, rho_mc, alpha_top)


def build_plus(right: FluidState, v: float, c: float) -> AccessibleCurvePlus:
    """Accessible set right of the particle from the right datum (mirror)."""
    alpha_d = right.alpha(v)
    u_rel = alpha_d / right.rho
    if u_rel + c >= 0.0:
        rho_ex = right.rho * math.exp(-u_rel / c - 1.0)
    else:
        rho_ex = alpha_d * alpha_d / (c * c * right.rho)

    def f(rho):
        return kernels.curve_plus(right.rho, alpha_d, c, rho)

    rho_mc = _sonic_cross(f, rho_ex, 1.0, c)
    alpha_bottom = f(rho_ex)
    return AccessibleCurvePlus(right.rho, alpha_d, v, c, rho_ex, rho_mc, alpha_bottom)


def g_sub(curve, alpha: float) -> float:
    """Inverse of the subsonic graph of either curve object."""
    return curve.g_sub(alpha)


def in_V(curve, state: ParticleState, tol: float = 1.0e-10) -> bool:
    """Membership in the accessible set: datum, subsonic graph, or open
    supersonic region."""
    scale = max(state.rho, curve.rho_datum)
    if (abs(state.rho - curve.rho_datum) <= tol * scale
            and abs(state.alpha - curve.alpha_datum)
            <= tol * max(1.0, abs(curve.alpha_datum))):
        return True
    try:
        on_graph = abs(curve.g_sub(state.alpha) - state.rho) <= tol * scale
    except ValueError:
        on_graph = False
    if on_graph:
        return True
    return curve.in_supersonic_region(state)


def crossing_alpha(minus_curve: AccessibleCurveMinus,
                   plus_curve: AccessibleCurvePlus) -> float:
    """The alpha where the two subsonic graphs meet.

    g_sub_minus decreases and g_sub_plus increases, so their difference is
    strictly monotone; the crossing is clamped to a range endpoint when the
    endpoint already lies on (or beyond) the other graph.
    """
    top = minus_curve.alpha_top
    bottom = plus_curve.alpha_bottom
    if bottom > top:
        raise NoCrossingError(
            f"subsonic ranges do not overlap: (-inf, {top}] vs [{bottom}, inf)")

    def h(alpha):
        return minus_curve.g_sub(alpha) - plus_curve.g_sub(alpha)

    if h(top) >= 0.0:
        return top
    if h(bottom) <= 0.0:
        return bottom
    lo, hi = bottom, top
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1.0e-14 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)
