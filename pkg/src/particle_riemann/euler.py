"""Classical wave machinery for the 1D isothermal Euler equations.

Pressure law p = c^2 rho.  The system is 2x2 with eigenvalues u -+ c, two
genuinely nonlinear fields and no contact discontinuity.  This module
knows nothing about the particle; it provides the shock/rarefaction
curves, the exact two-wave Riemann solution and self-similar sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union


class InvalidStateError(ValueError):
    """Raised for non-physical fluid states (vacuum or non-finite fields)."""


class RootBracketError(RuntimeError):
    """Root finder could not bracket or converge; carries diagnostics."""


@dataclass(frozen=True)
class FluidState:
    """Lab-frame state: density rho > 0 and momentum q = rho * u."""

    rho: float
    q: float

    def __post_init__(self):
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise InvalidStateError(f"density must be positive and finite, got {self.rho}")
        if not math.isfinite(self.q):
            raise InvalidStateError(f"momentum must be finite, got {self.q}")

    @property
    def u(self) -> float:
        return self.q / self.rho

    def alpha(self, v: float) -> float:
        """Relative momentum q - v rho (mass flux through a speed-v line)."""
        return self.q - v * self.rho

    @staticmethod
    def from_velocity(rho: float, u: float) -> "FluidState":
        return FluidState(rho, rho * u)


@dataclass(frozen=True)
class Shock:
    family: int
    speed: float
    upstream: FluidState    # state on the left of the discontinuity
    downstream: FluidState  # state on the right

    @property
    def min_speed(self) -> float:
        return self.speed

    @property
    def max_speed(self) -> float:
        return self.speed


@dataclass(frozen=True)
class Rarefaction:
    family: int
    head_speed: float       # left edge of the fan
    tail_speed: float       # right edge
    upstream: FluidState
    downstream: FluidState

    @property
    def min_speed(self) -> float:
        return self.head_speed

    @property
    def max_speed(self) -> float:
        return self.tail_speed


Wave = Union[Shock, Rarefaction]


@dataclass(frozen=True)
class WaveFan:
    """Exact self-similar Riemann solution: 1-wave, middle state, 2-wave."""

    left: FluidState
    wave1: Optional[Wave]
    middle: FluidState
    wave2: Optional[Wave]
    right: FluidState
    c: float

    @property
    def max_speed(self) -> float:
        speeds = [w.max_speed for w in (self.wave1, self.wave2) if w is not None]
        return max(speeds) if speeds else -math.inf

    @property
    def min_speed(self) -> float:
        speeds = [w.min_speed for w in (self.wave1, self.wave2) if w is not None]
        return min(speeds) if speeds else math.inf


def eigenvalues(state: FluidState, c: float) -> tuple[float, float]:
    """Characteristic speeds (u - c, u + c)."""
    u = state.u
    return u - c, u + c


def shock_connect(from_state: FluidState, family: int, rho_to: float,
                  c: float) -> tuple[FluidState, float, bool]:
    """State downstream of a family-i shock of prescribed density.

    Returns (state, shock speed, entropic flag).  The speed is
    u + (-1)^i c sqrt(rho_to/rho_from) and the momentum follows from
    Rankine-Hugoniot.  The jump is entropic iff the velocity does not
    increase across it.
    """
    if family not in (1, 2):
        raise ValueError(f"family must be 1 or 2, got {family}")
    if not (rho_to > 0.0):
        raise InvalidStateError(f"target density must be positive, got {rho_to}")
    sign = -1.0 if family == 1 else 1.0
    sigma = from_state.u + sign * c * math.sqrt(rho_to / from_state.rho)
    q_to = from_state.q + sigma * (rho_to - from_state.rho)
    to_state = FluidState(rho_to, q_to)
    return to_state, sigma, from_state.u >= to_state.u


def rarefaction_connect(from_state: FluidState, family: int, s: float,
                        c: float) -> FluidState:
    """State at characteristic speed s on the family-i rarefaction curve.

    The curve starts at s_from = u + (-1)^i c; s must not fall on the
    compression side (s < s_from).
    """
    if family not in (1, 2):
        raise ValueError(f"family must be 1 or 2, got {family}")
    sign = -1.0 if family == 1 else 1.0
    s_from = from_state.u + sign * c
    if s < s_from - 1.0e-12 * (c + abs(s_from)):
        raise ValueError(
            f"s={s} is on the compression side of the {family}-curve (s_from={s_from})")
    factor = math.exp(sign * (s - s_from) / c)
    rho = from_state.rho * factor
    q = (from_state.q + from_state.rho * (s - s_from)) * factor
    return FluidState(rho, q)


def _rho_on_1_curve(left: FluidState, u: float, c: float) -> float:
    # density on the forward 1-curve from `left` at velocity u
    if u >= left.u:
        return left.rho * math.exp((left.u - u) / c)
    d = left.u - u
    z = (d + math.sqrt(d * d + 4.0 * c * c)) / (2.0 * c)
    return left.rho * z * z


def _rho_on_2_curve(right: FluidState, u: float, c: float) -> float:
    # density on the backward 2-curve from `right` at velocity u
    if u <= right.u:
        return right.rho * math.exp((u - right.u) / c)
    d = u - right.u
    z = (d + math.sqrt(d * d + 4.0 * c * c)) / (2.0 * c)
    return right.rho * z * z


_ZERO_WAVE_RTOL = 1.0e-13


def solve_classical_riemann(left: FluidState, right: FluidState, c: float) -> WaveFan:
    """Exact solution of the classical Riemann problem.

    The middle state is the unique intersection of the forward 1-curve from
    the left state with the backward 2-curve from the right state.  The
    root is found in the velocity variable, where both curve densities are
    strictly monotone: bisection to 1e-13 absolute followed by a secant
    polish.  Waves with a relative density jump below 1e-13 are emitted as
    absent so constant solutions stay canonical.
    """
    if not (c > 0.0 and math.isfinite(c)):
        raise InvalidStateError(f"sound speed must be positive, got {c}")

    def gap(u):
        return _rho_on_1_curve(left, u, c) - _rho_on_2_curve(right, u, c)

    pad = 10.0 * c * (1.0 + abs(math.log(right.rho / left.rho)))
    lo = min(left.u, right.u) - pad
    hi = max(left.u, right.u) + pad
    glo, ghi = gap(lo), gap(hi)
    if not (glo >= 0.0 >= ghi):
        raise RootBracketError(
            f"middle-state bracket failed: gap({lo})={glo}, gap({hi})={ghi}")
    tol = 1.0e-13 * max(1.0, c + abs(left.u) + abs(right.u))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    u_star = 0.5 * (lo + hi)
    # secant polish on the monotone gap
    u_prev, g_prev = lo, gap(lo)
    g_star = gap(u_star)
    for _ in range(4):
        if g_star == g_prev:
            break
        u_next = u_star - g_star * (u_star - u_prev) / (g_star - g_prev)
        if not (lo - tol <= u_next <= hi + tol):
            break
        u_prev, g_prev = u_star, g_star
        u_star, g_star = u_next, gap(u_next)
    rho_l = _rho_on_1_curve(left, u_star, c)
    rho_r = _rho_on_2_curve(right, u_star, c)
    rho_star = 0.5 * (rho_l + rho_r)
    if abs(rho_l - rho_r) > 1.0e-12 * rho_star:
        raise RootBracketError(
            f"middle-state residual too large: rho_1={rho_l}, rho_2={rho_r}, u*={u_star}")
    middle = FluidState.from_velocity(rho_star, u_star)

    wave1: Optional[Wave] = None
    if abs(rho_star - left.rho) > _ZERO_WAVE_RTOL * max(rho_star, left.rho):
        if rho_star > left.rho:
            _, sigma, _ = shock_connect(left, 1, rho_star, c)
            wave1 = Shock(1, sigma, left, middle)
        else:
            wave1 = Rarefaction(1, left.u - c, u_star - c, left, middle)
    wave2: Optional[Wave] = None
    if abs(rho_star - right.rho) > _ZERO_WAVE_RTOL * max(rho_star, right.rho):
        if rho_star > right.rho:
            _, sigma, _ = shock_connect(middle, 2, right.rho, c)
            wave2 = Shock(2, sigma, middle, right)
        else:
            wave2 = Rarefaction(2, u_star + c, right.u + c, middle, right)
    return WaveFan(left, wave1, middle, wave2, right, c)


def sample_fan(fan: WaveFan, xi: float) -> FluidState:
    """State of the self-similar solution at xi = x/t.

    At a shock speed exactly, the downstream (right) state is returned;
    inside a rarefaction the fan formula is evaluated at xi.
    """
    if fan.wave1 is not None:
        w = fan.wave1
        if isinstance(w, Shock):
            if xi < w.speed:
                return fan.left
        else:
            if xi < w.head_speed:
                return fan.left
            if xi <= w.tail_speed:
                return rarefaction_connect(fan.left, 1, xi, fan.c)
    if fan.wave2 is not None:
        w = fan.wave2
        # keep the left datum exact when the 1-wave is absent
        before = fan.middle if fan.wave1 is not None else fan.left
        if isinstance(w, Shock):
            if xi < w.speed:
                return before
        else:
            if xi < w.head_speed:
                return before
            if xi <= w.tail_speed:
                return rarefaction_connect(before, 2, xi, fan.c)
    return fan.right


def reflect_state(state: FluidState) -> FluidState:
    """x -> -x image of a state: momentum changes sign."""
    return FluidState(state.rho, -state.q)
