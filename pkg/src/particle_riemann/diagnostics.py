"""Physical-consistency checks on interface pairs and assembled solutions.

The interface relations imply a closed-form particle acceleration (what a
coupled solver would feed the particle ODE), an algebraic identity with
the momentum-flux jump, and a one-signed energy balance: admissible trace
pairs can only dissipate total energy through the particle.  These checks
are cheap algebra and run on every solution the CLI emits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .euler import FluidState, Rarefaction, Shock
from .germ import GermPair, germ_residual


@dataclass(frozen=True)
class EntropyPair:
    """The usual convex entropy E = q^2/(2 rho) + c^2 rho ln rho and its flux."""

    c: float
    m: float = 1.0

    def entropy(self, rho: float, q: float) -> float:
        return q * q / (2.0 * rho) + self.c ** 2 * rho * math.log(rho)

    def entropy_flux(self, rho: float, q: float) -> float:
        return (q / rho) * (self.entropy(rho, q) + self.c ** 2 * rho)


def particle_acceleration(minus: FluidState, plus: FluidState, v: float,
                          c: float, m: float = 1.0) -> float:
    """Acceleration the trace pair exerts on a particle of mass m.

    Evaluates c^2 (rho- - rho+) (1 - (u- - v)(u+ - v)/c^2) / m, which is
    what conservation of total impulsion forces the drag term to equal.
    Requires matched relative momenta.
    """
    a_minus = minus.alpha(v)
    a_plus = plus.alpha(v)
    scale = max(1.0, abs(a_minus), abs(a_plus))
    if abs(a_minus - a_plus) > 1.0e-10 * scale:
        raise ValueError(
            f"traces carry different relative momenta: {a_minus} vs {a_plus}")
    factor = 1.0 - (minus.u - v) * (plus.u - v) / (c * c)
    return c * c * (minus.rho - plus.rho) * factor / m


def flux_jump_acceleration(minus: FluidState, plus: FluidState, v: float,
                           c: float, m: float = 1.0) -> float:
    """Momentum-flux jump form of the same quantity (algebraically identical)."""
    flux_minus = minus.rho * minus.u ** 2 + c * c * minus.rho
    flux_plus = plus.rho * plus.u ** 2 + c * c * plus.rho
    return (v * (plus.q - minus.q) + flux_minus - flux_plus) / m


def interface_dissipation(pair: GermPair, c: float) -> float:
    """Energy-production rate of the interface; <= 0 on admissible pairs.

    Reduced form of the entropy balance across the particle:
    alpha [ alpha^2 (rho-^2 - rho+^2) / (2 rho-^2 rho+^2)
            + c^2 (ln rho+ - ln rho-) ].
    """
    rm, rp = pair.minus.rho, pair.plus.rho
    alpha = pair.minus.alpha
    bracket = (alpha * alpha * (rm * rm - rp * rp) / (2.0 * rm * rm * rp * rp)
               + c * c * (math.log(rp) - math.log(rm)))
    return alpha * bracket


@dataclass(frozen=True)
class SolutionReport:
    """Aggregate admissibility report for an assembled solution."""

    shock_entropy_ok: bool
    rarefaction_ordering_ok: bool
    germ_residual: float
    germ_member: bool
    dissipation: float
    acceleration_identity_residual: float
    fan_speeds_ok: bool

    @property
    def passed(self) -> bool:
        return (self.shock_entropy_ok and self.rarefaction_ordering_ok
                and self.germ_member
                and self.dissipation <= 1.0e-12
                and self.acceleration_identity_residual <= 1.0e-8
                and self.fan_speeds_ok)

    def as_dict(self) -> dict:
        return {
            "shock_entropy_ok": self.shock_entropy_ok,
            "rarefaction_ordering_ok": self.rarefaction_ordering_ok,
            "germ_residual": self.germ_residual,
            "germ_member": self.germ_member,
            "dissipation": self.dissipation,
            "acceleration_identity_residual": self.acceleration_identity_residual,
            "fan_speeds_ok": self.fan_speeds_ok,
            "passed": self.passed,
        }


def check_solution(solution, law=None) -> SolutionReport:
    """Run every localized admissibility check on a ParticleRiemannSolution.

    Shock entropy and rarefaction ordering wave by wave, interface
    residuals, the sign of the interface energy balance, the acceleration
    identity, and the wave-speed ordering around the particle line.
    """
    c, v = solution.c, solution.v
    shocks_ok = True
    rare_ok = True
    for fan in (solution.left_fan, solution.right_fan):
        for wave in (fan.wave1, fan.wave2):
            if wave is None:
                continue
            du = wave.upstream.u - wave.downstream.u
            tol = 1.0e-10 * (c + abs(wave.upstream.u) + abs(wave.downstream.u))
            if isinstance(wave, Shock) and du < -tol:
                shocks_ok = False
            if isinstance(wave, Rarefaction) and du > tol:
                rare_ok = False
    pair = GermPair(solution.minus_particle, solution.plus_particle, v,
                    solution.theta)
    if law is not None:
        res, member = germ_residual(pair, law, c)
        germ_res, germ_member = res.relation_residual, member
    else:
        germ_res = solution.residuals.get("relation_residual", math.inf)
        germ_member = solution.residuals.get("germ_member", False)
    diss = interface_dissipation(pair, c)
    acc = particle_acceleration(solution.minus_trace, solution.plus_trace, v, c)
    acc_flux = flux_jump_acceleration(solution.minus_trace, solution.plus_trace, v, c)
    acc_scale = max(1.0, abs(acc), abs(acc_flux))
    tol = 1.0e-8 * (c + abs(v) + 1.0)
    speeds_ok = (solution.left_fan.max_speed <= v + tol
                 and solution.right_fan.min_speed >= v - tol)
    return SolutionReport(
        shock_entropy_ok=shocks_ok,
        rarefaction_ordering_ok=rare_ok,
        germ_residual=germ_res,
        germ_member=germ_member,
        dissipation=diss,
        acceleration_identity_residual=abs(acc - acc_flux) / acc_scale,
        fan_speeds_ok=speeds_ok,
    )
