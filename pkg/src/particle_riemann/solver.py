"""Self-similar solutions of the particle Riemann problem.

The solution left of the particle path is a classical Riemann fan slower
than the particle, the solution right of it a classical fan faster than
it, and the two one-sided traces must form an admissible interface pair.
With both traces parametrized by the conserved relative momentum alpha,
admissibility reduces to a scalar equation Delta(alpha) = 1 in the
subsonic regime, plus a small decision tree when a datum rams the particle
supersonically.  ``solve`` returns the unique solution guaranteed by the
structural drag hypotheses; ``enumerate_solutions`` scans exhaustively and
can return up to three admissible solutions when those hypotheses fail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

from .backend import kernels
from .drag import DragLaw, NoRootError, SonicPotential, as_power_law, mirror
from .euler import FluidState, WaveFan, Rarefaction, Shock, reflect_state, \
    sample_fan, solve_classical_riemann
from .germ import GermPair, ParticleState, germ_residual
from .wavesets import AccessibleCurveMinus, AccessibleCurvePlus, build_minus, \
    build_plus, crossing_alpha, in_V

DELTA_SCAN_POINTS = 512
THETA_SCAN_POINTS = 257
DEDUP_RTOL = 1.0e-8


class SolverError(RuntimeError):
    """Root bracketing or candidate construction failed; carries diagnostics."""


class CaseLabel(enum.Enum):
    SUBSONIC = "subsonic"
    SUPERSONIC_LEFT = "supersonic_left"
    SUPERSONIC_RIGHT = "supersonic_right"


@dataclass(frozen=True)
class ParticleRiemannProblem:
    left: FluidState
    right: FluidState
    v: float
    c: float
    law: DragLaw

    def __post_init__(self):
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"sound speed must be positive, got {self.c}")
        if not math.isfinite(self.v):
            raise ValueError(f"particle velocity must be finite, got {self.v}")


@dataclass(frozen=True)
class ParticleRiemannSolution:
    """Full self-similar solution: left fan, interface traces, right fan."""

    left_fan: WaveFan
    minus_trace: FluidState
    plus_trace: FluidState
    alpha_star: float
    theta: Optional[float]
    right_fan: WaveFan
    case: CaseLabel
    residuals: dict
    v: float
    c: float

    @property
    def minus_particle(self) -> ParticleState:
        return ParticleState(self.minus_trace.rho, self.minus_trace.alpha(self.v))

    @property
    def plus_particle(self) -> ParticleState:
        return ParticleState(self.plus_trace.rho, self.plus_trace.alpha(self.v))


def classify(problem: ParticleRiemannProblem) -> CaseLabel:
    """Regime of the data relative to the particle.

    Closed inequalities put the sonic coincidences u - v = +-c in the
    subsonic case, whose construction stays finite there.  When both data
    are supersonic towards the particle the left label takes precedence;
    the solver still reflects internally when the accessible-set geometry
    demands it.
    """
    if problem.left.u - problem.v > problem.c:
        return CaseLabel.SUPERSONIC_LEFT
    if problem.right.u - problem.v < -problem.c:
        return CaseLabel.SUPERSONIC_RIGHT
    return CaseLabel.SUBSONIC


def reflect_problem(problem: ParticleRiemannProblem) -> ParticleRiemannProblem:
    return ParticleRiemannProblem(reflect_state(problem.right),
                                  reflect_state(problem.left),
                                  -problem.v, problem.c, problem.law)


def _reflect_wave(w, c):
    if w is None:
        return None
    fam = 3 - w.family
    if isinstance(w, Shock):
        return Shock(fam, -w.speed, reflect_state(w.downstream),
                     reflect_state(w.upstream))
    return Rarefaction(fam, -w.tail_speed, -w.head_speed,
                       reflect_state(w.downstream), reflect_state(w.upstream))


def _reflect_fan(fan: WaveFan) -> WaveFan:
    return WaveFan(reflect_state(fan.right), _reflect_wave(fan.wave2, fan.c),
                   reflect_state(fan.middle), _reflect_wave(fan.wave1, fan.c),
                   reflect_state(fan.left), fan.c)


_REFLECTED_CASE = {
    CaseLabel.SUBSONIC: CaseLabel.SUBSONIC,
    CaseLabel.SUPERSONIC_LEFT: CaseLabel.SUPERSONIC_RIGHT,
    CaseLabel.SUPERSONIC_RIGHT: CaseLabel.SUPERSONIC_LEFT,
}


def reflect_solution(sol: ParticleRiemannSolution) -> ParticleRiemannSolution:
    """x -> -x image of a solution (sides swap, alpha changes sign)."""
    residuals = dict(sol.residuals)
    residuals["left_speed_excess"] = sol.residuals["right_speed_excess"]
    residuals["right_speed_excess"] = sol.residuals["left_speed_excess"]
    return ParticleRiemannSolution(
        left_fan=_reflect_fan(sol.right_fan),
        minus_trace=reflect_state(sol.plus_trace),
        plus_trace=reflect_state(sol.minus_trace),
        alpha_star=-sol.alpha_star,
        theta=sol.theta,
        right_fan=_reflect_fan(sol.left_fan),
        case=_REFLECTED_CASE[sol.case],
        residuals=residuals,
        v=-sol.v,
        c=sol.c,
    )


def delta(alpha: float, minus_curve: AccessibleCurveMinus,
          plus_curve: AccessibleCurvePlus, law: DragLaw, c: float) -> float:
    """Sign-oriented potential gap between the two subsonic trace candidates.

    Oriented so that admissible interface traces always solve
    delta(alpha) = 1: for alpha > 0 the gap runs from the minus trace to
    the plus trace, for alpha < 0 the other way.  Diverges to +infinity as
    alpha -> 0 whenever the graphs do not already meet there, because the
    drag vanishes with alpha.
    """
    if alpha == 0.0:
        raise ValueError("delta is undefined at alpha = 0")
    pw = as_power_law(law)
    if pw is not None:
        val = kernels.delta_pw(pw.lam, pw.n, pw.m, c, alpha,
                               minus_curve.rho_datum, minus_curve.alpha_datum,
                               minus_curve.rho_ex, minus_curve.rho_mc,
                               plus_curve.rho_datum, plus_curve.alpha_datum,
                               plus_curve.rho_ex, plus_curve.rho_mc)
        if math.isnan(val):
            raise ValueError(f"alpha={alpha} outside a subsonic range")
        return val
    gm = minus_curve.g_sub(alpha)
    gp = plus_curve.g_sub(alpha)
    pot = SonicPotential(law, alpha, c)
    if alpha > 0.0:
        return pot.value(gm) - pot.value(gp)
    return pot.value(gp) - pot.value(gm)


def _lab(state: ParticleState, v: float) -> FluidState:
    return FluidState(state.rho, state.alpha + v * state.rho)


def _speed_tol(problem) -> float:
    return 1.0e-8 * (problem.c + abs(problem.v) + 1.0)


def _assemble(problem: ParticleRiemannProblem, minus: ParticleState,
              plus: ParticleState, theta: Optional[float],
              case: CaseLabel) -> ParticleRiemannSolution:
    v, c = problem.v, problem.c
    minus_lab = _lab(minus, v)
    plus_lab = _lab(plus, v)
    left_fan = solve_classical_riemann(problem.left, minus_lab, c)
    right_fan = solve_classical_riemann(plus_lab, problem.right, c)
    res, member = germ_residual(GermPair(minus, plus, v, theta), problem.law, c)
    residuals = res.as_dict()
    residuals["germ_member"] = member
    residuals["left_speed_excess"] = max(0.0, left_fan.max_speed - v)
    residuals["right_speed_excess"] = max(0.0, v - right_fan.min_speed)
    return ParticleRiemannSolution(left_fan, minus_lab, plus_lab,
                                   minus.alpha, theta, right_fan, case,
                                   residuals, v, c)


def _solve_delta_one(problem, minus_curve, plus_curve, alpha_hi,
                     case) -> ParticleRiemannSolution:
    """Root of Delta = 1 between 0 (excluded) and alpha_hi, then assembly.

    Delta blows up towards 0 and is below 1 at alpha_hi, so a sign change
    is guaranteed; bisection in alpha followed by a secant polish.
    """
    law, c = problem.law, problem.c
    sgn = 1.0 if alpha_hi > 0.0 else -1.0
    mag_hi = abs(alpha_hi)

    def f(mag):
        return delta(sgn * mag, minus_curve, plus_curve, law, c) - 1.0

    lo = 1.0e-12 * mag_hi
    flo = f(lo)
    shrink = 0
    while flo <= 0.0:
        lo *= 1.0e-6
        shrink += 1
        if shrink > 40:
            raise SolverError(
                f"Delta stays below 1 towards alpha=0 (alpha_hi={alpha_hi})")
        flo = f(lo)
    hi = mag_hi
    fhi = f(hi)
    if fhi > 0.0:
        raise SolverError(
            f"Delta({alpha_hi}) = {fhi + 1.0} > 1: no subsonic root bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1.0e-15 * mid:
            break
    mag = 0.5 * (lo + hi)
    prev, fprev = lo, f(lo)
    fm = f(mag)
    for _ in range(4):
        if fm == fprev:
            break
        nxt = mag - fm * (mag - prev) / (fm - fprev)
        if not (lo <= nxt <= hi):
            break
        prev, fprev = mag, fm
        mag, fm = nxt, f(nxt)
    alpha = sgn * mag
    minus = ParticleState(minus_curve.g_sub(alpha), alpha)
    plus = ParticleState(plus_curve.g_sub(alpha), alpha)
    return _assemble(problem, minus, plus, None, case)


def _solve_interface_root(problem, minus_curve, plus_curve,
                          case) -> ParticleRiemannSolution:
    """Subsonic-pair solution through the graph crossing alpha_0.

    The crossing has Delta(alpha_0) = 0 while Delta blows up towards
    alpha = 0, so Delta = 1 has a root on the alpha_0 side of zero; when
    the graphs already meet at alpha = 0 the interface is a standing wall
    with equal traces and the state passes through untouched.
    """
    g_minus0 = minus_curve.g_sub(0.0)
    g_plus0 = plus_curve.g_sub(0.0)
    if abs(g_minus0 - g_plus0) <= 1.0e-11 * max(g_minus0, g_plus0):
        state = ParticleState(0.5 * (g_minus0 + g_plus0), 0.0)
        return _assemble(problem, state, state, None, case)
    alpha0 = crossing_alpha(minus_curve, plus_curve)
    if alpha0 == 0.0:
        state = ParticleState(minus_curve.g_sub(0.0), 0.0)
        return _assemble(problem, state, state, None, case)
    return _solve_delta_one(problem, minus_curve, plus_curve, alpha0, case)


def solve_subsonic(problem: ParticleRiemannProblem) -> ParticleRiemannSolution:
    """Unique solution when neither datum is supersonic towards the particle.

    Both traces then sit on the subsonic graphs and the interface relation
    reduces to the scalar root of Delta = 1.
    """
    minus_curve = build_minus(problem.left, problem.v, problem.c)
    plus_curve = build_plus(problem.right, problem.v, problem.c)
    return _solve_interface_root(problem, minus_curve, plus_curve,
                                 CaseLabel.SUBSONIC)


def _theta_root(pot, rho_in, target_exit) -> Optional[float]:
    """theta at which the internal-shock exit density equals target_exit."""
    f_in = pot.value(rho_in)
    c = pot.c
    alpha = pot.alpha
    f_target = pot.value(target_exit)

    def signed(theta):
        # feasible-exit balance: F(mirror(jump)) - (1 - theta) - F(target)
        if f_in < theta:
            return None
        rho_jump = pot.inverse(f_in - theta, "supersonic")
        return pot.value(mirror(alpha, c, rho_jump)) - (1.0 - theta) - f_target

    prev_t = prev_v = None
    bracket = None
    hit = None
    for i in range(THETA_SCAN_POINTS):
        theta = i / (THETA_SCAN_POINTS - 1)
        val = signed(theta)
        if val is None:
            prev_t = prev_v = None
            continue
        if abs(val) <= 1.0e-12:
            hit = theta
            break
        if prev_v is not None and (val < 0.0) != (prev_v < 0.0):
            bracket = (prev_t, theta)
            break
        prev_t, prev_v = theta, val
    if hit is not None:
        return hit
    if bracket is None:
        return None
    lo, hi = bracket
    vlo = signed(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        vm = signed(mid)
        if vm is None:
            return None
        if (vm < 0.0) == (vlo < 0.0):
            lo, vlo = mid, vm
        else:
            hi = mid
        if hi - lo <= 1.0e-15:
            break
    return 0.5 * (lo + hi)


def solve_supersonic_left(problem: ParticleRiemannProblem) -> ParticleRiemannSolution:
    """Unique solution when the left datum rams the particle supersonically.

    Decision tree on the potential drop available between the datum and the
    supersonic boundary of the right accessible set: enough drop means the
    particle swallows it whole (no left wave, supersonic right trace); with
    Delta(alpha_L) > 1 the profile must jump internally and exits exactly
    on the right subsonic graph; otherwise the interface is subsonic and
    the Delta = 1 root applies.
    """
    v, c, law = problem.v, problem.c, problem.law
    alpha_l = problem.left.alpha(v)
    rho_l = problem.left.rho
    if alpha_l <= c * rho_l:
        raise SolverError("left datum is not supersonic towards the particle")
    minus_curve = build_minus(problem.left, v, c)
    plus_curve = build_plus(problem.right, v, c)
    pot = SonicPotential(law, alpha_l, c)
    rho_e_sub = plus_curve.g_sub(alpha_l)
    rho_e = mirror(alpha_l, c, rho_e_sub)
    f_in = pot.value(rho_l)
    gap = f_in - pot.value(rho_e)
    if gap >= 1.0 - 1.0e-12:
        rho0 = pot.inverse(max(f_in - 1.0, 0.0), "supersonic")
        minus = ParticleState(rho_l, alpha_l)
        plus = ParticleState(rho0, alpha_l)
        return _assemble(problem, minus, plus, None, CaseLabel.SUPERSONIC_LEFT)
    if delta(alpha_l, minus_curve, plus_curve, law, c) > 1.0:
        theta = _theta_root(pot, rho_l, rho_e_sub)
        if theta is None:
            raise SolverError(
                "no internal-shock position matches the right subsonic graph")
        minus = ParticleState(rho_l, alpha_l)
        plus = ParticleState(rho_e_sub, alpha_l)
        return _assemble(problem, minus, plus, theta, CaseLabel.SUPERSONIC_LEFT)
    return _solve_interface_root(problem, minus_curve, plus_curve,
                                 CaseLabel.SUPERSONIC_LEFT)


def solve(problem: ParticleRiemannProblem) -> ParticleRiemannSolution:
    """The self-similar solution singled out by the uniqueness construction.

    Reflects the problem when the geometry says the right datum drives the
    supersonic interaction (the two supersonic memberships are mutually
    exclusive, so one reflection always suffices).
    """
    label = classify(problem)
    if label is CaseLabel.SUPERSONIC_LEFT:
        right_ps = ParticleState(problem.right.rho, problem.right.alpha(problem.v))
        minus_curve = build_minus(problem.left, problem.v, problem.c)
        if minus_curve.in_supersonic_region(right_ps):
            reflected = solve_supersonic_left(reflect_problem(problem))
            return reflect_solution(reflected)
        return solve_supersonic_left(problem)
    if label is CaseLabel.SUPERSONIC_RIGHT:
        reflected = solve_supersonic_left(reflect_problem(problem))
        return reflect_solution(reflected)
    return solve_subsonic(problem)


def _dedup_key(sol: ParticleRiemannSolution):
    return (sol.minus_trace.rho, sol.plus_trace.rho, sol.alpha_star)


def _same_solution(a, b) -> bool:
    ka, kb = _dedup_key(a), _dedup_key(b)
    scale = max(abs(ka[0]), abs(kb[0]), abs(ka[1]), abs(kb[1]),
                abs(ka[2]), abs(kb[2]), 1.0e-30)
    return max(abs(x - y) for x, y in zip(ka, kb)) <= DEDUP_RTOL * scale


def _verify(problem, sol, minus_curve, plus_curve) -> bool:
    tol = _speed_tol(problem)
    if not sol.residuals["germ_member"]:
        return False
    if sol.residuals["left_speed_excess"] > tol:
        return False
    if sol.residuals["right_speed_excess"] > tol:
        return False
    if not in_V(minus_curve, sol.minus_particle):
        return False
    if not in_V(plus_curve, sol.plus_particle):
        return False
    return True


def _delta_one_roots(problem, minus_curve, plus_curve, alpha0):
    """Sign-change scan of Delta - 1 on the root-bearing side of alpha = 0.

    Admissible subsonic pairs need the minus trace denser than the plus
    trace for alpha > 0 (and conversely), which confines roots between 0
    and the graph crossing; the scan stays a superset strategy because
    Delta need not be monotone for general drags.
    """
    if alpha0 == 0.0:
        return []
    sgn = 1.0 if alpha0 > 0.0 else -1.0
    mag0 = abs(alpha0)
    law, c = problem.law, problem.c

    def f(mag):
        try:
            return delta(sgn * mag, minus_curve, plus_curve, law, c) - 1.0
        except ValueError:
            return math.nan

    mags = [mag0 * 10.0 ** (-12.0 * (1.0 - i / (DELTA_SCAN_POINTS - 1)))
            for i in range(DELTA_SCAN_POINTS)]
    roots = []
    prev_m = prev_f = None
    for mag in mags:
        val = f(mag)
        if math.isnan(val):
            prev_m = prev_f = None
            continue
        if val == 0.0:
            roots.append(sgn * mag)
            prev_m = prev_f = None
            continue
        if prev_f is not None and (val < 0.0) != (prev_f < 0.0):
            lo, hi, flo = prev_m, mag, prev_f
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                fm = f(mid)
                if (fm < 0.0) == (flo < 0.0):
                    lo, flo = mid, fm
                else:
                    hi = mid
                if hi - lo <= 1.0e-15 * mid:
                    break
            roots.append(sgn * 0.5 * (lo + hi))
        prev_m, prev_f = mag, val
    return roots


def _supersonic_left_candidates(problem, minus_curve, plus_curve):
    """Candidates with the supersonic left datum as minus trace."""
    v, c, law = problem.v, problem.c, problem.law
    alpha_l = problem.left.alpha(v)
    rho_l = problem.left.rho
    out = []
    pot = SonicPotential(law, alpha_l, c)
    rho_e_sub = plus_curve.g_sub(alpha_l)
    rho_e = mirror(alpha_l, c, rho_e_sub)
    f_in = pot.value(rho_l)
    minus = ParticleState(rho_l, alpha_l)
    # continuous supersonic exit inside the right accessible region
    if f_in - pot.value(rho_e) >= 1.0 - 1.0e-12:
        try:
            rho0 = pot.inverse(max(f_in - 1.0, 0.0), "supersonic")
            out.append((minus, ParticleState(rho0, alpha_l), None))
        except NoRootError:
            pass
    # internal-shock exit landing exactly on the right subsonic graph
    theta = _theta_root(pot, rho_l, rho_e_sub)
    if theta is not None:
        out.append((minus, ParticleState(rho_e_sub, alpha_l), theta))
    return out


def enumerate_solutions(problem: ParticleRiemannProblem) -> list[ParticleRiemannSolution]:
    """All admissible self-similar solutions found by exhaustive scanning.

    Generates subsonic-pair candidates from every sign change of
    Delta - 1, supersonic-datum candidates from the decision-tree branches
    including the full internal-shock scan, and the mirror-image candidates
    when the right datum is supersonic; each candidate is verified against
    the interface relations, the accessible sets and the wave-speed
    ordering, then deduplicated and sorted by alpha.  Under the structural
    drag hypotheses exactly one survives; without them up to three do.
    An empty list signals a regime outside the existence theory.
    """
    v, c = problem.v, problem.c
    minus_curve = build_minus(problem.left, v, c)
    plus_curve = build_plus(problem.right, v, c)
    candidates = []
    g_minus0 = minus_curve.g_sub(0.0)
    g_plus0 = plus_curve.g_sub(0.0)
    if abs(g_minus0 - g_plus0) <= 1.0e-11 * max(g_minus0, g_plus0):
        state = ParticleState(0.5 * (g_minus0 + g_plus0), 0.0)
        candidates.append((state, state, None))
    alpha0 = crossing_alpha(minus_curve, plus_curve)
    for alpha in _delta_one_roots(problem, minus_curve, plus_curve, alpha0):
        candidates.append((ParticleState(minus_curve.g_sub(alpha), alpha),
                           ParticleState(plus_curve.g_sub(alpha), alpha), None))
    if problem.left.u - v > c:
        candidates.extend(
            _supersonic_left_candidates(problem, minus_curve, plus_curve))
    solutions = []
    for minus, plus, theta in candidates:
        try:
            sol = _assemble(problem, minus, plus, theta, classify(problem))
        except (ValueError, SolverError):
            continue
        if _verify(problem, sol, minus_curve, plus_curve):
            solutions.append(sol)
    if problem.right.u - v < -c:
        reflected = reflect_problem(problem)
        r_minus = build_minus(reflected.left, -v, c)
        r_plus = build_plus(reflected.right, -v, c)
        for minus, plus, theta in _supersonic_left_candidates(reflected,
                                                              r_minus, r_plus):
            try:
                sol = _assemble(reflected, minus, plus, theta,
                                classify(reflected))
            except (ValueError, SolverError):
                continue
            if _verify(reflected, sol, r_minus, r_plus):
                solutions.append(reflect_solution(sol))
    unique = []
    for sol in solutions:
        if not any(_same_solution(sol, kept) for kept in unique):
            unique.append(sol)
    unique.sort(key=lambda s: s.alpha_star)
    return unique


def sample_solution(sol: ParticleRiemannSolution, t: float, x: float) -> FluidState:
    """State at position x and time t > 0.

    On the particle line x = v t the right-side trace is returned, matching
    the right-continuous convention of the interface step.
    """
    if not (t > 0.0):
        raise ValueError(f"time must be positive, got {t}")
    xi = x / t
    if xi < sol.v:
        return sample_fan(sol.left_fan, xi)
    if xi > sol.v:
        return sample_fan(sol.right_fan, xi)
    return sol.plus_trace


@dataclass(frozen=True)
class SweepRow:
    lam: float
    alpha_star: Optional[float]
    rho_minus: Optional[float]
    rho_plus: Optional[float]
    case: Optional[CaseLabel]
    residual: Optional[float]
    error: Optional[str]


def sweep_coefficient(problem_template: ParticleRiemannProblem,
                      lambdas) -> list[SweepRow]:
    """Re-solve the same data for each drag coefficient.

    Rows are independent solves (safe to parallelize); per-row failures are
    recorded and the sweep continues.
    """
    if not lambdas:
        raise ValueError("need at least one coefficient")
    rows = []
    for lam in lambdas:
        prob = replace(problem_template, law=problem_template.law.with_lambda(lam))
        try:
            sol = solve(prob)
            rows.append(SweepRow(lam, sol.alpha_star, sol.minus_trace.rho,
                                 sol.plus_trace.rho, sol.case,
                                 sol.residuals["relation_residual"], None))
        except (SolverError, ValueError, NoRootError) as exc:
            rows.append(SweepRow(lam, None, None, None, None, None, str(exc)))
    return rows
