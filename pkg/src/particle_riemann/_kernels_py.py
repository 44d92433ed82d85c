"""Pure-Python scalar kernels.

These are the hot inner-loop primitives: power-law drag evaluation, the
sonic potential and its branch inverses, the accessible-wave-curve
evaluators with their monotone inverses, the germ balance function, and
the fixed-step RK4 particle-profile integrator.  A compiled twin with the
exact same signatures lives in ``_kernels.pyx``; ``backend.py`` picks one
at import time.  Keep both files in sync.
"""

import math

PROFILE_OK = 0
PROFILE_PINCHED = 1

_NAN = float("nan")


def pw_drag(lam, n, m, rho, alpha):
    """Power-law drag lam * rho^(n-m) * |alpha|^(m-1) * alpha."""
    if alpha == 0.0:
        return 0.0
    return lam * rho ** (n - m) * abs(alpha) ** (m - 1.0) * alpha


def _pow_inf(x, e):
    try:
        return x ** e
    except OverflowError:
        return math.inf


def _powint(a, b, e):
    # integral of r^e dr from a to b (a, b > 0), stable for e+1 near 0 and
    # overflow-safe far from it
    ell = math.log(b / a)
    ep = e + 1.0
    t = ep * ell
    if abs(t) <= 200.0:
        if t == 0.0:
            return a ** ep * ell
        return a ** ep * math.expm1(t) / ep
    return (_pow_inf(b, ep) - _pow_inf(a, ep)) / ep


def pw_potential(lam, n, m, c, alpha, rho):
    """Sonic potential of a power-law drag, zero at the sonic density |alpha|/c.

    Closed-form antiderivative of (c^2 - alpha^2/r^2) / |D(r, alpha)| with
    the logarithmic cases (exponent hitting -1) handled by the stable
    power-integral helper.  Divergent tails evaluate to +inf (the potential
    rises at both ends of its domain whenever it is unbounded).
    """
    s = abs(alpha) / c
    p = m - n
    scale = lam * abs(alpha) ** m
    val = c * c * _powint(s, rho, p) - alpha * alpha * _powint(s, rho, p - 2.0)
    if math.isnan(val):
        # inf - inf: the more singular piece wins and both limits are +inf
        return math.inf
    return val / scale


def pw_potential_inv(lam, n, m, c, alpha, y, subsonic):
    """Invert the potential on one monotone branch; NaN when y is unreachable.

    subsonic branch: rho >= |alpha|/c (potential increasing);
    supersonic branch: rho <= |alpha|/c (potential decreasing), searched on
    [1e-12 * |alpha|/c, |alpha|/c].
    """
    s = abs(alpha) / c
    if y < 0.0:
        return _NAN
    if y == 0.0:
        return s
    if subsonic:
        lo = s
        hi = 2.0 * s
        grow = 0
        while pw_potential(lam, n, m, c, alpha, hi) < y:
            hi *= 2.0
            grow += 1
            if grow > 400 or not math.isfinite(hi):
                return _NAN
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if pw_potential(lam, n, m, c, alpha, mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1.0e-13 * mid:
                break
        return 0.5 * (lo + hi)
    lo = 1.0e-12 * s
    hi = s
    if pw_potential(lam, n, m, c, alpha, lo) < y:
        return _NAN
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if pw_potential(lam, n, m, c, alpha, mid) < y:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1.0e-13 * mid:
            break
    return 0.5 * (lo + hi)


def mirror_density(c, alpha, rho):
    """Density linked to rho by a shock moving with the particle."""
    return alpha * alpha / (c * c * rho)


def curve_minus(rho_d, alpha_d, c, rho):
    """Relative momentum reachable left of the particle through a slower 1-wave.

    Rarefaction branch below the datum density when the datum 1-speed does
    not exceed the particle, shock branch above.  Domain starts at the curve
    extremity; callers enforce it.
    """
    if alpha_d <= c * rho_d and rho <= rho_d:
        return (alpha_d / rho_d - c * math.log(rho / rho_d)) * rho
    return alpha_d + (alpha_d / rho_d - c * math.sqrt(rho / rho_d)) * (rho - rho_d)


def curve_plus(rho_d, alpha_d, c, rho):
    """Mirror image of curve_minus: states right of the particle via faster 2-waves."""
    if alpha_d >= -c * rho_d and rho <= rho_d:
        return (alpha_d / rho_d + c * math.log(rho / rho_d)) * rho
    return alpha_d + (alpha_d / rho_d + c * math.sqrt(rho / rho_d)) * (rho - rho_d)


def g_sub_minus(rho_d, alpha_d, c, rho_ex, rho_mc, alpha):
    """Inverse of the subsonic graph of the minus curve; NaN above its top value.

    The graph follows curve_minus from the extremity down to the sonic
    crossing rho_mc, then slides along alpha = -c rho.
    """
    top = curve_minus(rho_d, alpha_d, c, rho_ex)
    if alpha >= top:
        if alpha <= top + 1.0e-9 * (abs(top) + c * rho_d):
            return rho_ex
        return _NAN
    if alpha < -c * rho_mc:
        return -alpha / c
    lo = rho_ex
    hi = rho_mc
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if curve_minus(rho_d, alpha_d, c, mid) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1.0e-13 * mid:
            break
    return 0.5 * (lo + hi)


def g_sub_plus(rho_d, alpha_d, c, rho_ex, rho_mc, alpha):
    """Inverse of the subsonic graph of the plus curve; NaN below its bottom value."""
    bottom = curve_plus(rho_d, alpha_d, c, rho_ex)
    if alpha <= bottom:
        if alpha >= bottom - 1.0e-9 * (abs(bottom) + c * rho_d):
            return rho_ex
        return _NAN
    if alpha > c * rho_mc:
        return alpha / c
    lo = rho_ex
    hi = rho_mc
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if curve_plus(rho_d, alpha_d, c, mid) < alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1.0e-13 * mid:
            break
    return 0.5 * (lo + hi)


def delta_pw(lam, n, m, c, alpha,
             m_rho_d, m_alpha_d, m_rho_ex, m_rho_mc,
             p_rho_d, p_alpha_d, p_rho_ex, p_rho_mc):
    """Sign-oriented potential gap between the two subsonic trace candidates.

    Equals +1 exactly on germ traces.  NaN when alpha leaves either
    subsonic range.
    """
    gm = g_sub_minus(m_rho_d, m_alpha_d, c, m_rho_ex, m_rho_mc, alpha)
    gp = g_sub_plus(p_rho_d, p_alpha_d, c, p_rho_ex, p_rho_mc, alpha)
    if math.isnan(gm) or math.isnan(gp):
        return _NAN
    fm = pw_potential(lam, n, m, c, alpha, gm)
    fp = pw_potential(lam, n, m, c, alpha, gp)
    if alpha > 0.0:
        return fm - fp
    return fp - fm


def reg_deriv(reg, eps, xi):
    # derivative of the smoothed unit step; reg 0 = ramp, 1 = cubic smoothstep
    if xi < -0.5 * eps or xi > 0.5 * eps:
        return 0.0
    if reg == 0:
        return 1.0 / eps
    t = xi / eps + 0.5
    return (6.0 * t - 6.0 * t * t) / eps


def reg_value(reg, eps, xi):
    """Smoothed unit step used to thicken the particle."""
    if xi <= -0.5 * eps:
        return 0.0
    if xi >= 0.5 * eps:
        return 1.0
    t = xi / eps + 0.5
    if reg == 0:
        return t
    return t * t * (3.0 - 2.0 * t)


def reg_jump_position(reg, eps, theta):
    """Position inside the thickened particle where the step reaches theta."""
    if reg == 0:
        return eps * (theta - 0.5)
    lo = 0.0
    hi = 1.0
    for _ in range(100):
        t = 0.5 * (lo + hi)
        if t * t * (3.0 - 2.0 * t) < theta:
            lo = t
        else:
            hi = t
    return eps * (0.5 * (lo + hi) - 0.5)


def _pw_rhs(lam, n, m, c, alpha, reg, eps, xi, rho):
    d = c * c - alpha * alpha / (rho * rho)
    return -pw_drag(lam, n, m, rho, alpha) * reg_deriv(reg, eps, xi) / d


def _pw_leg(lam, n, m, c, alpha, reg, eps, xi0, xi1, steps, rho, above):
    # RK4 over [xi0, xi1]; 'above' tells which side of the sonic density the
    # branch must stay on, so a crossing is reported as a pinch.
    s = abs(alpha) / c

    def inside(r):
        return r > 0.0 and (r > s if above else r < s)

    if not inside(rho):
        return rho, PROFILE_PINCHED
    if steps <= 0:
        return rho, PROFILE_OK
    h = (xi1 - xi0) / steps
    for i in range(steps):
        xi = xi0 + i * h
        k1 = _pw_rhs(lam, n, m, c, alpha, reg, eps, xi, rho)
        r2 = rho + 0.5 * h * k1
        if not inside(r2):
            return rho, PROFILE_PINCHED
        k2 = _pw_rhs(lam, n, m, c, alpha, reg, eps, xi + 0.5 * h, r2)
        r3 = rho + 0.5 * h * k2
        if not inside(r3):
            return rho, PROFILE_PINCHED
        k3 = _pw_rhs(lam, n, m, c, alpha, reg, eps, xi + 0.5 * h, r3)
        r4 = rho + h * k3
        if not inside(r4):
            return rho, PROFILE_PINCHED
        k4 = _pw_rhs(lam, n, m, c, alpha, reg, eps, xi + h, r4)
        rho += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if not (inside(rho) and math.isfinite(rho)):
            return rho, PROFILE_PINCHED
    return rho, PROFILE_OK


def profile_rk4_pw(lam, n, m, c, alpha, rho_in, eps, steps, reg, theta, has_theta):
    """Integrate the thickened-particle profile for a power-law drag (alpha > 0).

    Fourth-order fixed-step march of the in-particle density ODE; when a
    jump fraction theta is prescribed, the standing-shock jump to the
    mirror density is inserted where the smoothed step reaches theta.
    Returns (exit density, status).  Never inverts the potential, so it can
    serve as an independent check of the traversal construction.
    """
    s = alpha / c
    if not has_theta:
        rho, status = _pw_leg(lam, n, m, c, alpha, reg, eps,
                              -0.5 * eps, 0.5 * eps, steps, rho_in, rho_in > s)
        return rho, status
    xi_j = reg_jump_position(reg, eps, theta)
    frac = (xi_j + 0.5 * eps) / eps
    steps1 = int(round(steps * frac))
    if steps1 < 0:
        steps1 = 0
    if steps1 > steps:
        steps1 = steps
    rho, status = _pw_leg(lam, n, m, c, alpha, reg, eps,
                          -0.5 * eps, xi_j, steps1, rho_in, False)
    if status != PROFILE_OK:
        return rho, status
    rho = mirror_density(c, alpha, rho)
    return _pw_leg(lam, n, m, c, alpha, reg, eps,
                   xi_j, 0.5 * eps, steps - steps1, rho, True)
