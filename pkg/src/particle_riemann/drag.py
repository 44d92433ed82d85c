"""Drag-force models and the sonic interface potential.

The drag D(rho, alpha) acts only through the particle; what the interface
sees is the potential

    F_alpha(rho) = integral from |alpha|/c to rho of
                   (c^2 - alpha^2/r^2) / |D(r, alpha)| dr,

which vanishes at the sonic density |alpha|/c, decreases below it and
increases above it.  Profiles through the thickened particle descend
F_alpha by exactly one unit of Dirac mass, so everything downstream of
this module works with differences of F.  Power laws get closed forms via
the kernel backend; arbitrary laws fall back to adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .backend import kernels


class NoRootError(RuntimeError):
    """The requested potential level is not attained on the search bracket."""


class DragSignError(ValueError):
    """A drag evaluation violated sign(D) = sign(alpha)."""


class DragLaw:
    """Base drag model: evaluator D(rho, alpha) with a name and parameters."""

    name: str = "drag"
    params: dict = {}

    def evaluate(self, rho: float, alpha: float) -> float:
        raise NotImplementedError

    def __call__(self, rho: float, alpha: float) -> float:
        if not (rho > 0.0):
            raise ValueError(f"density must be positive, got {rho}")
        return self.evaluate(rho, alpha)

    def with_lambda(self, lam: float) -> "DragLaw":
        """Same model shape with the overall coefficient replaced."""
        return ScaledDrag(self, lam)


@dataclass(frozen=True)
class PowerLawDrag(DragLaw):
    """D = lam * rho^(n-m) * |alpha|^(m-1) * alpha.

    Covers the linear drag (n = m = 1) and the density-weighted laws; the
    uniqueness theorem applies exactly when m >= max(1, n).
    """

    lam: float
    n: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not (self.n >= 0.0):
            raise ValueError(f"density exponent must be >= 0, got {self.n}")
        if not (self.m >= 1.0):
            raise ValueError(f"velocity exponent must be >= 1, got {self.m}")

    @property
    def name(self) -> str:
        return f"power(lambda={self.lam}, n={self.n}, m={self.m})"

    @property
    def params(self) -> dict:
        return {"type": "power", "lambda": self.lam, "n": self.n, "m": self.m}

    @property
    def satisfies_uniqueness_hypotheses(self) -> bool:
        return self.m >= self.n

    def evaluate(self, rho: float, alpha: float) -> float:
        return kernels.pw_drag(self.lam, self.n, self.m, rho, alpha)

    def with_lambda(self, lam: float) -> "PowerLawDrag":
        return PowerLawDrag(lam, self.n, self.m)


@dataclass(frozen=True)
class CallableDrag(DragLaw):
    """Wrap an arbitrary evaluator; used for laws outside the power family."""

    fn: Callable[[float, float], float]
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def evaluate(self, rho: float, alpha: float) -> float:
        return self.fn(rho, alpha)


@dataclass(frozen=True)
class ScaledDrag(DragLaw):
    """lam * D0(rho, alpha) for coefficient sweeps of a fixed model."""

    base: DragLaw
    lam: float

    @property
    def name(self) -> str:
        return f"{self.lam} * {self.base.name}"

    @property
    def params(self) -> dict:
        return {"scale": self.lam, "base": self.base.params}

    def evaluate(self, rho: float, alpha: float) -> float:
        return self.lam * self.base.evaluate(rho, alpha)

    def with_lambda(self, lam: float) -> "ScaledDrag":
        return ScaledDrag(self.base, lam)


def as_power_law(law: DragLaw) -> Optional[PowerLawDrag]:
    """Collapse coefficient wrappers down to a bare power law, if that is what it is.

    The fast closed-form kernels apply exactly to this family; anything
    else goes through quadrature.
    """
    scale = 1.0
    while isinstance(law, ScaledDrag):
        scale *= law.lam
        law = law.base
    if isinstance(law, PowerLawDrag):
        return PowerLawDrag(scale * law.lam, law.n, law.m)
    return None


def mirror(alpha: float, c: float, rho: float) -> float:
    """Density linked to rho by a shock moving with the particle.

    The standing-shock Rankine-Hugoniot relations give rho- rho+ =
    alpha^2/c^2, so this map is an involution fixing the sonic density.
    """
    if not (rho > 0.0):
        raise ValueError(f"density must be positive, got {rho}")
    return alpha * alpha / (c * c * rho)


def _adaptive_simpson(f, a, b, rel_tol):
    # bisection-refined Simpson rule; tolerance relative to the whole integral
    if a == b:
        return 0.0

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) * (f0 + 4.0 * f1 + f2) / 6.0

    m = 0.5 * (a + b)
    f_a, f_m, f_b = f(a), f(m), f(b)
    whole = simpson(a, b, f_a, f_m, f_b)
    scale = max(abs(whole), 1.0e-300)

    def recurse(x0, x2, f0, f1, f2, acc, tol, depth):
        x1 = 0.5 * (x0 + x2)
        lm = 0.5 * (x0 + x1)
        rm = 0.5 * (x1 + x2)
        f_lm, f_rm = f(lm), f(rm)
        left = simpson(x0, x1, f0, f_lm, f1)
        right = simpson(x1, x2, f1, f_rm, f2)
        if depth >= 48 or abs(left + right - acc) <= 15.0 * tol:
            return left + right + (left + right - acc) / 15.0
        return (recurse(x0, x1, f0, f_lm, f1, left, 0.5 * tol, depth + 1)
                + recurse(x1, x2, f1, f_rm, f2, right, 0.5 * tol, depth + 1))

    return recurse(a, b, f_a, f_m, f_b, whole, rel_tol * scale, 0)


@dataclass(frozen=True)
class SonicPotential:
    """F_alpha for a fixed law, relative momentum alpha != 0 and sound speed c.

    The reference point is pinned at the sonic density: F(|alpha|/c) = 0.
    Only differences of F carry meaning, so any fixed reference would do;
    this one makes "available drop" equal to the F value itself.
    """

    law: DragLaw
    alpha: float
    c: float

    def __post_init__(self):
        if self.alpha == 0.0:
            raise ValueError("the sonic potential is undefined at alpha = 0")
        if not (self.c > 0.0):
            raise ValueError(f"sound speed must be positive, got {self.c}")

    @property
    def sonic_density(self) -> float:
        return abs(self.alpha) / self.c

    def value(self, rho: float) -> float:
        if not (rho > 0.0):
            raise ValueError(f"density must be positive, got {rho}")
        pw = as_power_law(self.law)
        if pw is not None:
            return kernels.pw_potential(pw.lam, pw.n, pw.m, self.c, self.alpha, rho)
        return self.value_by_quadrature(rho)

    def value_by_quadrature(self, rho: float, rel_tol: float = 1.0e-12) -> float:
        """Adaptive-quadrature evaluation; also the cross-check for closed forms."""
        a, c = self.alpha, self.c

        def integrand(r):
            d = abs(self.law(r, a))
            return (c * c - a * a / (r * r)) / d

        return _adaptive_simpson(integrand, self.sonic_density, rho, rel_tol)

    def inverse(self, y: float, branch: str) -> float:
        """Unique density with F(rho) = y on the requested monotone branch.

        branch "subsonic" searches rho >= |alpha|/c on a geometrically grown
        bracket; "supersonic" searches [1e-12, 1] * |alpha|/c.  Raises
        NoRootError when y exceeds the branch supremum on the bracket.
        """
        if branch not in ("subsonic", "supersonic"):
            raise ValueError(f"unknown branch {branch!r}")
        if y < 0.0:
            raise NoRootError(f"potential values are nonnegative, got y={y}")
        pw = as_power_law(self.law)
        if pw is not None:
            rho = kernels.pw_potential_inv(pw.lam, pw.n, pw.m, self.c, self.alpha,
                                           y, branch == "subsonic")
            if math.isnan(rho):
                raise NoRootError(
                    f"level y={y} not attained on the {branch} branch (alpha={self.alpha})")
            return rho
        return self._inverse_generic(y, branch)

    def _inverse_generic(self, y, branch):
        s = self.sonic_density
        if y == 0.0:
            return s
        if branch == "subsonic":
            lo, hi = s, 2.0 * s
            grow = 0
            while self.value(hi) < y:
                hi *= 2.0
                grow += 1
                if grow > 400 or not math.isfinite(hi):
                    raise NoRootError(f"subsonic bracket exhausted at y={y}")
            rising = True
        else:
            lo, hi = 1.0e-12 * s, s
            if self.value(lo) < y:
                raise NoRootError(
                    f"level y={y} above the supersonic supremum {self.value(lo)}")
            rising = False
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if (self.value(mid) < y) == rising:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1.0e-13 * mid:
                break
        return 0.5 * (lo + hi)


def potential(law: DragLaw, alpha: float, c: float, rho: float) -> float:
    """F_alpha(rho) with the sonic reference F(|alpha|/c) = 0."""
    return SonicPotential(law, alpha, c).value(rho)


def potential_inverse(law: DragLaw, alpha: float, c: float, branch: str,
                      y: float) -> float:
    """Density at potential level y on one branch (see SonicPotential.inverse)."""
    return SonicPotential(law, alpha, c).inverse(y, branch)


@dataclass(frozen=True)
class HypothesisReport:
    """Sampled verdicts on the structural conditions behind uniqueness."""

    sign_ok: bool
    increasing_in_alpha: bool
    abs_decreasing_in_rho: bool
    croissance_ok: bool

    @property
    def all_ok(self) -> bool:
        return (self.sign_ok and self.increasing_in_alpha
                and self.abs_decreasing_in_rho and self.croissance_ok)

    def as_dict(self) -> dict:
        return {
            "sign_ok": self.sign_ok,
            "increasing_in_alpha": self.increasing_in_alpha,
            "abs_decreasing_in_rho": self.abs_decreasing_in_rho,
            "croissance_ok": self.croissance_ok,
        }


def _default_rho_grid() -> list[float]:
    return [10.0 ** (-2.0 + 4.0 * i / 63.0) for i in range(64)]


def _default_alpha_grid(c: float) -> list[float]:
    return [-5.0 * c + 10.0 * c * i / 63.0 for i in range(64)]


def check_hypotheses(law: DragLaw, c: float,
                     rho_grid: Optional[Sequence[float]] = None,
                     alpha_grid: Optional[Sequence[float]] = None) -> HypothesisReport:
    """Finite-difference screening of the drag law on a sample grid.

    Checks, in the weak (non-strict) sense used by the uniqueness theorem:
    sign(D) = sign(alpha) with D(., 0) = 0; D nondecreasing in alpha; |D|
    nonincreasing in rho; and the shock-compatibility inequality
    F(rho1) - F(rho2) <= F(mirror rho1) - F(mirror rho2) for supersonic
    rho1 < rho2, verified on consecutive sample pairs (it telescopes).
    The law is an arbitrary evaluator, so this is sampling, not proof.
    """
    rhos = list(rho_grid) if rho_grid is not None else _default_rho_grid()
    alphas = list(alpha_grid) if alpha_grid is not None else _default_alpha_grid(c)

    sign_ok = True
    for rho in rhos:
        if law(rho, 0.0) != 0.0:
            sign_ok = False
        for a in alphas:
            d = law(rho, a)
            if a > 0.0 and d <= 0.0:
                sign_ok = False
            if a < 0.0 and d >= 0.0:
                sign_ok = False

    increasing = True
    for rho in rhos:
        prev = None
        for a in sorted(alphas):
            d = law(rho, a)
            if prev is not None and d < prev - 1.0e-12 * (abs(d) + abs(prev)):
                increasing = False
            prev = d

    decreasing = True
    for a in alphas:
        if a == 0.0:
            continue
        prev = None
        for rho in rhos:
            d = abs(law(rho, a))
            if prev is not None and d > prev + 1.0e-12 * (abs(d) + abs(prev)):
                decreasing = False
            prev = d

    croissance = True
    fractions = [i / 17.0 for i in range(1, 17)]
    for a in alphas:
        if a == 0.0:
            continue
        pot = SonicPotential(law, a, c)
        s = pot.sonic_density
        samples = [s * f for f in fractions]
        vals = [pot.value(r) for r in samples]
        mirrored = [pot.value(mirror(a, c, r)) for r in samples]
        for i in range(len(samples) - 1):
            lhs = vals[i] - vals[i + 1]
            rhs = mirrored[i] - mirrored[i + 1]
            if lhs > rhs + 1.0e-9 * (abs(lhs) + abs(rhs) + 1.0):
                croissance = False
    return HypothesisReport(sign_ok, increasing, decreasing, croissance)
