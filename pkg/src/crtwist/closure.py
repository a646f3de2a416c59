"""Closing conditions: the map (t, s) -> (P_1, P_3) and the search for rational targets.

The two components of B_1 (orbit type OT1, three real roots) are swept by

    psi(t, s) = (xi(t) - p(t)) s + p(t),

which slides along the segment from the point p(t) on {Delta_1 = 0} up to
the separatrix point xi(t). A modulus gives a closed curve exactly when
P_1 and P_3 are rational, so the search minimises the distance
delta_q = |(P_1, P_3) - (q_1, q_3)| over a rectangle of (t, s).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, differential_evolution

from .errors import CRTwistError, DomainError
from .moduli import (Modulus, _delta_scales, delta1, delta2, lower_boundary, momentum_eigenvalues,
                     quintic_roots, separatrix, separatrix_interval)
from .quadrature import quantum_integrals

#: relative width of the band around Delta_2 = 0 that the search avoids
EXCEPTIONAL_BAND = 1e-8
PENALTY = 1e3


#: the contact point of the separatrix with {Delta_1 = 0, c2 > -9}
CONTACT_POINT = (-float(np.cbrt(1458.0)), 63.0)


@lru_cache(maxsize=1)
def contact_parameter():
    """t' with xi(t') = (-1458^(1/3), 63), where the separatrix touches {Delta_1 = 0, c2 > -9}.

    The contact is tangential, so instead of looking for a sign change of the
    gap between the curves we solve xi_1(t) = -1458^(1/3), on which the
    first coordinate is strictly monotone.
    """
    return float(brentq(lambda t: separatrix(t)[0] - CONTACT_POINT[0], 2.25, 2.35, xtol=1e-15))


def branch_interval(branch):
    """Parameter interval of t for the ``minus`` or ``plus`` branch."""
    tp = contact_parameter()
    if branch == "minus":
        return np.pi / 2, tp
    if branch == "plus":
        return tp, separatrix_interval()[1]
    raise DomainError(f"unknown branch {branch!r}")


def psi(branch, t, s):
    """The modulus (xi(t) - p(t)) s + p(t) for (t, s) in the branch's rectangle."""
    lo, hi = branch_interval(branch)
    if not lo < t < hi:
        raise DomainError(f"t = {t} outside ({lo:.6f}, {hi:.6f}) for branch {branch}")
    if not 0 < s < 1:
        raise DomainError(f"s = {s} outside (0, 1)")
    xi = separatrix(t)
    p = lower_boundary(t)
    c = (xi - p) * s + p
    return Modulus(float(c[0]), float(c[1]))


@dataclass(frozen=True)
class PmapValue:
    t: float
    s: float
    modulus: Modulus
    P: tuple            # (P1, P2, P3), NaN when exceptional
    delta1: float
    delta2: float
    exceptional: bool
    note: str = ""

    @property
    def pair(self):
        return self.P[0], self.P[2]


def near_exceptional(c, band=EXCEPTIONAL_BAND):
    _, s2 = _delta_scales(c)
    return abs(delta2(c)) < band * max(s2, 1.0)


def pmap(branch, t, s):
    """Evaluate (P1, P3) at psi(t, s); moduli on the exceptional locus are tagged, not raised."""
    c = psi(branch, t, s)
    d1, d2 = delta1(c), delta2(c)
    nan = (np.nan, np.nan, np.nan)
    if near_exceptional(c):
        return PmapValue(t, s, c, nan, d1, d2, True, "Delta_2 = 0")
    try:
        q = quantum_integrals(c, momentum_eigenvalues(c), quintic_roots(c))
    except CRTwistError as exc:
        return PmapValue(t, s, c, nan, d1, d2, True, str(exc))
    return PmapValue(t, s, c, q.values, d1, d2, False)


def pmap_grid(branch, t_values, s_values):
    """Row-major list of PmapValue over the grid."""
    return [pmap(branch, t, s) for t in t_values for s in s_values]


def screen_grid(q1, q3, branch="minus", n=12):
    """Coarse n x n P-map grid search for the target (q1, q3).

    Returns (t, s, distance) of the nearest non-exceptional grid point and a
    rectangle of three grid cells around it, clipped to the branch domain.
    """
    lo, hi = branch_interval(branch)
    ts = np.linspace(lo, hi, n + 2)[1:-1]
    ss = np.linspace(0.0, 1.0, n + 2)[1:-1]
    best = None
    for v in pmap_grid(branch, ts, ss):
        if v.exceptional:
            continue
        d = float(np.hypot(v.P[0] - q1, v.P[2] - q3))
        if best is None or d < best[2]:
            best = (v.t, v.s, d)
    if best is None:
        raise CRTwistError("every grid point is exceptional")
    t, s, _ = best
    dt, ds = 1.5 * (ts[1] - ts[0]), 1.5 * (ss[1] - ss[0])
    rect = (max(lo, t - dt), min(hi, t + dt), max(0.0, s - ds), min(1.0, s + ds))
    return best, rect


def default_rectangle(branch="minus", margin=1e-6):
    lo, hi = branch_interval(branch)
    return (lo + margin, hi - margin, margin, 1 - margin)


# ---------------------------------------------------------------------------
# search


@dataclass(frozen=True)
class SearchConfig:
    rect: tuple = None           # (t0, t1, s0, s1); default: the whole branch rectangle
    branch: str = "minus"
    popsize: int = 20            # multiplier: 20 x 2 parameters = 40 individuals
    mutation: float = 0.8
    recombination: float = 0.9
    maxiter: int = 300
    seed: int = 0
    tol: float = 1e-6            # success threshold on delta
    stop_delta: float = 1e-10    # stop early once the best delta is below this
    refine: bool = True

    def __post_init__(self):
        if self.popsize * 2 < 8:
            raise DomainError("population must have at least 8 members")
        if self.rect is not None:
            t0, t1, s0, s1 = self.rect
            lo, hi = branch_interval(self.branch)
            if not (lo <= t0 <= t1 <= hi and 0 <= s0 <= s1 <= 1):
                raise DomainError(f"rectangle {self.rect} is not inside the {self.branch} branch domain")

    def bounds(self):
        rect = self.rect if self.rect is not None else default_rectangle(self.branch)
        t0, t1, s0, s1 = rect
        return [(t0, t1), (s0, s1)]


@dataclass(frozen=True)
class SearchResult:
    found: bool
    target: tuple
    point: tuple
    modulus: Modulus
    delta: float
    P: tuple
    delta1: float
    delta2: float
    generations: int
    evaluations: int
    seed: int
    refined: bool = False
    history: tuple = field(default=(), repr=False)


def _delta(branch, q1, q3, x):
    t, s = x
    try:
        v = pmap(branch, t, s)
    except DomainError:
        return PENALTY
    if v.exceptional:
        return PENALTY
    return float(np.hypot(v.P[0] - q1, v.P[2] - q3))


def search_modulus(q1, q3, cfg=None):
    """Minimise delta_q over the configured rectangle by differential evolution (rand/1/bin).

    Deterministic for a fixed config and seed. When ``cfg.refine`` is set the
    best point is polished by Newton's method on (P1, P3) - (q1, q3); the
    polished point is kept only if it lowers delta and stays in the rectangle.
    """
    cfg = cfg or SearchConfig()
    q1, q3 = float(q1), float(q3)
    bounds = cfg.bounds()
    history = []

    def objective(x):
        return _delta(cfg.branch, q1, q3, x)

    def callback(intermediate_result):
        history.append(float(intermediate_result.fun))
        return intermediate_result.fun < cfg.stop_delta

    res = differential_evolution(
        objective, bounds, strategy="rand1bin", popsize=cfg.popsize, mutation=cfg.mutation,
        recombination=cfg.recombination, maxiter=cfg.maxiter, seed=cfg.seed, polish=False,
        updating="deferred", tol=0, atol=0, callback=callback, init="latinhypercube",
    )
    best = tuple(float(v) for v in res.x)
    delta = float(res.fun)
    refined = False
    if cfg.refine and delta < PENALTY:
        try:
            p_new, d_new = refine_modulus(q1, q3, best, cfg.branch)
        except CRTwistError:
            p_new, d_new = best, np.inf
        inside = all(lo <= v <= hi for v, (lo, hi) in zip(p_new, bounds))
        if inside and d_new < delta:
            best, delta, refined = p_new, d_new, True
    v = pmap(cfg.branch, *best)
    return SearchResult(
        found=delta <= cfg.tol, target=(q1, q3), point=best, modulus=v.modulus, delta=delta,
        P=v.P, delta1=v.delta1, delta2=v.delta2, generations=int(res.nit),
        evaluations=int(res.nfev), seed=cfg.seed, refined=refined, history=tuple(history),
    )


def refine_modulus(q1, q3, p0, branch="minus", steps=20, h=1e-6, tol=1e-13):
    """Newton's method for (P1, P3)(t, s) = (q1, q3) with a central-difference Jacobian."""
    p = np.array(p0, dtype=float)

    def F(x):
        v = pmap(branch, *x)
        if v.exceptional:
            raise DomainError(f"refinement hit the exceptional locus at {tuple(x)}")
        return np.array([v.P[0] - q1, v.P[2] - q3])

    r = F(p)
    for _ in range(steps):
        if np.hypot(*r) < tol:
            break
        J = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            J[:, k] = (F(p + e) - F(p - e)) / (2 * h)
        step = np.linalg.solve(J, -r)
        # backtrack if the full step does not help
        lam = 1.0
        while lam > 1e-4:
            trial = p + lam * step
            try:
                rt = F(trial)
            except DomainError:
                rt = None
            if rt is not None and np.hypot(*rt) < np.hypot(*r):
                p, r = trial, rt
                break
            lam /= 2
        else:
            break
    return (float(p[0]), float(p[1])), float(np.hypot(*r))


def rationalize(x, max_denominator=128, tol=1e-6):
    """First continued-fraction convergent m/n of x with n <= max_denominator and |x - m/n| <= tol."""
    if not np.isfinite(x):
        return None
    a = Fraction(x)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    rest = a
    while True:
        ai = rest.numerator // rest.denominator
        h0, h1 = h1, ai * h1 + h0
        k0, k1 = k1, ai * k1 + k0
        if k1 > max_denominator:
            return None
        conv = Fraction(h1, k1)
        if abs(float(a - conv)) <= tol:
            return conv
        frac = rest - ai
        if frac == 0:
            return None
        rest = 1 / frac
