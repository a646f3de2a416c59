"""Hyperelliptic integrals over the real cycles of the phase curve y^2 = P_c(x).

Every integral here has an inverse square root singularity at a simple
root of P_c. The singularities are removed analytically before Gauss-Legendre
quadrature is applied:

* between two adjacent roots a < b the substitution
  u = a + (b - a)(1 - cos t)/2 turns du / sqrt((u - a)(b - u)) into dt;
* next to a single root e the substitution u = e + L sin^2 t does the same;
* on a tail [b, oo) the substitution u = v^-2 turns the tau^-3/2 decay into
  a smooth integrand on [0, 1/sqrt(b)].

After the substitution the integrands are analytic, so the node count is
doubled from 64 until two successive results agree to ``tol``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError, NumericalFailure, SingularIntegrandError
from .moduli import as_modulus, momentum_eigenvalues, phase_of, quintic_roots

SQRT_3_2 = np.sqrt(1.5)
DEFAULT_NODES = 64
MAX_NODES = 8192
DEFAULT_TOL = 1e-10
#: relative band around a zero of tau (3 lambda - tau^2) treated as singular
SINGULAR_BAND = 1e-8


@lru_cache(maxsize=None)
def _legendre(n):
    return roots_legendre(n)


def gauss_legendre(f, a, b, tol=DEFAULT_TOL, n0=DEFAULT_NODES, n_max=MAX_NODES):
    """Integrate a smooth vectorised ``f`` over [a, b], doubling nodes until converged.

    Returns the value and the last successive difference.
    """
    if a == b:
        return 0.0, 0.0

    def rule(n):
        x, w = _legendre(n)
        half = 0.5 * (b - a)
        return half * np.sum(w * f(0.5 * (a + b) + half * x))

    n = n0
    prev = rule(n)
    while True:
        n *= 2
        cur = rule(n)
        diff = abs(cur - prev)
        if diff <= tol * max(1.0, abs(cur)):
            return cur, diff
        if n >= n_max:
            raise NumericalFailure(f"quadrature did not converge with {n} nodes", [diff])
        prev = cur


def endpoint_integral(g, a, b, tol=DEFAULT_TOL, n0=DEFAULT_NODES):
    """Compute the integral of g(u) / sqrt((u - a)(b - u)) over [a, b].

    ``g`` must be smooth on [a, b]. With u = a + (b - a)(1 - cos t)/2 the
    integral becomes the integral of g(u(t)) over [0, pi].
    """
    return endpoint_partial(g, a, b, a, b, tol, n0)


def _theta(a, b, u):
    x = np.clip(1.0 - 2.0 * (u - a) / (b - a), -1.0, 1.0)
    return float(np.arccos(x))


def endpoint_partial(g, a, b, u0, u1, tol=DEFAULT_TOL, n0=DEFAULT_NODES):
    """Signed integral of g(u) / sqrt((u - a)(b - u)) from u0 to u1, both in [a, b]."""
    t0, t1 = _theta(a, b, u0), _theta(a, b, u1)

    def integrand(t):
        return g(a + (b - a) * 0.5 * (1.0 - np.cos(t)))

    return gauss_legendre(integrand, t0, t1, tol, n0)[0]


def deflate(coeffs, roots):
    """Divide a polynomial by prod (x - r) for the given roots; the remainder is dropped."""
    q = np.asarray(coeffs, dtype=float)
    for r in roots:
        out = np.empty(len(q) - 1)
        acc = 0.0
        for k in range(len(q) - 1):
            acc = acc * r + q[k]
            out[k] = acc
        q = out
    return q


# ---------------------------------------------------------------------------
# real cycles of the phase curve


@dataclass(frozen=True)
class Cycle:
    """A connected piece of {P_c >= 0} on the real line.

    ``lo`` and ``hi`` are roots of P_c; ``hi`` is ``inf`` for the unbounded piece.
    """

    lo: float
    hi: float
    cofactor: tuple  # P_c / ((u - lo)(hi - u)) or P_c / (u - lo) on the tail

    @property
    def bounded(self):
        return np.isfinite(self.hi)

    def R(self, u):
        return np.polyval(np.asarray(self.cofactor), u)


def _spectrum(c, roots=None):
    return roots if roots is not None else quintic_roots(c)


def compact_cycle(c, roots=None):
    """The bounded piece [e1, e2] of a phase B modulus."""
    c = as_modulus(c)
    roots = _spectrum(c, roots)
    if phase_of(roots) != "B":
        raise DomainError(f"modulus {tuple(c)} is not of phase B")
    e1, e2 = roots.real_roots[:2]
    # P = (u - e1)(u - e2) R = (u - e1)(e2 - u) (-R)
    return Cycle(e1, e2, tuple(-deflate(c.quintic, (e1, e2))))


def unbounded_cycle(c, e=None, roots=None):
    """The unbounded piece [e, oo), e the largest real root."""
    c = as_modulus(c)
    roots = _spectrum(c, roots)
    if e is None:
        e = roots.real_roots[-1]
    k = int(np.argmin(np.abs(np.asarray(roots.real_roots) - e)))
    if abs(roots.real_roots[k] - e) > 1e-8 * (1 + abs(e)) or roots.multiplicities[k] != 1:
        raise DomainError(f"{e} is not a simple real root of P_c")
    if e != roots.real_roots[-1]:
        raise DomainError("escape integrals start at the largest real root")
    return Cycle(e, np.inf, tuple(deflate(c.quintic, (e,))))


def _strain_sign(cycle):
    # sign(tau) on the cycle; a compact cycle never contains 0 because P(0) <= 0
    return 1.0 if cycle.lo > 0 else -1.0


def _cycle_integral(c, cycle, g, u0, u1, tol):
    """Signed integral of g(u) / sqrt(P_c(u)) from u0 to u1 along ``cycle``."""
    if cycle.bounded:
        R = cycle.R

        def h(u):
            return g(u) / np.sqrt(R(u))

        return endpoint_partial(h, cycle.lo, cycle.hi, u0, u1, tol)
    sign = 1.0
    if u1 < u0:
        u0, u1, sign = u1, u0, -1.0
    e = cycle.lo
    split = 2.0 * e if e > 0 else e + 1.0
    total = 0.0
    R = cycle.R
    # near part: u = e + L sin^2 t, du / sqrt(u - e) = 2 sqrt(L) cos t dt
    a, b = u0, min(u1, split)
    if b > a:
        L = split - e

        def near(t):
            u = e + L * np.sin(t) ** 2
            return 2.0 * np.sqrt(L) * np.cos(t) * g(u) / np.sqrt(R(u))

        ta = np.arcsin(np.sqrt(np.clip((a - e) / L, 0, 1)))
        tb = np.arcsin(np.sqrt(np.clip((b - e) / L, 0, 1)))
        total += gauss_legendre(near, ta, tb, tol)[0]
    a, b = max(u0, split), u1
    if b > a:
        # u = v^-2: g(u) du / sqrt(P(u)) = 2 g(u) v^-3 / sqrt(P(v^-2)) dv,
        # evaluated through the reversed polynomial v^10 P(v^-2)
        coeffs = c.quintic

        def tail(v):
            v2 = v * v
            rev = np.polyval(coeffs[::-1], v2)  # = v^10 P(v^-2)
            return 2.0 * g(1.0 / v2) * v2 * v2 / np.sqrt(rev)

        vb = 0.0 if np.isinf(b) else 1.0 / np.sqrt(b)
        total += gauss_legendre(tail, vb, 1.0 / np.sqrt(a), tol)[0]
    return sign * total


# ---------------------------------------------------------------------------
# public integrals


def half_period(c, spectrum=None, tol=DEFAULT_TOL):
    """Half period of the periodic twist on the compact cycle [e1, e2].

    omega = sqrt(3/2) * sign(e1) * integral of tau / sqrt(P_c) over [e1, e2].
    """
    c = as_modulus(c)
    cyc = compact_cycle(c, spectrum)
    val = SQRT_3_2 * _strain_sign(cyc) * _cycle_integral(c, cyc, lambda u: u, cyc.lo, cyc.hi, tol)
    if not val > 0:
        raise NumericalFailure(f"half period came out non-positive: {val}", [val])
    return float(val)


def escape_time(c, e=None, tol=DEFAULT_TOL):
    """Time sqrt(3/2) * integral of tau / sqrt(P_c) from e to infinity.

    ``e`` is the largest real root; it defaults to that root.
    """
    c = as_modulus(c)
    roots = quintic_roots(c)
    cyc = unbounded_cycle(c, e, roots)
    if cyc.lo <= 0:
        raise DomainError("escape time needs a positive starting root")
    val = SQRT_3_2 * _cycle_integral(c, cyc, lambda u: u, cyc.lo, np.inf, tol)
    if not (np.isfinite(val) and val > 0):
        raise DomainError(f"escape integral is not finite and positive: {val}")
    return float(val)


def start_root(c, roots=None):
    """Root of the compact cycle where the periodic twist starts (tau'(0) = 0).

    The twist starts at its maximum e2 when both roots are negative and at its
    minimum e1 when both are positive.
    """
    cyc = compact_cycle(c, roots)
    return (cyc.hi, cyc.lo) if cyc.hi < 0 else (cyc.lo, cyc.hi)


def phase_numerator(c, lam, tau):
    """N_j(tau) = 3 c1 lambda - (4 c1 + lambda^2) tau^2 + 3 tau^3."""
    c1 = as_modulus(c).c1
    return 3 * c1 * lam - (4 * c1 + lam * lam) * tau * tau + 3 * tau**3


@dataclass(frozen=True)
class QuantumIntegrals:
    values: tuple  # (P1, P2, P3)
    sum_residual: float

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


def quantum_integrals(c, spectrum=None, roots=None, tol=DEFAULT_TOL):
    """The closing integrals P_1, P_2, P_3 of a type B'_1 modulus.

    P_j = (1/pi) sqrt(3/2) * integral from the start root to the other root of
    N_j(tau) / (tau (3 lambda_j - tau^2) sqrt(P_c(tau))).
    Each equals phi_j(2 omega) / 2 pi. Their sum is an integer.
    """
    c = as_modulus(c)
    roots = _spectrum(c, roots)
    spectrum = spectrum if spectrum is not None else momentum_eigenvalues(c)
    if spectrum.kind != "OT1":
        raise DomainError("quantum integrals are defined for orbit type OT1")
    cyc = compact_cycle(c, roots)
    start, other = start_root(c, roots)
    lo2, hi2 = sorted((cyc.lo**2, cyc.hi**2))
    vals = []
    for lam in spectrum.real:
        band = SINGULAR_BAND * max(1.0, hi2)
        if lo2 - band <= 3 * lam <= hi2 + band:
            raise SingularIntegrandError(
                f"3*lambda = {3 * lam:.6g} lies in the tau^2 range [{lo2:.6g}, {hi2:.6g}]")

        def g(u, lam=lam):
            return phase_numerator(c, lam, u) / (u * (3 * lam - u * u))

        vals.append(SQRT_3_2 / np.pi * _cycle_integral(c, cyc, g, start, other, tol))
    total = sum(vals)
    return QuantumIntegrals(tuple(float(v) for v in vals), float(abs(total - round(total))))


def incomplete_strain(c, tau_from, tau_to, tol=DEFAULT_TOL):
    """Signed value of sqrt(3/2) * integral of u / sqrt(P_c(u)) from tau_from to tau_to.

    Both limits must lie in one connected piece of {P_c >= 0}. Started at the
    twist's initial root this is the arc length parameter s at which the
    twist reaches ``tau_to``.
    """
    c = as_modulus(c)
    roots = quintic_roots(c)
    a, b = sorted((tau_from, tau_to))
    cyc = None
    simple = roots.simple_real_roots
    if phase_of(roots) == "B":
        comp = compact_cycle(c, roots)
        if comp.lo - 1e-12 <= a and b <= comp.hi + 1e-12:
            cyc = comp
    if cyc is None and simple and a >= simple[-1] - 1e-12:
        cyc = unbounded_cycle(c, simple[-1], roots)
    if cyc is None:
        raise DomainError(f"[{a}, {b}] is not inside a connected piece of {{P_c >= 0}}")
    if tau_from == tau_to:
        return 0.0
    hi = cyc.hi if cyc.bounded else np.inf
    lo_clip = lambda x: float(np.clip(x, cyc.lo, hi))
    return float(SQRT_3_2 * _cycle_integral(c, cyc, lambda u: u, lo_clip(tau_from), lo_clip(tau_to), tol))
