"""Polynomial algebra over a modulus c = (c1, c2).

A modulus determines two polynomials: the principal quintic

    P_c(x) = x^5 + (3/2) c2 x^2 + 27 c1 x - (27/2) c1^2,

whose real roots bound the twist, and the cubic

    Q_c(x) = x^3 + 6 c1 x + (27 + 3 c2),

whose roots are the eigenvalues of the momentum. This module finds their
roots and sorts moduli into phase types, orbit types, regions of the plane
and the twelve curve classes.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, NumericalFailure

#: two roots merge when closer than CLUSTER_TOL * (1 + |root|)
CLUSTER_TOL = 1e-7
#: width of the band around Xi, Oy and {Delta_1 = 0} reported as "boundary"
BOUNDARY_TOL = 1e-6
ROOT_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class Modulus:
    c1: float
    c2: float

    def __post_init__(self):
        if not (np.isfinite(self.c1) and np.isfinite(self.c2)):
            raise DomainError(f"modulus must be finite, got ({self.c1}, {self.c2})")
        object.__setattr__(self, "c1", float(self.c1))
        object.__setattr__(self, "c2", float(self.c2))

    def __iter__(self):
        yield self.c1
        yield self.c2

    @property
    def quintic(self):
        """Coefficients of P_c, highest degree first."""
        c1, c2 = self.c1, self.c2
        return np.array([1.0, 0.0, 0.0, 1.5 * c2, 27.0 * c1, -13.5 * c1 * c1])

    @property
    def cubic(self):
        """Coefficients of Q_c, highest degree first."""
        return np.array([1.0, 0.0, 6.0 * self.c1, 27.0 + 3.0 * self.c2])

    def P(self, x):
        return np.polyval(self.quintic, x)

    def Q(self, x):
        return np.polyval(self.cubic, x)


def as_modulus(c):
    return c if isinstance(c, Modulus) else Modulus(*c)


def delta1(c):
    """Discriminant of Q_c: -27 (32 c1^3 + 9 (9 + c2)^2)."""
    c1, c2 = as_modulus(c)
    return -27.0 * (32.0 * c1**3 + 9.0 * (9.0 + c2) ** 2)


def delta2(c):
    c1, c2 = as_modulus(c)
    return (9 * c1**3 * (c1**3 + 216) + 6 * c1**3 * c2 * (c2 + 36)
            + (c2 + 9) * (c2 + 18) ** 3)


def _delta_scales(c):
    # magnitudes of the individual terms, used to make the zero tests relative
    c1, c2 = as_modulus(c)
    s1 = 27.0 * (32.0 * abs(c1) ** 3 + 9.0 * (9.0 + c2) ** 2)
    s2 = (9 * abs(c1) ** 3 * (abs(c1) ** 3 + 216) + 6 * abs(c1) ** 3 * abs(c2) * abs(c2 + 36)
          + abs(c2 + 9) * abs(c2 + 18) ** 3)
    return s1, s2


# ---------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class QuinticSpectrum:
    """Roots of P_c grouped into real roots (with multiplicity) and conjugate pairs."""

    real_roots: tuple
    multiplicities: tuple
    complex_pairs: tuple  # (a, b) with b > 0 for the roots a +- ib

    @property
    def simple_real_roots(self):
        return tuple(r for r, m in zip(self.real_roots, self.multiplicities) if m == 1)

    @property
    def has_multiple_root(self):
        return any(m > 1 for m in self.multiplicities)

    @property
    def total_multiplicity(self):
        return sum(self.multiplicities) + 2 * len(self.complex_pairs)

    def all_roots(self):
        """All five roots as a complex array, repeated according to multiplicity."""
        out = []
        for r, m in zip(self.real_roots, self.multiplicities):
            out += [complex(r)] * m
        for a, b in self.complex_pairs:
            out += [complex(a, b), complex(a, -b)]
        return np.array(out)


def _polish(coeffs, z, iters=3):
    dcoeffs = np.polyder(coeffs)
    for _ in range(iters):
        d = np.polyval(dcoeffs, z)
        if d == 0:
            break
        step = np.polyval(coeffs, z) / d
        z = z - step
        if abs(step) <= 1e-16 * (1 + abs(z)):
            break
    return z


def _clusters(roots, tol):
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < tol * (1 + max(abs(roots[i]), abs(roots[j]))):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(roots[i])
    return list(groups.values())


def _residual_scale(coeffs, z):
    return sum(abs(a) * abs(z) ** k for k, a in enumerate(coeffs[::-1]))


def quintic_roots(c, cluster_tol=CLUSTER_TOL, residual_tol=ROOT_RESIDUAL_TOL):
    """Roots of P_c by the companion-matrix eigenvalue method.

    Simple roots are polished by Newton's method; roots closer than
    ``cluster_tol * (1 + |root|)`` are merged into one multiple root.

    Raises
    ------
    NumericalFailure
        if a simple root still has a relative residual above ``residual_tol``.
    """
    c = as_modulus(c)
    coeffs = c.quintic
    raw = np.roots(coeffs).astype(complex)
    if raw.size < 5:
        raw = np.concatenate([raw, np.zeros(5 - raw.size, complex)])

    real, mult, pairs = [], [], []
    residuals = []
    pending = []
    for group in _clusters(list(raw), cluster_tol):
        center = complex(np.mean(group))
        if len(group) == 1:
            center = complex(_polish(coeffs, center))
            res = abs(np.polyval(coeffs, center)) / _residual_scale(coeffs, center)
            residuals.append(res)
            if res > residual_tol:
                raise NumericalFailure(f"quintic root {center} did not converge", residuals)
        if abs(center.imag) < cluster_tol * (1 + abs(center)):
            real.append(center.real)
            mult.append(len(group))
        else:
            pending.append((center, len(group)))
    # pair the complex roots with their conjugates
    upper = sorted([(z, m) for z, m in pending if z.imag > 0], key=lambda t: (t[0].imag, t[0].real))
    for z, m in upper:
        pairs.extend([(z.real, z.imag)] * m)
    order = np.argsort(real)
    spec = QuinticSpectrum(
        real_roots=tuple(float(real[i]) for i in order),
        multiplicities=tuple(int(mult[i]) for i in order),
        complex_pairs=tuple(pairs),
    )
    if spec.total_multiplicity != 5:
        raise NumericalFailure("could not pair the complex roots of P_c", residuals)
    return spec


@dataclass(frozen=True)
class MomentumSpectrum:
    """Eigenvalues of the momentum, ordered by orbit type.

    OT1: lambda_1 = -(lambda_2 + lambda_3) < 0 < lambda_2 < lambda_3.
    OT2: lambda_1 real, Im lambda_2 > 0, lambda_3 = conj(lambda_2).
    OT3: repeated eigenvalue; sorted by real part.
    """

    kind: str
    eigenvalues: tuple
    delta1: float

    @property
    def real(self):
        return np.array([complex(v).real for v in self.eigenvalues])

    def __iter__(self):
        return iter(self.eigenvalues)

    def __getitem__(self, i):
        return self.eigenvalues[i]


def momentum_eigenvalues(c):
    """Roots of Q_c ordered according to the orbit type of ``c``."""
    c = as_modulus(c)
    coeffs = c.cubic
    d1 = delta1(c)
    scale, _ = _delta_scales(c)
    roots = np.roots(coeffs).astype(complex)
    roots = np.array([_polish(coeffs, z) for z in roots])
    if abs(d1) <= 1e-12 * max(scale, 1.0):
        kind = "OT3"
        lam = sorted(roots, key=lambda z: (z.real, z.imag))
        lam = tuple(complex(z.real, 0.0) if abs(z.imag) < 1e-6 else complex(z) for z in lam)
    elif d1 > 0:
        kind = "OT1"
        r = np.sort(roots.real)
        lam = (complex(-(r[1] + r[2])), complex(r[1]), complex(r[2]))
    else:
        kind = "OT2"
        i_real = int(np.argmin(np.abs(roots.imag)))
        others = [z for k, z in enumerate(roots) if k != i_real]
        l2 = max(others, key=lambda z: z.imag)
        l2 = complex(l2.real, abs(l2.imag))
        lam = (complex(-2 * l2.real), l2, l2.conjugate())
    return MomentumSpectrum(kind=kind, eigenvalues=tuple(complex(v) for v in lam), delta1=d1)


# ---------------------------------------------------------------------------
# separatrix


@lru_cache(maxsize=None)
def separatrix_pole():
    """Return (n*, t*): the real root of 3 + 6n + 4n^2 + 2n^3 and arctan(n*)."""
    r = np.roots([2.0, 4.0, 6.0, 3.0])
    n_star = float(r[np.argmin(np.abs(r.imag))].real)
    return n_star, float(np.arctan(n_star))


def separatrix_interval():
    """The open parameter interval J_xi = (t*, t* + pi) of the separatrix."""
    _, t_star = separatrix_pole()
    return t_star, t_star + np.pi


def _xi_homogeneous(m, n):
    q = 3 * m * m + 2 * m * n + n * n
    D = 3 * m**3 + 6 * m * m * n + 4 * m * n * n + 2 * n**3
    x1 = 6 * np.cbrt(2.0) * m * np.cbrt(n) ** 4 * np.cbrt(q) ** 4 / np.cbrt(D) ** 5
    x2 = -36 * n * q * (4 * m**3 + 3 * m * m * n + 2 * m * n * n + n**3) / D**2
    return x1, x2


def separatrix(t):
    """Point xi(cos t, sin t) of the separatrix curve for t in J_xi.

    Works on scalars and arrays.
    """
    lo, hi = separatrix_interval()
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= lo) or np.any(t_arr >= hi):
        raise DomainError(f"separatrix parameter outside ({lo:.6f}, {hi:.6f})")
    x1, x2 = _xi_homogeneous(np.cos(t_arr), np.sin(t_arr))
    if np.ndim(t) == 0:
        return np.array([float(x1), float(x2)])
    return np.stack([x1, x2], axis=-1)


@lru_cache(maxsize=1)
def _separatrix_grid(n=6001):
    lo, hi = separatrix_interval()
    t = np.linspace(lo, hi, n + 2)[1:-1]
    return t, separatrix(t)


def separatrix_distance(c):
    """Euclidean distance from ``c`` to the separatrix, and the minimising t."""
    c = np.asarray(tuple(as_modulus(c)))
    t, pts = _separatrix_grid()
    d = np.hypot(*(pts - c).T)
    k = int(np.argmin(d))
    a, b = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]
    res = minimize_scalar(lambda s: np.hypot(*(separatrix(s) - c)), bounds=(a, b),
                          method="bounded", options={"xatol": 1e-13})
    if res.fun < d[k]:
        return float(res.fun), float(res.x)
    return float(d[k]), float(t[k])


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Generality:
    general: bool
    delta1: float
    delta2: float


def is_general(c, tol=1e-10):
    """Test whether Delta_1(c) Delta_2(c) != 0, relative to the size of their terms."""
    d1, d2 = delta1(c), delta2(c)
    s1, s2 = _delta_scales(c)
    ok = abs(d1) > tol * max(s1, 1.0) and abs(d2) > tol * max(s2, 1.0)
    return Generality(bool(ok), float(d1), float(d2))


@dataclass(frozen=True)
class Classification:
    phase: str
    orbit: str
    region: str
    curve_classes: tuple
    boundary: tuple = ()
    separatrix_distance: float = np.inf


REGIONS = ("M'+", "M''+", "M'''+", "M'-", "M''-", "Xi", "Oy")


def phase_of(spectrum):
    if spectrum.has_multiple_root:
        return "C"
    return "B" if len(spectrum.real_roots) == 3 else "A"


def classify(c, tol=BOUNDARY_TOL):
    """Phase type, orbit type, region and admissible curve classes of ``c``.

    Points within ``tol`` of Xi, of the axis Oy or of the curve Delta_1 = 0 are
    listed in ``boundary``; the phase itself always follows the root structure.
    """
    c = as_modulus(c)
    spec = quintic_roots(c)
    mom = momentum_eigenvalues(c)
    phase = phase_of(spec)
    dist, _ = separatrix_distance(c)

    boundary = []
    if dist < tol:
        boundary.append("Xi")
    if abs(c.c1) < tol:
        boundary.append("Oy")
    s1, _ = _delta_scales(c)
    if abs(mom.delta1) < tol * max(s1, 1.0):
        boundary.append("Delta1")
    if c.c1 > 0 and abs(c.c2) < tol and phase == "B":
        boundary.append("Ox")

    if phase == "C":
        region = "Oy" if abs(c.c1) < tol or c.c1 == 0 else "Xi"
    elif phase == "B":
        if c.c1 < 0:
            region = "M'+"
        else:
            region = "M''+" if c.c2 > 0 else "M'''+"
    else:
        region = "M'-" if c.c1 < 0 else "M''-"

    j = mom.kind[-1]
    if phase == "A":
        classes = (f"A{j}",)
    elif phase == "B":
        classes = (f"B'{j}", f"B''{j}")
    else:
        classes = (f"C{j}",)
    return Classification(phase, mom.kind, region, classes, tuple(boundary), dist)


def lower_boundary(t):
    """The point p(t) on {Delta_1 = 0, c2 > -9} with the same c1 as xi(t)."""
    x1 = separatrix(t)[..., 0]
    if np.any(x1 >= 0):
        raise DomainError("lower boundary needs xi_1(t) < 0")
    x2 = (4.0 * np.sqrt(-2.0 * x1**3) - 27.0) / 3.0
    return np.stack([x1, x2], axis=-1)
