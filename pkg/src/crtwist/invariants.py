"""Discrete invariants of closed type B'_1 critical curves.

For quantum numbers q_j = m_j / n_j the monodromy has order n = lcm(n1, n3).
Let s_j = n / n_j. The CR spin is 1/3 exactly when 3 | n and
m1 s1 = m3 s3 != 0 (mod 3); the wave number is n or n/3 accordingly.
Closed-form expressions give the turning number and the trace; this module
also computes both directly as winding numbers of sampled curves, and the
direct values are the ones reported.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import DegeneracyError, DomainError, UndersamplingError
from .geometry_io import heisenberg_project, projective_distance

ZERO_TOL = 1e-8
ROUNDING_TOL = 0.1
SAMPLES_PER_PERIOD = 4096


def _frac(q):
    f = Fraction(q).limit_denominator(10**9) if isinstance(q, float) else Fraction(q)
    return f


@dataclass(frozen=True)
class QuantumNumbers:
    q1: Fraction
    q2: Fraction
    q3: Fraction
    n: int
    s1: int
    s3: int
    spin: Fraction
    wave_number: int
    eps: int
    turning: int          # closed form for the given eps
    trace: int            # closed form for the given eps
    turning_branches: dict  # {+1: s3 m3, -1: s2 m2}
    trace_branches: dict    # {+1: n_gamma (q1 - q3), -1: n_gamma (q1 - q2)}

    @property
    def spin_label(self):
        return "1/3" if self.spin == Fraction(1, 3) else "1"


def discrete_invariants(q1, q3, eps=1, q2=None):
    """Spin, wave number, turning number and trace of a curve with quantum numbers q1, q3.

    ``q2`` defaults to -(q1 + q3); the closed forms for eps = -1 depend on
    which integer translate of q2 is used, so callers that know the value of
    the closing integral P_2 should pass its rational value.
    """
    q1, q3 = _frac(q1), _frac(q3)
    q2 = -(q1 + q3) if q2 is None else _frac(q2)
    if ((q1 + q2 + q3).denominator != 1):
        raise DomainError("q1 + q2 + q3 must be an integer")
    m1, n1 = q1.numerator, q1.denominator
    m3, n3 = q3.numerator, q3.denominator
    n = lcm(n1, n3)
    s1, s3 = n // n1, n // n3
    third = n % 3 == 0 and (m1 * s1 - m3 * s3) % 3 == 0 and (m3 * s3) % 3 != 0
    spin = Fraction(1, 3) if third else Fraction(1)
    n_gamma = n // 3 if third else n
    # q2 has denominator dividing n because q2 = -(q1 + q3) mod Z
    s2m2 = q2 * n
    if s2m2.denominator != 1:
        raise DomainError("q2 is not compatible with lcm(n1, n3)")
    turning = {1: s3 * m3, -1: int(s2m2)}
    trace_p = (q1 - q3) * n_gamma
    trace_m = (q1 - q2) * n_gamma
    trace = {1: int(trace_p), -1: int(trace_m)}
    if trace_p.denominator != 1 or trace_m.denominator != 1:
        raise DomainError("trace formula did not give an integer")
    if eps not in (1, -1):
        raise DomainError("eps must be +1 or -1")
    return QuantumNumbers(q1, q2, q3, n, s1, s3, spin, n_gamma, eps, turning[eps], trace[eps],
                          turning, trace)


# ---------------------------------------------------------------------------
# direct winding numbers


def winding_degree(samples, closed=True):
    """Winding number of a sampled loop in C \\ {0}.

    Returns (degree, residual) where residual is the distance of the summed
    phase increments (divided by 2 pi) from the nearest integer. With
    ``closed`` the increment from the last sample back to the first is
    included and the residual must stay below 0.1.
    """
    z = np.asarray(samples, dtype=complex).ravel()
    if z.size < 2:
        raise UndersamplingError("need at least two samples")
    mags = np.abs(z)
    if np.any(mags < ZERO_TOL):
        raise DegeneracyError(f"a sample lies within {ZERO_TOL:g} of 0")
    seq = np.append(z, z[0]) if closed else z
    inc = np.angle(seq[1:] / seq[:-1])
    if np.any(np.abs(inc) >= np.pi / 2):
        raise UndersamplingError(f"phase jump of {np.max(np.abs(inc)):.3f} rad between samples")
    total = inc.sum() / (2 * np.pi)
    deg = int(round(total))
    res = abs(total - deg)
    if closed and res >= ROUNDING_TOL:
        raise UndersamplingError(f"winding residual {res:.3f} is not close to an integer")
    return deg, float(res)


def trace_linking(xyz, margin=ZERO_TOL):
    """Linking number of a closed polyline in R^3 with the upward z-axis.

    Computed as the winding of (x, y) around the origin.
    """
    xyz = np.asarray(xyz, dtype=float)
    w = xyz[:, 0] + 1j * xyz[:, 1]
    clearance = float(np.min(np.abs(w)))
    if clearance < margin:
        raise DegeneracyError(f"polyline comes within {clearance:.3e} of the z-axis")
    return winding_degree(w, closed=True)[0]


# ---------------------------------------------------------------------------
# invariants of a sampled standard configuration


class PeriodSampler:
    """Evaluate a standard configuration on a fixed grid over many periods.

    tau and the phases are evaluated once on one period; later periods only
    add multiples of the phase jump.
    """

    def __init__(self, config, samples_per_period=SAMPLES_PER_PERIOD):
        self.config = config
        self.m = int(samples_per_period)
        per = 2 * config.omega
        self.s_local = np.arange(self.m) * (per / self.m)
        tau, phi = config.phases(self.s_local)
        self.tau = tau
        self.phi = phi
        t2 = tau[:, None] ** 2
        l1, l2, l3 = config.lam
        amp = np.stack([np.sqrt((t2 - 3 * l1).astype(complex))[:, 0],
                        np.sqrt((3 * l2 - t2).astype(complex))[:, 0],
                        np.sqrt((3 * l3 - t2).astype(complex))[:, 0]], axis=1)
        self.amp = config.rho * amp

    def z(self, periods):
        """z_j on [0, 2 omega * periods), shape (periods * m, 3)."""
        jumps = self.config.jumps
        k = np.arange(periods)
        phase = self.phi[None, :, :] + k[:, None, None] * jumps[None, None, :]
        return (self.amp[None] * np.exp(1j * phase)).reshape(-1, 3)

    def points(self, periods):
        z = self.z(periods)
        e = self.config.eps
        return np.stack([z[:, 1] + z[:, 2], e * 1j * z[:, 0], -e * 1j * (z[:, 1] - z[:, 2])], axis=1)

    def s(self, periods):
        per = 2 * self.config.omega
        return (np.arange(periods)[:, None] * per + self.s_local[None, :]).ravel()


@dataclass(frozen=True)
class CurveInvariants:
    numbers: QuantumNumbers
    turning: int               # direct
    trace: int                 # direct
    linking: int               # trace from the Heisenberg projection
    matching_branch: tuple     # eps values whose closed forms agree with the direct values
    closure_distance: float
    axis_clearance: float


def curve_invariants(config, q1, q3, q2=None, samples_per_period=SAMPLES_PER_PERIOD):
    """Direct and closed-form discrete invariants of a closed standard configuration."""
    qn = discrete_invariants(q1, q3, config.eps, q2)
    sampler = PeriodSampler(config, samples_per_period)

    # turning number: degree of Gamma^1 - i Gamma^3 over n periods
    pts_n = sampler.points(qn.n)
    w, _ = winding_degree(pts_n[:, 0] - 1j * pts_n[:, 2])
    del pts_n

    z = sampler.z(qn.wave_number)
    tr, _ = winding_degree(z[:, 0] / (z[:, 1] + z[:, 2]))
    pts = sampler.points(qn.wave_number)
    xyz = heisenberg_project(pts)
    lk = trace_linking(xyz)
    clearance = float(np.min(np.hypot(xyz[:, 0], xyz[:, 1])))

    end = config.points(np.array([2 * config.omega * qn.wave_number]))[0]
    closure = projective_distance(pts[0], end)
    match = tuple(e for e in (1, -1) if qn.turning_branches[e] == w and qn.trace_branches[e] == tr)
    return CurveInvariants(qn, w, tr, lk, match, float(closure), clearance)
