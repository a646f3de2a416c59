"""Twist and phase ODEs, the Lax pair, and the Wilczynski frame.

The twist solves the second order equation

    tau'' = tau^2 - 9 c1 tau^-2 (1 - c1 / tau),        kappa = c1 / tau^2,

and the phases solve

    phi_j' = 3 c1 lambda_j / (tau^2 (3 lambda_j - tau^2))
             + (3 tau - 4 c1 - lambda_j^2) / (3 lambda_j - tau^2),

which is the same right-hand side as N_j / (tau^2 (3 lambda_j - tau^2)) but
stays finite at c1 = 0. The frame solves F' = F K(kappa, tau) and its
momentum F L F^-1 is constant.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45, DOP853, OdeSolution, solve_ivp

from . import quadrature
from .errors import AccuracyError, DomainError, NonGeneralError
from .group import H, H_INV, group_residual, project_to_group
from .moduli import as_modulus, classify, momentum_eigenvalues, quintic_roots

RTOL = 1e-12
ATOL = 1e-14
PROJECT_EVERY = 100
BLOWUP = 1e6
#: band around a zero of tau^2 or 3 lambda - tau^2 treated as non-general
DENOMINATOR_BAND = 1e-8

_METHODS = {"RK45": RK45, "DOP853": DOP853}


# ---------------------------------------------------------------------------
# Lax pair


def structure_matrix(kappa, tau):
    """The Wilczynski structure matrix K(kappa, tau), so that F^-1 F' = K."""
    return np.array([
        [1j * kappa, -1j, tau],
        [0, -2j * kappa, 1],
        [1, 0, 1j * kappa],
    ], dtype=complex)


def lax_matrix(kappa, tau, dtau):
    """The Lax matrix L(kappa, tau, tau'); along a critical curve L' = [L, K]."""
    a = 3 * (1 - tau * kappa)
    return np.array([
        [0, 1j * dtau + a, 2j * tau],
        [tau, 0, dtau + 1j * a],
        [3j, -1j * tau, 0],
    ], dtype=complex)


def charpoly(M):
    """Coefficients of det(M - x I) highest degree first (leading coefficient -1)."""
    return -np.poly(M)


# ---------------------------------------------------------------------------
# right-hand sides


def _phase_rates(c1, lam, tau):
    d = 3 * lam - tau * tau
    return 3 * c1 * lam / (tau * tau * d) + (3 * tau - 4 * c1 - lam * lam) / d if c1 != 0 \
        else (3 * tau - lam * lam) / d


def _twist_accel(c1, tau):
    if c1 == 0:
        return tau * tau
    return tau * tau - 9 * c1 / (tau * tau) * (1 - c1 / tau)


def _check_denominators(c1, lam, tau):
    if c1 != 0 and abs(tau) < DENOMINATOR_BAND:
        raise NonGeneralError(f"tau = {tau:.3e} entered the band around 0")
    d = np.abs(3 * lam - tau * tau)
    if np.any(d < DENOMINATOR_BAND * max(1.0, tau * tau)):
        raise NonGeneralError(f"3 lambda - tau^2 entered the band around 0 at tau = {tau:.6g}")


# ---------------------------------------------------------------------------
# stepping engine


@dataclass
class _Run:
    solution: OdeSolution
    t_end: float
    truncated: bool
    steps: int
    corrections: list


def _integrate(fun, y0, t0, t1, method="RK45", rtol=RTOL, atol=ATOL, after_step=None,
               project=None, project_every=PROJECT_EVERY, blowup=None):
    """Step an explicit Runge-Kutta solver from t0 to t1 keeping every interpolant.

    ``project(y)`` may return a corrected state (and a correction magnitude);
    it is applied every ``project_every`` accepted steps. ``blowup(y)`` returning
    True ends the run with ``truncated=True``; so does step size underflow.
    """
    solver = _METHODS[method](fun, t0, y0, t1, rtol=rtol, atol=atol)
    ts = [t0]
    interps = []
    corrections = []
    truncated = False
    steps = 0
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            if blowup is not None:
                truncated = True
                break
            raise AccuracyError(f"ODE solver failed at s = {solver.t}: {msg}")
        steps += 1
        interps.append(solver.dense_output())
        ts.append(solver.t)
        if after_step is not None:
            after_step(solver.t, solver.y)
        if blowup is not None and blowup(solver.y):
            truncated = True
            break
        if project is not None and steps % project_every == 0 and solver.status == "running":
            y_new, size = project(solver.y)
            corrections.append(size)
            solver.y = y_new
            solver.f = fun(solver.t, y_new)
    if not interps:
        raise AccuracyError("ODE solver made no progress")
    return _Run(OdeSolution(ts, interps), ts[-1], truncated, steps, corrections)


# ---------------------------------------------------------------------------
# twist profile


PERIODIC_CLASSES = ("B'1", "B'2", "B'3")


@dataclass
class TwistProfile:
    """Twist, bending and phases along a critical curve.

    For the periodic classes ``omega`` is the half period and the solution is
    stored on [0, 2 omega]; other values of s are reached by periodicity of tau
    and quasi-periodicity of phi. For unbounded classes ``omega`` is the escape
    time and the solution is stored on [0, t_end) with t_end < omega; tau is
    even and phi is odd in s.
    """

    modulus: object
    curve_class: str
    omega: float
    t_end: float
    truncated: bool
    eigenvalues: np.ndarray
    tau0: float
    dtau0: float
    solution: OdeSolution = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    steps: int = 0

    @property
    def periodic(self):
        return self.curve_class in PERIODIC_CLASSES

    @property
    def period(self):
        return 2 * self.omega if self.periodic else np.inf

    def _raw(self, s):
        y = self.solution(s)
        tau, dtau = y[0], y[1]
        phi = y[2:5] + 1j * y[5:8]
        return tau, dtau, phi

    @property
    def phase_jump(self):
        """phi(s + 2 omega) - phi(s), constant for the periodic classes."""
        return self._raw(2 * self.omega)[2]

    def __call__(self, s):
        """Return (tau, tau', kappa, phi) at ``s``; phi has shape (3,) + shape(s)."""
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()
        if self.periodic:
            per = 2 * self.omega
            k = np.floor(flat / per)
            r = flat - k * per
            r = np.clip(r, 0.0, per)
            tau, dtau, phi = self._raw(r)
            phi = phi + np.outer(self.phase_jump, k)
        else:
            a = np.abs(flat)
            if np.any(a > self.t_end):
                raise DomainError(f"s beyond the integrated range |s| <= {self.t_end:.6g}")
            tau, dtau, phi = self._raw(a)
            sg = np.where(flat < 0, -1.0, 1.0)
            dtau = dtau * sg
            phi = phi * sg
        c1 = self.modulus.c1
        kappa = c1 / tau**2 if c1 != 0 else np.zeros_like(tau)
        shape = s.shape
        return (tau.reshape(shape), dtau.reshape(shape), kappa.reshape(shape),
                phi.reshape((3,) + shape))

    def conservation_residual(self, s=None):
        """|(3/2) tau^2 tau'^2 - P_c(tau)| / (1 + |P_c(tau)|) at ``s`` (default: solver nodes)."""
        s = self.nodes if s is None else s
        tau, dtau, _, _ = self(s)
        P = self.modulus.P(tau)
        return np.abs(1.5 * tau**2 * dtau**2 - P) / (1 + np.abs(P))

    def lax(self, s):
        tau, dtau, kappa, _ = self(s)
        return lax_matrix(float(kappa), float(tau), float(dtau))

    def structure(self, s):
        tau, _, kappa, _ = self(s)
        return structure_matrix(float(kappa), float(tau))


def initial_twist(c, curve_class):
    """Initial twist tau(0) for a class with c1 != 0 (tau'(0) = 0)."""
    roots = quintic_roots(c)
    kind = curve_class[:-1]
    if kind == "B'":
        return quadrature.start_root(c, roots)[0]
    if kind == "A":
        return roots.simple_real_roots[0]
    if kind in ("B''", "C"):
        return roots.simple_real_roots[-1]
    raise DomainError(f"unknown curve class {curve_class!r}")


def _resolve_class(c, curve_class):
    cl = classify(c)
    if curve_class is None:
        return cl.curve_classes[0]
    if curve_class not in cl.curve_classes:
        raise DomainError(f"class {curve_class!r} is not admissible for {tuple(c)}: {cl.curve_classes}")
    return curve_class


def twist_profile(c, curve_class=None, horizon=None, tau0=None, dtau0=None,
                  method="RK45", rtol=RTOL, atol=ATOL, blowup=BLOWUP):
    """Integrate the twist and phase equations for modulus ``c``.

    Parameters
    ----------
    curve_class : str, optional
        One of the admissible classes of ``c`` such as "B'1" or "A2". Defaults
        to the first admissible class (the periodic one for phase B).
    horizon : float, optional
        Largest s to integrate to for unbounded classes. Periodic classes are
        always integrated over exactly one period.
    tau0, dtau0 : float, optional
        Initial data. Required when c1 = 0; otherwise the class fixes
        tau(0) at a root of P_c and tau'(0) = 0.
    """
    c = as_modulus(c)
    curve_class = _resolve_class(c, curve_class)
    lam = np.array(momentum_eigenvalues(c).eigenvalues, dtype=complex)
    c1 = c.c1
    if c1 == 0:
        if tau0 is None or dtau0 is None:
            raise DomainError("c1 = 0 needs explicit initial data tau0, dtau0")
        omega = np.inf
    else:
        if tau0 is None:
            tau0 = initial_twist(c, curve_class)
            dtau0 = 0.0
        elif dtau0 is None:
            raise DomainError("tau0 given without dtau0")
        elif curve_class in PERIODIC_CLASSES:
            raise DomainError("periodic classes start at their root; custom initial data is not allowed")
        if curve_class in PERIODIC_CLASSES:
            omega = quadrature.half_period(c)
        else:
            omega = quadrature.escape_time(c, tau0) if dtau0 == 0 else np.inf
    tau0, dtau0 = float(tau0), float(dtau0)

    def fun(s, y):
        tau = y[0]
        rate = _phase_rates(c1, lam, tau)
        return np.concatenate(([y[1], _twist_accel(c1, tau)], rate.real, rate.imag))

    y0 = np.zeros(8)
    y0[0], y0[1] = tau0, dtau0
    _check_denominators(c1, lam, tau0)
    periodic = curve_class in PERIODIC_CLASSES
    if periodic:
        t1 = 2 * omega
    else:
        t1 = horizon if horizon is not None else (omega if np.isfinite(omega) else 1e3)
    run = _integrate(fun, y0, 0.0, t1, method, rtol, atol,
                     after_step=lambda s, y: _check_denominators(c1, lam, y[0]),
                     blowup=None if periodic else (lambda y: abs(y[0]) > blowup))
    return TwistProfile(
        modulus=c, curve_class=curve_class,
        omega=float(omega), t_end=run.t_end, truncated=run.truncated, eigenvalues=lam,
        tau0=tau0, dtau0=dtau0, solution=run.solution, nodes=np.asarray(run.solution.ts), steps=run.steps,
    )


# ---------------------------------------------------------------------------
# frame


@dataclass
class FramePath:
    """A Wilczynski frame F(s) with F' = F K along a twist profile.

    ``forward`` covers [0, t_end]; ``backward`` (if present) covers
    [-t_end_back, 0]. For periodic profiles only one period is stored and
    F(s + 2 k omega) = M^k F(s) with the monodromy M = F(2 omega) F(0)^-1.
    """

    profile: TwistProfile
    F0: np.ndarray
    forward: OdeSolution = field(repr=False)
    t_end: float
    backward: OdeSolution = field(default=None, repr=False)
    t_end_back: float = 0.0
    corrections: list = field(default_factory=list)
    steps: int = 0

    @property
    def periodic(self):
        return self.profile.periodic

    def _state(self, sol, s):
        y = sol(s)
        return y[2:].reshape((3, 3) + np.shape(s)) if np.ndim(s) else y[2:].reshape(3, 3)

    @property
    def monodromy_matrix(self):
        return self._state(self.forward, 2 * self.profile.omega) @ np.linalg.inv(self.F0)

    def _twist_state(self, s):
        return self.forward(s)[:2].real

    def __call__(self, s):
        """F(s) as a (3, 3) array, or (n, 3, 3) for an array of s."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((s_arr.size, 3, 3), dtype=complex)
        if self.periodic:
            per = 2 * self.profile.omega
            M = self.monodromy_matrix
            k = np.floor(s_arr / per).astype(int)
            r = np.clip(s_arr - k * per, 0, per)
            base = np.moveaxis(self._state(self.forward, r), -1, 0)
            powers = {}
            for i, kk in enumerate(k):
                if kk not in powers:
                    powers[kk] = np.linalg.matrix_power(M if kk >= 0 else np.linalg.inv(M), abs(kk))
                out[i] = powers[kk] @ base[i]
        else:
            for i, si in enumerate(s_arr):
                if 0 <= si <= self.t_end:
                    out[i] = self._state(self.forward, si)
                elif self.backward is not None and -self.t_end_back <= si < 0:
                    out[i] = self._state(self.backward, si)
                else:
                    raise DomainError(f"s = {si} outside the integrated frame range")
        return out[0] if np.ndim(s) == 0 else out

    def momentum(self, s):
        """F(s) L(s) F(s)^-1 (constant along a critical curve)."""
        F = self(s)
        L = self.profile.lax(s)
        return F @ L @ np.linalg.inv(F)

    def momentum_drift(self, s):
        """Largest deviation of F L F^-1 from its value at s = 0 over ``s``."""
        ref = self.momentum(0.0)
        return max(float(np.abs(self.momentum(si) - ref).max()) for si in np.atleast_1d(s))

    def group_residual(self, s):
        herm, det = group_residual(self(s))
        return float(np.max(herm)), float(np.max(det))


def _frame_rhs(c1):
    def fun(s, y):
        tau = y[0].real
        kappa = c1 / (tau * tau) if c1 != 0 else 0.0
        F = y[2:].reshape(3, 3)
        dF = F @ structure_matrix(kappa, tau)
        return np.concatenate(([y[1], _twist_accel(c1, tau)], dF.ravel()))
    return fun


def _frame_run(profile, F0, t1, method, rtol, atol, tol, blowup, dtau0):
    c1 = profile.modulus.c1
    fun = _frame_rhs(c1)
    y0 = np.concatenate(([profile.tau0, dtau0], F0.ravel())).astype(complex)

    def project(y):
        G, size = project_to_group(y[2:].reshape(3, 3), tol)
        z = y.copy()
        z[2:] = G.ravel()
        return z, size

    return _integrate(fun, y0, 0.0, t1, method, rtol, atol, project=project,
                      blowup=blowup)


def integrate_frame(profile, F0=None, method="RK45", rtol=RTOL, atol=ATOL, tol=1e-6,
                    backward=False):
    """Integrate F' = F K jointly with the twist equation.

    The frame starts at ``F0`` (identity by default) and is projected back onto
    G every 100 accepted steps; an AccuracyError is raised if it drifted by more
    than ``tol`` before a correction.
    """
    F0 = np.eye(3, dtype=complex) if F0 is None else np.asarray(F0, dtype=complex)
    herm, det = group_residual(F0)
    if herm > 1e-8 or det > 1e-8:
        raise DomainError("initial frame is not in G")
    blow = None if profile.periodic else (lambda y: abs(y[0]) > BLOWUP)
    t1 = 2 * profile.omega if profile.periodic else profile.t_end
    fwd = _frame_run(profile, F0, t1, method, rtol, atol, tol, blow, profile.dtau0)
    path = FramePath(profile, F0, fwd.solution, fwd.t_end, corrections=list(fwd.corrections),
                     steps=fwd.steps)
    if backward and not profile.periodic:
        c1 = profile.modulus.c1
        fun = _frame_rhs(c1)
        y0 = np.concatenate(([profile.tau0, profile.dtau0], F0.ravel())).astype(complex)

        def project(y):
            G, size = project_to_group(y[2:].reshape(3, 3), tol)
            z = y.copy()
            z[2:] = G.ravel()
            return z, size

        back = _integrate(fun, y0, 0.0, -profile.t_end, method, rtol, atol, project=project,
                          blowup=blow)
        path.backward = back.solution
        path.t_end_back = -back.t_end
        path.corrections += back.corrections
    return path


@dataclass(frozen=True)
class Monodromy:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    phases: np.ndarray  # arg(eigenvalue) / 2 pi in (-1/2, 1/2]
    det_residual: float
    modulus_residual: float  # max | |mu| - 1 |


def monodromy(path, n=1, tol=1e-6):
    """Monodromy F(2 n omega) F(0)^-1 of a periodic frame path and its spectrum."""
    if not path.periodic:
        raise DomainError("monodromy needs a periodic (B') profile")
    M = np.linalg.matrix_power(path.monodromy_matrix, n)
    mu = np.linalg.eigvals(M)
    mod_res = float(np.max(np.abs(np.abs(mu) - 1)))
    if mod_res > tol:
        raise AccuracyError(f"monodromy eigenvalues are off the unit circle by {mod_res:.3e}")
    phases = np.angle(mu) / (2 * np.pi)
    order = np.argsort(phases)
    return Monodromy(M, mu[order], phases[order], float(abs(np.linalg.det(M) - 1)), mod_res)


def wrap_phase(x):
    """Reduce to (-1/2, 1/2]."""
    return -((-np.asarray(x) + 0.5) % 1.0 - 0.5)


# ---------------------------------------------------------------------------
# finite-difference oracle


def local_twist(c, tau, dtau, offsets, rtol=1e-13, atol=1e-14):
    """Re-integrate the twist equation from (tau, tau') to the given offsets in s."""
    c1 = as_modulus(c).c1
    fun = lambda s, y: [y[1], _twist_accel(c1, y[0])]
    out = {}
    for direction in (1, -1):
        pts = sorted(h for h in offsets if h * direction > 0)
        pts = pts if direction > 0 else pts[::-1]
        if not pts:
            continue
        sol = solve_ivp(fun, (0.0, pts[-1]), [tau, dtau], method="DOP853", rtol=rtol, atol=atol,
                        t_eval=pts)
        for h, yy in zip(sol.t, sol.y.T):
            out[h] = yy
    out.setdefault(0.0, np.array([tau, dtau]))
    return out


def lax_residual(profile, s, h=5e-4):
    """||L' - [L, K]|| at s, with L' from a five-point stencil on a local re-integration."""
    c = profile.modulus
    tau, dtau, kappa, _ = profile(s)
    tau, dtau = float(tau), float(dtau)
    offsets = [-2 * h, -h, h, 2 * h]
    st = local_twist(c, tau, dtau, offsets)

    def L_at(o):
        t, dt = st[o] if o else (tau, dtau)
        k = c.c1 / t**2 if c.c1 != 0 else 0.0
        return lax_matrix(k, t, dt)

    dL = (L_at(-2 * h) - 8 * L_at(-h) + 8 * L_at(h) - L_at(2 * h)) / (12 * h)
    L = lax_matrix(float(kappa), tau, dtau)
    K = structure_matrix(float(kappa), tau)
    return float(np.abs(dL - (L @ K - K @ L)).max())
