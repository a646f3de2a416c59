"""Closed-form reconstruction of critical curves from their twist and phases.

Along a critical curve the momentum eigenvectors are the sections

    y_j = (tau (3 - i tau') - lambda_j^2 - 3 c1,
           9 - 9 c1 / tau - lambda_j tau - 3 i tau',
           i (tau^2 - 3 lambda_j)),

and the Wilczynski frame with F(0) = I is

    F(s) = M D(r_j(s) e^{i phi_j(s)}) V(s)^-1,   M = V(0) D(r_j(0))^-1,

with V = [y_1 y_2 y_3] and r_j = sqrt(tau^2 - 3 lambda_j). For type B'_1
the curve can be moved into a standard configuration whose momentum is a
fixed normal form of the maximal torus.
"""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import TwistProfile, lax_matrix, twist_profile
from .errors import DegeneracyError, DomainError, NonGeneralError
from .group import H, inner, unimodular, unit_cube_root
from .moduli import as_modulus, is_general, momentum_eigenvalues, quintic_roots
from .quadrature import quantum_integrals

#: |det V| below this fraction of the product of column norms is treated as singular
DET_TOL = 1e-8
POLARIZATION_TOL = 1e-8

#: the constant matrix B of the standard configuration (columns B_1, B_2, B_3)
B_STD = np.array([
    [1 / np.sqrt(2), -1 / np.sqrt(2), 0],
    [0, 0, 1j],
    [1j / np.sqrt(2), 1j / np.sqrt(2), 0],
])


def sections(c1, lam, tau, dtau):
    """Columns y_j as an array of shape (..., 3, 3) (last axis indexes j)."""
    tau = np.asarray(tau, dtype=float)[..., None]
    dtau = np.asarray(dtau, dtype=float)[..., None]
    lam = np.asarray(lam, dtype=complex)
    y1 = tau * (3 - 1j * dtau) - lam * lam - 3 * c1
    y2 = 9 - 9 * c1 / tau - lam * tau - 3j * dtau
    y3 = 1j * (tau * tau - 3 * lam)
    return np.stack([y1, y2, y3], axis=-2)


def adjugate_inverse(V, tol=DET_TOL):
    """Inverse of a stack of 3x3 matrices through the adjugate.

    Raises NonGeneralError when |det V| is below ``tol`` times the product of
    the column norms (a scale-free measure of how close V is to singular).
    """
    V = np.asarray(V)
    a, b, c = V[..., 0, :], V[..., 1, :], V[..., 2, :]
    cof = np.stack([np.cross(b, c), np.cross(c, a), np.cross(a, b)], axis=-1)
    det = np.einsum("...i,...i->...", a, np.cross(b, c))
    scale = np.prod(np.linalg.norm(V, axis=-2), axis=-1)
    ratio = np.abs(det) / scale
    if np.any(ratio < tol):
        raise NonGeneralError(f"det V is too small (|det|/scale = {np.min(ratio):.3e})")
    return cof / det[..., None, None], ratio


@dataclass
class EigenSections:
    s: np.ndarray
    lam: np.ndarray
    V: np.ndarray        # (n, 3, 3)
    r: np.ndarray        # (n, 3)
    phi: np.ndarray      # (n, 3)
    tau: np.ndarray
    dtau: np.ndarray
    det_ratio: np.ndarray = field(repr=False, default=None)

    def norms(self):
        """<y_j, y_j> for every sample, shape (n, 3)."""
        Y = np.swapaxes(self.V, -1, -2)
        return inner(Y, Y).real

    def eigen_residual(self, c1):
        """max_j |L y_j - lambda_j y_j| / |y_j| per sample."""
        out = []
        kappa = c1 / self.tau**2 if c1 != 0 else np.zeros_like(self.tau)
        for k in range(len(self.s)):
            L = lax_matrix(kappa[k], self.tau[k], self.dtau[k])
            R = L @ self.V[k] - self.V[k] * self.lam
            out.append(np.max(np.linalg.norm(R, axis=0) / np.linalg.norm(self.V[k], axis=0)))
        return np.array(out)


def _root_continuation(z):
    """Principal square roots of z, made continuous along the sample axis.

    For general moduli tau^2 - 3 lambda never crosses the negative real axis, so
    the principal branch is already continuous; the sign flip below only guards
    against samples sitting on the cut.
    """
    r = np.sqrt(z.astype(complex))
    for k in range(1, len(r)):
        flip = np.abs(r[k] + r[k - 1]) < np.abs(r[k] - r[k - 1])
        r[k] = np.where(flip, -r[k], r[k])
    return r


def eigen_sections(profile, s, spectrum=None):
    """Evaluate y_j, V and r_j = sqrt(tau^2 - 3 lambda_j) on the samples ``s``.

    ``s`` should start at 0 (or be sorted) so that r_j is continued from s = 0.
    """
    c = profile.modulus
    lam = np.asarray(spectrum.eigenvalues if spectrum is not None else profile.eigenvalues, complex)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    tau, dtau, _, phi = profile(s)
    V = sections(c.c1, lam, tau, dtau)
    d = 3 * lam[None, :] - tau[:, None] ** 2
    if np.any(np.abs(d) < 1e-8 * np.maximum(1.0, tau[:, None] ** 2)):
        raise NonGeneralError("3 lambda_j - tau^2 vanishes at a sample")
    _, ratio = adjugate_inverse(V)
    r = _root_continuation(tau[:, None] ** 2 - 3 * lam[None, :])
    return EigenSections(s, lam, V, r, phi.T, tau, dtau, ratio)


def reconstruct_frame(profile, s):
    """Frames F(s) = M D(r e^{i phi}) V^-1 with F(0) = I, shape (n, 3, 3)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    es = eigen_sections(profile, np.concatenate(([0.0], s)))
    Vinv, _ = adjugate_inverse(es.V)
    M = es.V[0] / es.r[0]                 # V(0) D(r(0))^-1
    D = es.r * np.exp(1j * es.phi)        # (n, 3)
    F = np.einsum("ij,nj,njk->nik", M, D, Vinv)
    return F[1:]


def reconstruct_general(profile, s):
    """Homogeneous points M D(r e^{i phi}) V^-1 e_1 of the curve, shape (n, 3)."""
    return reconstruct_frame(profile, s)[:, :, 0]


# ---------------------------------------------------------------------------
# standard configuration


def canonical_momentum(lam1, lam2, lam3, eps):
    """Normal form of the momentum of a type B'_1 curve in standard configuration."""
    a = (lam2 + lam3) / 2
    b = eps * 1j * (lam2 - lam3) / 2
    return np.array([[a, 0, b], [0, lam1, 0], [-b, 0, a]], dtype=complex)


def polarization_sign(c, roots=None, spectrum=None):
    """eps = -sign(e2^2 - 3 lambda_3)."""
    roots = roots if roots is not None else quintic_roots(c)
    spectrum = spectrum if spectrum is not None else momentum_eigenvalues(c)
    e2 = roots.real_roots[1]
    g = e2 * e2 - 3 * spectrum.real[2]
    if abs(g) < POLARIZATION_TOL * max(1.0, e2 * e2):
        raise DegeneracyError("e2^2 - 3 lambda_3 vanishes: polarization is degenerate")
    return -1 if g > 0 else 1


def _eigvec_phase(v):
    k = int(np.argmax(np.abs(v) > 1e-12 * np.abs(v).max()))
    return v * np.exp(-1j * np.angle(v[k]))


def standard_frame_change(momentum, lam, eps):
    """The Step 3 matrix M = B A^-1 that brings ``momentum`` into the normal form.

    A has the momentum eigenvectors as columns, normalised so that
    <A_i, A_j> = diag(-1, 1, 1), each with its first nonzero component real
    positive and A scaled by the cube root of its determinant with argument in
    (-pi/3, pi/3]. Returns (M, A).
    """
    lam = np.asarray(lam).real
    w, vecs = np.linalg.eig(momentum)
    roles = (2, 1, 0) if eps == 1 else (1, 2, 0)
    cols = []
    for j in roles:
        v = vecs[:, int(np.argmin(np.abs(w - lam[j])))]
        v = _eigvec_phase(v)
        cols.append(v / np.sqrt(abs(inner(v, v).real)))
    A = unimodular(np.array(cols).T)
    return B_STD @ np.linalg.inv(A), A


@dataclass
class StandardConfiguration:
    """A type B'_1 critical curve in standard configuration.

    The homogeneous point is [(z2 + z3, eps i z1, -eps i (z2 - z3))] with
    z1 = rho1 sqrt(tau^2 - 3 lambda1) e^{i phi1},
    z2 = rho2 sqrt(3 lambda2 - tau^2) e^{i phi2},
    z3 = rho3 sqrt(3 lambda3 - tau^2) e^{i phi3}.
    """

    modulus: object
    eps: int
    rho: np.ndarray
    lam: np.ndarray
    profile: TwistProfile = field(repr=False)
    jumps: np.ndarray = field(repr=False)
    B: np.ndarray = field(default_factory=lambda: B_STD.copy(), repr=False)

    @property
    def polarization(self):
        # eps = +1 exactly when y_3 is timelike, which is negative polarization
        return "negative" if self.eps == 1 else "positive"

    @property
    def omega(self):
        return self.profile.omega

    def phases(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        per = 2 * self.omega
        k = np.floor(s / per)
        tau, _, _, phi = self.profile(np.clip(s - k * per, 0.0, per))
        return tau, phi.real.T + np.outer(k, self.jumps)

    def z(self, s):
        """(z1, z2, z3) at ``s``, shape (n, 3)."""
        tau, phi = self.phases(s)
        t2 = tau[:, None] ** 2
        l1, l2, l3 = self.lam
        amp = np.stack([np.sqrt((t2 - 3 * l1).astype(complex))[:, 0],
                        np.sqrt((3 * l2 - t2).astype(complex))[:, 0],
                        np.sqrt((3 * l3 - t2).astype(complex))[:, 0]], axis=1)
        return self.rho * amp * np.exp(1j * phi)

    def points(self, s):
        """Homogeneous coordinates of the curve at ``s``, shape (n, 3)."""
        z = self.z(s)
        e = self.eps
        return np.stack([z[:, 1] + z[:, 2], e * 1j * z[:, 0], -e * 1j * (z[:, 1] - z[:, 2])], axis=1)

    def canonical_momentum(self):
        return canonical_momentum(*self.lam, self.eps)


def standard_rho(lam):
    l1, l2, l3 = np.asarray(lam).real
    return np.array([
        1 / np.sqrt((2 * l2 + l3) * (l2 + 2 * l3)),
        1 / np.sqrt(2 * (l3 - l2) * (2 * l2 + l3)),
        1 / np.sqrt(2 * (l3 - l2) * (l2 + 2 * l3)),
    ])


def standard_configuration(c, profile=None, jumps="ode"):
    """Build the standard configuration of a general type B'_1 modulus.

    ``jumps`` selects how the phase increment per period is obtained: "ode"
    uses phi(2 omega) from the integrated profile, "quadrature" uses
    2 pi P_j from the closing integrals.
    """
    c = as_modulus(c)
    roots = quintic_roots(c)
    spec = momentum_eigenvalues(c)
    if spec.kind != "OT1":
        raise DomainError("standard configurations exist for orbit type OT1 only")
    if not is_general(c).general:
        raise NonGeneralError(f"modulus {tuple(c)} is not general")
    if profile is None:
        profile = twist_profile(c, "B'1")
    eps = polarization_sign(c, roots, spec)
    if jumps == "ode":
        jump = profile.phase_jump.real
    elif jumps == "quadrature":
        jump = 2 * np.pi * np.array(quantum_integrals(c, spec, roots).values)
    else:
        raise DomainError(f"unknown jumps mode {jumps!r}")
    lam = spec.real
    return StandardConfiguration(c, eps, standard_rho(lam), lam, profile, np.asarray(jump))


def align_to_standard(config, frame_path=None):
    """Element A of G with [A F_1(s)] equal to the standard curve for all s.

    Starts from the Step 3 matrix B A0^-1 and fixes the remaining torus
    freedom by matching the two curves at s = 0. Returns (A, Step 3 matrix).
    """
    prof = config.profile
    L0 = prof.lax(0.0)
    F0 = np.eye(3) if frame_path is None else frame_path(0.0)
    momentum = F0 @ L0 @ np.linalg.inv(F0)
    M3, A0 = standard_frame_change(momentum, config.lam, config.eps)
    target = np.linalg.inv(config.B) @ config.points(0.0)[0]
    source = np.linalg.inv(A0) @ F0[:, 0]
    d = target / source
    D = np.diag(d)
    A = config.B @ D @ np.linalg.inv(A0)
    return A / unit_cube_root(np.linalg.det(A)), M3
