"""The Hermitian form of signature (2,1) and the group G = SU(2,1) it defines."""

import numpy as np
from scipy.linalg import sqrtm

from .errors import AccuracyError

#: matrix of the indefinite Hermitian form <z, w> = conj(z)^T h w
H = np.array([[0, 0, 1j], [0, 1, 0], [-1j, 0, 0]])
H_INV = np.linalg.inv(H)


def inner(z, w):
    """Hermitian product ``<z, w>`` along the last axis (broadcasts)."""
    z = np.asarray(z)
    w = np.asarray(w)
    return np.einsum("...i,ij,...j->...", z.conj(), H, w)


def group_residual(F):
    """Return ``max |F^* h F - h|`` and ``|det F - 1|`` for a matrix or a stack."""
    F = np.asarray(F)
    lhs = np.einsum("...ji,jk,...kl->...il", F.conj(), H, F)
    herm = np.abs(lhs - H).max(axis=(-2, -1))
    det = np.abs(np.linalg.det(F) - 1.0)
    return herm, det


def h_adjoint(X):
    """Adjoint of ``X`` with respect to the form: ``h^{-1} X^* h``."""
    return H_INV @ np.asarray(X).conj().T @ H


def unit_cube_root(z):
    """Cube root of a nonzero complex number with argument in (-pi/3, pi/3]."""
    r = abs(z) ** (1.0 / 3.0)
    theta = np.angle(z) / 3.0
    if theta <= -np.pi / 3:
        theta += 2 * np.pi / 3
    return r * np.exp(1j * theta)


def unimodular(F):
    """Divide ``F`` by a cube root of its determinant so that ``det F = 1``."""
    return F / unit_cube_root(np.linalg.det(F))


def project_to_group(F, tol=1e-6):
    """Pull a near-group matrix back onto G.

    Uses the polar-type correction ``F S^{-1/2}`` with ``S = h^{-1} F^* h F``,
    followed by cube-root normalisation of the determinant. Returns the
    corrected matrix and the size of the correction.
    """
    F = np.asarray(F, dtype=complex)
    herm, _ = group_residual(F)
    if herm > tol:
        raise AccuracyError(f"group residual {herm:.3e} exceeds {tol:.1e} before correction")
    S = H_INV @ F.conj().T @ H @ F
    G = unimodular(F @ np.linalg.inv(sqrtm(S)))
    return G, float(np.abs(G - F).max())


def random_group_element(rng, scale=0.5):
    """Sample an element of G as the exponential of a random Lie algebra element."""
    from scipy.linalg import expm

    Z = scale * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    X = Z - h_adjoint(Z)          # X^* h + h X = 0
    X -= np.trace(X) / 3 * np.eye(3)
    return expm(X)
