import numpy as np
import pytest
from scipy.integrate import quad

from crtwist import moduli, quadrature
from crtwist.errors import DomainError

EXAMPLE = (-0.8284243304411575, -8.349417691746162)


def test_endpoint_rule_on_arcsine_integral():
    one = quadrature.endpoint_integral(lambda u: np.ones_like(u), -1.0, 1.0)
    assert one == pytest.approx(np.pi, abs=1e-12)
    sq = quadrature.endpoint_integral(lambda u: u * u, -1.0, 1.0)
    assert sq == pytest.approx(np.pi / 2, abs=1e-12)


def test_gauss_legendre_reports_nonconvergence():
    from crtwist.errors import NumericalFailure
    with pytest.raises(NumericalFailure):
        quadrature.gauss_legendre(lambda x: np.sign(x - 1 / 3), 0.0, 1.0, n_max=512)


def test_example_half_period():
    assert quadrature.half_period(EXAMPLE) == pytest.approx(0.732307, abs=1e-5)


def test_half_period_against_offset_quadrature():
    c = moduli.Modulus(1 / 6, 8)
    r = moduli.quintic_roots(c).real_roots
    a, b = r[0], r[1]
    eps = 1e-10
    f = lambda u: np.sqrt(1.5) * abs(u) / np.sqrt(c.P(u))  # noqa: E731
    ref = quad(f, a + eps, b - eps, limit=500, points=[(a + b) / 2])[0]
    assert quadrature.half_period(c) == pytest.approx(ref, rel=1e-6)


def test_escape_times_are_finite():
    assert 0 < quadrature.escape_time((4, -9)) < np.inf
    assert 0 < quadrature.escape_time((0.5, -4.8)) < np.inf


def test_half_period_rejects_phase_a():
    with pytest.raises(DomainError):
        quadrature.half_period((4, -9))


def test_example_quantum_integrals():
    P = quadrature.quantum_integrals(EXAMPLE).values
    assert P[0] == pytest.approx(-2 / 15, abs=2e-8)
    assert P[2] == pytest.approx(-10 / 21, abs=5e-8)


@pytest.mark.parametrize("c", [(-0.3, -8.8), (-2.0, -4.0), (-4.0, 6.0), (-0.8, -8.0)])
def test_quantum_integrals_sum_to_integer(c):
    P = quadrature.quantum_integrals(c).values
    total = sum(P)
    assert abs(total - round(total)) < 1e-7


def test_incomplete_strain_limits():
    r = moduli.quintic_roots(EXAMPLE).real_roots
    omega = quadrature.half_period(EXAMPLE)
    assert abs(quadrature.incomplete_strain(EXAMPLE, r[1], r[0])) == pytest.approx(omega, abs=1e-9)
    assert quadrature.incomplete_strain(EXAMPLE, r[1], r[1]) == 0.0
