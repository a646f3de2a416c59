import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crtwist import moduli
from crtwist.errors import DomainError

EXAMPLE = (-0.8284243304411575, -8.349417691746162)


def test_roots_of_first_probe_modulus():
    r = moduli.quintic_roots((-2, 1))
    assert np.allclose(r.real_roots, (-2.44175, -0.9904, 2.87645), atol=1e-4)
    assert len(r.complex_pairs) == 1


def test_zero_modulus_has_quintuple_root():
    r = moduli.quintic_roots((0, 0))
    assert r.real_roots == (0.0,) or np.allclose(r.real_roots, [0.0])
    assert r.multiplicities == (5,) or list(r.multiplicities) == [5]


def test_example_roots_and_eigenvalues():
    r = moduli.quintic_roots(EXAMPLE)
    assert np.allclose(r.real_roots, (-0.931924, -0.678034, 2.79051), atol=1e-5)
    m = moduli.momentum_eigenvalues(EXAMPLE)
    assert m.kind == "OT1"
    assert np.allclose(m.real, (-2.40462, 0.40614, 1.99848), atol=1e-5)


def test_orbit_types():
    assert moduli.momentum_eigenvalues((0, -9)).kind == "OT3"
    assert moduli.delta1((-1, -9)) == pytest.approx(864.0)
    assert moduli.momentum_eigenvalues((-1, -9)).kind == "OT1"
    assert moduli.momentum_eigenvalues((1, 0)).kind == "OT2"


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(-40, 40))
def test_roots_agree_with_numpy(c1, c2):
    """Every returned real root annihilates P_c, and the multiplicities add up to 5."""
    c = moduli.Modulus(c1, c2)
    spec = moduli.quintic_roots(c)
    assert spec.total_multiplicity == 5
    for x in spec.real_roots:
        assert abs(c.P(x)) < 1e-6 * (1 + abs(x) ** 5)


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(-40, 40))
def test_eigenvalues_are_roots_of_cubic(c1, c2):
    c = moduli.Modulus(c1, c2)
    spec = moduli.momentum_eigenvalues(c)
    lam = np.asarray(spec.eigenvalues, complex)
    assert abs(lam.sum()) < 1e-8 * (1 + np.abs(lam).max())
    assert np.all(np.abs(np.polyval(c.cubic, lam)) < 1e-7 * (1 + np.abs(lam).max() ** 3))


def test_classification_regions():
    assert moduli.classify((1 / 6, 8)).phase == "B"
    assert moduli.classify((1 / 6, 8)).region == "M''+"
    cl = moduli.classify((4, -9))
    assert (cl.phase, cl.region) == ("A", "M''-")
    assert moduli.classify((0, 5)).phase == "C"
    assert "Oy" in moduli.classify((0, 5)).boundary


def test_separatrix_special_points():
    xi = moduli.separatrix(np.pi / 4)
    assert np.allclose(xi, (0.8 * 1.2 ** (2 / 3), -48 / 5), atol=1e-12)
    assert np.allclose(moduli.separatrix(np.pi / 2), (0.0, -9.0), atol=1e-12)


def test_separatrix_diverges_at_endpoints():
    lo, hi = moduli.separatrix_interval()
    assert np.linalg.norm(moduli.separatrix(hi - 1e-6)) > 1e3
    with pytest.raises(DomainError):
        moduli.separatrix(hi)


def test_separatrix_points_have_a_double_root():
    for t in np.linspace(0.2, 2.4, 7):
        if abs(t - np.pi / 4) < 1e-3:
            continue
        c = moduli.Modulus(*moduli.separatrix(t))
        assert moduli.quintic_roots(c).has_multiple_root


def test_generality():
    assert not moduli.is_general((0, -9)).general
    assert moduli.is_general(EXAMPLE).general
    assert not moduli.is_general((0, -18)).general
