from fractions import Fraction

import numpy as np
import pytest

from crtwist import closure, moduli
from crtwist.errors import DomainError


def test_contact_point_is_on_delta1():
    c = moduli.Modulus(*closure.CONTACT_POINT)
    assert abs(moduli.delta1(c)) < 1e-9 * 27 * 32 * 1458
    assert np.allclose(moduli.separatrix(closure.contact_parameter()), closure.CONTACT_POINT, atol=1e-9)


def test_psi_endpoints():
    for t in (1.7, 2.0, 2.2):
        p = closure.psi("minus", t, 1e-12)
        assert abs(moduli.delta1(p)) < 1e-6 * (1 + abs(p.c1) ** 3)
        assert np.allclose(tuple(closure.psi("minus", t, 1 - 1e-12)), moduli.separatrix(t), atol=1e-9)


def test_psi_domain():
    with pytest.raises(DomainError):
        closure.psi("minus", 1.0, 0.5)
    with pytest.raises(DomainError):
        closure.psi("minus", 2.0, 1.5)


def test_pmap_smoke_grid():
    lo, hi = closure.branch_interval("minus")
    rows = closure.pmap_grid("minus", np.linspace(lo + 0.1, hi - 0.1, 2), [0.3, 0.7])
    assert len(rows) == 4
    assert all(np.all(np.isfinite(v.P)) for v in rows if not v.exceptional)


def test_pmap_image_excludes_origin():
    lo, hi = closure.branch_interval("minus")
    rows = closure.pmap_grid("minus", np.linspace(lo, hi, 10)[1:-1], np.linspace(0, 1, 10)[1:-1])
    pts = np.array([v.pair for v in rows if not v.exceptional])
    assert pts[:, 1].max() < -0.3


def test_search_is_deterministic():
    cfg = closure.SearchConfig(rect=(1.83, 1.86, 0.65, 0.75), seed=3, popsize=10, maxiter=40)
    a = closure.search_modulus(-2 / 15, -10 / 21, cfg)
    b = closure.search_modulus(-2 / 15, -10 / 21, cfg)
    assert a == b
    assert a.found


def test_search_not_found_for_origin():
    cfg = closure.SearchConfig(seed=0, popsize=5, maxiter=5, refine=False)
    res = closure.search_modulus(0.0, 0.0, cfg)
    assert not res.found and res.delta > 0.1


def test_perturbed_target_moves_continuously():
    p0, _ = closure.refine_modulus(-2 / 15, -10 / 21, (1.845, 0.72))
    p1, d = closure.refine_modulus(-2 / 15 + 1e-3, -10 / 21, p0)
    assert d < 1e-10
    assert 0 < np.hypot(p1[0] - p0[0], p1[1] - p0[1]) < 0.05


def test_rationalize():
    assert closure.rationalize(-0.4761904761, 64) == Fraction(-10, 21)
    assert closure.rationalize(np.pi, 10, 1e-6) is None
    assert closure.rationalize(-0.13333333212293633, 128, 1e-6) == Fraction(-2, 15)
