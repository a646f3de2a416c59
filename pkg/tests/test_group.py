import numpy as np
import pytest

from crtwist import group
from crtwist.errors import AccuracyError


def test_random_elements_are_in_group():
    rng = np.random.default_rng(0)
    for _ in range(10):
        g = group.random_group_element(rng)
        herm, det = group.group_residual(g)
        assert herm < 1e-12 and det < 1e-12


def test_projection_restores_membership():
    rng = np.random.default_rng(1)
    g = group.random_group_element(rng)
    bumped = g + 1e-8 * rng.normal(size=(3, 3))
    G, size = group.project_to_group(bumped)
    herm, det = group.group_residual(G)
    assert herm < 1e-12 and det < 1e-12
    assert 0 < size < 1e-6


def test_projection_refuses_large_drift():
    with pytest.raises(AccuracyError):
        group.project_to_group(np.eye(3) * 1.1)


def test_cube_root_branch():
    for z in (1.0, -1.0, 1j, -8.0 + 0.1j):
        r = group.unit_cube_root(z)
        assert abs(r**3 - z) < 1e-12
        assert -np.pi / 3 < np.angle(r) <= np.pi / 3 + 1e-15
