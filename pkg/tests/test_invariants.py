from fractions import Fraction

import numpy as np
import pytest

from crtwist import invariants
from crtwist.errors import DegeneracyError, DomainError, UndersamplingError


def test_closed_forms_for_example():
    qn = invariants.discrete_invariants(Fraction(-2, 15), Fraction(-10, 21), 1, Fraction(-41, 105))
    assert (qn.n, qn.spin_label, qn.wave_number, qn.turning, qn.trace) == (105, "1/3", 35, -50, 12)


@pytest.mark.parametrize("q1,q3,expected", [
    ("-3/10", "-9/25", (50, -18, 3)),
    ("-7/36", "-23/54", (108, -46, 25)),
])
def test_closed_forms_table(q1, q3, expected):
    qn = invariants.discrete_invariants(Fraction(q1), Fraction(q3))
    assert (qn.wave_number, qn.turning, qn.trace) == expected


def test_q2_must_close_the_sum():
    with pytest.raises(DomainError):
        invariants.discrete_invariants(Fraction(-2, 15), Fraction(-10, 21), 1, Fraction(1, 7))


def test_winding_of_circle_twice():
    theta = np.linspace(0, 4 * np.pi, 400, endpoint=False)
    assert invariants.winding_degree(np.exp(1j * theta))[0] == 2


def test_winding_errors():
    with pytest.raises(DegeneracyError):
        invariants.winding_degree([1, 0, 1j])
    with pytest.raises(UndersamplingError):
        invariants.winding_degree(np.exp(1j * np.linspace(0, 10 * np.pi, 8, endpoint=False)))


def test_linking_of_unit_circle():
    theta = np.linspace(0, 2 * np.pi, 100, endpoint=False)
    xyz = np.stack([np.cos(theta), np.sin(theta), np.full_like(theta, 3.0)], axis=1)
    assert invariants.trace_linking(xyz) == 1
    with pytest.raises(DegeneracyError):
        invariants.trace_linking(xyz * [1e-12, 1e-12, 1])


def test_example_curve_invariants(example_config):
    inv = invariants.curve_invariants(example_config, Fraction(-2, 15), Fraction(-10, 21),
                                      Fraction(-41, 105))
    assert (inv.numbers.wave_number, inv.turning, inv.trace, inv.linking) == (35, -50, 12, 12)
    assert inv.matching_branch == (1,)
    assert inv.closure_distance < 1e-8


def test_turning_equals_winding_of_z3(example_config):
    """For eps = +1 the turning number s3 m3 is the degree of z3 over 2 n omega."""
    sampler = invariants.PeriodSampler(example_config, 2048)
    z = sampler.z(105)
    assert invariants.winding_degree(z[:, 2])[0] == -50
