import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minannuli.curves import BoundaryCurve, CurvePair, apply_tilt, theta_grid
from minannuli.errors import DomainError

coef = st.floats(-2.0, 2.0, allow_nan=False)
curves = st.dictionaries(st.integers(0, 6), st.tuples(coef, coef), max_size=5).map(BoundaryCurve)


def test_terms_are_cleaned():
    c = BoundaryCurve({0: (1.0, 5.0), 2: (0.0, 0.0), 3: (0.1, 0.2)})
    assert c.terms == {0: (1.0, 0.0), 3: (0.1, 0.2)}
    assert c.degree == 3 and c.mean() == 1.0


def test_term_list_format_round_trip():
    c = BoundaryCurve.from_terms([{"k": 1, "a": 0.5}, {"k": 2, "b": -0.25}, {"k": 1, "a": 0.5}])
    assert c.terms == {1: (1.0, 0.0), 2: (0.0, -0.25)}
    assert BoundaryCurve.from_terms(c.to_terms()) == c


def test_invalid_terms():
    with pytest.raises(DomainError):
        BoundaryCurve({-1: (1.0, 0.0)})
    with pytest.raises(DomainError):
        BoundaryCurve({1: (math.nan, 0.0)})
    with pytest.raises(DomainError):
        theta_grid(0)


@given(curves)
def test_samples_round_trip(c):
    n = 2 * c.degree + 3
    back = BoundaryCurve.from_samples(c.samples(n), tol=1e-12)
    th = theta_grid(64)
    np.testing.assert_allclose(back(th), c(th), atol=1e-11)


@given(curves, st.floats(-4.0, 4.0))
def test_rotation_shifts_the_argument(c, zeta):
    th = theta_grid(32)
    np.testing.assert_allclose(c.rotated(zeta)(th), c(th - zeta), atol=1e-11)


@given(curves)
def test_derivative_matches_finite_differences(c):
    th = theta_grid(16)
    s = 1e-6
    fd = (c(th + s) - c(th - s)) / (2 * s)
    np.testing.assert_allclose(c(th, derivative=1), fd, atol=1e-6)


def test_symmetry_and_arithmetic():
    c = BoundaryCurve({0: (0.3, 0.0), 4: (0.1, 0.2)})
    assert c.symmetric_under(2) and c.symmetric_under(4) and not c.symmetric_under(3)
    d = (c + 1.0) - c
    assert d.terms == {0: (1.0, 0.0)}
    assert (-c).scaled(-1.0) == c
    assert c.is_constant() is False and BoundaryCurve.constant(2.0).is_constant()


def test_tilt_adds_the_killing_terms():
    c = apply_tilt(BoundaryCurve.constant(1.0), 0.5, 0.2, -0.1)
    assert c.terms == {0: (1.5, 0.0), 1: (0.2, -0.1)}


def test_pair_helpers():
    p = CurvePair.catenoid(0.7)
    np.testing.assert_allclose(p.gap(8), 1.4)
    assert CurvePair.from_dict(p.to_dict()) == p
    q = p.tilted(a1=0.3)
    assert q.degree == 1 and not q.symmetric_under(2)
    assert p.symmetric_under(5)
