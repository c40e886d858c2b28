import math

import numpy as np
import pytest

from dkp_h3.geometry import (
    PHI,
    R,
    StepSizeWarning,
    T,
    Z,
    FieldPoint,
    christoffel_at,
    christoffel_numeric,
    metric_at,
    ricci_rotation,
    ricci_rotation_contracted,
    ricci_rotation_numeric,
    tetrad_covariant_derivative,
    tetrad_lower,
    tetrad_upper,
)
from dkp_h3.verify import geometry_suite


def test_point_rejects_axis():
    with pytest.raises(ValueError):
        FieldPoint(0.0, 0.0)
    with pytest.raises(ValueError):
        FieldPoint(-1.0, 0.0)


def test_metric_diagonal():
    g = metric_at(FieldPoint(2.0, 0.5)).matrix()
    e = math.exp(-1.0)
    assert np.allclose(np.diag(g), [1, -e, -4 * e, -1])
    assert np.count_nonzero(g - np.diag(np.diag(g))) == 0


def test_tetrad_reproduces_metric():
    p = FieldPoint(1.3, -0.4)
    up, lo = tetrad_upper(p), tetrad_lower(p)
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    # g_ab = e_(c)a e_(d)b eta^cd
    assert np.allclose(lo.T @ eta @ lo, metric_at(p).matrix())
    # e^beta_(a) e_(b)beta = eta_ab
    assert np.allclose(up @ lo.T, eta)


def test_christoffel_example_values():
    p = FieldPoint(1.0, 0.0)
    G = christoffel_at(p).values
    assert G[R, R, Z] == pytest.approx(-1.0)
    assert G[R, PHI, PHI] == pytest.approx(-1.0)
    assert G[PHI, R, PHI] == pytest.approx(1.0)
    assert G[Z, R, R] == pytest.approx(1.0)
    assert G[Z, PHI, PHI] == pytest.approx(1.0)
    assert np.all(G[T] == 0)


def test_christoffel_symmetric_lower():
    G = christoffel_at(FieldPoint(0.7, 1.2)).values
    assert np.array_equal(G, G.transpose(0, 2, 1))


def test_christoffel_against_oracle_at_random_points(rng):
    worst = 0.0
    for _ in range(30):
        p = FieldPoint(rng.uniform(0.1, 5.0), rng.uniform(-2.0, 2.0))
        worst = max(worst, np.max(np.abs(christoffel_at(p).values - christoffel_numeric(p).values)))
    assert worst <= 1e-7


def test_ricci_example():
    p = FieldPoint(2.0, 0.0)
    g = ricci_rotation(p).values
    assert g[3, 1, 1] == -1 and g[2, 3, 2] == 1
    assert g[1, 2, 2] == pytest.approx(0.5)
    assert set(ricci_rotation(p).nonzero()) == {
        (3, 1, 1), (1, 3, 1), (2, 3, 2), (3, 2, 2), (1, 2, 2), (2, 1, 2)
    }


def test_ricci_contracted_and_numeric_agree(rng):
    for _ in range(10):
        p = FieldPoint(rng.uniform(0.1, 5.0), rng.uniform(-2.0, 2.0))
        closed = ricci_rotation(p).values
        assert np.max(np.abs(closed - ricci_rotation_contracted(p).values)) <= 1e-12 * max(1, np.abs(closed).max())
        assert np.max(np.abs(closed - ricci_rotation_numeric(p).values)) <= 1e-7


def test_ricci_antisymmetric_in_first_pair(rng):
    for _ in range(10):
        p = FieldPoint(rng.uniform(0.1, 5.0), rng.uniform(-2.0, 2.0))
        g = ricci_rotation_contracted(p).values
        assert np.max(np.abs(g + g.transpose(1, 0, 2))) <= 1e-12
        exact = ricci_rotation(p).values
        assert np.array_equal(exact, -exact.transpose(1, 0, 2))


def test_covariant_derivative_of_time_leg_vanishes():
    D = tetrad_covariant_derivative(0, FieldPoint(1.5, 0.3))
    assert np.allclose(D, 0.0)


def test_tiny_step_warns():
    with pytest.warns(StepSizeWarning):
        christoffel_numeric(FieldPoint(1.0, 0.0), h=1e-9)


def test_suite_all_rows_pass():
    rows = geometry_suite(n_points=100, seed=0)
    assert all(r["pass"] for r in rows), rows
