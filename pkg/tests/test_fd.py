import numpy as np
import pytest

from dkp_h3 import fd


@pytest.mark.parametrize("order", [2, 4])
def test_first_derivative_of_sin(order):
    x = np.linspace(0.1, 2.0, 7)
    approx = fd.diff(np.sin, x, 1e-3, 1, order)
    assert np.max(np.abs(approx - np.cos(x))) < (1e-6 if order == 2 else 1e-11)


def test_second_derivative_of_exp():
    x = np.linspace(-1.0, 1.0, 5)
    assert np.allclose(fd.diff(np.exp, x, 1e-3, 2, 4), np.exp(x), rtol=1e-9)


def test_extrapolation_removes_leading_error():
    x, h = 0.7, 1e-2
    coarse = fd.diff(np.sin, x, h)
    fine = fd.diff(np.sin, x, h / 2)
    better = fd.extrapolate(coarse, fine, 2)
    assert abs(better - np.cos(x)) < 0.01 * abs(fine - np.cos(x))


def test_observed_order():
    assert fd.observed_order(4e-6, 1e-6) == pytest.approx(2.0)


def test_unknown_stencil():
    with pytest.raises(ValueError):
        fd.stencil(3, 2)
