"""Central finite-difference stencils shared by the operator and residual layers."""

from __future__ import annotations

from typing import Callable

import numpy as np

# (offsets, weights) for the first and second derivative, by accuracy order.
_FIRST = {
    2: ((-1, 1), (-0.5, 0.5)),
    4: ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
}
_SECOND = {
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    4: ((-2, -1, 0, 1, 2), (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
}


def stencil(derivative: int, order: int):
    table = _FIRST if derivative == 1 else _SECOND
    if derivative not in (1, 2) or order not in table:
        raise ValueError(f"no central stencil for derivative={derivative}, order={order}")
    return table[order]


def diff(f: Callable, x, h: float, derivative: int = 1, order: int = 2):
    """Central difference of ``f`` at ``x`` (array-valued ``f`` allowed)."""
    offsets, weights = stencil(derivative, order)
    acc = 0.0
    for k, w in zip(offsets, weights):
        acc = acc + w * f(x + k * h)
    return acc / h**derivative


def richardson_weight(order: int) -> float:
    """Factor 2**order used to cancel the leading O(h**order) error term."""
    return 2.0**order


def extrapolate(coarse, fine, order: int = 2):
    """Combine results at h and h/2 to cancel the leading error term."""
    w = richardson_weight(order)
    return (w * np.asarray(fine) - np.asarray(coarse)) / (w - 1.0)


def observed_order(err_h: float, err_h2: float) -> float:
    """log2 of the error ratio between step h and h/2; nan if undefined."""
    if not (err_h > 0 and err_h2 > 0) or not np.isfinite(err_h / err_h2):
        return float("nan")
    return float(np.log2(err_h / err_h2))
