"""Bessel-type functions with first derivatives.

Real-order J, Y, I, K delegate to :mod:`scipy.special`.  The Macdonald
function of imaginary order, K_{i kappa}(x), is not available there and is
evaluated from

    K_{i kappa}(x) = int_0^inf exp(-x cosh t) cos(kappa t) dt

by adaptive quadrature, with a trapezoidal rule as an independent second path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

# integrand cutoff: exp(-x (cosh t - 1)) below this is dropped
TRUNCATION = 1e-18


class AccuracyLossError(ArithmeticError):
    """Requested accuracy not reached; ``achieved`` holds the estimated error."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class SpecialFunctionValue:
    value: np.ndarray | float | complex
    derivative: np.ndarray | float | complex

    def __iter__(self):
        yield self.value
        yield self.derivative


def _pack(value, derivative):
    if np.ndim(value) == 0:
        return SpecialFunctionValue(value[()] if isinstance(value, np.ndarray) else value,
                                    derivative[()] if isinstance(derivative, np.ndarray) else derivative)
    return SpecialFunctionValue(value, derivative)


def _as_array(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise ValueError("argument contains NaN")
    return x


def bessel_j(nu: float, x) -> SpecialFunctionValue:
    """J_nu(x) and J_nu'(x) for real order and x >= 0."""
    x = _as_array(x)
    if np.any(x < 0):
        raise ValueError("bessel_j needs x >= 0; use the modified functions for imaginary arguments")
    if np.any(x == 0) and nu < 0 and not float(nu).is_integer():
        raise ValueError(f"J_{nu}(0) is singular for negative non-integer order")
    return _pack(special.jv(nu, x), special.jvp(nu, x))


def bessel_y(nu: float, x) -> SpecialFunctionValue:
    """Y_nu(x) and Y_nu'(x) for real order and x > 0."""
    x = _as_array(x)
    if np.any(x <= 0):
        raise ValueError("bessel_y needs x > 0")
    return _pack(special.yv(nu, x), special.yvp(nu, x))


def bessel_i(nu: float, x) -> SpecialFunctionValue:
    x = _as_array(x)
    if np.any(x < 0):
        raise ValueError("bessel_i needs x >= 0")
    if np.any(x == 0) and nu < 0 and not float(nu).is_integer():
        raise ValueError(f"I_{nu}(0) is singular for negative non-integer order")
    return _pack(special.iv(nu, x), special.ivp(nu, x))


def bessel_k(nu: float, x) -> SpecialFunctionValue:
    x = _as_array(x)
    if np.any(x <= 0):
        raise ValueError("bessel_k needs x > 0")
    return _pack(special.kv(nu, x), special.kvp(nu, x))


def _cutoff(x: float, weight_log: bool) -> float:
    """Upper limit T with exp(-x (cosh T - 1)) [* cosh T] < TRUNCATION."""
    big = -math.log(TRUNCATION)
    c = 1.0 + big / x
    if weight_log:
        for _ in range(8):
            c = 1.0 + (big + math.log(c)) / x
    return math.acosh(c)


def _integrands(x: float, kappa: float):
    # exp(-x) is factored out so that large x keeps full relative accuracy
    def value(t):
        return np.exp(-x * (np.cosh(t) - 1.0)) * np.cos(kappa * t)

    def slope(t):
        return -np.cosh(t) * np.exp(-x * (np.cosh(t) - 1.0)) * np.cos(kappa * t)

    return value, slope


def _quad(f, upper: float, kappa: float):
    # one subinterval per half-period keeps the oscillation resolved
    limit = max(200, int(4 * kappa * upper / math.pi) + 50)
    # full_output silences quad's own warnings (thread-safely); the caller checks err
    val, err, *_ = integrate.quad(f, 0.0, upper, epsabs=1e-16, epsrel=1e-14, limit=limit, full_output=1)
    return val, err


def _trapezoid(f, upper: float) -> float:
    """Trapezoidal rule for an even, doubly-exponentially decaying integrand."""
    n = 64
    prev = None
    while True:
        t, h = np.linspace(0.0, upper, n + 1, retstep=True)
        y = f(t)
        cur = h * (0.5 * y[0] + y[1:].sum())
        if prev is not None and abs(cur - prev) <= 1e-15 * max(1.0, abs(cur)):
            return cur
        if n > 2**20:
            return cur
        prev, n = cur, 2 * n


@lru_cache(maxsize=65536)
def _kimag_scalar(kappa: float, x: float, method: str, rtol: float, atol: float):
    value_f, slope_f = _integrands(x, kappa)
    scale = math.exp(-x)
    if method == "trapezoid":
        v = _trapezoid(value_f, _cutoff(x, False))
        d = _trapezoid(slope_f, _cutoff(x, True))
        return v * scale, d * scale
    v, ev = _quad(value_f, _cutoff(x, False), kappa)
    d, ed = _quad(slope_f, _cutoff(x, True), kappa)
    for name, got, err in (("value", v, ev), ("derivative", d, ed)):
        if err > rtol * abs(got) + atol:
            raise AccuracyLossError(
                f"K_(i{kappa:g})({x:g}) {name}: quadrature error {err:.2e} exceeds the "
                f"requested tolerance (relative {rtol:.0e}); argument too small for this order",
                achieved=err / max(abs(got), 1e-300),
            )
    return v * scale, d * scale


def macdonald_imag_order(
    kappa: float, x, method: str = "quad", rtol: float = 1e-10, atol: float = 1e-14
) -> SpecialFunctionValue:
    """K_{i kappa}(x) and its x-derivative; real-valued for real kappa, x > 0.

    ``method`` is ``"quad"`` (adaptive Gauss-Kronrod, the default) or
    ``"trapezoid"``.  ``rtol``/``atol`` bound the error estimate of the
    adaptive rule relative to the scaled integral; beyond them
    :class:`AccuracyLossError` is raised.
    """
    if kappa < 0:
        raise ValueError("kappa must be >= 0 (K_{-i kappa} = K_{i kappa})")
    if method not in ("quad", "trapezoid"):
        raise ValueError(f"unknown quadrature method {method!r}")
    x = _as_array(x)
    if np.any(x <= 0):
        raise ValueError("macdonald_imag_order needs x > 0")
    flat = x.ravel()
    vals = np.empty(flat.shape)
    ders = np.empty(flat.shape)
    for i, xi in enumerate(flat):
        vals[i], ders[i] = _kimag_scalar(float(kappa), float(xi), method, rtol, atol)
    return _pack(vals.reshape(x.shape), ders.reshape(x.shape))


def modified_bessel(order: complex, x, kind: str = "decaying") -> SpecialFunctionValue:
    """K_order (decaying) or I_order (growing) for real or purely imaginary order."""
    order = complex(order)
    if kind not in ("decaying", "growing"):
        raise ValueError(f"kind must be 'decaying' or 'growing', got {kind!r}")
    if order.imag == 0:
        nu = order.real
        return bessel_k(nu, x) if kind == "decaying" else bessel_i(nu, x)
    if order.real != 0:
        raise ValueError(f"order must be real or purely imaginary, got {order}")
    if kind == "growing":
        raise ValueError("only the decaying (Macdonald) branch is provided for imaginary order")
    return macdonald_imag_order(abs(order.imag), x)


FUNCTIONS = {
    "J": bessel_j,
    "Y": bessel_y,
    "I": bessel_i,
    "K": bessel_k,
    "Kimag": macdonald_imag_order,
}
