"""Radial ladder operators, the transverse operator Delta and the helicity operator.

The six first-order operators act on functions of r at fixed azimuthal
number m::

    a  = g (d/dr + m/r)        b  = g (-d/dr + m/r)
    a+ = g (d/dr + (m+1)/r)    b+ = g (-d/dr + (m+1)/r)
    a- = g (d/dr + (m-1)/r)    b- = g (-d/dr + (m-1)/r)

with g = 1/sqrt(2), and ``b- a = a+ b = Delta = (-f'' - f'/r + m^2 f/r^2)/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from . import fd
from .specfun import bessel_j, bessel_y

GAMMA = 1.0 / math.sqrt(2.0)

# kind -> (sign of d/dr, shift of m)
LADDER = {
    "a": (1, 0),
    "a+": (1, 1),
    "a-": (1, -1),
    "b": (-1, 0),
    "b+": (-1, 1),
    "b-": (-1, -1),
}
# accept the unicode spellings used in notes and on the command line
_ALIASES = {"a₊": "a+", "a₋": "a-", "b₊": "b+", "b₋": "b-"}

COMPONENT_NAMES = ("Phi0", "Phi1", "Phi2", "Phi3", "E1", "E2", "E3", "H1", "H2", "H3")


def _kind(kind: str) -> tuple[int, int]:
    kind = _ALIASES.get(kind, kind)
    try:
        return LADDER[kind]
    except KeyError:
        raise ValueError(f"unknown ladder operator {kind!r}; expected one of {sorted(LADDER)}") from None


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise ValueError("ladder operators need r > 0")
    return r


class RadialProfile:
    """A function of r tagged with the azimuthal number the operators use."""

    m: int

    def __call__(self, r, n: int = 0):
        raise NotImplementedError


@dataclass(frozen=True)
class BesselProfile(RadialProfile):
    """r -> J_order(sqrt(lam) r) or Y_order(sqrt(lam) r), derivatives exact.

    ``m`` defaults to ``order``; the shifted profiles of a mode carry the
    mode's m with order m -/+ 1.
    """

    order: int
    lam: float
    kind: str = "J"
    m: int | None = None

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"separation constant must be > 0, got {self.lam}")
        if self.kind not in ("J", "Y"):
            raise ValueError(f"radial kind must be 'J' or 'Y', got {self.kind!r}")
        if self.m is None:
            object.__setattr__(self, "m", self.order)

    def __call__(self, r, n: int = 0):
        r = np.asarray(r, dtype=float)
        k = math.sqrt(self.lam)
        x = k * r
        fn = bessel_j if self.kind == "J" else bessel_y
        v, d = fn(self.order, x)
        if n == 0:
            return v
        if n == 1:
            return k * d
        if n == 2:
            # Bessel ODE: f'' = -f'/x - (1 - nu^2/x^2) f
            return self.lam * (-d / x - (1.0 - self.order**2 / x**2) * v)
        raise ValueError("derivatives above second order are not provided")


@dataclass(frozen=True)
class FunctionProfile(RadialProfile):
    """Generic profile; missing derivatives come from 4th-order central differences."""

    m: int
    f: Callable
    df: Callable | None = None
    d2f: Callable | None = None

    def _step(self, r):
        return 1e-4 * np.maximum(1.0, np.abs(r))

    def __call__(self, r, n: int = 0):
        r = np.asarray(r, dtype=float)
        if n == 0:
            return self.f(r)
        if n == 1:
            if self.df is not None:
                return self.df(r)
            h = self._step(r)
            return fd.diff(self.f, r, h, 1, order=4)
        if n == 2:
            if self.d2f is not None:
                return self.d2f(r)
            h = self._step(r)
            if self.df is not None:
                return fd.diff(self.df, r, h, 1, order=4)
            return fd.diff(self.f, r, h, 2, order=4)
        raise ValueError("derivatives above second order are not provided")


@dataclass(frozen=True)
class LadderImage(RadialProfile):
    """The profile obtained by applying one ladder operator to another profile."""

    kind: str
    base: RadialProfile
    m: int

    def __call__(self, r, n: int = 0):
        r = _check_r(r)
        sign, shift = _kind(self.kind)
        c = self.m + shift
        if n == 0:
            return GAMMA * (sign * self.base(r, 1) + c / r * self.base(r))
        if n == 1:
            return GAMMA * (sign * self.base(r, 2) + c / r * self.base(r, 1) - c / r**2 * self.base(r))
        if n == 2:
            h = 1e-4 * np.maximum(1.0, r)
            return fd.diff(lambda s: self(s, 1), r, h, 1, order=4)
        raise ValueError("derivatives above second order are not provided")


def ladder_apply(kind: str, f: RadialProfile, r, m: int | None = None):
    """Value of (kind f)(r); ``m`` overrides the profile's azimuthal number."""
    r = _check_r(r)
    return ladder_samples(kind, f.m if m is None else m, f(r), f(r, 1), r)


def ladder(kind: str, f: RadialProfile, m: int | None = None) -> LadderImage:
    _kind(kind)
    return LadderImage(_ALIASES.get(kind, kind), f, f.m if m is None else m)


def ladder_samples(kind: str, m: int, value, d_r, r):
    """Ladder action from sampled value and radial derivative."""
    sign, shift = _kind(kind)
    return GAMMA * (sign * d_r + (m + shift) / r * value)


def delta_apply(f: RadialProfile, r, m: int | None = None):
    r = _check_r(r)
    m = f.m if m is None else m
    return 0.5 * (-f(r, 2) - f(r, 1) / r + m * m / r**2 * f(r))


# ----------------------------------------------------------------------------
# ten-component fields


@dataclass
class TenComponent:
    """Values (Phi0, Phi_1..3, E_1..3, H_1..3), stacked along axis 0."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape[0] != 10:
            raise ValueError(f"expected 10 components on axis 0, got shape {self.data.shape}")

    @classmethod
    def from_parts(cls, phi0, phi, e, h) -> "TenComponent":
        shape = np.broadcast(phi0, *phi, *e, *h).shape
        parts = [phi0, *phi, *e, *h]
        return cls(np.stack([np.broadcast_to(np.asarray(p, dtype=complex), shape) for p in parts]))

    @classmethod
    def zeros(cls, shape: tuple = ()) -> "TenComponent":
        return cls(np.zeros((10, *shape), dtype=complex))

    @property
    def phi0(self):
        return self.data[0]

    @property
    def phi(self):
        return self.data[1:4]

    @property
    def E(self):
        return self.data[4:7]

    @property
    def H(self):
        return self.data[7:10]

    def triplets(self):
        return {"Phi": self.phi, "E": self.E, "H": self.H}

    def __add__(self, other):
        return TenComponent(self.data + other.data)

    def __sub__(self, other):
        return TenComponent(self.data - other.data)

    def __mul__(self, c):
        return TenComponent(self.data * c)

    __rmul__ = __mul__


class Field(Protocol):
    """Anything that evaluates a ten-component field on (r, z) arrays."""

    m: int

    def evaluate(self, r, z) -> TenComponent: ...


@dataclass
class FieldDerivatives:
    value: TenComponent
    d_r: TenComponent
    d_z: TenComponent


def field_derivatives(field: Field, r, z, h: float, order: int = 2) -> FieldDerivatives:
    """Field value and central-difference partials at the points (r, z)."""
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    offsets, _ = fd.stencil(1, order)
    if np.any(r - max(abs(k) for k in offsets) * h <= 0):
        raise ValueError(f"point too close to r=0 for a stencil of step {h:g}")
    value = field.evaluate(r, z)
    d_r = fd.diff(lambda s: field.evaluate(s, z).data, r, h, 1, order)
    d_z = fd.diff(lambda s: field.evaluate(r, s).data, z, h, 1, order)
    return FieldDerivatives(value, TenComponent(d_r), TenComponent(d_z))


def helicity_terms(d: FieldDerivatives, r, z, m: int) -> TenComponent:
    """Sigma acting on sampled data; every vector triplet transforms alike."""
    r = np.asarray(r, dtype=float)
    ez = np.exp(np.asarray(z, dtype=float))
    out = np.zeros_like(d.value.data)
    for start in (1, 4, 7):
        x1, x2, x3 = d.value.data[start : start + 3]
        dr1, dr2, dr3 = d.d_r.data[start : start + 3]
        dz1, dz3 = d.d_z.data[start], d.d_z.data[start + 2]
        out[start] = ez * ladder_samples("a", m, x2, dr2, r) + (dz1 - x1)
        out[start + 1] = -ez * ladder_samples("b-", m, x1, dr1, r) + ez * ladder_samples("a+", m, x3, dr3, r)
        out[start + 2] = -ez * ladder_samples("b", m, x2, dr2, r) - (dz3 - x3)
    return TenComponent(out)


def helicity_apply(field: Field, r, z, h: float = 1e-3, order: int = 2) -> TenComponent:
    """Sigma Psi at (r, z) with derivatives from central differences of step h."""
    d = field_derivatives(field, r, z, h, order)
    return helicity_terms(d, r, z, field.m)
