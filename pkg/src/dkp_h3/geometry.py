"""Horospherical geometry of H3 (times a flat time axis).

Coordinates are ordered ``(t, r, phi, z)`` everywhere; curvature radius is 1.
The metric is

    dS^2 = dt^2 - exp(-2z) (dr^2 + r^2 dphi^2) - dz^2

and the tetrad is the diagonal one, ``e^beta_(a) = diag(1, e^z, e^z/r, 1)``.
Closed-form tables are paired with numeric-differentiation oracles built only
from :func:`metric_at` and :func:`tetrad_lower`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import fd

T, R, PHI, Z = 0, 1, 2, 3
COORDS = ("t", "r", "phi", "z")


class StepSizeWarning(UserWarning):
    """Finite-difference step small enough for cancellation to dominate."""


@dataclass(frozen=True)
class FieldPoint:
    r: float
    z: float

    def __post_init__(self):
        if not (np.isfinite(self.r) and np.isfinite(self.z)):
            raise ValueError(f"non-finite point ({self.r}, {self.z})")
        if self.r <= 0:
            raise ValueError(f"r must be > 0 (axis r=0 is singular), got {self.r}")

    def shifted(self, axis: int, dx: float) -> "FieldPoint":
        if axis == R:
            return FieldPoint(self.r + dx, self.z)
        if axis == Z:
            return FieldPoint(self.r, self.z + dx)
        # the metric does not depend on t or phi
        return self


@dataclass(frozen=True)
class MetricTensor:
    g_tt: float
    g_rr: float
    g_phiphi: float
    g_zz: float

    @property
    def diagonal(self) -> np.ndarray:
        return np.array([self.g_tt, self.g_rr, self.g_phiphi, self.g_zz])

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal)

    def inverse(self) -> np.ndarray:
        return np.diag(1.0 / self.diagonal)


@dataclass(frozen=True)
class ChristoffelTable:
    """``values[i, j, k] = Gamma^i_{jk}`` over all four coordinates."""

    values: np.ndarray

    @property
    def spatial(self) -> np.ndarray:
        """The (r, phi, z) block; the t-row and t-columns vanish identically."""
        return self.values[1:, 1:, 1:]

    def __getitem__(self, idx):
        return self.values[idx]


@dataclass(frozen=True)
class RicciTable:
    """``values[a, b, c] = gamma_{abc}`` with tetrad indices 0..3."""

    values: np.ndarray

    def __getitem__(self, idx):
        return self.values[idx]

    def nonzero(self, atol: float = 0.0) -> dict[tuple[int, int, int], float]:
        idx = np.argwhere(np.abs(self.values) > atol)
        return {tuple(int(i) for i in ijk): float(self.values[tuple(ijk)]) for ijk in idx}


def metric_at(p: FieldPoint) -> MetricTensor:
    s = np.exp(-2.0 * p.z)
    return MetricTensor(1.0, -s, -p.r**2 * s, -1.0)


def tetrad_upper(p: FieldPoint) -> np.ndarray:
    """``E[a, beta] = e^beta_(a)``."""
    ez = np.exp(p.z)
    return np.diag([1.0, ez, ez / p.r, 1.0])


def tetrad_lower(p: FieldPoint) -> np.ndarray:
    """``E[a, beta] = e_(a)beta``; signs follow the (+,-,-,-) signature."""
    emz = np.exp(-p.z)
    return np.diag([1.0, -emz, -p.r * emz, -1.0])


def christoffel_at(p: FieldPoint) -> ChristoffelTable:
    r, s = p.r, np.exp(-2.0 * p.z)
    g = np.zeros((4, 4, 4))
    g[R, R, Z] = g[R, Z, R] = -1.0
    g[R, PHI, PHI] = -r
    g[PHI, R, PHI] = g[PHI, PHI, R] = 1.0 / r
    g[PHI, PHI, Z] = g[PHI, Z, PHI] = -1.0
    g[Z, R, R] = s
    g[Z, PHI, PHI] = r * r * s
    return ChristoffelTable(g)


def _metric_gradient(p: FieldPoint, h: float) -> np.ndarray:
    """``dg[l, j, k] = d_l g_jk`` by 4th-order central differences, Richardson-polished."""
    dg = np.zeros((4, 4, 4))
    for axis in (R, Z):
        def g(dx, axis=axis):
            return metric_at(p.shifted(axis, dx)).matrix()

        d_h = fd.diff(g, 0.0, h, 1, order=4)
        d_2h = fd.diff(g, 0.0, 2 * h, 1, order=4)
        # fallback when the two steps disagree beyond the expected h^4 gap
        if np.max(np.abs(d_h - d_2h)) > 1e-9 * max(1.0, np.max(np.abs(d_h))):
            d_h = fd.extrapolate(d_2h, d_h, order=4)
        dg[axis] = d_h
    return dg


def _check_step(p: FieldPoint, h: float) -> None:
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    scale = max(1.0, abs(p.r), abs(p.z))
    if h < 1e-6 * scale:
        warnings.warn(
            f"step h={h:g} is small enough for roundoff cancellation "
            f"(expected error ~{np.finfo(float).eps / h:.1e})",
            StepSizeWarning,
            stacklevel=3,
        )


def christoffel_numeric(p: FieldPoint, h: float = 1e-4) -> ChristoffelTable:
    """Christoffel symbols from finite differences of :func:`metric_at`."""
    _check_step(p, h)
    dg = _metric_gradient(p, h)
    # Gamma_{l,jk} = 1/2 (-d_l g_jk + d_j g_lk + d_k g_lj)
    lowered = 0.5 * (-dg + np.einsum("jlk->ljk", dg) + np.einsum("klj->ljk", dg))
    ginv = metric_at(p).inverse()
    return ChristoffelTable(np.einsum("il,ljk->ijk", ginv, lowered))


def tetrad_covariant_derivative(
    a: int, p: FieldPoint, christoffel: ChristoffelTable | None = None, h: float | None = None
) -> np.ndarray:
    """``D[beta, alpha] = e_(a)beta;alpha`` (row beta, column alpha).

    With the defaults everything is closed form.  Passing ``h`` switches both
    the partial derivative of the lower tetrad and (unless ``christoffel`` is
    given) the connection to finite differences.
    """
    if a not in (0, 1, 2, 3):
        raise ValueError(f"tetrad index must be 0..3, got {a}")
    if h is None:
        partial = _tetrad_lower_gradient_exact(a, p)
        gam = christoffel if christoffel is not None else christoffel_at(p)
    else:
        partial = np.zeros((4, 4))
        for axis in (R, Z):
            partial[:, axis] = fd.diff(
                lambda dx, axis=axis: tetrad_lower(p.shifted(axis, dx))[a], 0.0, h, 1, order=4
            )
        gam = christoffel if christoffel is not None else christoffel_numeric(p, h)
    e_low = tetrad_lower(p)[a]
    # A_{beta;alpha} = d_alpha A_beta - Gamma^sigma_{alpha beta} A_sigma
    return partial - np.einsum("sab,s->ba", gam.values, e_low)


def _tetrad_lower_gradient_exact(a: int, p: FieldPoint) -> np.ndarray:
    out = np.zeros((4, 4))
    emz = np.exp(-p.z)
    if a == 1:
        out[R, Z] = emz
    elif a == 2:
        out[PHI, R] = -emz
        out[PHI, Z] = p.r * emz
    return out


def ricci_rotation(p: FieldPoint) -> RicciTable:
    """Closed-form Ricci rotation coefficients of the diagonal tetrad."""
    g = np.zeros((4, 4, 4))
    g[3, 1, 1], g[1, 3, 1] = -1.0, 1.0
    g[2, 3, 2], g[3, 2, 2] = 1.0, -1.0
    k = np.exp(p.z) / p.r
    g[1, 2, 2], g[2, 1, 2] = k, -k
    return RicciTable(g)


def ricci_rotation_contracted(
    p: FieldPoint, christoffel: ChristoffelTable | None = None, h: float | None = None
) -> RicciTable:
    """``gamma_abc = e^beta_(a) e_(b)beta;alpha e^alpha_(c)`` by explicit contraction."""
    up = tetrad_upper(p)
    if h is not None and christoffel is None:
        christoffel = christoffel_numeric(p, h)
    d = np.stack([tetrad_covariant_derivative(b, p, christoffel, h) for b in range(4)])
    return RicciTable(np.einsum("ab,kbc,dc->akd", up, d, up))


def ricci_rotation_numeric(p: FieldPoint, h: float = 1e-4) -> RicciTable:
    """Same contraction, with every derivative taken numerically."""
    _check_step(p, h)
    return ricci_rotation_contracted(p, h=h)
