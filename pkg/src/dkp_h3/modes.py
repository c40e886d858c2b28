"""Exact spin-1 modes in horospherical coordinates.

Three families are assembled as ten-component fields (Phi0, Phi, E, H); the
phase exp(-i eps t) exp(i m phi) is factored out.

* ``sigma``: helicity eigenvalue sigma != 0, Phi0 = 0, E and H proportional to
  Phi.  Closes only when eps^2 + sigma^2 = M^2 (see :func:`dispersion_residual`).
* ``sigma0``: sigma = 0, massive, generated by a scalar master field Phi0.
* ``massless``: gradient-type fields with E = H = 0 built from any scalar Phi0.

Radial dependence is Bessel J_m / Y_m of sqrt(lam) r; axial dependence is a
modified Bessel function of sqrt(lam) exp(z), of imaginary order on the
propagating branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .operators import GAMMA, BesselProfile, TenComponent
from .specfun import modified_bessel

FAMILIES = ("sigma", "sigma0", "massless", "custom")


class DegenerateFamilyError(ValueError):
    """Quantum numbers at which a family's construction divides by zero."""


@dataclass(frozen=True)
class QuantumNumbers:
    eps: float
    m: int
    sigma: complex = 0j
    lam: float | None = 1.0
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sigma", complex(self.sigma))
        if int(self.m) != self.m:
            raise ValueError(f"azimuthal number must be an integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if self.lam is not None and not self.lam > 0:
            raise ValueError(f"separation constant must be > 0, got {self.lam}")
        if not self.mass >= 0:
            raise ValueError(f"mass must be >= 0, got {self.mass}")
        if not math.isfinite(self.eps):
            raise ValueError("energy must be finite")

    @property
    def kappa(self) -> float:
        """Imaginary part of sigma (the propagating branch has sigma = i kappa)."""
        return self.sigma.imag


def dispersion_residual(eps: float, sigma: complex, mass: float) -> float:
    """|eps^2 + sigma^2 - M^2|: zero iff the proportional triplet closes.

    With E = -i eps Phi / M and H = -i sigma Phi / M the relation
    i eps E + i sigma H = M Phi becomes (eps^2 + sigma^2) Phi = M^2 Phi.
    """
    if not mass > 0:
        raise ValueError("dispersion closure needs M > 0")
    return abs(eps * eps + complex(sigma) ** 2 - mass * mass)


def propagating_sigma(eps: float, mass: float) -> complex:
    """sigma = i sqrt(eps^2 - M^2) for eps > M, the root used by default."""
    return 1j * math.sqrt(eps * eps - mass * mass) if eps * eps >= mass * mass else math.sqrt(mass * mass - eps * eps)


def _order(value: complex) -> complex:
    value = complex(value)
    if value.real != 0 and value.imag != 0:
        raise ValueError(f"order must be real or purely imaginary, got {value}")
    return value


@dataclass(frozen=True)
class AxialSolution:
    """z -> K_order(sqrt(lam) e^z) (decaying) or I_order(...) (growing).

    Solves (d^2/dz^2 - order^2) f = lam e^{2z} f.
    """

    order: complex
    lam: float
    kind: str = "decaying"

    def __post_init__(self):
        object.__setattr__(self, "order", _order(self.order))
        if not self.lam > 0:
            raise ValueError(f"separation constant must be > 0, got {self.lam}")
        if self.kind not in ("decaying", "growing"):
            raise ValueError(f"axial kind must be 'decaying' or 'growing', got {self.kind!r}")
        if self.order.imag != 0 and self.kind == "growing":
            raise ValueError("imaginary order is provided on the decaying branch only")

    def __call__(self, z, n: int = 0):
        z = np.asarray(z, dtype=float)
        uz, inverse = np.unique(z, return_inverse=True)
        x = math.sqrt(self.lam) * np.exp(uz)
        v, d = modified_bessel(self.order, x, self.kind)
        v, d = np.asarray(v, dtype=float), np.asarray(d, dtype=float)
        if n == 0:
            out = v
        elif n == 1:
            out = x * d
        elif n == 2:
            out = ((self.order**2).real + x * x) * v
        else:
            raise ValueError("derivatives above second order are not provided")
        return out[inverse].reshape(z.shape)


def radial_profile(m: int, lam: float, kind: str = "J") -> BesselProfile:
    """r -> J_m(sqrt(lam) r) or Y_m(sqrt(lam) r); eigenfunction of 2 Delta with eigenvalue lam."""
    return BesselProfile(order=m, lam=lam, kind=kind, m=m)


def axial_profile(sigma: complex, lam: float, kind: str = "decaying") -> AxialSolution:
    return AxialSolution(order=sigma, lam=lam, kind=kind)


def scalar_axial_order(eps: float, mass: float) -> complex:
    """Order nu of the sigma = 0 axial factor, nu^2 = 1 - eps^2 + M^2."""
    nu2 = 1.0 - eps * eps + mass * mass
    return complex(math.sqrt(nu2)) if nu2 >= 0 else 1j * math.sqrt(-nu2)


@dataclass(frozen=True)
class ScalarField:
    """Scalar function of (r, z) with azimuthal number m and its first partials."""

    m: int
    value: Callable
    d_r: Callable
    d_z: Callable
    label: str = "scalar"

    def __call__(self, r, z):
        return self.value(r, z)


@dataclass(frozen=True)
class SeparatedScalar:
    """Phi0 = R(r) F(z) with R Bessel and F(z) = e^z phi0(z), phi0 modified Bessel."""

    radial: BesselProfile
    axial: AxialSolution

    @property
    def m(self) -> int:
        return self.radial.m

    @property
    def label(self) -> str:
        return f"{self.radial.kind}{self.m}-separated"

    def z_factor(self, z, n: int = 0):
        """F(z) and its first two derivatives."""
        ez = np.exp(z)
        p0 = self.axial(z)
        if n == 0:
            return ez * p0
        p1 = self.axial(z, 1)
        if n == 1:
            return ez * (p0 + p1)
        if n == 2:
            return ez * (p0 + 2 * p1 + self.axial(z, 2))
        raise ValueError("derivatives above second order are not provided")

    def value(self, r, z):
        return self.radial(r) * self.z_factor(z)

    def d_r(self, r, z):
        return self.radial(r, 1) * self.z_factor(z)

    def d_z(self, r, z):
        return self.radial(r) * self.z_factor(z, 1)

    __call__ = value


def separated_scalar(
    m: int, lam: float, eps: float, mass: float, radial: str = "J", axial: str = "decaying"
) -> SeparatedScalar:
    """Master scalar of the sigma = 0 family; mass 0 gives the massless variant."""
    return SeparatedScalar(
        radial_profile(m, lam, radial), AxialSolution(scalar_axial_order(eps, mass), lam, axial)
    )


def gaussian_bump(m: int, r0: float = 1.5, z0: float = 0.0, width: float = 0.7) -> ScalarField:
    """exp(-((r - r0)^2 + (z - z0)^2) / width^2) with exact partials."""

    def value(r, z):
        return np.exp(-((r - r0) ** 2 + (z - z0) ** 2) / width**2)

    return ScalarField(
        m=m,
        value=value,
        d_r=lambda r, z: -2.0 * (r - r0) / width**2 * value(r, z),
        d_z=lambda r, z: -2.0 * (z - z0) / width**2 * value(r, z),
        label=f"gaussian(r0={r0:g}, z0={z0:g}, w={width:g})",
    )


@dataclass(frozen=True)
class ModeField:
    family: str
    qn: QuantumNumbers
    evaluator: Callable = field(repr=False)
    radial_kind: str | None = None
    axial_kind: str | None = None
    is_solution: bool = True
    phi0_field: ScalarField | SeparatedScalar | None = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.qn.m

    def evaluate(self, r, z) -> TenComponent:
        r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
        return self.evaluator(r, z)

    def metadata(self) -> dict:
        qn = self.qn
        return {
            "family": self.family,
            "eps": qn.eps,
            "m": qn.m,
            "sigma_re": qn.sigma.real,
            "sigma_im": qn.sigma.imag,
            "lam": qn.lam,
            "mass": qn.mass,
            "radial": self.radial_kind,
            "axial": self.axial_kind,
            "is_solution": self.is_solution,
        }


def _require_eps(eps: float):
    if eps == 0:
        raise DegenerateFamilyError("eps = 0 is excluded (divisions by eps)")


def build_mode_sigma(
    qn: QuantumNumbers, radial: str = "J", axial: str = "decaying", allow_zero: bool = False
) -> ModeField:
    """Helicity-sigma mode with Phi0 = 0.

    phi2 = R_m(r) Z(z); phi1, phi3 carry R_{m-1}, R_{m+1} so that
    b- phi1 = (-sigma - d_z) phi2 / 2 and a+ phi3 = (sigma - d_z) phi2 / 2.
    Inconsistent (eps, sigma, M) still give an evaluable field with
    ``is_solution=False``.  ``allow_zero`` admits sigma = 0 for scans.
    """
    sigma = _order(qn.sigma)
    if sigma == 0 and not allow_zero:
        raise ValueError("sigma family needs sigma != 0; use build_mode_sigma0_massive")
    if not qn.mass > 0:
        raise ValueError("sigma family needs M > 0")
    if qn.lam is None:
        raise ValueError("sigma family needs a separation constant")
    _require_eps(qn.eps)
    m, lam = qn.m, qn.lam
    R = radial_profile(m, lam, radial)
    R_lo = BesselProfile(m - 1, lam, radial, m=m)
    R_hi = BesselProfile(m + 1, lam, radial, m=m)
    Z = axial_profile(sigma, lam, axial)
    norm = 1.0 / (GAMMA * math.sqrt(lam))
    e_ratio = -1j * qn.eps / qn.mass
    h_ratio = -1j * sigma / qn.mass

    def evaluate(r, z):
        z0, z1 = Z(z), Z(z, 1)
        ez = np.exp(z)
        phi1 = norm * 0.5 * (-sigma * z0 - z1) * R_lo(r)
        phi2 = R(r) * z0
        phi3 = norm * 0.5 * (sigma * z0 - z1) * R_hi(r)
        phi = (ez * phi1, ez * ez * phi2, ez * phi3)
        return TenComponent.from_parts(
            np.zeros(r.shape), phi, [e_ratio * p for p in phi], [h_ratio * p for p in phi]
        )

    closes = dispersion_residual(qn.eps, sigma, qn.mass) <= 1e-12 * max(1.0, qn.mass**2)
    return ModeField("sigma", qn, evaluate, radial, axial, is_solution=closes)


def build_mode_sigma0_massive(
    qn: QuantumNumbers, radial: str = "J", axial: str = "decaying"
) -> ModeField:
    """sigma = 0 massive mode generated by Phi0 = J_m(sqrt(lam) r) e^z phi0(z).

    phi0 is the modified Bessel function of order nu, nu^2 = 1 - eps^2 + M^2,
    of sqrt(lam) e^z.  With c = i eps / (M^2 - eps^2):
    Phi1 = c e^z a Phi0, Phi3 = c e^z b Phi0, Phi2 = -c d_z Phi0,
    E = (M / (i eps)) Phi, H = 0.
    """
    if qn.sigma != 0:
        raise ValueError("sigma0 family needs sigma = 0")
    if not qn.mass > 0:
        raise ValueError("sigma0 massive family needs M > 0")
    if qn.lam is None:
        raise ValueError("sigma0 family needs a separation constant")
    _require_eps(qn.eps)
    if qn.eps * qn.eps == qn.mass * qn.mass:
        raise DegenerateFamilyError("eps^2 = M^2 makes the sigma0 elimination singular")
    m, lam = qn.m, qn.lam
    scalar = separated_scalar(m, lam, qn.eps, qn.mass, radial, axial)
    R = scalar.radial
    R_lo = BesselProfile(m - 1, lam, radial, m=m)
    R_hi = BesselProfile(m + 1, lam, radial, m=m)
    c = 1j * qn.eps / (qn.mass**2 - qn.eps**2)
    shift = GAMMA * math.sqrt(lam)  # a R_m = shift R_{m-1}, b R_m = shift R_{m+1}
    e_ratio = qn.mass / (1j * qn.eps)

    def evaluate(r, z):
        F, dF = scalar.z_factor(z), scalar.z_factor(z, 1)
        ez = np.exp(z)
        phi0 = R(r) * F
        phi = (c * ez * shift * R_lo(r) * F, -c * R(r) * dF, c * ez * shift * R_hi(r) * F)
        zero = np.zeros(r.shape)
        return TenComponent.from_parts(phi0, phi, [e_ratio * p for p in phi], (zero, zero, zero))

    return ModeField("sigma0", qn, evaluate, radial, axial, phi0_field=scalar)


def build_mode_massless_gradient(phi0: ScalarField | SeparatedScalar, eps: float, lam: float | None = None) -> ModeField:
    """Gradient-type massless mode: E = H = 0 and

    Phi1 = e^z a Phi0 / (i eps), Phi2 = (i / eps) d_z Phi0, Phi3 = e^z b Phi0 / (i eps).
    """
    _require_eps(eps)
    m = phi0.m
    if lam is None and isinstance(phi0, SeparatedScalar):
        lam = phi0.radial.lam
    qn = QuantumNumbers(eps=eps, m=m, sigma=0, lam=lam, mass=0.0)

    def evaluate(r, z):
        f, fr, fz = phi0.value(r, z), phi0.d_r(r, z), phi0.d_z(r, z)
        ez = np.exp(z)
        a_f = GAMMA * (fr + m / r * f)
        b_f = GAMMA * (-fr + m / r * f)
        phi = (ez * a_f / (1j * eps), (1j / eps) * fz, ez * b_f / (1j * eps))
        zero = np.zeros(r.shape)
        return TenComponent.from_parts(f, phi, (zero, zero, zero), (zero, zero, zero))

    radial = phi0.radial.kind if isinstance(phi0, SeparatedScalar) else None
    axial = phi0.axial.kind if isinstance(phi0, SeparatedScalar) else None
    return ModeField("massless", qn, evaluate, radial, axial, phi0_field=phi0)


def custom_field(m: int, evaluator: Callable, qn: QuantumNumbers | None = None) -> ModeField:
    """Wrap an arbitrary (r, z) -> TenComponent evaluator, e.g. for residual checks."""
    qn = qn or QuantumNumbers(eps=1.0, m=m, sigma=0, lam=None, mass=1.0)
    return ModeField("custom", qn, evaluator, is_solution=False)


def combine(modes: Sequence[ModeField], coeffs: Sequence[complex]) -> ModeField:
    """Complex linear combination of modes sharing family and quantum numbers."""
    if not modes or len(modes) != len(coeffs):
        raise ValueError("need one coefficient per mode")
    first = modes[0]
    for md in modes[1:]:
        if md.family != first.family or md.qn != first.qn:
            raise ValueError("can only combine modes of the same family and quantum numbers")
    coeffs = [complex(c) for c in coeffs]

    def evaluate(r, z):
        acc = coeffs[0] * modes[0].evaluate(r, z)
        for c, md in zip(coeffs[1:], modes[1:]):
            acc = acc + c * md.evaluate(r, z)
        return acc

    kinds = {(md.radial_kind, md.axial_kind) for md in modes}
    radial, axial = next(iter(kinds)) if len(kinds) == 1 else ("mixed", "mixed")
    phi0 = first.phi0_field if len(modes) == 1 else None
    return ModeField(first.family, first.qn, evaluate, radial, axial,
                     all(md.is_solution for md in modes), phi0)


def build_mode(family: str, qn: QuantumNumbers, radial: str = "J", axial: str = "decaying",
               phi0: str = "bessel") -> ModeField:
    """Dispatch used by the command line."""
    if family == "sigma":
        return build_mode_sigma(qn, radial, axial)
    if family == "sigma0":
        return build_mode_sigma0_massive(qn, radial, axial)
    if family == "massless":
        if phi0 == "gaussian":
            return build_mode_massless_gradient(gaussian_bump(qn.m), qn.eps)
        if qn.lam is None:
            raise ValueError("separated massless scalar needs a separation constant")
        return build_mode_massless_gradient(
            separated_scalar(qn.m, qn.lam, qn.eps, 0.0, radial, axial), qn.eps
        )
    raise ValueError(f"unknown family {family!r}; expected sigma, sigma0 or massless")

