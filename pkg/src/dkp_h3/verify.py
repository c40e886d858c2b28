"""Finite-difference residuals of ten-component fields against the field equations.

Every system is evaluated at all points of a uniform (r, z) grid from the field
value and its central-difference partials.  Residuals are kept per equation and
per point (complex, LHS - RHS); summaries report max and RMS of the absolute
residual and of the residual relative to the largest field component entering
that equation at that point.

Systems:

* ``full``: the first-order ten-component system in ladder form
* ``full-expanded``: the same system with explicit d/dr and m/r terms
* ``helicity``: Sigma Psi = sigma Psi
* ``sigma0``: the sigma = 0 reduced system (E proportional to Phi, H = 0)
* ``massless``: the reduced system of the massless gradient family
* ``scalar``: the second-order master equation for Phi0 (row ``master``), plus
  the separated ``radial``/``axial`` equations when Phi0 is a separated scalar

Rows of the ten-component systems are named after the component whose
mass (or eigenvalue) term they carry: Phi0, Phi1..Phi3, E1..E3, H1..H3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import fd
from .geometry import (
    FieldPoint,
    christoffel_at,
    christoffel_numeric,
    ricci_rotation,
    ricci_rotation_contracted,
    ricci_rotation_numeric,
)
from .modes import ModeField, QuantumNumbers, SeparatedScalar, build_mode_sigma, dispersion_residual
from .operators import (
    FieldDerivatives,
    field_derivatives,
    helicity_terms,
    COMPONENT_NAMES,
    ladder_samples,
)

REL_FLOOR = 1e-30
# default steps: first-order systems use 1e-3; the scalar check differentiates twice
DEFAULT_STEP = 1e-3
SCALAR_STEP = 1e-2
# equations whose residual stays below this fraction of the field scale are exact to roundoff
ROUNDOFF_FLOOR = 1e-12

SYSTEMS = ("full", "full-expanded", "helicity", "sigma0", "massless", "scalar")
SYSTEM_ALIASES = {"full7": "full-expanded", "expanded": "full-expanded"}


@dataclass(frozen=True)
class Grid:
    r_min: float = 0.5
    r_max: float = 3.0
    n_r: int = 20
    z_min: float = -1.0
    z_max: float = 1.0
    n_z: int = 20

    def __post_init__(self):
        if not self.r_min > 0:
            raise ValueError(f"grid must stay off the axis: r_min={self.r_min}")
        if self.r_max <= self.r_min or self.z_max <= self.z_min:
            raise ValueError("grid ranges must be increasing")
        if self.n_r < 4 or self.n_z < 4:
            raise ValueError("grid needs at least 4 points per direction")

    @property
    def r(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_r)

    @property
    def z(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.n_z)

    def mesh(self):
        """(R, Z) arrays of shape (n_r, n_z), row-major in r then z."""
        return np.meshgrid(self.r, self.z, indexing="ij")

    def as_dict(self) -> dict:
        return {
            "r_min": self.r_min, "r_max": self.r_max, "n_r": self.n_r,
            "z_min": self.z_min, "z_max": self.z_max, "n_z": self.n_z,
        }


@dataclass
class ResidualReport:
    system: str
    labels: tuple[str, ...]
    residual: np.ndarray  # complex, (n_eq, n_r, n_z)
    scale: np.ndarray  # real, same shape
    grid: Grid
    h: float
    stencil_order: int = 2
    extrapolated: bool = False
    convergence_order: dict[str, float] | None = None
    diagnostic: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def absolute(self) -> np.ndarray:
        return np.abs(self.residual)

    @property
    def relative(self) -> np.ndarray:
        return self.absolute / np.maximum(self.scale, REL_FLOOR)

    def flagged(self) -> np.ndarray:
        """Per-equation count of points where the residual is NaN or infinite."""
        return np.sum(~np.isfinite(self.residual), axis=(1, 2))

    def _reduce(self, data, how):
        out = []
        for row in data:
            row = row[np.isfinite(row)]
            if row.size == 0:
                out.append(float("nan"))
            elif how == "max":
                out.append(float(row.max()))
            else:
                out.append(float(np.sqrt(np.mean(row * row))))
        return np.array(out)

    @property
    def max_abs(self) -> np.ndarray:
        return self._reduce(self.absolute, "max")

    @property
    def rms_abs(self) -> np.ndarray:
        return self._reduce(self.absolute, "rms")

    @property
    def max_rel(self) -> np.ndarray:
        return self._reduce(self.relative, "max")

    @property
    def rms_rel(self) -> np.ndarray:
        return self._reduce(self.relative, "rms")

    def worst(self, relative: bool = True) -> float:
        vals = self.max_rel if relative else self.max_abs
        return float(np.nanmax(vals)) if np.any(np.isfinite(vals)) else float("nan")

    def passes(self, tol: float, relative: bool = True) -> bool:
        if np.any(self.flagged()):
            return False
        vals = self.max_rel if relative else self.max_abs
        return bool(np.all(vals <= tol))

    def failing(self, tol: float, relative: bool = True) -> list[str]:
        vals = self.max_rel if relative else self.max_abs
        bad = self.flagged()
        return [lab for lab, v, b in zip(self.labels, vals, bad) if b or not v <= tol]

    def rows(self) -> list[dict]:
        out = []
        orders = self.convergence_order or {}
        for i, lab in enumerate(self.labels):
            out.append({
                "equation": lab,
                "max_abs": self.max_abs[i],
                "rms_abs": self.rms_abs[i],
                "max_rel": self.max_rel[i],
                "rms_rel": self.rms_rel[i],
                "flagged_points": int(self.flagged()[i]),
                "convergence_order": orders.get(lab),
            })
        return out

    def as_dict(self, pointwise: bool = False) -> dict:
        out = {
            "system": self.system,
            "h": self.h,
            "stencil_order": self.stencil_order,
            "extrapolated": self.extrapolated,
            "diagnostic": self.diagnostic,
            "grid": self.grid.as_dict(),
            "equations": self.rows(),
            "notes": list(self.notes),
        }
        if pointwise:
            out["pointwise_abs"] = {lab: self.absolute[i].tolist() for i, lab in enumerate(self.labels)}
            out["pointwise_rel"] = {lab: self.relative[i].tolist() for i, lab in enumerate(self.labels)}
        return out


# ----------------------------------------------------------------------------
# equation systems on sampled data


def _scale(*comps):
    return np.max(np.abs(np.stack(np.broadcast_arrays(*comps))), axis=0)


def _system_full(d: FieldDerivatives, r, z, m, eps, mass, sigma):
    v, dr, dz = d.value.data, d.d_r.data, d.d_z.data
    p0, p1, p2, p3, e1, e2, e3, h1, h2, h3 = v
    ez = np.exp(z)
    I = 1j

    def L(kind, k):
        return ladder_samples(kind, m, v[k], dr[k], r)

    eqs = [
        ("Phi0", -ez * L("b-", 4) - ez * L("a+", 6) - (dz[5] - 2 * e2) - mass * p0, (e1, e2, e3, p0)),
        ("Phi1", I * ez * L("a", 8) + I * eps * e1 + I * (dz[7] - h1) - mass * p1, (h2, e1, h1, p1)),
        ("Phi2", -I * ez * L("b-", 7) + I * ez * L("a+", 9) + I * eps * e2 - mass * p2, (h1, h3, e2, p2)),
        ("Phi3", -I * ez * L("b", 8) + I * eps * e3 - I * (dz[9] - h3) - mass * p3, (h2, e3, h3, p3)),
        ("E1", ez * L("a", 0) - I * eps * p1 - mass * e1, (p0, p1, e1)),
        ("E2", -I * eps * p2 - dz[0] - mass * e2, (p2, p0, e2)),
        ("E3", ez * L("b", 0) - I * eps * p3 - mass * e3, (p0, p3, e3)),
        ("H1", -I * ez * L("a", 2) - I * (dz[1] - p1) - mass * h1, (p2, p1, h1)),
        ("H2", I * ez * L("b-", 1) - I * ez * L("a+", 3) - mass * h2, (p1, p3, h2)),
        ("H3", I * ez * L("b", 2) + I * (dz[3] - p3) - mass * h3, (p2, p3, h3)),
    ]
    return eqs


def _system_expanded(d: FieldDerivatives, r, z, m, eps, mass, sigma):
    v, dr, dz = d.value.data, d.d_r.data, d.d_z.data
    p0, p1, p2, p3, e1, e2, e3, h1, h2, h3 = v
    g = 1.0 / math.sqrt(2.0)
    ez = np.exp(z)
    I = 1j
    eqs = [
        ("Phi0",
         g * ez * (dr[4] - dr[6]) - ez * g / r * ((m - 1) * e1 + (m + 1) * e3) - (dz[5] - 2 * e2) - mass * p0,
         (e1, e2, e3, p0)),
        ("Phi1",
         I * eps * e1 + I * g * ez * dr[8] + I * ez * g * m / r * h2 + I * (dz[7] - h1) - mass * p1,
         (h2, e1, h1, p1)),
        ("Phi2",
         I * eps * e2 + I * g * ez * (dr[7] + dr[9]) - ez * I * g / r * ((m - 1) * h1 - (m + 1) * h3) - mass * p2,
         (h1, h3, e2, p2)),
        ("Phi3",
         I * eps * e3 + I * g * ez * dr[8] - I * ez * g * m / r * h2 - I * (dz[9] - h3) - mass * p3,
         (h2, e3, h3, p3)),
        ("E1", -I * eps * p1 + g * ez * dr[0] + ez * g * m / r * p0 - mass * e1, (p0, p1, e1)),
        ("E2", -I * eps * p2 - dz[0] - mass * e2, (p2, p0, e2)),
        ("E3", -I * eps * p3 - g * ez * dr[0] + ez * g * m / r * p0 - mass * e3, (p0, p3, e3)),
        ("H1", -I * g * ez * dr[2] - I * ez * g * m / r * p2 - I * (dz[1] - p1) - mass * h1, (p2, p1, h1)),
        ("H2",
         -I * g * ez * (dr[1] + dr[3]) + I * ez * g / r * ((m - 1) * p1 - (m + 1) * p3) - mass * h2,
         (p1, p3, h2)),
        ("H3", -I * g * ez * dr[2] + I * ez * g * m / r * p2 + I * (dz[3] - p3) - mass * h3, (p2, p3, h3)),
    ]
    return eqs


def _system_helicity(d: FieldDerivatives, r, z, m, eps, mass, sigma):
    v = d.value.data
    s = helicity_terms(d, r, z, m).data
    labels = COMPONENT_NAMES
    eqs = [(labels[0], s[0] - sigma * v[0], (v[0],))]
    for i in range(1, 10):
        start = 1 + 3 * ((i - 1) // 3)
        eqs.append((labels[i], s[i] - sigma * v[i], tuple(v[start : start + 3])))
    return eqs


def _system_sigma0(d: FieldDerivatives, r, z, m, eps, mass, sigma):
    full = dict((lab, (res, comps)) for lab, res, comps in _system_full(d, r, z, m, eps, mass, sigma))
    v = d.value.data
    eqs = [("Phi0", *full["Phi0"])]
    for j in range(3):
        eqs.append((f"Phi{1 + j}", 1j * eps * v[4 + j] - mass * v[1 + j], (v[4 + j], v[1 + j])))
    for j in range(3):
        eqs.append((f"E{1 + j}", *full[f"E{1 + j}"]))
    for j in range(3):
        eqs.append((f"H{1 + j}", v[7 + j], (v[7 + j], v[1 + j])))
    return eqs


def _system_massless(d: FieldDerivatives, r, z, m, eps, mass, sigma):
    v, dr, dz = d.value.data, d.d_r.data, d.d_z.data
    p0, p1, p2, p3, e1, e2, e3, h1, h2, h3 = v
    ez = np.exp(z)
    I = 1j

    def L(kind, k):
        return ladder_samples(kind, m, v[k], dr[k], r)

    eqs = [("Phi0", -ez * L("b-", 4) - ez * L("a+", 6) - (dz[5] - 2 * e2), (e1, e2, e3, p0))]
    for j in range(3):
        eqs.append((f"Phi{1 + j}", I * eps * v[4 + j] + I * sigma * v[7 + j], (v[4 + j], v[7 + j], v[1 + j])))
    eqs += [
        ("E1", ez * L("a", 0) - I * eps * p1 - e1, (p0, p1, e1)),
        ("E2", -I * eps * p2 - dz[0] - e2, (p2, p0, e2)),
        ("E3", ez * L("b", 0) - I * eps * p3 - e3, (p0, p3, e3)),
    ]
    for j in range(3):
        eqs.append((f"H{1 + j}", -I * sigma * v[1 + j] - v[7 + j], (v[1 + j], v[7 + j])))
    return eqs


_SYSTEMS = {
    "full": _system_full,
    "full-expanded": _system_expanded,
    "helicity": _system_helicity,
    "sigma0": _system_sigma0,
    "massless": _system_massless,
}


def _resolve(system: str) -> str:
    system = SYSTEM_ALIASES.get(system, system)
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")
    return system


def _check_grid(grid: Grid, h: float, order: int):
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    reach = max(abs(k) for k in fd.stencil(2 if order else 1, order)[0]) * h
    if grid.r_min - reach <= 0:
        raise ValueError(f"stencil of step {h:g} reaches r <= 0 from r_min={grid.r_min}")


def _assemble(system, eqs, grid, h, order, diagnostic=False, notes=()):
    labels = tuple(lab for lab, _, _ in eqs)
    shape = (grid.n_r, grid.n_z)
    res = np.stack([np.broadcast_to(np.asarray(val, dtype=complex), shape) for _, val, _ in eqs])
    scale = np.stack([np.broadcast_to(_scale(*comps), shape) for _, _, comps in eqs])
    return ResidualReport(system, labels, res, scale.astype(float), grid, h, order,
                          diagnostic=diagnostic, notes=list(notes))


def residual_system(mode: ModeField, grid: Grid, h: float = 1e-3, system: str = "full",
                    order: int = 2) -> ResidualReport:
    """Residuals of ``mode`` against one equation system at every grid point."""
    system = _resolve(system)
    _check_grid(grid, h, order)
    if system == "scalar":
        return _residual_scalar(mode, grid, h, order)
    if system == "helicity":
        return residual_helicity(mode, grid, h, order)
    R, Z = grid.mesh()
    d = field_derivatives(mode, R, Z, h, order)
    qn = mode.qn
    eqs = _SYSTEMS[system](d, R, Z, mode.m, qn.eps, qn.mass, qn.sigma)
    return _assemble(system, eqs, grid, h, order)


def residual_helicity(mode: ModeField, grid: Grid, h: float = 1e-3, order: int = 2,
                      sigma: complex | None = None) -> ResidualReport:
    """Residuals of Sigma Psi = sigma Psi; ``sigma`` defaults to the mode's."""
    _check_grid(grid, h, order)
    R, Z = grid.mesh()
    d = field_derivatives(mode, R, Z, h, order)
    sig = mode.qn.sigma if sigma is None else complex(sigma)
    eqs = _system_helicity(d, R, Z, mode.m, mode.qn.eps, mode.qn.mass, sig)
    diagnostic = mode.family == "massless"
    notes = ["massless gradient family: helicity residual reported as a diagnostic only"] if diagnostic else []
    return _assemble("helicity", eqs, grid, h, order, diagnostic, notes)


def _residual_scalar(mode: ModeField, grid: Grid, h: float, order: int) -> ResidualReport:
    R, Z = grid.mesh()
    qn = mode.qn
    m, k2 = mode.m, qn.eps**2 - qn.mass**2

    def phi0(r, z):
        return mode.evaluate(r, z).phi0

    f = phi0(R, Z)
    f_r = fd.diff(lambda s: phi0(s, Z), R, h, 1, order)
    f_rr = fd.diff(lambda s: phi0(s, Z), R, h, 2, order)
    f_z = fd.diff(lambda s: phi0(R, s), Z, h, 1, order)
    f_zz = fd.diff(lambda s: phi0(R, s), Z, h, 2, order)
    emz2 = np.exp(-2 * Z)
    two_delta = -f_rr - f_r / R + m * m / R**2 * f
    res = two_delta - emz2 * (f_zz - 2 * f_z) - k2 * emz2 * f
    eqs = [("master", res, (f,))]
    scalar = mode.phi0_field
    if isinstance(scalar, SeparatedScalar):
        lam = scalar.radial.lam
        rad = scalar.radial
        g = rad(R)
        g_r = fd.diff(rad, R, h, 1, order)
        g_rr = fd.diff(rad, R, h, 2, order)
        eqs.append(("radial", g_rr + g_r / R - m * m / R**2 * g + lam * g, (g,)))
        F = scalar.z_factor(Z)
        F_z = fd.diff(scalar.z_factor, Z, h, 1, order)
        F_zz = fd.diff(scalar.z_factor, Z, h, 2, order)
        eqs.append(("axial", F_zz - 2 * F_z + k2 * F - lam * np.exp(2 * Z) * F, (F,)))
    return _assemble("scalar", eqs, grid, h, order)


def richardson(report_h: ResidualReport, report_h2: ResidualReport) -> ResidualReport:
    """Extrapolate two reports at steps h and h/2 and attach observed orders."""
    a, b = report_h, report_h2
    if a.system != b.system or a.labels != b.labels or a.grid != b.grid:
        raise ValueError("richardson needs reports of the same system on the same grid")
    if a.stencil_order != b.stencil_order:
        raise ValueError("richardson needs reports with the same stencil order")
    if not math.isclose(b.h, a.h / 2, rel_tol=1e-9):
        raise ValueError(f"second report must use h/2 (got h={a.h:g}, {b.h:g})")
    extrap = fd.extrapolate(a.residual, b.residual, a.stencil_order)
    orders = {}
    for i, lab in enumerate(a.labels):
        ea, eb = a.max_abs[i], b.max_abs[i]
        field_scale = float(np.nanmax(b.scale[i])) if np.any(np.isfinite(b.scale[i])) else 0.0
        if eb <= ROUNDOFF_FLOOR * max(field_scale, REL_FLOOR):
            orders[lab] = float("nan")
        else:
            orders[lab] = fd.observed_order(ea, eb)
    return replace(b, residual=extrap, extrapolated=True, convergence_order=orders,
                   notes=list(b.notes) + [f"richardson from h={a.h:g} and h/2={b.h:g}"])


def default_step(system: str) -> float:
    return SCALAR_STEP if _resolve(system) == "scalar" else DEFAULT_STEP


def verify_mode(mode: ModeField, system: str = "full", grid: Grid | None = None,
                h: float | None = None, order: int = 2, extrapolate: bool = True) -> ResidualReport:
    """Residual report at step h, Richardson-combined with h/2 by default."""
    grid = grid or Grid()
    h = default_step(system) if h is None else h
    first = residual_system(mode, grid, h, system, order)
    if not extrapolate:
        return first
    return richardson(first, residual_system(mode, grid, h / 2, system, order))


def transcription_difference(mode: ModeField, grid: Grid | None = None, h: float = 1e-3,
                             order: int = 2) -> float:
    """max |R_expanded - R_ladder| / max(1, |terms|) over all equations and points.

    Both systems see the same sampled derivatives, so any difference beyond
    roundoff is a transcription error between the expanded and ladder forms.
    """
    grid = grid or Grid()
    R, Z = grid.mesh()
    d = field_derivatives(mode, R, Z, h, order)
    qn = mode.qn
    e9 = _system_full(d, R, Z, mode.m, qn.eps, qn.mass, qn.sigma)
    e7 = _system_expanded(d, R, Z, mode.m, qn.eps, qn.mass, qn.sigma)
    worst = 0.0
    mag = max(1.0, float(np.max(np.abs(d.value.data))), float(np.max(np.abs(d.d_r.data))),
              float(np.max(np.abs(d.d_z.data))))
    for (_, r9, _), (_, r7, _) in zip(e9, e7):
        worst = max(worst, float(np.max(np.abs(np.asarray(r9) - np.asarray(r7)))) / mag)
    return worst


def dispersion_scan(eps: float, mass: float, kappas, m: int = 1, lam: float = 1.0,
                    grid: Grid | None = None, h: float = DEFAULT_STEP) -> list[dict]:
    """Closure residual and full-system residual of the sigma = i kappa field per kappa."""
    grid = grid or Grid()
    rows = []
    for kappa in kappas:
        sigma = 1j * float(kappa)
        qn = QuantumNumbers(eps=eps, m=m, sigma=sigma, lam=lam, mass=mass)
        mode = build_mode_sigma(qn, allow_zero=True)
        report = verify_mode(mode, "full", grid, h)
        rows.append({
            "kappa": float(kappa),
            "dispersion_residual": dispersion_residual(eps, sigma, mass),
            "full_max_rel": report.worst(),
        })
    return rows


def geometry_suite(n_points: int = 100, seed: int = 0, h: float = 1e-4, tol: float = 1e-7,
                   r_range=(0.1, 5.0), z_range=(-2.0, 2.0)) -> list[dict]:
    """Closed-form geometry against its numeric-differentiation oracle at random points."""
    rng = np.random.default_rng(seed)
    pts = [FieldPoint(rng.uniform(*r_range), rng.uniform(*z_range)) for _ in range(n_points)]
    chris = np.zeros(n_points)
    ricci_num = np.zeros((n_points, 4, 4, 4))
    ricci_con = np.zeros(n_points)
    antisym = np.zeros(n_points)
    closed = np.zeros((n_points, 4, 4, 4))
    for i, p in enumerate(pts):
        chris[i] = np.max(np.abs(christoffel_at(p).values - christoffel_numeric(p, h).values))
        closed[i] = ricci_rotation(p).values
        ricci_num[i] = np.abs(closed[i] - ricci_rotation_numeric(p, h).values)
        contracted = ricci_rotation_contracted(p).values
        ricci_con[i] = np.max(np.abs(closed[i] - contracted))
        antisym[i] = np.max(np.abs(contracted + contracted.transpose(1, 0, 2)))
    rows = [
        {"check": "christoffel closed vs numeric", "max_error": float(chris.max()), "tol": tol},
        {"check": "ricci closed vs contracted", "max_error": float(ricci_con.max()), "tol": 1e-8},
        {"check": "ricci contracted antisymmetry", "max_error": float(antisym.max()), "tol": 1e-12},
    ]
    named = {(3, 1, 1): "-1", (2, 3, 2): "+1", (1, 2, 2): "e^z/r"}
    mask = np.ones((4, 4, 4), dtype=bool)
    for (a, b, c), text in named.items():
        mask[a, b, c] = mask[b, a, c] = False
        rows.append({"check": f"gamma_{a}{b}{c} = {text} (and gamma_{b}{a}{c})",
                     "max_error": float(max(ricci_num[:, a, b, c].max(), ricci_num[:, b, a, c].max())),
                     "tol": tol})
    rows.append({"check": "all other gamma_abc = 0", "max_error": float(ricci_num[:, mask].max()),
                 "tol": tol})
    for row in rows:
        row["pass"] = bool(row["max_error"] <= row["tol"])
    return rows
