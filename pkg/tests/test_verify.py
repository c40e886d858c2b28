import math

import numpy as np
import pytest

from dkp_h3.modes import (
    QuantumNumbers,
    build_mode,
    build_mode_massless_gradient,
    build_mode_sigma,
    build_mode_sigma0_massive,
    custom_field,
    gaussian_bump,
    separated_scalar,
)
from dkp_h3.operators import TenComponent
from dkp_h3.verify import (
    SYSTEMS,
    Grid,
    residual_helicity,
    residual_system,
    richardson,
    transcription_difference,
    verify_mode,
)

SQRT2 = math.sqrt(2.0)
SMALL = Grid(0.5, 3.0, 8, -1.0, 1.0, 8)


def sigma_mode(kappa=1.0):
    return build_mode_sigma(QuantumNumbers(eps=SQRT2, m=1, sigma=1j * kappa, lam=1.0, mass=1.0))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 10, 0, 1, 10)
    with pytest.raises(ValueError):
        Grid(1.0, 0.5, 10, 0, 1, 10)
    R, Z = Grid().mesh()
    assert R.shape == (20, 20) and R[1, 0] > R[0, 0] and Z[0, 1] > Z[0, 0]


def test_stencil_may_not_cross_axis():
    with pytest.raises(ValueError):
        residual_system(sigma_mode(), Grid(1e-4, 1.0, 5, 0, 1, 5), h=1e-3)


@pytest.mark.parametrize("system", ["full", "full-expanded", "helicity", "sigma0", "massless"])
def test_zero_field_has_zero_residual(system):
    zero = custom_field(1, lambda r, z: TenComponent.zeros(r.shape))
    rep = residual_system(zero, SMALL, system=system)
    assert np.all(rep.residual == 0)
    assert rep.passes(1e-30, relative=False)


def test_sigma_mode_full_and_helicity():
    mode = sigma_mode()
    for system in ("full", "helicity"):
        rep = verify_mode(mode, system, SMALL)
        assert rep.extrapolated
        assert rep.worst() <= 1e-6, system


def test_perturbed_sigma_fails():
    rep = verify_mode(sigma_mode(1.1), "full", SMALL)
    assert rep.worst() > 1e-3
    assert not rep.passes(1e-6)
    assert rep.failing(1e-6)


def test_richardson_improves_and_reports_second_order():
    mode = sigma_mode()
    a = residual_system(mode, SMALL, 1e-2)
    b = residual_system(mode, SMALL, 5e-3)
    c = richardson(a, b)
    assert c.worst() < 0.05 * b.worst()
    finite = [v for v in c.convergence_order.values() if not math.isnan(v)]
    assert finite and all(1.9 <= v <= 2.1 for v in finite)


def test_richardson_needs_halved_step():
    mode = sigma_mode()
    with pytest.raises(ValueError):
        richardson(residual_system(mode, SMALL, 1e-2), residual_system(mode, SMALL, 4e-3))


def test_fourth_order_stencil():
    rep = verify_mode(sigma_mode(), "full", SMALL, h=1e-2, order=4)
    assert rep.worst() <= 1e-8


def test_transcription_on_arbitrary_field(rng):
    coeffs = rng.normal(size=(10, 3)) + 1j * rng.normal(size=(10, 3))

    def evaluate(r, z):
        basis = np.stack([np.sin(r) * np.exp(z), r**2 * np.cos(z), np.exp(-r * z)])
        return TenComponent(np.tensordot(coeffs, basis, axes=1))

    field = custom_field(2, evaluate, QuantumNumbers(eps=0.7, m=2, sigma=0.3j, lam=None, mass=1.3))
    assert transcription_difference(field, SMALL) <= 10 * np.finfo(float).eps
    assert transcription_difference(sigma_mode(), SMALL) <= 10 * np.finfo(float).eps


def test_sigma0_mode_systems():
    mode = build_mode_sigma0_massive(QuantumNumbers(eps=0.8, m=1, sigma=0, lam=1.0, mass=1.0))
    assert verify_mode(mode, "sigma0", SMALL).worst() <= 1e-6
    assert verify_mode(mode, "full", SMALL).worst() <= 1e-6
    assert verify_mode(mode, "scalar", SMALL).worst() <= 1e-7


def test_scalar_residual_detects_wrong_scalar():
    # a massless separated scalar does not solve the massive scalar equation
    wrong = build_mode_massless_gradient(separated_scalar(1, 1.0, 0.8, 0.0), 0.8)
    massive = custom_field(1, wrong.evaluate, QuantumNumbers(eps=0.8, m=1, sigma=0, lam=1.0, mass=1.0))
    assert verify_mode(massive, "scalar", SMALL).worst() > 1e-3


@pytest.mark.parametrize("phi0", ["bessel", "gaussian"])
def test_massless_mode_systems(phi0):
    mode = build_mode("massless", QuantumNumbers(eps=1.2, m=1, sigma=0, lam=1.0, mass=0.0), phi0=phi0)
    assert verify_mode(mode, "massless", SMALL).worst() <= 1e-6
    assert verify_mode(mode, "full", SMALL).worst() <= 1e-6
    rep = verify_mode(mode, "helicity", SMALL)
    assert rep.diagnostic and rep.notes


def test_helicity_phi0_only_field_residual_is_zero():
    def evaluate(r, z):
        out = np.zeros((10, *r.shape), dtype=complex)
        out[0] = np.exp(-r * r) * np.cosh(z)
        return TenComponent(out)

    field = custom_field(0, evaluate)
    assert np.all(residual_helicity(field, SMALL, sigma=0).residual == 0)
    # Sigma kills a pure scalar, so only the scalar row sees sigma != 0
    rep = residual_helicity(field, SMALL, sigma=0.5j)
    assert np.all(rep.residual[1:] == 0) and np.any(rep.residual[0] != 0)


def test_report_dict_and_rows():
    rep = verify_mode(sigma_mode(), "full", SMALL)
    d = rep.as_dict(pointwise=True)
    assert d["system"] == "full" and len(d["equations"]) == len(rep.labels) == 10
    assert set(d["pointwise_abs"]) == set(rep.labels)
    row = rep.rows()[0]
    assert set(row) >= {"equation", "max_abs", "max_rel", "rms_rel", "flagged_points", "convergence_order"}


def test_nan_points_are_flagged():
    def evaluate(r, z):
        out = np.ones((10, *r.shape), dtype=complex)
        out[1][r > 2.5] = np.nan
        return TenComponent(out)

    rep = residual_system(custom_field(1, evaluate), SMALL)
    assert rep.flagged().sum() > 0
    assert not rep.passes(1.0)


def test_unknown_system():
    with pytest.raises(ValueError):
        residual_system(sigma_mode(), SMALL, system="full-8")
    assert "scalar" in SYSTEMS
