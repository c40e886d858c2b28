import math

import numpy as np
import pytest

from dkp_h3.modes import (
    AxialSolution,
    DegenerateFamilyError,
    QuantumNumbers,
    build_mode,
    build_mode_massless_gradient,
    build_mode_sigma,
    build_mode_sigma0_massive,
    combine,
    dispersion_residual,
    gaussian_bump,
    propagating_sigma,
    scalar_axial_order,
    separated_scalar,
)
from dkp_h3 import fd

SQRT2 = math.sqrt(2.0)
r, z = np.meshgrid(np.linspace(0.5, 3.0, 6), np.linspace(-1.0, 1.0, 5), indexing="ij")


def qn_sigma(kappa=1.0, **kw):
    args = dict(eps=SQRT2, m=1, sigma=1j * kappa, lam=1.0, mass=1.0) | kw
    return QuantumNumbers(**args)


def test_quantum_number_validation():
    with pytest.raises(ValueError):
        QuantumNumbers(eps=1.0, m=1.5)
    with pytest.raises(ValueError):
        QuantumNumbers(eps=1.0, m=1, lam=-1.0)
    with pytest.raises(ValueError):
        QuantumNumbers(eps=1.0, m=1, mass=-1.0)
    assert QuantumNumbers(eps=1.0, m=1, sigma=2j).kappa == 2.0


def test_dispersion_closure():
    assert dispersion_residual(SQRT2, 1j, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert dispersion_residual(SQRT2, 1.1j, 1.0) == pytest.approx(0.21)
    assert propagating_sigma(SQRT2, 1.0) == pytest.approx(1j)
    with pytest.raises(ValueError):
        dispersion_residual(1.0, 1j, 0.0)


@pytest.mark.parametrize("order", [1.5, 2j, 0.0])
def test_axial_solution_ode(order):
    Z = AxialSolution(order, 1.3)
    zs = np.linspace(-1.0, 1.0, 9)
    lhs = Z(zs, 2) - complex(order) ** 2 * Z(zs)
    assert np.allclose(lhs, 1.3 * np.exp(2 * zs) * Z(zs), rtol=1e-10, atol=1e-12)
    assert np.allclose(Z(zs, 1), fd.diff(Z, zs, 1e-4, 1, 4), rtol=1e-8)


def test_axial_growing_imaginary_rejected():
    with pytest.raises(ValueError):
        AxialSolution(1j, 1.0, "growing")


def test_scalar_axial_order():
    assert scalar_axial_order(1.0, 1.0) == 1.0
    assert scalar_axial_order(2.0, 0.0) == pytest.approx(math.sqrt(3) * 1j)


def test_sigma_mode_has_no_scalar_and_proportional_triplets():
    mode = build_mode_sigma(qn_sigma())
    v = mode.evaluate(r, z)
    assert np.all(v.phi0 == 0)
    assert np.allclose(v.E, -1j * SQRT2 * v.phi)
    assert np.allclose(v.H, -1j * 1j * v.phi)
    assert mode.is_solution


def test_sigma_mode_perturbed_is_flagged():
    assert not build_mode_sigma(qn_sigma(1.1)).is_solution


def test_sigma_mode_needs_nonzero_sigma():
    with pytest.raises(ValueError):
        build_mode_sigma(qn_sigma(0.0))
    assert build_mode_sigma(qn_sigma(0.0), allow_zero=True).evaluate(r, z).data.shape == (10, 6, 5)


def test_sigma0_mode_structure():
    qn = QuantumNumbers(eps=0.8, m=2, sigma=0, lam=1.5, mass=1.0)
    v = build_mode_sigma0_massive(qn).evaluate(r, z)
    assert np.all(v.H == 0)
    assert np.allclose(v.E, (1.0 / (1j * 0.8)) * v.phi)


def test_sigma0_singular_energy():
    with pytest.raises(DegenerateFamilyError):
        build_mode_sigma0_massive(QuantumNumbers(eps=1.0, m=1, sigma=0, lam=1.0, mass=1.0))
    with pytest.raises(DegenerateFamilyError):
        build_mode_sigma0_massive(QuantumNumbers(eps=0.0, m=1, sigma=0, lam=1.0, mass=1.0))


@pytest.mark.parametrize("phi0", ["bessel", "gaussian"])
def test_massless_field_strengths_vanish_exactly(phi0):
    qn = QuantumNumbers(eps=1.2, m=1, sigma=0, lam=1.0, mass=0.0)
    v = build_mode("massless", qn, phi0=phi0).evaluate(r, z)
    assert np.all(v.E == 0) and np.all(v.H == 0)
    assert np.any(v.phi0 != 0)


def test_massless_gaussian_without_lambda():
    mode = build_mode_massless_gradient(gaussian_bump(2), 0.9)
    assert mode.qn.lam is None and mode.qn.mass == 0


def test_separated_scalar_partials():
    s = separated_scalar(1, 1.0, 1.2, 0.0)
    h = 1e-5
    assert np.allclose(s.d_r(r, z), (s(r + h, z) - s(r - h, z)) / (2 * h), rtol=1e-7)
    assert np.allclose(s.d_z(r, z), (s(r, z + h) - s(r, z - h)) / (2 * h), rtol=1e-7)


def test_combine_is_linear():
    a = build_mode_sigma(qn_sigma(), radial="J")
    b = build_mode_sigma(qn_sigma(), radial="Y")
    c = combine([a, b], [1.0, 2j])
    assert np.allclose(c.evaluate(r, z).data, a.evaluate(r, z).data + 2j * b.evaluate(r, z).data)
    assert c.radial_kind == "mixed"
    with pytest.raises(ValueError):
        combine([a, build_mode_sigma(qn_sigma(1.1))], [1, 1])


def test_metadata_round_trip():
    md = build_mode_sigma(qn_sigma()).metadata()
    assert md["family"] == "sigma" and md["sigma_im"] == 1.0 and md["is_solution"] is True


def test_build_mode_unknown_family():
    with pytest.raises(ValueError):
        build_mode("vector", qn_sigma())
