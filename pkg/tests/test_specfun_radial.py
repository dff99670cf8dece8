import math

import numpy as np
import pytest
import scipy.special as sps
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedfield.errors import AccuracyError, DomainError, SpectralLatticeError
from curvedfield.geometry import Geometry
from curvedfield.specfun import conical_legendre, radial, zonal_spherical
from oracles import CLOSED_RADIAL, OPEN_RADIAL

G_OPEN = Geometry.open(-1.0)
G_FLAT = Geometry.flat()
G_CLOSED = Geometry.closed(1.0)


# ---------------------------------------------------------------------------
# Frozen high-precision tables (independent arbitrary-precision route)
# ---------------------------------------------------------------------------

def test_open_radial_against_frozen_table():
    for omega, l, r, ref in OPEN_RADIAL:
        got = float(radial(G_OPEN, omega, l, r, check=False))
        assert abs(got - ref) < 1e-11 * max(abs(ref), 1e-12), (omega, l, r)


def test_closed_radial_against_frozen_table():
    for omega, l, r, ref in CLOSED_RADIAL:
        got = float(radial(G_CLOSED, float(omega + 1), l, r, check=False))
        assert abs(got - ref) < 1e-11 * max(abs(ref), 1e-12), (omega, l, r)


# ---------------------------------------------------------------------------
# Dual routes through scipy
# ---------------------------------------------------------------------------

def test_flat_radial_is_scaled_spherical_bessel():
    chi = np.linspace(0.01, 40.0, 300)
    for k in (0.3, 1.0, 7.7):
        for l in (0, 1, 4, 9):
            got = radial(G_FLAT, k, l, chi)
            ref = math.sqrt(2.0 / math.pi) * sps.spherical_jn(l, k * chi)
            np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-300)


def closed_radial_reference(omega, l, r):
    # 2^l l! sqrt((omega-l)! / ((omega+l+1)! (omega+1))) sin^l(r)
    #   * C^{l+1}_{omega-l}(cos r)
    ln = l * math.log(2.0) + math.lgamma(l + 1) + 0.5 * (
        math.lgamma(omega - l + 1) - math.lgamma(omega + l + 2)
        - math.log(omega + 1.0))
    return math.exp(ln) * np.sin(r) ** l * sps.eval_gegenbauer(
        omega - l, l + 1, np.cos(r))


def test_closed_radial_gegenbauer_route():
    r = np.array([0.05, 0.8, 1.4, 2.2, 3.0])
    for omega in (1, 3, 5, 8, 12, 20):
        for l in (0, 1, 3, 5, 8):
            if l > omega:
                continue
            got = radial(G_CLOSED, float(omega + 1), l, r, check=False)
            ref = closed_radial_reference(omega, l, r)
            np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-15)


def test_open_l0_elementary_form():
    r = np.array([0.1, 0.7, 2.0, 8.0])
    for omega in (0.4, 1.0, 3.3):
        got = radial(G_OPEN, omega, 0, r, check=False)
        ref = np.sin(omega * r) / (omega * np.sinh(r))
        np.testing.assert_allclose(got, ref, rtol=1e-12)


def test_conical_legendre_l0_identity():
    # P^{-1/2}_{-1/2+i w}(cosh r) = sqrt(2/(pi sinh r)) sin(w r)/w
    r = np.array([0.05, 0.4, 1.5, 5.0])
    for omega in (0.5, 1.7, 4.0):
        got = conical_legendre(omega, 0, r)
        ref = np.sqrt(2.0 / (math.pi * np.sinh(r))) * np.sin(omega * r) / omega
        np.testing.assert_allclose(got, ref, rtol=1e-11)


# ---------------------------------------------------------------------------
# Structure: normalization, lattices, degenerate rows
# ---------------------------------------------------------------------------

def test_radial_origin_limits():
    # l = 0 modes are 1 at the origin in every geometry, l > 0 vanish
    for geom, k in ((G_OPEN, 1.3), (G_FLAT, 1.3), (G_CLOSED, 3.0)):
        assert abs(float(radial(geom, k, 0, 1e-8, check=False))
                   - (1.0 if geom.kind.value != "flat"
                      else math.sqrt(2.0 / math.pi))) < 1e-6
        assert abs(float(radial(geom, k, 3, 1e-8, check=False))) < 1e-20


def test_closed_degenerate_multipoles_are_zero():
    # no closed mode content for l > omega
    vals = radial(G_CLOSED, 2.0, 5, np.array([0.3, 1.0, 2.0]))
    assert np.all(vals == 0.0)


def test_closed_off_lattice_wavenumber_rejected():
    with pytest.raises(SpectralLatticeError):
        radial(G_CLOSED, 2.5, 0, 0.5)
    with pytest.raises(SpectralLatticeError):
        radial(G_CLOSED, 0.5, 0, 0.5)


def test_radial_argument_validation():
    with pytest.raises(DomainError):
        radial(G_FLAT, -1.0, 0, 0.5)
    with pytest.raises(DomainError):
        radial(G_FLAT, math.nan, 0, 0.5)
    with pytest.raises(DomainError):
        radial(G_FLAT, 1.0, -1, 0.5)
    with pytest.raises(DomainError):
        radial(G_CLOSED, 2.0, 0, 4.0)   # beyond antipode


def test_certification_raises_on_impossible_tolerance():
    chi = np.linspace(0.05, 3.0, 64)
    with pytest.raises(AccuracyError):
        radial(G_OPEN, 2.0, 2, chi, check=True, cert_tol=1e-300)
    # and passes at the documented default
    radial(G_OPEN, 2.0, 2, chi, check=True)
    radial(G_CLOSED, 6.0, 3, np.linspace(0.05, 3.0, 64), check=True)
    radial(G_FLAT, 2.0, 2, chi, check=True)


@settings(max_examples=30)
@given(st.floats(min_value=0.1, max_value=20.0),
       st.integers(min_value=0, max_value=8),
       st.floats(min_value=0.2, max_value=5.0))
def test_flat_radial_scale_invariance(k, l, a):
    # flat modes depend on k*chi only
    chi = np.linspace(0.1, 6.0, 17)
    lhs = radial(G_FLAT, k, l, chi, check=False)
    rhs = radial(G_FLAT, k * a, l, chi / a, check=False)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-290)


# ---------------------------------------------------------------------------
# Zonal spherical functions
# ---------------------------------------------------------------------------

def test_zonal_unit_at_origin_and_bounded():
    r = np.linspace(0.0, 10.0, 200)
    rc = np.linspace(0.0, math.pi, 200)
    for geom, omegas, rr in ((G_OPEN, (0.3, 1.0, 6.0), r),
                             (G_FLAT, (0.3, 1.0, 6.0), r),
                             (G_CLOSED, (0, 1, 5, 12), rc)):
        for om in omegas:
            vals = zonal_spherical(geom, om, rr)
            assert abs(vals[0] - 1.0) < 1e-12
            assert np.max(np.abs(vals)) <= 1.0 + 1e-12


def test_zonal_elementary_forms():
    r = np.array([0.3, 1.1, 2.5])
    np.testing.assert_allclose(zonal_spherical(G_OPEN, 2.0, r),
                               np.sin(2 * r) / (2 * np.sinh(r)), rtol=1e-13)
    np.testing.assert_allclose(zonal_spherical(G_FLAT, 2.0, r),
                               np.sin(2 * r) / (2 * r), rtol=1e-13)
    np.testing.assert_allclose(zonal_spherical(G_CLOSED, 3, r),
                               np.sin(4 * r) / (4 * np.sin(r)), rtol=1e-13)


def test_zonal_closed_antipodal_parity():
    r = np.linspace(0.05, math.pi / 2, 40)
    for om in (0, 1, 4, 9):
        lhs = zonal_spherical(G_CLOSED, om, math.pi - r)
        rhs = (-1.0) ** om * zonal_spherical(G_CLOSED, om, r)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-11, atol=1e-13)


def test_zonal_supplementary_series():
    r = np.array([0.01, 1.0, 30.0, 700.0])
    tau = 0.4
    vals = zonal_spherical(G_OPEN, 1j * tau, r)
    assert np.all(np.isfinite(vals))
    # exact form on moderate radii
    ref = np.sinh(tau * 1.0) / (tau * np.sinh(1.0))
    assert abs(vals[1] - ref) < 1e-12
    # tau = 1 is the constant function
    ones = zonal_spherical(G_OPEN, 1j, r)
    np.testing.assert_allclose(ones, 1.0, rtol=1e-12)


def test_zonal_domain_errors():
    with pytest.raises(DomainError):
        zonal_spherical(G_CLOSED, 2.5, 0.3)
    with pytest.raises(DomainError):
        zonal_spherical(G_CLOSED, 2, 3.5)
    with pytest.raises(DomainError):
        zonal_spherical(G_OPEN, 1 + 1j, 0.3)
    with pytest.raises(DomainError):
        zonal_spherical(G_OPEN, 1.7j, 0.3)
    with pytest.raises(DomainError):
        zonal_spherical(G_OPEN, 1.0, -0.5)
